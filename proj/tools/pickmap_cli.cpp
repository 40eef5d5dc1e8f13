// Experiment runner.
//
//   pickmap <kind> --config <path> [--out <dir>] [--seed <u64>]
//
// Exit status: 0 all assertions pass, 1 assertion failure (or an
// inconclusive disjoint-union run), 2 invalid config, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pickmap/errors.hpp"
#include "pickmap/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void write_failure(const std::string& dir, const std::string& status, const std::string& what) {
  if (dir.empty())
    return;
  try {
    pickmap::ExperimentReport r;
    r.status = status;
    r.metrics["error"] = what;
    pickmap::write_outputs(r, dir);
  } catch (...) {
  }
}

int run(const std::string& kind, const Options& opt) {
  nlohmann::json doc;
  try {
    std::ifstream in(opt.config);
    if (!in)
      throw pickmap::InvalidInput("cannot open config file " + opt.config);
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config is not valid JSON: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pickmap::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (!doc.is_object()) {
    std::cerr << "error: config must be a JSON object\n";
    return kExitConfig;
  }
  if (!doc.contains("kind"))
    doc["kind"] = kind;
  if (doc["kind"] != kind) {
    std::cerr << "error: config kind " << doc["kind"] << " does not match subcommand " << kind
              << '\n';
    return kExitConfig;
  }
  if (opt.seed)
    doc["seed"] = *opt.seed;

  std::string out_dir = opt.out;
  try {
    auto config = pickmap::parse_config(doc);
    if (out_dir.empty())
      out_dir = config.output_dir.empty() ? "." : config.output_dir;
    config.output_dir = out_dir;

    const auto report = pickmap::run_experiment(config);
    pickmap::write_outputs(report, out_dir);
    for (const auto& a : report.assertions)
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << "  value=" << pickmap::format_double(a.value)
                << ' ' << a.relation << ' ' << pickmap::format_double(a.threshold) << '\n';
    std::cout << "status: " << report.status << "  (" << out_dir << "/report.json)\n";
    return pickmap::exit_code(report);
  } catch (const pickmap::InvalidInput& e) {
    std::cerr << "error: invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pickmap::NumericalFailure& e) {
    std::cerr << "error: numerical failure: " << e.what() << '\n';
    write_failure(out_dir, "numerical-failure", e.what());
    return kExitNumerical;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drury-Arveson multiplier and holomap experiments"};
  app.require_subcommand(1);

  Options opt;
  const char* kinds[] = {"pick-norm", "holomap-check", "operator-r", "extension-probe",
                         "disjoint-union"};
  std::string chosen;
  for (const char* k : kinds) {
    auto* sub = app.add_subcommand(k, std::string("run a ") + k + " experiment");
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "output directory (report.json and CSV tables)");
    sub->add_option("--seed", opt.seed, "random seed, overrides the config");
    sub->callback([&chosen, k] { chosen = k; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  return run(chosen, opt);
}
