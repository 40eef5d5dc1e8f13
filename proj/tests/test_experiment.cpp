#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pickmap/errors.hpp"
#include "pickmap/experiment.hpp"

using namespace pickmap;
using nlohmann::json;

namespace {

json pick_doc() {
  return json::parse(R"({"kind": "pick-norm", "nodes": [[0.0], [0.5]], "values": [0.0, 0.25],
                         "expect": {"norm": 0.5}})");
}

json monomial_doc(const char* kind) {
  json d = {{"kind", kind}, {"monomial", {{"p", 2}, {"q", 3}, {"alpha", 0.5}, {"beta", 0.5}}}};
  return d;
}

json union_doc() {
  return json::parse(R"({"kind": "disjoint-union", "seed": 11, "trials": 25,
                         "pieces": [[[-0.6], [-0.3]], [[0.4], [[0.6, 0.1]]]]})");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const Assertion* find(const ExperimentReport& r, const std::string& name) {
  for (const auto& a : r.assertions)
    if (a.name == name)
      return &a;
  return nullptr;
}

} // namespace

TEST_CASE("parse_config: pick-norm") {
  const auto c = parse_config(pick_doc());
  CHECK(c.kind == ExperimentKind::PickNorm);
  CHECK(c.nodes.size() == 2);
  CHECK(c.values[1] == Complex{0.25, 0.0});
  REQUIRE(c.expected_norm.has_value());
  CHECK(*c.expected_norm == 0.5);
  CHECK(c.echo["tolerances"]["tol_psd"] == 1e-10);

  json complex_values = pick_doc();
  complex_values["values"] = json::parse("[[0.0, 1.0], 0.5]");
  CHECK(parse_config(complex_values).values[0] == Complex{0.0, 1.0});
}

TEST_CASE("parse_config: tolerance overrides") {
  json d = pick_doc();
  d["tolerances"] = {{"tol_psd", 1e-9}, {"interior_radii", 8}};
  const auto c = parse_config(d);
  CHECK(c.tol.tol_psd == 1e-9);
  CHECK(c.tol.interior_radii == 8);
  d["tolerances"] = {{"tol_bogus", 1.0}};
  CHECK_THROWS_AS(parse_config(d), InvalidInput);
  d["tolerances"] = {{"tol_psd", -1.0}};
  CHECK_THROWS_AS(parse_config(d), InvalidInput);
}

TEST_CASE("parse_config: rejects malformed documents") {
  CHECK_THROWS_AS(parse_config(json::array()), InvalidInput);
  CHECK_THROWS_AS(parse_config(json{{"kind", "nope"}}), InvalidInput);

  json d = pick_doc();
  d["values"] = json::array({0.0});
  CHECK_THROWS_AS(parse_config(d), InvalidInput);

  d = pick_doc();
  d["nodes"] = json::parse("[[1.0], [0.5]]");
  CHECK_THROWS_AS(parse_config(d), InvalidInput);

  json r = monomial_doc("operator-r");
  r["modes"] = 0;
  CHECK_THROWS_AS(parse_config(r), InvalidInput);

  r = monomial_doc("operator-r");
  r["monomial"]["q"] = 4;
  CHECK_THROWS_AS(parse_config(r), InvalidInput);

  json p = monomial_doc("extension-probe");
  p["target"] = {{"terms", {{{"coeff", 1.0}, {"powers", {1, 0}}}}}};
  p["schedule"] = {4, 4};
  CHECK_THROWS_AS(parse_config(p), InvalidInput);
  p["schedule"] = {4, 8};
  p["target"] = {{"terms", {{{"coeff", 1.0}, {"powers", {1}}}}}};
  CHECK_THROWS_AS(parse_config(p), InvalidInput);

  json u = union_doc();
  u["trials"] = 0;
  CHECK_THROWS_AS(parse_config(u), InvalidInput);
}

TEST_CASE("probe_sample_point: nested spiral") {
  CHECK(probe_sample_point(0) == Complex{0.75, 0.0});
  CHECK(std::abs(probe_sample_point(1)) == doctest::Approx(0.875));
  CHECK(std::abs(probe_sample_point(8)) == doctest::Approx(0.75));
  for (int k = 0; k < 128; ++k)
    CHECK(std::abs(std::abs(probe_sample_point(k)) - (1.0 - std::ldexp(1.0, -(k % 8 + 2)))) < 1e-15);
  CHECK_THROWS_AS(probe_sample_point(-1), InvalidInput);
}

TEST_CASE("run_experiment: pick-norm") {
  const auto r = run_experiment(parse_config(pick_doc()));
  CHECK(r.status == "pass");
  CHECK(std::abs(r.metrics["norm"].get<double>() - 0.5) < 1e-12);
  REQUIRE(find(r, "norm_matches_expected") != nullptr);
  CHECK(find(r, "norm_matches_expected")->passed);
  CHECK(r.tables.count("pick.csv") == 1);
  CHECK(exit_code(r) == 0);

  json wrong = pick_doc();
  wrong["expect"]["norm"] = 0.6;
  const auto f = run_experiment(parse_config(wrong));
  CHECK(f.status == "fail");
  CHECK(exit_code(f) == 1);
}

TEST_CASE("run_experiment: holomap-check") {
  json d = monomial_doc("holomap-check");
  d["grid_size"] = 256;
  d["expect"] = {{"margin", 2.5}};
  const auto r = run_experiment(parse_config(d));
  CHECK(r.status == "pass");
  CHECK(r.metrics["transversality_margin"].get<double>() == doctest::Approx(2.5));

  json folded = {{"kind", "holomap-check"}, {"holomap", json::parse("[[0, 0, 1], [0]]")},
                 {"grid_size", 64}};
  CHECK(run_experiment(parse_config(folded)).status == "fail");
}

TEST_CASE("run_experiment: operator-r") {
  json d = monomial_doc("operator-r");
  d["grid_size"] = 1024;
  d["modes"] = 32;
  const auto r = run_experiment(parse_config(d));
  CHECK(r.status == "pass");
  CHECK(r.metrics["regime"] == "normalized");
  CHECK(r.metrics["gap_modes"] == json::array({1}));
  CHECK(r.metrics["symbol_limit"].get<double>() == 0.4);
  CHECK(r.tables.count("spectrum.csv") == 1);
  CHECK(r.tables.count("m_kernel.csv") == 1);
}

TEST_CASE("run_experiment: extension-probe") {
  json d = monomial_doc("extension-probe");
  d["grid_size"] = 512;
  d["target"] = {{"terms", {{{"coeff", std::sqrt(2.0)}, {"powers", {1, 0}}}}}};
  d["schedule"] = {4, 8, 16};
  d["cap"] = std::sqrt(2.0);
  const auto r = run_experiment(parse_config(d));
  CHECK(r.status == "pass");
  CHECK(r.metrics["monotone"] == true);
  CHECK(r.metrics["cap_respected"] == true);
}

TEST_CASE("run_experiment: disjoint-union") {
  const auto r = run_experiment(parse_config(union_doc()));
  CHECK(r.status == "pass");
  CHECK(r.metrics["passes"] == 25);

  json overlapping = union_doc();
  overlapping["pieces"] = json::parse("[[[0.1]], [[0.12]]]");
  const auto inc = run_experiment(parse_config(overlapping));
  CHECK(inc.status == "inconclusive");
  CHECK(exit_code(inc) == 1);
}

TEST_CASE("disjoint_union_experiment: seeded draws are reproducible") {
  const std::vector<std::vector<BallPoint>> pieces = {{BallPoint{Complex{-0.5, 0.0}}},
                                                      {BallPoint{Complex{0.5, 0.0}}}};
  const auto a = disjoint_union_experiment(pieces, 5, 3);
  const auto b = disjoint_union_experiment(pieces, 5, 3);
  const auto c = disjoint_union_experiment(pieces, 5, 4);
  REQUIRE(a.trials.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(a.trials[i].values == b.trials[i].values);
  CHECK(a.trials[0].values != c.trials[0].values);
  for (const auto& t : a.trials)
    for (const auto& v : t.values)
      CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("write_outputs: CSVs are byte-identical across runs and thread counts") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "pickmap_test_experiment";
  fs::remove_all(root);

  const auto run_to = [&](const json& doc, const std::string& sub) {
    write_outputs(run_experiment(parse_config(doc)), (root / sub).string());
  };
  run_to(union_doc(), "a");
  setenv("PICKMAP_THREADS", "3", 1);
  CHECK(thread_count() == 3);
  run_to(union_doc(), "b");
  unsetenv("PICKMAP_THREADS");
  CHECK(thread_count() == 1);

  for (const char* f : {"separators.csv", "trials.csv", "pieces.csv"}) {
    const auto a = slurp(root / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(root / "b" / f));
  }
  const auto report = json::parse(slurp(root / "a" / "report.json"));
  CHECK(report["status"] == "pass");
  CHECK(report["config"]["trials"] == 25);
  fs::remove_all(root);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.5, -1e-300, 6.02214076e23})
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
}
