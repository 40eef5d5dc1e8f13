#pragma once

///
/// \file experiment.hpp
///
/// Config-driven experiments. A config is a single JSON document; a run
/// produces an ExperimentReport holding metrics, assertions (each with its
/// threshold) and CSV tables, which write_outputs() serializes into an
/// output directory as report.json plus one or more *.csv files.
///

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pickmap/holomap.hpp"
#include "pickmap/kernel.hpp"
#include "pickmap/operator_r.hpp"
#include "pickmap/pick.hpp"

namespace pickmap {

enum class ExperimentKind { PickNorm, HolomapCheck, OperatorR, ExtensionProbe, DisjointUnion };

const char* to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

/// Polynomial in the ambient coordinates w_1..w_d of the ball.
struct AmbientPolynomial {
  struct Term {
    Complex coeff;
    std::vector<int> powers;
  };
  std::vector<Term> terms;

  Complex operator()(std::span<const Complex> w) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PickNorm;
  Tolerances tol;
  std::uint64_t seed = 0;
  std::string output_dir;

  // pick-norm
  std::vector<BallPoint> nodes;
  std::vector<Complex> values;
  std::optional<double> expected_norm;
  double expected_tol = 1e-10;

  // holomap-check, operator-r, extension-probe
  std::optional<Holomap> holomap;
  std::optional<MonomialMap> monomial;
  std::size_t grid_size = 1024;
  bool boundary_normalized = false;
  std::optional<double> expected_margin;

  // operator-r
  int modes = 32;
  bool hs_refinement = true;

  // extension-probe
  AmbientPolynomial target;
  std::optional<double> cap;
  std::vector<int> schedule;

  // disjoint-union
  std::vector<std::vector<BallPoint>> pieces;
  int trials = 100;

  /// Fully resolved config (defaults filled in); re-running it reproduces
  /// the report.
  nlohmann::json echo;

  const Holomap& map() const;
};

/// Throws InvalidInput on any missing or malformed field.
ExperimentConfig parse_config(const nlohmann::json& doc);

struct Assertion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "==" (booleans are 1/0)
  bool passed = false;
};

struct ExperimentReport {
  nlohmann::json config;
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> tables;  // file name -> CSV text
  std::string status;                         // "pass", "fail" or "inconclusive"
  double wall_seconds = 0.0;

  bool passed() const { return status == "pass"; }
  nlohmann::json to_json() const;
};

/// Golden-angle spiral in the disk: radius 1 - 2^-(k mod 8 + 2), angle
/// k * pi (3 - sqrt 5). Prefixes are nested.
Complex probe_sample_point(int k);

struct ProbeStep {
  int n = 0;
  PickReport report;
  bool monotone = true;           // t_n >= t_{previous} - tol_eig
  std::optional<bool> within_cap; // t_n <= cap + tol_cap
};

struct ProbeResult {
  std::vector<ProbeStep> steps;
  bool monotone = true;
  std::optional<bool> cap_respected;
  double transversality = 0.0;
  InjectivityReport injectivity;
};

/// Pick norms of F on nested samples h(z_0..z_{n-1}) for n in `schedule`.
/// Throws NumericalFailure when h fails the boundary certificates on `grid`.
ProbeResult extension_probe(const Holomap& h, const AmbientPolynomial& target,
                            std::span<const int> schedule, const BoundaryGrid& grid,
                            std::optional<double> cap, const Tolerances& tol = {});

struct UnionTrial {
  std::vector<Complex> values;  // concatenated over pieces
  UnionReport report;
};

struct DisjointUnionResult {
  double min_separation = 0.0;
  bool separated = false;        // min_separation > tol_sep; trials skipped otherwise
  std::vector<PickReport> separators;
  std::vector<UnionTrial> trials;
  int passes = 0;
};

/// Random values drawn uniformly from the closed unit disk with a
/// mt19937_64 stream seeded by `seed`; trial i uses the i-th block of draws.
DisjointUnionResult disjoint_union_experiment(const std::vector<std::vector<BallPoint>>& pieces,
                                              int trials, std::uint64_t seed,
                                              const Tolerances& tol = {});

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes report.json and every table into `dir`, creating it if needed.
void write_outputs(const ExperimentReport& report, const std::string& dir);

/// 0 pass, 1 assertion failure or inconclusive.
int exit_code(const ExperimentReport& report);

/// "%.17g" formatting used for every float written to CSV.
std::string format_double(double x);

/// Threads for batch work, from PICKMAP_THREADS (default 1).
unsigned thread_count();

} // namespace pickmap
