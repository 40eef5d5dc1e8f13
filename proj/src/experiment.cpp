#include "pickmap/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "pickmap/errors.hpp"

namespace pickmap {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

unsigned thread_count() {
  if (const char* env = std::getenv("PICKMAP_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0)
      return static_cast<unsigned>(std::min(n, 256L));
  }
  return 1;
}

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers; each index is
// handled by exactly one worker, so results written by index are
// independent of scheduling.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads)
          body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool)
    th.join();
  for (auto& e : errors)
    if (e)
      std::rethrow_exception(e);
}

class Csv {
public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first)
        out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  Csv& cell(double x) { return raw(format_double(x)); }
  Csv& cell(long long x) { return raw(std::to_string(x)); }
  Csv& cell(int x) { return raw(std::to_string(x)); }
  Csv& cell(std::size_t x) { return raw(std::to_string(x)); }
  Csv& cell(bool x) { return raw(x ? "1" : "0"); }
  Csv& empty() { return raw(""); }
  Csv& raw(const std::string& s) {
    if (!row_start_)
      out_ << ',';
    out_ << s;
    row_start_ = false;
    return *this;
  }
  void end_row() {
    out_ << '\n';
    row_start_ = true;
  }
  std::string str() const { return out_.str(); }

private:
  std::ostringstream out_;
  bool row_start_ = true;
};

void expect(ExperimentReport& r, std::string name, double value, const char* relation,
            double threshold) {
  bool ok = false;
  const std::string rel = relation;
  if (rel == "<=")
    ok = value <= threshold;
  else if (rel == "<")
    ok = value < threshold;
  else if (rel == ">=")
    ok = value >= threshold;
  else if (rel == ">")
    ok = value > threshold;
  else if (rel == "==")
    ok = value == threshold;
  r.assertions.push_back(Assertion{std::move(name), value, threshold, rel, ok});
}

void expect_true(ExperimentReport& r, std::string name, bool value) {
  expect(r, std::move(name), value ? 1.0 : 0.0, "==", 1.0);
}

json pick_report_json(const PickReport& p) {
  return {{"norm", p.norm},
          {"min_eig_at_norm", p.min_eig_at_norm},
          {"whitening_jitter", p.whitening_jitter},
          {"gram_min_eig", p.gram_min_eig},
          {"gram_trace", p.gram_trace},
          {"gram_psd", p.gram_psd}};
}

void expect_pick_health(ExperimentReport& r, const std::string& prefix, const PickReport& p,
                        const Tolerances& tol) {
  expect(r, prefix + "gram_psd", p.gram_min_eig, ">=", -tol.tol_psd * p.gram_trace);
  expect(r, prefix + "pick_psd_at_norm", p.min_eig_at_norm, ">=", -tol.tol_psd * p.scale);
}

void run_pick_norm(const ExperimentConfig& c, ExperimentReport& r) {
  const PickReport p = multiplier_norm(PickProblem{c.nodes, c.values}, c.tol);
  r.metrics = pick_report_json(p);
  r.metrics["nodes"] = c.nodes.size();
  r.metrics["dimension"] = c.nodes.front().dim();

  double max_abs = 0.0;
  for (const auto& v : c.values)
    max_abs = std::max(max_abs, std::abs(v));
  expect_pick_health(r, "", p, c.tol);
  expect(r, "norm_dominates_values", p.norm, ">=", max_abs);
  if (c.expected_norm)
    expect(r, "norm_matches_expected", std::abs(p.norm - *c.expected_norm), "<=", c.expected_tol);

  Csv csv({"nodes", "dimension", "norm", "min_eig_at_norm", "whitening_jitter", "gram_min_eig",
           "gram_trace"});
  csv.cell(c.nodes.size()).cell(c.nodes.front().dim()).cell(p.norm).cell(p.min_eig_at_norm);
  csv.cell(p.whitening_jitter).cell(p.gram_min_eig).cell(p.gram_trace).end_row();
  r.tables["pick.csv"] = csv.str();
}

void run_holomap_check(const ExperimentConfig& c, ExperimentReport& r) {
  const Holomap& h = c.map();
  const BoundaryGrid grid(c.grid_size);
  const auto profile = transversality_profile(h, grid);
  const double margin = *std::min_element(profile.begin(), profile.end());
  const auto inj = boundary_injectivity_check(h, grid, c.tol);
  const auto diag = check_holomap(h, grid, c.tol);

  r.metrics["transversality_margin"] = margin;
  r.metrics["transversality_max"] = *std::max_element(profile.begin(), profile.end());
  r.metrics["boundary_injective"] = inj.injective;
  r.metrics["min_boundary_separation"] = inj.min_separation;
  if (inj.witness)
    r.metrics["injectivity_witness"] = {inj.witness->first, inj.witness->second};
  r.metrics["max_interior_norm_sq"] = diag.max_interior_norm_sq;
  r.metrics["min_boundary_norm_sq"] = diag.min_boundary_norm_sq;
  r.metrics["max_boundary_norm_sq"] = diag.max_boundary_norm_sq;

  expect(r, "interior_inside_ball", diag.max_interior_norm_sq, "<", 1.0);
  if (c.boundary_normalized)
    expect(r, "boundary_normalized", diag.min_boundary_norm_sq, ">=", 1.0 - c.tol.tol_proper);
  expect(r, "transversal", margin, ">", c.tol.tol_transversal);
  expect(r, "boundary_injective", inj.min_separation, ">", c.tol.tol_inj);
  if (c.expected_margin) {
    double worst = 0.0;
    for (double v : profile)
      worst = std::max(worst, std::abs(v - *c.expected_margin));
    r.metrics["max_margin_deviation"] = worst;
    expect(r, "margin_matches_expected_at_every_node", worst, "<=", c.expected_tol);
  }

  Csv csv({"node", "theta", "norm_sq", "transversality"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv.cell(k).cell(std::arg(grid.node(k))).cell(norm_squared(h.eval(grid.node(k))));
    csv.cell(profile[k]).end_row();
  }
  r.tables["boundary.csv"] = csv.str();
}

void run_operator_r(const ExperimentConfig& c, ExperimentReport& r) {
  const Holomap& h = c.map();
  const BoundaryGrid grid(c.grid_size);
  const SpectrumReport s = spectrum_report(h, grid, c.modes, c.tol);
  const double trace = s.r.entries.trace().real();

  r.metrics["grid_size"] = c.grid_size;
  r.metrics["modes"] = c.modes;
  r.metrics["base_point"] = json::array({0.0, 0.0});
  r.metrics["regime"] = to_string(s.r.regime);
  r.metrics["transversality_margin"] = s.r.transversality;
  r.metrics["hermitian_defect"] = s.hermitian_defect;
  r.metrics["min_eigenvalue"] = s.eigenvalues(0);
  r.metrics["min_invertible_eigenvalue"] = s.min_invertible_eigenvalue;
  r.metrics["max_off_diagonal"] = s.r.max_off_diagonal();
  r.metrics["near_zero_count"] = s.near_zero.size();
  r.metrics["near_zero_gap_mass"] = s.near_zero_gap_mass;
  json near_modes = json::array();
  for (auto i : s.near_zero)
    near_modes.push_back(s.dominant_mode[static_cast<std::size_t>(i)]);
  r.metrics["near_zero_modes"] = near_modes;
  if (s.gaps_known)
    r.metrics["gap_modes"] = s.gap_modes;
  // Mean of the discretized symbol; constant for monomial maps.
  r.metrics["symbol_quadrature"] = s.r.toeplitz_part.diagonal().real().mean();

  expect(r, "r_hermitian", s.hermitian_defect, "<=", c.tol.tol_herm);
  expect(r, "r_psd", s.eigenvalues(0), ">=", -c.tol.tol_psd * std::abs(trace));
  if (s.gaps_known) {
    expect(r, "kernel_count_matches_gaps", static_cast<double>(s.near_zero.size()), "==",
           static_cast<double>(s.gap_modes.size()));
    expect_true(r, "kernel_concentrated_on_gap_modes", s.kernel_matches_gaps);
  }

  std::vector<double> oracle;
  if (c.monomial) {
    const MonomialMap& mm = *c.monomial;
    const double symbol = toeplitz_symbol(mm);
    double diag_err = 0.0;
    for (int m = 0; m <= c.modes; ++m) {
      oracle.push_back(c_m_oracle(mm, m));
      diag_err = std::max(diag_err, std::abs(s.r.entries(m, m).real() - oracle.back()));
    }
    double head = 0.0, tail = 0.0;
    for (int m = 8; m <= 24; ++m)
      head = std::max(head, std::abs(c_m_oracle(mm, m) - symbol));
    for (int m = 48; m <= 64; ++m)
      tail = std::max(tail, std::abs(c_m_oracle(mm, m) - symbol));
    r.metrics["symbol_limit"] = symbol;
    r.metrics["max_diag_oracle_error"] = diag_err;
    r.metrics["symbol_deviation_modes_8_24"] = head;
    r.metrics["symbol_deviation_modes_48_64"] = tail;

    expect(r, "off_diagonal_vanishes", s.r.max_off_diagonal(), "<=", c.tol.tol_oracle);
    expect(r, "diagonal_matches_oracle", diag_err, "<=", c.tol.tol_oracle);
    expect(r, "toeplitz_symbol_quadrature",
           std::abs(s.r.toeplitz_part.diagonal().real().mean() - symbol), "<=", c.tol.tol_oracle);
    expect(r, "oracle_tail_approaches_symbol", tail, "<", head);
  }

  Csv spectrum({"mode", "eigenvalue", "oracle_value", "abs_error"});
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s.eigenvalues.size()));
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return s.dominant_mode[static_cast<std::size_t>(a)] <
           s.dominant_mode[static_cast<std::size_t>(b)];
  });
  for (auto i : order) {
    const int mode = s.dominant_mode[static_cast<std::size_t>(i)];
    spectrum.cell(mode).cell(s.eigenvalues(i));
    if (!oracle.empty()) {
      const double o = oracle[static_cast<std::size_t>(mode)];
      spectrum.cell(o).cell(std::abs(s.eigenvalues(i) - o));
    } else {
      spectrum.empty().empty();
    }
    spectrum.end_row();
  }
  r.tables["spectrum.csv"] = spectrum.str();

  Csv kernel({"grid_size", "sup_abs", "hs_norm", "hs_norm_sq", "diagonal_fill_discrepancy"});
  std::vector<std::size_t> sizes;
  if (c.hs_refinement && c.grid_size % 2 == 0 && c.grid_size >= 8)
    sizes.push_back(c.grid_size / 2);
  sizes.push_back(c.grid_size);
  std::vector<double> hs;
  for (auto n : sizes) {
    const MKernel mk = m_kernel_matrix(h, BoundaryGrid(n), c.tol);
    hs.push_back(mk.hs_norm);
    kernel.cell(n).cell(mk.sup_abs).cell(mk.hs_norm).cell(mk.hs_norm_sq);
    kernel.cell(mk.diagonal_fill_discrepancy).end_row();
    if (n == c.grid_size) {
      r.metrics["m_kernel_sup"] = mk.sup_abs;
      r.metrics["m_kernel_hs_norm"] = mk.hs_norm;
      r.metrics["diagonal_fill_discrepancy"] = mk.diagonal_fill_discrepancy;
    }
  }
  if (hs.size() == 2) {
    const double rel = std::abs(hs[1] - hs[0]) / std::max(hs[1], 1e-300);
    r.metrics["hs_relative_change"] = rel;
    expect(r, "hs_norm_refinement_stable", rel, "<", c.tol.tol_hs_rel);
  }
  r.tables["m_kernel.csv"] = kernel.str();
}

void run_extension_probe(const ExperimentConfig& c, ExperimentReport& r) {
  const BoundaryGrid grid(c.grid_size);
  const ProbeResult p = extension_probe(c.map(), c.target, c.schedule, grid, c.cap, c.tol);

  r.metrics["transversality_margin"] = p.transversality;
  r.metrics["boundary_injective"] = p.injectivity.injective;
  json norms = json::array();
  for (const auto& s : p.steps)
    norms.push_back(s.report.norm);
  r.metrics["norms"] = norms;
  r.metrics["monotone"] = p.monotone;
  if (p.cap_respected)
    r.metrics["cap_respected"] = *p.cap_respected;

  Csv csv({"n", "norm", "min_eig_at_norm", "whitening_jitter", "gram_min_eig", "monotone",
           "within_cap"});
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& s = p.steps[i];
    const std::string tag = "n" + std::to_string(s.n) + "_";
    expect_pick_health(r, tag, s.report, c.tol);
    if (i > 0)
      expect(r, tag + "nondecreasing", s.report.norm, ">=",
             p.steps[i - 1].report.norm - c.tol.tol_eig);
    if (c.cap)
      expect(r, tag + "within_cap", s.report.norm, "<=", *c.cap + c.tol.tol_cap);
    csv.cell(s.n).cell(s.report.norm).cell(s.report.min_eig_at_norm);
    csv.cell(s.report.whitening_jitter).cell(s.report.gram_min_eig).cell(s.monotone);
    if (s.within_cap)
      csv.cell(*s.within_cap);
    else
      csv.empty();
    csv.end_row();
  }
  r.tables["probe.csv"] = csv.str();
}

void run_disjoint_union(const ExperimentConfig& c, ExperimentReport& r) {
  const DisjointUnionResult d = disjoint_union_experiment(c.pieces, c.trials, c.seed, c.tol);
  r.metrics["min_separation"] = d.min_separation;
  r.metrics["pieces"] = c.pieces.size();
  expect(r, "pieces_separated", d.min_separation, ">", c.tol.tol_sep);

  Csv seps({"piece", "nodes", "separator_norm"});
  json sep_norms = json::array();
  for (std::size_t i = 0; i < d.separators.size(); ++i) {
    seps.cell(i).cell(c.pieces[i].size()).cell(d.separators[i].norm).end_row();
    sep_norms.push_back(d.separators[i].norm);
  }
  r.metrics["separator_norms"] = sep_norms;
  r.tables["separators.csv"] = seps.str();

  if (!d.separated) {
    r.status = "inconclusive";
    return;
  }

  bool grams_ok = true;
  for (const auto& s : d.separators)
    grams_ok = grams_ok && s.gram_psd;
  for (const auto& t : d.trials)
    for (const auto& rep : t.report.reports)
      grams_ok = grams_ok && rep.gram_psd;
  expect_true(r, "all_grams_psd", grams_ok);

  r.metrics["trials"] = d.trials.size();
  r.metrics["passes"] = d.passes;
  expect(r, "combination_bound_holds", static_cast<double>(d.passes), "==",
         static_cast<double>(d.trials.size()));

  Csv trials({"trial", "union_norm", "bound", "holds"});
  for (std::size_t i = 0; i < d.trials.size(); ++i) {
    const auto& u = d.trials[i].report;
    trials.cell(i).cell(u.union_norm).cell(u.bound).cell(u.holds).end_row();
  }
  r.tables["trials.csv"] = trials.str();

  Csv pieces({"trial", "piece", "piece_norm", "separator_norm"});
  for (std::size_t i = 0; i < d.trials.size(); ++i)
    for (std::size_t k = 0; k < c.pieces.size(); ++k)
      pieces.cell(i).cell(k).cell(d.trials[i].report.piece_norms[k])
          .cell(d.trials[i].report.separator_norms[k]).end_row();
  r.tables["pieces.csv"] = pieces.str();
}

} // namespace

Complex probe_sample_point(int k) {
  if (k < 0)
    throw InvalidInput("probe_sample_point: negative index");
  const double radius = 1.0 - std::ldexp(1.0, -(k % 8 + 2));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  return std::polar(radius, golden * static_cast<double>(k));
}

ProbeResult extension_probe(const Holomap& h, const AmbientPolynomial& target,
                            std::span<const int> schedule, const BoundaryGrid& grid,
                            std::optional<double> cap, const Tolerances& tol) {
  ProbeResult out;
  out.injectivity = boundary_injectivity_check(h, grid, tol);
  if (!out.injectivity.injective)
    throw NumericalFailure("extension_probe: holomap is not one-to-one on the boundary grid");
  out.transversality = transversality_margin(h, grid);
  if (!(out.transversality > tol.tol_transversal))
    throw NumericalFailure("extension_probe: transversality not certified on the boundary grid");

  const int largest = schedule.empty() ? 0 : *std::max_element(schedule.begin(), schedule.end());
  std::vector<BallPoint> nodes;
  std::vector<Complex> values;
  for (int k = 0; k < largest; ++k) {
    nodes.emplace_back(h.eval(probe_sample_point(k)), tol.eps_ball);
    values.push_back(target(nodes.back().coords()));
  }

  out.steps.resize(schedule.size());
  parallel_for(schedule.size(), thread_count(), [&](std::size_t i) {
    const auto n = static_cast<std::size_t>(schedule[i]);
    if (n == 0)
      throw InvalidInput("extension_probe: sample sizes must be positive");
    PickProblem p{{nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(n)},
                  {values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n)}};
    out.steps[i].n = schedule[i];
    out.steps[i].report = multiplier_norm(p, tol);
  });

  if (cap)
    out.cap_respected = true;
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    auto& s = out.steps[i];
    if (i > 0)
      s.monotone = s.report.norm >= out.steps[i - 1].report.norm - tol.tol_eig;
    out.monotone = out.monotone && s.monotone;
    if (cap) {
      s.within_cap = s.report.norm <= *cap + tol.tol_cap;
      out.cap_respected = *out.cap_respected && *s.within_cap;
    }
  }
  return out;
}

DisjointUnionResult disjoint_union_experiment(const std::vector<std::vector<BallPoint>>& pieces,
                                              int trials, std::uint64_t seed,
                                              const Tolerances& tol) {
  if (pieces.empty())
    throw InvalidInput("disjoint_union_experiment: no pieces");
  if (trials < 0)
    throw InvalidInput("disjoint_union_experiment: negative trial count");

  DisjointUnionResult d;
  d.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j)
      for (const auto& a : pieces[i])
        for (const auto& b : pieces[j])
          d.min_separation = std::min(d.min_separation, distance(a, b));
  d.separated = d.min_separation > tol.tol_sep;

  std::vector<SamplePiece> base;
  std::size_t total = 0;
  for (const auto& p : pieces) {
    base.push_back(SamplePiece{p, std::vector<Complex>(p.size())});
    total += p.size();
  }
  d.separators = separator_bounds(base, tol);
  if (!d.separated)
    return d;

  std::mt19937_64 rng(seed);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  d.trials.resize(static_cast<std::size_t>(trials));
  for (auto& t : d.trials) {
    t.values.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
      const double radius = std::sqrt(unit());
      const double angle = 2.0 * std::numbers::pi * unit();
      t.values.push_back(std::polar(radius, angle));
    }
  }

  parallel_for(d.trials.size(), thread_count(), [&](std::size_t i) {
    auto pieces_i = base;
    std::size_t offset = 0;
    for (auto& p : pieces_i)
      for (auto& v : p.values)
        v = d.trials[i].values[offset++];
    d.trials[i].report = union_norm_check(pieces_i, d.separators, tol);
  });
  for (const auto& t : d.trials)
    d.passes += t.report.holds ? 1 : 0;
  return d;
}

json ExperimentReport::to_json() const {
  json a = json::array();
  for (const auto& x : assertions)
    a.push_back({{"name", x.name},
                 {"value", x.value},
                 {"relation", x.relation},
                 {"threshold", x.threshold},
                 {"passed", x.passed}});
  json files = json::array();
  for (const auto& [name, _] : tables)
    files.push_back(name);
  return {{"config", config},     {"metrics", metrics},
          {"assertions", a},      {"status", status},
          {"outputs", files},     {"wall_clock_seconds", wall_seconds}};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.config = config.echo;
  switch (config.kind) {
  case ExperimentKind::PickNorm:
    run_pick_norm(config, r);
    break;
  case ExperimentKind::HolomapCheck:
    run_holomap_check(config, r);
    break;
  case ExperimentKind::OperatorR:
    run_operator_r(config, r);
    break;
  case ExperimentKind::ExtensionProbe:
    run_extension_probe(config, r);
    break;
  case ExperimentKind::DisjointUnion:
    run_disjoint_union(config, r);
    break;
  }
  if (r.status.empty()) {
    const bool ok = std::all_of(r.assertions.begin(), r.assertions.end(),
                                [](const Assertion& a) { return a.passed; });
    r.status = ok ? "pass" : "fail";
  }
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_outputs(const ExperimentReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir.empty() ? "." : dir);
  fs::create_directories(root);
  for (const auto& [name, text] : report.tables) {
    std::ofstream f(root / name, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f)
      throw std::runtime_error("cannot write " + (root / name).string());
  }
  std::ofstream f(root / "report.json", std::ios::binary | std::ios::trunc);
  f << report.to_json().dump(2) << '\n';
  if (!f)
    throw std::runtime_error("cannot write " + (root / "report.json").string());
}

int exit_code(const ExperimentReport& report) { return report.passed() ? 0 : 1; }

} // namespace pickmap
