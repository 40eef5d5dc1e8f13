// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pickmap/experiment.hpp"

using namespace pickmap;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

// Every Gram built along the way is recorded here for the infrastructure check.
struct GramLog {
  int count = 0;
  int failures = 0;
  void add(bool psd) {
    ++count;
    failures += psd ? 0 : 1;
  }
  void add(const PickReport& r) { add(r.gram_psd); }
} grams;

BallPoint real_point(double x) { return BallPoint{Complex{x, 0.0}}; }

const MonomialMap k23{2, 3, 0.5, 0.5};
const MonomialMap k25{2, 5, 0.5, 0.5};

Outcome schwarz_two_node() {
  double worst = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double r = 0.1 * i;
    const auto rep = multiplier_norm({{real_point(0.0), real_point(r)}, {0.0, r / 2.0}});
    grams.add(rep);
    worst = std::max(worst, std::abs(rep.norm - 0.5));
  }
  return {worst <= 1e-10, "max |t - 0.5| = " + fmt("%.3e", worst)};
}

Outcome separator_closed_form() {
  double worst = 0.0;
  const BallPoint a[] = {real_point(0.0)};
  for (int i = 1; i <= 9; ++i) {
    const double r = 0.1 * i;
    const BallPoint b[] = {real_point(r)};
    const auto rep = separator_bound(a, b);
    grams.add(rep);
    worst = std::max(worst, std::abs(rep.norm - 1.0 / r));
  }
  return {worst <= 1e-10, "max |s - 1/r| = " + fmt("%.3e", worst)};
}

Outcome transversality_example() {
  const auto profile = transversality_profile(k23.to_holomap(), BoundaryGrid(1024));
  double worst = 0.0;
  for (double v : profile)
    worst = std::max(worst, std::abs(v - 2.5));
  return {profile.size() == 1024 && worst <= 1e-12,
          "nodes = " + std::to_string(profile.size()) + ", max |margin - 2.5| = " + fmt("%.3e", worst)};
}

Outcome oracle_quadrature() {
  const auto r = r_matrix(k23.to_holomap(), BoundaryGrid(1024), 32);
  double diag = 0.0;
  for (int m = 0; m <= 32; ++m)
    diag = std::max(diag, std::abs(r.entries(m, m) - c_m_oracle(k23, m)));
  grams.add(is_hermitian_psd(r.entries));
  const double off = r.max_off_diagonal();
  return {off <= 1e-8 && diag <= 1e-8,
          "max off-diagonal = " + fmt("%.3e", off) + ", max diag error = " + fmt("%.3e", diag)};
}

Outcome gap_structure() {
  const BoundaryGrid grid(1024);
  const auto one_gap = [&](const MonomialMap& m, std::vector<int> expected_modes) {
    const auto s = spectrum_report(m.to_holomap(), grid, 32);
    grams.add(s.psd);
    std::vector<int> modes;
    double min_mass = 1.0;
    int small = 0;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
      if (s.eigenvalues(i) < 1e-6) {
        ++small;
        modes.push_back(s.dominant_mode[static_cast<std::size_t>(i)]);
        const CVector v = s.eigenvectors.col(i);
        double mass = 0.0;
        for (int g : expected_modes)
          mass += std::norm(v(g));
        min_mass = std::min(min_mass, mass / v.squaredNorm());
      }
    std::sort(modes.begin(), modes.end());
    const bool ok = small == static_cast<int>(expected_modes.size()) && modes == expected_modes &&
                    min_mass >= 0.99;
    return std::make_pair(ok, std::to_string(small) + " small, mass " + fmt("%.6f", min_mass));
  };
  const auto [ok23, d23] = one_gap(k23, {1});
  const auto [ok25, d25] = one_gap(k25, {1, 3});
  return {ok23 && ok25, "p=2,q=3: " + d23 + "; p=2,q=5: " + d25};
}

Outcome toeplitz_convergence() {
  const double symbol = toeplitz_symbol(k23);
  double head = 0.0, tail = 0.0;
  for (int m = 8; m <= 24; ++m)
    head = std::max(head, std::abs(c_m_oracle(k23, m) - 0.4));
  for (int m = 48; m <= 64; ++m)
    tail = std::max(tail, std::abs(c_m_oracle(k23, m) - 0.4));
  return {symbol == 0.4 && tail < head, "symbol = " + fmt("%.17g", symbol) + ", tail " +
                                            fmt("%.3e", tail) + " < head " + fmt("%.3e", head)};
}

Outcome hs_stability() {
  const auto h = k23.to_holomap();
  const double coarse = m_kernel_matrix(h, BoundaryGrid(512)).hs_norm;
  const double fine = m_kernel_matrix(h, BoundaryGrid(1024)).hs_norm;
  const double rel = std::abs(fine - coarse) / fine;
  return {rel < 0.02, "HS(512) = " + fmt("%.10f", coarse) + ", HS(1024) = " + fmt("%.10f", fine) +
                          ", relative change " + fmt("%.3e", rel)};
}

Outcome extension_probe_run() {
  AmbientPolynomial target{{{Complex{std::sqrt(2.0), 0.0}, {1, 0}}}};
  const int schedule[] = {4, 8, 16, 32, 64};
  const auto p = extension_probe(k23.to_holomap(), target, schedule, BoundaryGrid(1024),
                                 std::sqrt(2.0));
  bool ok = true;
  double prev = 0.0, worst_drop = 0.0, top = 0.0;
  for (const auto& s : p.steps) {
    grams.add(s.report);
    worst_drop = std::max(worst_drop, prev - s.report.norm);
    ok = ok && s.report.norm >= prev - 1e-10 && s.report.norm <= std::sqrt(2.0) + 1e-8;
    prev = s.report.norm;
    top = std::max(top, s.report.norm);
  }
  return {ok, "t_64 = " + fmt("%.12f", top) + ", max decrease " + fmt("%.3e", worst_drop)};
}

const std::vector<std::vector<BallPoint>> kUnionPieces = {
    {real_point(-0.6), real_point(-0.45), real_point(-0.3), BallPoint{Complex{-0.5, 0.2}}},
    {real_point(0.4), real_point(0.55), real_point(0.7), BallPoint{Complex{0.5, -0.2}}},
};

Outcome disjoint_union() {
  const auto d = disjoint_union_experiment(kUnionPieces, 100, 20240917);
  for (const auto& s : d.separators)
    grams.add(s);
  double worst = -1e300;
  for (const auto& t : d.trials) {
    for (const auto& r : t.report.reports)
      grams.add(r);
    worst = std::max(worst, t.report.union_norm - t.report.bound);
  }
  return {d.separated && d.passes == 100 && d.trials.size() == 100,
          std::to_string(d.passes) + "/100 hold, max t_union - bound = " + fmt("%.3e", worst)};
}

Outcome infrastructure() {
  // Reruns of every experiment kind must give identical CSV text.
  const nlohmann::json docs[] = {
      nlohmann::json::parse(R"({"kind": "pick-norm", "nodes": [[0.0], [0.5]], "values": [0.0, 0.25]})"),
      nlohmann::json::parse(R"({"kind": "holomap-check", "grid_size": 256,
                                "monomial": {"p": 2, "q": 3, "alpha": 0.5}})"),
      nlohmann::json::parse(R"({"kind": "operator-r", "grid_size": 512, "modes": 16,
                                "hs_refinement": false,
                                "monomial": {"p": 2, "q": 3, "alpha": 0.5}})"),
      nlohmann::json::parse(R"({"kind": "extension-probe", "grid_size": 256,
                                "monomial": {"p": 2, "q": 3, "alpha": 0.5},
                                "target": {"terms": [{"coeff": 1.4142135623730951, "powers": [1, 0]}]},
                                "schedule": [4, 8, 16]})"),
      nlohmann::json::parse(R"({"kind": "disjoint-union", "seed": 5, "trials": 20,
                                "pieces": [[[-0.5], [-0.3]], [[0.4], [0.6]]]})"),
  };
  int identical = 0, total = 0;
  for (const auto& doc : docs) {
    const auto cfg = parse_config(doc);
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    for (const auto& [name, text] : a.tables) {
      ++total;
      const auto it = b.tables.find(name);
      identical += (it != b.tables.end() && it->second == text) ? 1 : 0;
    }
  }
  const bool ok = grams.failures == 0 && grams.count > 0 && identical == total && total > 0;
  return {ok, std::to_string(grams.count - grams.failures) + "/" + std::to_string(grams.count) +
                  " Grams PSD, " + std::to_string(identical) + "/" + std::to_string(total) +
                  " CSVs identical"};
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"two-node Pick closed form", 1.0, schwarz_two_node},
      {"separator closed form", 1.0, separator_closed_form},
      {"transversality margin 2.5 on 1024 nodes", 1.0, transversality_example},
      {"R diagonal and equal to c_m oracle", 10.0, oracle_quadrature},
      {"kernel of R on gap modes", 10.0, gap_structure},
      {"Toeplitz symbol and oracle tail", 1.0, toeplitz_convergence},
      {"Hilbert-Schmidt stability 512 vs 1024", 20.0, hs_stability},
      {"extension probe monotone and capped", 5.0, extension_probe_run},
      {"disjoint-union combination bound", 5.0, disjoint_union},
      {"Gram PSD and reproducible CSV", 60.0, infrastructure},
  };

  int failed = 0;
  int index = 1;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool ok = o.passed && in_time;
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d: %s [%s] (%.3f s, budget %.0f s%s)\n", ok ? "PASS" : "FAIL", index++,
                c.name, o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
