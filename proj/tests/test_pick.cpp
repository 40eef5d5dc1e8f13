#include <doctest.h>

#include <cmath>

#include "pickmap/errors.hpp"
#include "pickmap/pick.hpp"
#include "test_util.hpp"

using namespace pickmap;
using pickmap::testing::real_point;

namespace {

// Independent route: bisection on t using only the sign of the smallest
// eigenvalue of the Pick matrix (no whitening, no generalized eigenproblem).
double bisection_norm(const std::vector<BallPoint>& nodes, const std::vector<Complex>& values) {
  const CMatrix K = gram(nodes).entries;
  double lo = 0.0;
  for (const auto& v : values)
    lo = std::max(lo, std::abs(v));
  double hi = std::max(1.0, 2.0 * lo);
  const auto feasible = [&](double t) {
    CMatrix P = pick_matrix(K, values, t);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(P, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-13 * t * t * K.trace().real();
  };
  while (!feasible(hi))
    hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<Complex> random_values(std::mt19937_64& rng, std::size_t n) {
  std::vector<Complex> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(pickmap::testing::random_disk(rng));
  return v;
}

} // namespace

TEST_CASE("multiplier_norm: single node") {
  const auto r = multiplier_norm({{BallPoint{Complex{0.3, 0.2}, Complex{0.1, 0.0}}}, {Complex{0.6, -0.8}}});
  CHECK(r.norm == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.whitening_jitter == 0.0);
}

TEST_CASE("multiplier_norm: Schwarz two-node closed form") {
  const auto r = multiplier_norm({{real_point(0.0), real_point(0.5)}, {0.0, 0.25}});
  CHECK(std::abs(r.norm - 0.5) < 1e-12);
  CHECK(r.min_eig_at_norm >= -1e-10 * r.scale);

  for (int i = 1; i <= 9; ++i) {
    const double rad = 0.1 * i;
    for (double s : {rad / 2.0, rad / 5.0, 0.3 * rad}) {
      const auto rep = multiplier_norm({{real_point(0.0), real_point(rad)}, {0.0, s}});
      CHECK(std::abs(rep.norm - s / rad) < 1e-10);
    }
  }
}

TEST_CASE("multiplier_norm: constants") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto nodes = pickmap::testing::random_nodes(rng, 1 + trial % 9, 1 + trial % 3);
    const Complex c = pickmap::testing::random_disk(rng, 3.0);
    const auto r = multiplier_norm({nodes, std::vector<Complex>(nodes.size(), c)});
    CHECK(std::abs(r.norm - std::abs(c)) <= 1e-12 * std::max(1.0, std::abs(c)));
  }
}

TEST_CASE("multiplier_norm: errors") {
  CHECK_THROWS_AS(multiplier_norm({{real_point(0.1)}, {1.0, 2.0}}), InvalidInput);
  CHECK_THROWS_AS(multiplier_norm({{}, {}}), InvalidInput);
  CHECK_THROWS_AS(multiplier_norm({{real_point(0.1), real_point(0.1)}, {1.0, 2.0}}), InvalidInput);
}

TEST_CASE("separator_bound: closed forms") {
  const BallPoint zero[] = {real_point(0.0)};
  const BallPoint half[] = {real_point(0.5)};
  CHECK(separator_bound(zero, {}).norm == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(separator_bound(zero, half).norm - 2.0) < 1e-12);
  CHECK(std::abs(separator_bound(half, zero).norm - 2.0) < 1e-12);
  CHECK(separator_bound({}, half).norm == 0.0);
  for (int i = 1; i <= 9; ++i) {
    const BallPoint b[] = {real_point(0.1 * i)};
    CHECK(std::abs(separator_bound(zero, b).norm - 1.0 / (0.1 * i)) < 1e-10);
  }
}

TEST_CASE("separator_bound: overlapping samples are rejected") {
  const BallPoint a[] = {real_point(0.0), real_point(0.3)};
  const BallPoint b[] = {real_point(0.3)};
  CHECK_THROWS_AS(separator_bound(a, b), InvalidInput);
  CHECK_THROWS_AS(separator_bound({}, {}), InvalidInput);
}

TEST_CASE("union_norm_check: examples") {
  const std::vector<BallPoint> a = {real_point(0.0)};
  const std::vector<Complex> av = {1.0};
  const std::vector<BallPoint> b = {real_point(0.5)};
  const std::vector<Complex> bv = {0.0};

  const auto u = union_norm_check(a, av, b, bv);
  CHECK(std::abs(u.union_norm - 2.0) < 1e-12);
  CHECK(u.piece_norms[0] == doctest::Approx(1.0));
  CHECK(u.piece_norms[1] == 0.0);
  CHECK(std::abs(u.separator_norms[0] - 2.0) < 1e-12);
  CHECK(std::abs(u.bound - 2.0) < 1e-12);
  CHECK(u.holds);

  const std::vector<BallPoint> a2 = {real_point(0.1), real_point(-0.4)};
  const std::vector<Complex> a2v = {0.3, Complex{0.0, 0.5}};
  const auto e = union_norm_check(a2, a2v, {}, {});
  CHECK(e.union_norm == doctest::Approx(e.piece_norms[0]).epsilon(1e-14));
  CHECK(e.holds);
}

TEST_CASE("oracle: whitened eigenvalue agrees with bisection on the Pick matrix") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const auto nodes = pickmap::testing::random_nodes(rng, 2 + trial % 6, dim, 0.8);
    const auto values = random_values(rng, nodes.size());
    const auto r = multiplier_norm({nodes, values});
    const double oracle = bisection_norm(nodes, values);
    CHECK(std::abs(r.norm - oracle) <= 1e-8 * std::max(1.0, oracle));
    CHECK(r.min_eig_at_norm >= -1e-10 * r.scale);
  }
}

TEST_CASE("property: homogeneity and domination") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto nodes = pickmap::testing::random_nodes(rng, 2 + trial % 7, 1 + trial % 3);
    const auto values = random_values(rng, nodes.size());
    const Complex c = pickmap::testing::random_disk(rng, 4.0);
    std::vector<Complex> scaled;
    double max_abs = 0.0;
    for (const auto& v : values) {
      scaled.push_back(c * v);
      max_abs = std::max(max_abs, std::abs(v));
    }
    const double t = multiplier_norm({nodes, values}).norm;
    const double ts = multiplier_norm({nodes, scaled}).norm;
    CHECK(std::abs(ts - std::abs(c) * t) <= 1e-10 * std::max(1.0, ts));
    CHECK(t >= max_abs);
  }
}

TEST_CASE("property: monotone under node addition") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 1 + trial % 2;
    const auto nodes = pickmap::testing::random_nodes(rng, 10, dim, 0.85);
    const auto values = random_values(rng, nodes.size());
    double prev = 0.0;
    for (std::size_t n = 1; n <= nodes.size(); ++n) {
      const double t = multiplier_norm({{nodes.begin(), nodes.begin() + n},
                                        {values.begin(), values.begin() + n}})
                           .norm;
      CHECK(t >= prev - 1e-10 * std::max(1.0, prev));
      prev = t;
    }
  }
}

TEST_CASE("property: separator_bound is unitarily invariant") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 2 + trial % 2;
    const auto a = pickmap::testing::random_nodes(rng, 3, dim, 0.7);
    const auto b = pickmap::testing::random_nodes(rng, 3, dim, 0.7);

    // Random unitary from the QR factorization of a complex Gaussian matrix.
    std::normal_distribution<double> g;
    CMatrix G(dim, dim);
    for (Eigen::Index i = 0; i < G.rows(); ++i)
      for (Eigen::Index j = 0; j < G.cols(); ++j)
        G(i, j) = Complex{g(rng), g(rng)};
    const CMatrix U = Eigen::HouseholderQR<CMatrix>(G).householderQ();

    const auto rotate = [&](const std::vector<BallPoint>& pts) {
      std::vector<BallPoint> out;
      for (const auto& p : pts) {
        CVector v(p.dim());
        for (std::size_t i = 0; i < p.dim(); ++i)
          v(static_cast<Eigen::Index>(i)) = p[i];
        const CVector w = U * v;
        out.emplace_back(std::vector<Complex>(w.data(), w.data() + w.size()));
      }
      return out;
    };
    const double s = separator_bound(a, b).norm;
    const double su = separator_bound(rotate(a), rotate(b)).norm;
    CHECK(std::abs(s - su) <= 1e-9 * s);
  }
}

TEST_CASE("property: disjoint-union combination bound on random data") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<BallPoint> a, b;
    for (int i = 0; i < 4; ++i) {
      a.push_back(real_point(-0.6 + 0.25 * pickmap::testing::uniform(rng) + 0.3 * i * 0.1));
      b.push_back(BallPoint{Complex{0.5, 0.0} + pickmap::testing::random_disk(rng, 0.2)});
    }
    const auto av = random_values(rng, a.size());
    const auto bv = random_values(rng, b.size());
    const auto u = union_norm_check(a, av, b, bv);
    CHECK(u.holds);
    CHECK(u.union_norm >= std::max(u.piece_norms[0], u.piece_norms[1]) - 1e-10);
  }
}
