#include "pickmap/operator_r.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pickmap/errors.hpp"

namespace pickmap {

void MonomialMap::validate() const {
  if (p <= 0 || q <= p)
    throw InvalidInput("monomial map requires 0 < p < q");
  if (std::gcd(p, q) != 1)
    throw InvalidInput("monomial map requires gcd(p, q) = 1");
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
    throw InvalidInput("monomial map requires alpha, beta in (0, 1)");
  if (std::abs(alpha + beta - 1.0) > 1e-12)
    throw InvalidInput("monomial map requires alpha + beta = 1");
}

Holomap MonomialMap::to_holomap() const {
  validate();
  const Complex coeffs[] = {std::sqrt(alpha), std::sqrt(beta)};
  const int exps[] = {p, q};
  return Holomap::monomial(coeffs, exps);
}

double c_m_oracle(const MonomialMap& map, int m) {
  map.validate();
  if (m < 0)
    throw InvalidInput("c_m_oracle: negative mode");
  double total = 0.0;
  for (int g1 = 0; g1 * map.p <= m; ++g1) {
    const int rest = m - g1 * map.p;
    if (rest % map.q != 0)
      continue;
    const int g2 = rest / map.q;
    // (g1+g2)!/(g1! g2!) alpha^g1 beta^g2, built one factor at a time.
    double term = std::pow(map.beta, g2);
    for (int i = 1; i <= g1; ++i)
      term *= map.alpha * static_cast<double>(g2 + i) / static_cast<double>(i);
    total += term;
  }
  return total;
}

double toeplitz_symbol(const MonomialMap& map) {
  map.validate();
  return 1.0 / (map.p * map.alpha + map.q * map.beta);
}

std::vector<int> semigroup_gaps(std::span<const int> generators, int max_mode) {
  if (max_mode < 0)
    return {};
  std::vector<char> reachable(static_cast<std::size_t>(max_mode) + 1, 0);
  reachable[0] = 1;
  for (int m = 1; m <= max_mode; ++m)
    for (int g : generators)
      if (g > 0 && g <= m && reachable[static_cast<std::size_t>(m - g)]) {
        reachable[static_cast<std::size_t>(m)] = 1;
        break;
      }
  std::vector<int> gaps;
  for (int m = 0; m <= max_mode; ++m)
    if (!reachable[static_cast<std::size_t>(m)])
      gaps.push_back(m);
  return gaps;
}

Complex szego_kernel(Complex zeta, Complex eta) { return 1.0 / (1.0 - zeta * std::conj(eta)); }

std::vector<Complex> szego_coefficients(std::span<const Complex> samples,
                                        const BoundaryGrid& grid, std::size_t count) {
  if (samples.size() != grid.size())
    throw InvalidInput("szego_coefficients: one sample per grid node required");
  const std::size_t n = grid.size();
  std::vector<Complex> out(count);
  for (std::size_t m = 0; m < count; ++m) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k)
      acc += samples[k] * std::conj(grid.node((k * m) % n));
    out[m] = acc * grid.weight();
  }
  return out;
}

Complex szego_reproduce(std::span<const Complex> samples, const BoundaryGrid& grid, Complex eta) {
  if (samples.size() != grid.size())
    throw InvalidInput("szego_reproduce: one sample per grid node required");
  if (std::abs(eta) >= 1.0)
    throw InvalidInput("szego_reproduce: evaluation point must lie in the open disk");
  Complex acc{0.0, 0.0};
  for (std::size_t k = 0; k < grid.size(); ++k)
    acc += samples[k] * std::conj(szego_kernel(grid.node(k), eta));
  return acc * grid.weight();
}

Complex boundary_symbol(const Holomap& h, Complex eta) {
  return 1.0 / (eta * inner(h.deriv(eta), h.eval(eta)));
}

const char* to_string(BoundaryRegime r) {
  switch (r) {
  case BoundaryRegime::Interior:
    return "interior";
  case BoundaryRegime::Normalized:
    return "normalized";
  }
  return "unknown";
}

double RMatrix::max_off_diagonal() const {
  double out = 0.0;
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    for (Eigen::Index i = 0; i < entries.rows(); ++i)
      if (i != j)
        out = std::max(out, std::abs(entries(i, j)));
  return out;
}

BoundaryRegime classify_boundary(const Holomap& h, const BoundaryGrid& grid,
                                 const Tolerances& tol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& zeta : grid.nodes()) {
    const double n2 = norm_squared(h.eval(zeta));
    lo = std::min(lo, n2);
    hi = std::max(hi, n2);
  }
  if (hi > 1.0 + tol.tol_proper)
    throw NumericalFailure("holomap leaves the closed unit ball on the boundary grid");
  if (lo >= 1.0 - tol.tol_proper)
    return BoundaryRegime::Normalized;
  if (hi < 1.0 - tol.eps_ball)
    return BoundaryRegime::Interior;
  throw NumericalFailure(
      "holomap touches the sphere on part of the circle only; integrand blows up on the diagonal");
}

namespace {

// 1 - exp(2 pi i l / N) = -2i sin(theta/2) exp(i theta/2), accurate for small theta.
std::vector<Complex> one_minus_roots(std::size_t n) {
  std::vector<Complex> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double half = std::numbers::pi * static_cast<double>(l) / static_cast<double>(n);
    out[l] = Complex{0.0, -2.0 * std::sin(half)} * std::polar(1.0, half);
  }
  return out;
}

} // namespace

MKernel m_kernel_matrix(const Holomap& h, const BoundaryGrid& grid, const Tolerances& tol) {
  const std::size_t n = grid.size();
  const auto regime = classify_boundary(h, grid, tol);
  if (regime == BoundaryRegime::Normalized && n < 4)
    throw InvalidInput("m_kernel_matrix: at least 4 grid nodes required");

  std::vector<std::vector<Complex>> images;
  images.reserve(n);
  for (const auto& zeta : grid.nodes())
    images.push_back(h.eval(zeta));

  MKernel mk;
  mk.regime = regime;
  mk.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<Complex> symbol(n, Complex{0.0, 0.0});
  std::vector<Complex> diag(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex w = grid.node(k);
    if (regime == BoundaryRegime::Normalized) {
      const Complex a = inner(h.deriv(w), images[k]);
      const Complex b = inner(h.second_deriv(w), images[k]);
      symbol[k] = 1.0 / (w * a);
      diag[k] = b / (2.0 * a * a);
    } else {
      diag[k] = Complex{1.0 / (1.0 - norm_squared(images[k])), 0.0};
    }
  }

  const auto gap = one_minus_roots(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex value;
      if (k == j) {
        value = diag[k];
      } else {
        const Complex g = inner(images[k], images[j]);
        if (std::abs(1.0 - g) <= tol.tol_inj) {
          std::ostringstream os;
          os << "integrand 1/(1 - <h(zeta), h(eta)>) blows up at node pair (" << k << ", " << j
             << ")";
          throw NumericalFailure(os.str());
        }
        value = 1.0 / (1.0 - g);
        if (regime == BoundaryRegime::Normalized)
          value -= symbol[j] / gap[(k + n - j) % n];
      }
      mk.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = value;
    }
  }

  const double w2 = grid.weight() * grid.weight();
  mk.sup_abs = mk.values.cwiseAbs().maxCoeff();
  mk.hs_norm_sq = mk.values.cwiseAbs2().sum() * w2;
  mk.hs_norm = std::sqrt(mk.hs_norm_sq);

  if (regime == BoundaryRegime::Normalized) {
    // Cross-check: quadratic one-sided extrapolation from the three nearest
    // neighbours M(zeta_{k+i}, zeta_k), i = 1, 2, 3.
    for (std::size_t k = 0; k < n; ++k) {
      const auto col = static_cast<Eigen::Index>(k);
      const Complex f1 = mk.values(static_cast<Eigen::Index>((k + 1) % n), col);
      const Complex f2 = mk.values(static_cast<Eigen::Index>((k + 2) % n), col);
      const Complex f3 = mk.values(static_cast<Eigen::Index>((k + 3) % n), col);
      const Complex extrapolated = 3.0 * f1 - 3.0 * f2 + f3;
      mk.diagonal_fill_discrepancy =
          std::max(mk.diagonal_fill_discrepancy, std::abs(extrapolated - diag[k]));
    }
  }
  return mk;
}

RMatrix r_matrix(const Holomap& h, const BoundaryGrid& grid, int modes, const Tolerances& tol) {
  if (modes < 0)
    throw InvalidInput("r_matrix: mode count must be nonnegative");
  const std::size_t n = grid.size();
  if (n < 4 * static_cast<std::size_t>(modes + h.degree())) {
    std::ostringstream os;
    os << "r_matrix: grid of " << n << " nodes is too coarse for " << modes
       << " modes and degree " << h.degree() << " (need N >= 4 (M + deg))";
    throw InvalidInput(os.str());
  }
  const double margin = transversality_margin(h, grid);
  if (!(margin > tol.tol_transversal)) {
    std::ostringstream os;
    os.precision(17);
    os << "r_matrix: transversality not certified on the grid (margin " << margin << ")";
    throw NumericalFailure(os.str());
  }

  const MKernel mk = m_kernel_matrix(h, grid, tol);
  const auto cols = static_cast<Eigen::Index>(modes) + 1;
  const auto rows = static_cast<Eigen::Index>(n);

  CMatrix fourier(rows, cols);
  for (Eigen::Index k = 0; k < rows; ++k)
    for (Eigen::Index m = 0; m < cols; ++m)
      fourier(k, m) = grid.node(static_cast<std::size_t>(k * m) % n);

  RMatrix r;
  r.grid_size = n;
  r.modes = modes;
  r.regime = mk.regime;
  r.transversality = margin;

  const double w = grid.weight();
  r.remainder_part = (w * w) * (fourier.adjoint() * (mk.values * fourier));

  r.toeplitz_part = CMatrix::Zero(cols, cols);
  if (mk.regime == BoundaryRegime::Normalized) {
    // R1(m', m) = w sum_k L(zeta_k) zeta_k^(m - m').
    std::vector<Complex> coeff(static_cast<std::size_t>(2 * modes + 1));
    for (int d = -modes; d <= modes; ++d) {
      Complex acc{0.0, 0.0};
      const std::size_t shift = static_cast<std::size_t>((d % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n));
      for (std::size_t k = 0; k < n; ++k)
        acc += boundary_symbol(h, grid.node(k)) * grid.node((k * shift) % n);
      coeff[static_cast<std::size_t>(d + modes)] = acc * w;
    }
    for (Eigen::Index mp = 0; mp < cols; ++mp)
      for (Eigen::Index m = 0; m < cols; ++m)
        r.toeplitz_part(mp, m) = coeff[static_cast<std::size_t>(m - mp + modes)];
  }
  r.entries = r.toeplitz_part + r.remainder_part;
  return r;
}

SpectrumReport spectrum_report(const Holomap& h, const BoundaryGrid& grid, int modes,
                               const Tolerances& tol) {
  SpectrumReport s;
  s.r = r_matrix(h, grid, modes, tol);
  s.hermitian_defect = hermitian_defect(s.r.entries);

  const CMatrix herm = 0.5 * (s.r.entries + s.r.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("spectrum_report: eigensolver did not converge");
  s.eigenvalues = es.eigenvalues();
  s.eigenvectors = es.eigenvectors();

  const auto count = s.eigenvalues.size();
  for (Eigen::Index i = 0; i < count; ++i) {
    Eigen::Index arg = 0;
    s.eigenvectors.col(i).cwiseAbs2().maxCoeff(&arg);
    s.dominant_mode.push_back(static_cast<int>(arg));
  }

  if (auto exps = h.monomial_exponents()) {
    s.gaps_known = true;
    s.gap_modes = semigroup_gaps(*exps, modes);
  }

  s.min_invertible_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < count; ++i) {
    const double lambda = s.eigenvalues(i);
    if (lambda < tol.tol_kernel) {
      s.near_zero.push_back(i);
      double mass = 0.0;
      for (int m : s.gap_modes)
        mass += std::norm(s.eigenvectors(m, i));
      s.near_zero_gap_mass.push_back(mass);
    } else if (std::isnan(s.min_invertible_eigenvalue) || lambda < s.min_invertible_eigenvalue) {
      s.min_invertible_eigenvalue = lambda;
    }
  }
  s.kernel_matches_gaps =
      s.gaps_known && s.near_zero.size() == s.gap_modes.size() &&
      std::all_of(s.near_zero_gap_mass.begin(), s.near_zero_gap_mass.end(),
                  [](double m) { return m >= 0.99; });

  const double trace = s.r.entries.trace().real();
  s.psd = s.eigenvalues.size() > 0 && s.eigenvalues(0) >= -tol.tol_psd * std::abs(trace);
  return s;
}

} // namespace pickmap
