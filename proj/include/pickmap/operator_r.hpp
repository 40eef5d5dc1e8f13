#pragma once

///
/// \file operator_r.hpp
///
/// The positive operator
///
///     (R f)(zeta) = \int f(eta) / (1 - <h(zeta), h(eta)>) d omega(eta)
///
/// on the Hardy space of the disk, discretized in the Fourier basis
/// {eta^m}_{m=0..M} with an N-point equispaced rule, and its splitting
/// R = R1 + R2 into a Toeplitz operator with symbol
///
///     L(eta) = 1 / (eta <h'(eta), h(eta)>)
///
/// and an integral operator with continuous kernel
///
///     M(zeta, eta) = 1 / (1 - <h(zeta), h(eta)>) - j(zeta, eta) L(eta),
///
/// where j(zeta, eta) = 1 / (1 - zeta conj(eta)) is the Szego kernel.
///
/// When |h| = 1 on the circle the integrand of R is singular on the
/// diagonal. The singular part is integrated exactly through the
/// reproducing property of j, and only the continuous kernel M is handed to
/// the quadrature rule; its diagonal is the limit
///
///     M(w, w) = <h''(w), h(w)> / (2 <h'(w), h(w)>^2).
///
/// When h maps the circle strictly inside the ball the integrand is
/// bounded, L = 0, and M is the integrand itself.
///
/// For monomial maps (a z^p, b z^q) R is diagonal in the Fourier basis with
/// entries c_m = sum_{p g1 + q g2 = m} (g1+g2)!/(g1! g2!) |a|^{2 g1} |b|^{2 g2},
/// which c_m_oracle() computes by enumeration, independently of quadrature.
///

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pickmap/holomap.hpp"
#include "pickmap/kernel.hpp"

namespace pickmap {

/// (a z^p, b z^q) with alpha = |a|^2, beta = |b|^2, alpha + beta = 1.
struct MonomialMap {
  int p = 2;
  int q = 3;
  double alpha = 0.5;
  double beta = 0.5;

  /// Throws InvalidInput unless 0 < p < q, gcd(p,q) = 1, alpha, beta in
  /// (0,1) and alpha + beta = 1 to 1e-12.
  void validate() const;
  /// Real positive coefficients sqrt(alpha), sqrt(beta).
  Holomap to_holomap() const;
};

double c_m_oracle(const MonomialMap& map, int m);

/// 1 / (p alpha + q beta): the constant value of L for a monomial map.
double toeplitz_symbol(const MonomialMap& map);

/// Nonnegative integers up to max_mode not representable as nonnegative
/// combinations of `generators`.
std::vector<int> semigroup_gaps(std::span<const int> generators, int max_mode);

Complex szego_kernel(Complex zeta, Complex eta);

/// Quadrature of <f, zeta^n> for n = 0..count-1 from samples of f on the grid.
std::vector<Complex> szego_coefficients(std::span<const Complex> samples,
                                        const BoundaryGrid& grid, std::size_t count);

/// Quadrature of \int f(zeta) conj(j(zeta, eta)) d omega(zeta) for |eta| < 1.
Complex szego_reproduce(std::span<const Complex> samples, const BoundaryGrid& grid, Complex eta);

/// L(eta) = 1 / (eta <h'(eta), h(eta)>) at a boundary point.
Complex boundary_symbol(const Holomap& h, Complex eta);

enum class BoundaryRegime {
  Interior,    // |h| < 1 on the circle; integrand bounded
  Normalized,  // |h| = 1 on the circle; singular part split off
};

const char* to_string(BoundaryRegime r);

struct RMatrix {
  CMatrix entries;        // entries(m', m) = <R eta^m, zeta^m'>
  CMatrix toeplitz_part;  // R1
  CMatrix remainder_part; // R2
  std::size_t grid_size = 0;
  int modes = 0;          // M; the basis is eta^0..eta^M
  BoundaryRegime regime = BoundaryRegime::Interior;
  double transversality = 0.0;

  double max_off_diagonal() const;
};

/// Classifies h on the grid, throwing NumericalFailure if |h| touches the
/// sphere only on part of the circle or leaves the closed ball.
BoundaryRegime classify_boundary(const Holomap& h, const BoundaryGrid& grid,
                                 const Tolerances& tol = {});

/// Throws NumericalFailure when transversality is not certified on the
/// grid, when N < 4 (M + deg h), or when the integrand blows up at an
/// off-diagonal node pair.
RMatrix r_matrix(const Holomap& h, const BoundaryGrid& grid, int modes,
                 const Tolerances& tol = {});

struct MKernel {
  CMatrix values;           // M(zeta_k, zeta_j)
  double sup_abs = 0.0;
  double hs_norm_sq = 0.0;  // sum_k sum_j w^2 |M|^2
  double hs_norm = 0.0;
  /// max_k |analytic diagonal - one-sided Richardson extrapolation along
  /// the grid|; zero in the interior regime where the diagonal is explicit.
  double diagonal_fill_discrepancy = 0.0;
  BoundaryRegime regime = BoundaryRegime::Interior;
};

MKernel m_kernel_matrix(const Holomap& h, const BoundaryGrid& grid, const Tolerances& tol = {});

struct SpectrumReport {
  RMatrix r;
  Eigen::VectorXd eigenvalues;   // ascending
  CMatrix eigenvectors;          // columns match eigenvalues
  std::vector<int> dominant_mode; // argmax_m |v_m|^2 per eigenpair
  bool gaps_known = false;       // true for monomial-component maps
  std::vector<int> gap_modes;
  std::vector<Eigen::Index> near_zero; // indices with eigenvalue < tol_kernel
  std::vector<double> near_zero_gap_mass;
  bool kernel_matches_gaps = false;   // count equal and each mass >= 0.99
  double min_invertible_eigenvalue = 0.0;
  double hermitian_defect = 0.0;
  bool psd = false;
};

SpectrumReport spectrum_report(const Holomap& h, const BoundaryGrid& grid, int modes,
                               const Tolerances& tol = {});

} // namespace pickmap
