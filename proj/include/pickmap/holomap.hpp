#pragma once

///
/// \file holomap.hpp
///
/// Polynomial holomaps h : D -> B_d, boundary grids carrying normalized
/// arclength (harmonic measure of the disk at the origin), and the boundary
/// certificates required before h can be used to pull back multipliers:
/// transversality |<h'(zeta), h(zeta)>| > 0 and injectivity on the circle.
///

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pickmap/kernel.hpp"

namespace pickmap {

/// d univariate complex polynomials, coefficients in ascending degree.
class Holomap {
public:
  explicit Holomap(std::vector<std::vector<Complex>> components);

  /// (c_1 z^{e_1}, ..., c_d z^{e_d}).
  static Holomap monomial(std::span<const Complex> coeffs, std::span<const int> exponents);

  std::size_t dim() const noexcept { return components_.size(); }
  int degree() const noexcept { return degree_; }
  const std::vector<std::vector<Complex>>& components() const noexcept { return components_; }

  /// Exponents of the single nonzero term of each component, when every
  /// component is a monomial.
  std::optional<std::vector<int>> monomial_exponents() const;

  std::vector<Complex> eval(Complex z) const;
  std::vector<Complex> deriv(Complex z) const;
  std::vector<Complex> second_deriv(Complex z) const;

private:
  std::vector<std::vector<Complex>> components_;
  std::vector<std::vector<Complex>> first_;
  std::vector<std::vector<Complex>> second_;
  int degree_ = 0;
};

/// Horner evaluation of sum_k coeffs[k] z^k.
Complex horner(std::span<const Complex> coeffs, Complex z);

/// Formal derivative of an ascending coefficient list.
std::vector<Complex> differentiate(std::span<const Complex> coeffs);

/// Equispaced nodes exp(2 pi i k / N) with weights 1/N.
class BoundaryGrid {
public:
  explicit BoundaryGrid(std::size_t n);

  std::size_t size() const noexcept { return nodes_.size(); }
  Complex node(std::size_t k) const { return nodes_[k]; }
  double weight() const noexcept { return 1.0 / static_cast<double>(nodes_.size()); }
  const std::vector<Complex>& nodes() const noexcept { return nodes_; }

private:
  std::vector<Complex> nodes_;
};

/// |<h'(zeta_k), h(zeta_k)>| at every grid node.
std::vector<double> transversality_profile(const Holomap& h, const BoundaryGrid& grid);

/// min over grid nodes of |<h'(zeta), h(zeta)>|.
double transversality_margin(const Holomap& h, const BoundaryGrid& grid);

struct InjectivityReport {
  bool injective = true;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  double min_separation = 0.0;
};

/// Pairwise check that distinct grid nodes have images further apart than
/// tol_inj. The first colliding pair in lexicographic order is returned.
InjectivityReport boundary_injectivity_check(const Holomap& h, const BoundaryGrid& grid,
                                             const Tolerances& tol = {});

struct HolomapDiagnostics {
  double max_interior_norm_sq = 0.0;
  double min_boundary_norm_sq = 0.0;
  double max_boundary_norm_sq = 0.0;
  bool interior_ok = false;
  /// min_boundary_norm_sq >= 1 - tol_proper.
  bool boundary_normalized = false;
};

/// Scans an interior polar grid (interior_radii x interior_angles, outer
/// radius 1 - eps_ball) and the boundary grid.
HolomapDiagnostics check_holomap(const Holomap& h, const BoundaryGrid& grid,
                                 const Tolerances& tol = {});

} // namespace pickmap
