#pragma once

///
/// \file kernel.hpp
///
/// Drury-Arveson kernel k(z,w) = 1 / (1 - <z,w>) on the unit ball of C^d,
/// Gram assembly over finite samples, and the Hermitian linear algebra
/// (spectral bounds, jittered Cholesky) the rest of the library uses.
///
/// Inner products are linear in the first slot: <z,w> = sum_i z_i conj(w_i).
///

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pickmap/tolerances.hpp"

namespace pickmap {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A point of the open unit ball of C^d. Construction rejects points with
/// |z|^2 >= 1 - eps_ball.
class BallPoint {
public:
  explicit BallPoint(std::vector<Complex> coords, double eps_ball = Tolerances{}.eps_ball);
  BallPoint(std::initializer_list<Complex> coords);

  static BallPoint origin(std::size_t dim);

  std::size_t dim() const noexcept { return coords_.size(); }
  const std::vector<Complex>& coords() const noexcept { return coords_; }
  Complex operator[](std::size_t i) const { return coords_[i]; }

  double norm_squared() const noexcept { return norm_sq_; }
  /// Distance 1 - |z|^2 to the sphere.
  double margin() const noexcept { return 1.0 - norm_sq_; }

private:
  std::vector<Complex> coords_;
  double norm_sq_ = 0.0;
};

/// Compensated (Neumaier) sum of a[i] * conj(b[i]) in ascending index order.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);

/// Squared Euclidean norm, compensated.
double norm_squared(std::span<const Complex> a);

double distance(const BallPoint& a, const BallPoint& b);

Complex kernel_eval(const BallPoint& z, const BallPoint& w);

struct KernelGram {
  CMatrix entries;
  std::vector<BallPoint> nodes;

  Eigen::Index size() const { return entries.rows(); }
};

/// Gram matrix of the kernel on `nodes`. The upper triangle is computed and
/// mirrored, so the result is exactly Hermitian with a real diagonal.
/// Throws InvalidInput on empty input, mixed dimensions or nodes closer
/// than tol_node.
KernelGram gram(std::span<const BallPoint> nodes, const Tolerances& tol = {});

/// Throws InvalidInput if any two nodes are within tol_node of each other.
void require_distinct(std::span<const BallPoint> nodes, double tol_node);

/// Throws InvalidInput unless all nodes share one dimension; returns it.
std::size_t common_dimension(std::span<const BallPoint> nodes);

/// max |A - A*| relative to max(1, max |A|).
double hermitian_defect(const CMatrix& A);

/// Smallest eigenvalue of a Hermitian matrix. Throws InvalidInput when the
/// Hermitian defect exceeds tol_herm.
double min_eig_hermitian(const CMatrix& A, const Tolerances& tol = {});
double max_eig_hermitian(const CMatrix& A, const Tolerances& tol = {});

/// True when A is Hermitian within tol_herm and min eig >= -tol_psd * trace(A).
bool is_hermitian_psd(const CMatrix& A, const Tolerances& tol = {});

struct WhitenedFactor {
  CMatrix lower;               // K + jitter_applied * I = lower * lower^*
  double jitter_applied = 0.0;
  double reconstruction_error = 0.0;
};

/// Jitter ladder used by whiten(), as multiples of trace(K).
inline constexpr double kJitterLadder[] = {0.0, 1e-14, 1e-12, 1e-10};

/// Cholesky factor of K + jitter I, escalating jitter through kJitterLadder
/// until the factorization succeeds. Throws NumericalFailure when even the
/// largest jitter fails.
WhitenedFactor whiten(const CMatrix& K, const Tolerances& tol = {});
inline WhitenedFactor whiten(const KernelGram& K, const Tolerances& tol = {}) {
  return whiten(K.entries, tol);
}

} // namespace pickmap
