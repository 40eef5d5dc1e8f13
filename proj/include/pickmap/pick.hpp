#pragma once

///
/// \file pick.hpp
///
/// Minimal multiplier norms on finite samples of the ball.
///
/// For nodes z_1..z_n and values v_1..v_n the smallest t with
///
///     [ (t^2 - v_i conj(v_j)) k(z_i, z_j) ]_{ij}  >= 0
///
/// is the least norm of a multiplier of the Drury-Arveson space taking the
/// values v_i at z_i. With K = L L^* and D = diag(v) this is
/// t^2 = lambda_max(L^-1 D K D^* L^-*), one Cholesky and one Hermitian
/// eigensolve.
///

#include <span>
#include <vector>

#include "pickmap/kernel.hpp"

namespace pickmap {

struct PickProblem {
  std::vector<BallPoint> nodes;
  std::vector<Complex> values;
};

struct PickReport {
  double norm = 0.0;
  /// Smallest eigenvalue of the Pick matrix evaluated at t = norm.
  double min_eig_at_norm = 0.0;
  double whitening_jitter = 0.0;
  /// Spectral diagnostics of the underlying Gram.
  double gram_min_eig = 0.0;
  double gram_trace = 0.0;
  bool gram_psd = true;
  /// Scale used for the min_eig_at_norm check: norm^2 * trace(K).
  double scale = 0.0;
};

/// Pick matrix (t^2 - v_i conj v_j) K_ij for a fixed t.
CMatrix pick_matrix(const CMatrix& gram, std::span<const Complex> values, double t);

PickReport multiplier_norm(const PickProblem& p, const Tolerances& tol = {});

/// Least norm of a multiplier equal to 1 on `a_nodes` and 0 on `b_nodes`.
/// An empty `a_nodes` yields 0 (the zero multiplier). A node present in both
/// lists is rejected with InvalidInput.
PickReport separator_bound(std::span<const BallPoint> a_nodes,
                           std::span<const BallPoint> b_nodes,
                           const Tolerances& tol = {});

struct SamplePiece {
  std::vector<BallPoint> nodes;
  std::vector<Complex> values;
};

struct UnionReport {
  double union_norm = 0.0;
  std::vector<double> piece_norms;      // t_i on piece i alone
  std::vector<double> separator_norms;  // s_i: 1 on piece i, 0 on the rest
  double bound = 0.0;                   // sum_i t_i * s_i
  double slack = 0.0;
  bool holds = false;                   // union_norm <= bound + slack
  std::vector<PickReport> reports;      // union first, then pieces, then separators
};

/// Finite-sample form of gluing multipliers across strongly disjoint
/// pieces: if f_i interpolates piece i and phi_i separates it, then
/// sum f_i phi_i interpolates the union, so t_union <= sum t_i s_i.
UnionReport union_norm_check(std::span<const SamplePiece> pieces, const Tolerances& tol = {});

UnionReport union_norm_check(std::span<const BallPoint> a_nodes,
                             std::span<const Complex> a_values,
                             std::span<const BallPoint> b_nodes,
                             std::span<const Complex> b_values,
                             const Tolerances& tol = {});

/// Separators s_i for a fixed partition; reusable across value assignments.
std::vector<PickReport> separator_bounds(std::span<const SamplePiece> pieces,
                                         const Tolerances& tol = {});

/// union_norm_check with precomputed separators.
UnionReport union_norm_check(std::span<const SamplePiece> pieces,
                             std::span<const PickReport> separators,
                             const Tolerances& tol = {});

} // namespace pickmap
