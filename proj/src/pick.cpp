#include "pickmap/pick.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pickmap/errors.hpp"

namespace pickmap {

CMatrix pick_matrix(const CMatrix& gram, std::span<const Complex> values, double t) {
  const auto n = gram.rows();
  if (static_cast<std::size_t>(n) != values.size())
    throw InvalidInput("pick_matrix: value count does not match Gram size");
  const double t2 = t * t;
  CMatrix P(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    P(i, i) = (t2 - std::norm(values[i])) * gram(i, i).real();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex e = (t2 - values[i] * std::conj(values[j])) * gram(i, j);
      P(i, j) = e;
      P(j, i) = std::conj(e);
    }
  }
  return P;
}

PickReport multiplier_norm(const PickProblem& p, const Tolerances& tol) {
  if (p.nodes.size() != p.values.size())
    throw InvalidInput("multiplier_norm: node and value counts differ");
  if (p.nodes.empty())
    throw InvalidInput("multiplier_norm: empty problem");

  const KernelGram K = gram(p.nodes, tol);
  const WhitenedFactor W = whiten(K, tol);

  // B = L^-1 D L, so B B^* = L^-1 D K D^* L^-* with the jittered K = L L^*.
  const auto n = K.size();
  CMatrix DL = W.lower;
  for (Eigen::Index i = 0; i < n; ++i)
    DL.row(i) *= p.values[static_cast<std::size_t>(i)];
  const CMatrix B = W.lower.triangularView<Eigen::Lower>().solve(DL);
  CMatrix C = B * B.adjoint();
  C = 0.5 * (C + C.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(C, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("multiplier_norm: eigensolver did not converge");

  double max_abs = 0.0;
  for (const auto& v : p.values)
    max_abs = std::max(max_abs, std::abs(v));

  PickReport r;
  // The diagonal of the Pick matrix forces t >= |v_i|; rounding may leave
  // the eigenvalue estimate a few ulps below that.
  r.norm = std::max(std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0)), max_abs);
  r.whitening_jitter = W.jitter_applied;
  r.gram_trace = K.entries.trace().real();
  r.gram_min_eig = min_eig_hermitian(K.entries, tol);
  r.gram_psd = r.gram_min_eig >= -tol.tol_psd * r.gram_trace;
  r.min_eig_at_norm = min_eig_hermitian(pick_matrix(K.entries, p.values, r.norm), tol);
  r.scale = r.norm * r.norm * r.gram_trace;
  return r;
}

PickReport separator_bound(std::span<const BallPoint> a_nodes,
                           std::span<const BallPoint> b_nodes,
                           const Tolerances& tol) {
  if (a_nodes.empty() && b_nodes.empty())
    throw InvalidInput("separator_bound: both samples are empty");
  for (std::size_t i = 0; i < a_nodes.size(); ++i)
    for (std::size_t j = 0; j < b_nodes.size(); ++j)
      if (distance(a_nodes[i], b_nodes[j]) <= tol.tol_node) {
        std::ostringstream os;
        os << "separator_bound: node " << i << " of the first sample coincides with node " << j
           << " of the second; no multiplier can be both 1 and 0 there";
        throw InvalidInput(os.str());
      }
  if (a_nodes.empty())
    return PickReport{};

  PickProblem p;
  p.nodes.reserve(a_nodes.size() + b_nodes.size());
  p.nodes.insert(p.nodes.end(), a_nodes.begin(), a_nodes.end());
  p.nodes.insert(p.nodes.end(), b_nodes.begin(), b_nodes.end());
  p.values.assign(a_nodes.size(), Complex{1.0, 0.0});
  p.values.resize(p.nodes.size(), Complex{0.0, 0.0});
  return multiplier_norm(p, tol);
}

namespace {

void check_piece(const SamplePiece& piece) {
  if (piece.nodes.size() != piece.values.size())
    throw InvalidInput("sample piece: node and value counts differ");
}

std::vector<BallPoint> others(std::span<const SamplePiece> pieces, std::size_t skip) {
  std::vector<BallPoint> out;
  for (std::size_t j = 0; j < pieces.size(); ++j)
    if (j != skip)
      out.insert(out.end(), pieces[j].nodes.begin(), pieces[j].nodes.end());
  return out;
}

} // namespace

std::vector<PickReport> separator_bounds(std::span<const SamplePiece> pieces,
                                         const Tolerances& tol) {
  std::vector<PickReport> out;
  out.reserve(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    check_piece(pieces[i]);
    out.push_back(separator_bound(pieces[i].nodes, others(pieces, i), tol));
  }
  return out;
}

UnionReport union_norm_check(std::span<const SamplePiece> pieces,
                             std::span<const PickReport> separators,
                             const Tolerances& tol) {
  if (pieces.empty())
    throw InvalidInput("union_norm_check: no pieces");
  if (separators.size() != pieces.size())
    throw InvalidInput("union_norm_check: one separator per piece required");

  PickProblem all;
  for (const auto& piece : pieces) {
    check_piece(piece);
    all.nodes.insert(all.nodes.end(), piece.nodes.begin(), piece.nodes.end());
    all.values.insert(all.values.end(), piece.values.begin(), piece.values.end());
  }

  UnionReport u;
  u.reports.push_back(multiplier_norm(all, tol));
  u.union_norm = u.reports.front().norm;
  for (const auto& piece : pieces) {
    if (piece.nodes.empty()) {
      u.piece_norms.push_back(0.0);
      u.reports.push_back(PickReport{});
      continue;
    }
    u.reports.push_back(multiplier_norm(PickProblem{piece.nodes, piece.values}, tol));
    u.piece_norms.push_back(u.reports.back().norm);
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    u.separator_norms.push_back(separators[i].norm);
    u.reports.push_back(separators[i]);
    u.bound += u.piece_norms[i] * u.separator_norms[i];
  }
  u.slack = tol.tol_union;
  u.holds = u.union_norm <= u.bound + u.slack;
  return u;
}

UnionReport union_norm_check(std::span<const SamplePiece> pieces, const Tolerances& tol) {
  const auto seps = separator_bounds(pieces, tol);
  return union_norm_check(pieces, seps, tol);
}

UnionReport union_norm_check(std::span<const BallPoint> a_nodes,
                             std::span<const Complex> a_values,
                             std::span<const BallPoint> b_nodes,
                             std::span<const Complex> b_values,
                             const Tolerances& tol) {
  const SamplePiece pieces[] = {
      {{a_nodes.begin(), a_nodes.end()}, {a_values.begin(), a_values.end()}},
      {{b_nodes.begin(), b_nodes.end()}, {b_values.begin(), b_values.end()}},
  };
  return union_norm_check(pieces, tol);
}

} // namespace pickmap
