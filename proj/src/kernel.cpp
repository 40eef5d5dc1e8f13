#include "pickmap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pickmap/errors.hpp"

namespace pickmap {

namespace {

// Neumaier summation on one real stream.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

} // namespace

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size())
    throw InvalidInput("inner product of vectors with different dimensions");
  CompensatedSum re, im;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex p = a[i] * std::conj(b[i]);
    re.add(p.real());
    im.add(p.imag());
  }
  return {re.value(), im.value()};
}

double norm_squared(std::span<const Complex> a) {
  CompensatedSum s;
  for (const auto& x : a)
    s.add(std::norm(x));
  return s.value();
}

BallPoint::BallPoint(std::vector<Complex> coords, double eps_ball)
    : coords_(std::move(coords)) {
  if (coords_.empty())
    throw InvalidInput("ball point must have dimension >= 1");
  for (const auto& c : coords_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InvalidInput("ball point has non-finite coordinate");
  norm_sq_ = pickmap::norm_squared(coords_);
  if (norm_sq_ >= 1.0 - eps_ball) {
    std::ostringstream os;
    os.precision(17);
    os << "point with |z|^2 = " << norm_sq_ << " is not strictly inside the unit ball";
    throw InvalidInput(os.str());
  }
}

BallPoint::BallPoint(std::initializer_list<Complex> coords)
    : BallPoint(std::vector<Complex>(coords)) {}

BallPoint BallPoint::origin(std::size_t dim) {
  return BallPoint(std::vector<Complex>(dim, Complex{0.0, 0.0}));
}

double distance(const BallPoint& a, const BallPoint& b) {
  if (a.dim() != b.dim())
    throw InvalidInput("distance between points of different dimensions");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

Complex kernel_eval(const BallPoint& z, const BallPoint& w) {
  if (z.dim() != w.dim())
    throw InvalidInput("kernel_eval: dimension mismatch");
  return 1.0 / (1.0 - inner(z.coords(), w.coords()));
}

std::size_t common_dimension(std::span<const BallPoint> nodes) {
  if (nodes.empty())
    throw InvalidInput("empty node list");
  const std::size_t d = nodes.front().dim();
  for (const auto& n : nodes)
    if (n.dim() != d)
      throw InvalidInput("nodes have inconsistent dimensions");
  return d;
}

void require_distinct(std::span<const BallPoint> nodes, double tol_node) {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (distance(nodes[i], nodes[j]) <= tol_node) {
        std::ostringstream os;
        os << "nodes " << i << " and " << j << " coincide within tol_node";
        throw InvalidInput(os.str());
      }
}

KernelGram gram(std::span<const BallPoint> nodes, const Tolerances& tol) {
  common_dimension(nodes);
  require_distinct(nodes, tol.tol_node);

  const auto n = static_cast<Eigen::Index>(nodes.size());
  KernelGram g;
  g.nodes.assign(nodes.begin(), nodes.end());
  g.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.entries(i, i) = Complex{1.0 / nodes[i].margin(), 0.0};
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Complex k = kernel_eval(nodes[i], nodes[j]);
      g.entries(i, j) = k;
      g.entries(j, i) = std::conj(k);
    }
  }
  return g;
}

double hermitian_defect(const CMatrix& A) {
  if (A.rows() != A.cols())
    throw InvalidInput("matrix is not square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  return (A - A.adjoint()).cwiseAbs().maxCoeff() / scale;
}

namespace {

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& A, const Tolerances& tol) {
  if (A.rows() == 0)
    throw InvalidInput("eigenvalues of an empty matrix");
  if (hermitian_defect(A) > tol.tol_herm)
    throw InvalidInput("matrix is not Hermitian within tol_herm");
  // Symmetrize so the solver sees exactly the Hermitian part.
  const CMatrix H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("Hermitian eigensolver did not converge");
  return es.eigenvalues();
}

} // namespace

double min_eig_hermitian(const CMatrix& A, const Tolerances& tol) {
  return hermitian_eigenvalues(A, tol).minCoeff();
}

double max_eig_hermitian(const CMatrix& A, const Tolerances& tol) {
  return hermitian_eigenvalues(A, tol).maxCoeff();
}

bool is_hermitian_psd(const CMatrix& A, const Tolerances& tol) {
  if (A.rows() == 0 || hermitian_defect(A) > tol.tol_herm)
    return false;
  const double trace = A.trace().real();
  return min_eig_hermitian(A, tol) >= -tol.tol_psd * std::abs(trace);
}

WhitenedFactor whiten(const CMatrix& K, const Tolerances& tol) {
  if (K.rows() == 0 || K.rows() != K.cols())
    throw InvalidInput("whiten: matrix must be square and nonempty");
  if (hermitian_defect(K) > tol.tol_herm)
    throw InvalidInput("whiten: matrix is not Hermitian");

  const double trace = K.trace().real();
  const auto n = K.rows();
  for (double step : kJitterLadder) {
    const double jitter = step * trace;
    CMatrix shifted = K;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<CMatrix> llt(shifted);
    if (llt.info() != Eigen::Success)
      continue;
    CMatrix lower = llt.matrixL();
    const double err = (lower * lower.adjoint() - shifted).cwiseAbs().maxCoeff();
    if (!(err <= tol.tol_chol * trace))
      continue;
    return WhitenedFactor{std::move(lower), jitter, err};
  }
  std::ostringstream os;
  os << "whiten: Cholesky failed for " << n << "x" << n
     << " Gram at maximum jitter (numerically rank-deficient sample)";
  throw NumericalFailure(os.str());
}

} // namespace pickmap
