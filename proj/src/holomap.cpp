#include "pickmap/holomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pickmap/errors.hpp"

namespace pickmap {

Complex horner(std::span<const Complex> coeffs, Complex z) {
  Complex acc{0.0, 0.0};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * z + *it;
  return acc;
}

std::vector<Complex> differentiate(std::span<const Complex> coeffs) {
  if (coeffs.size() <= 1)
    return {Complex{0.0, 0.0}};
  std::vector<Complex> out(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    out[k - 1] = static_cast<double>(k) * coeffs[k];
  return out;
}

Holomap::Holomap(std::vector<std::vector<Complex>> components)
    : components_(std::move(components)) {
  if (components_.empty())
    throw InvalidInput("holomap needs at least one component");
  for (auto& c : components_) {
    for (const auto& x : c)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw InvalidInput("holomap coefficient is not finite");
    while (c.size() > 1 && c.back() == Complex{0.0, 0.0})
      c.pop_back();
    if (c.empty())
      c.push_back(Complex{0.0, 0.0});
    degree_ = std::max(degree_, static_cast<int>(c.size()) - 1);
    first_.push_back(differentiate(c));
    second_.push_back(differentiate(first_.back()));
  }
}

Holomap Holomap::monomial(std::span<const Complex> coeffs, std::span<const int> exponents) {
  if (coeffs.size() != exponents.size())
    throw InvalidInput("monomial holomap: coefficient and exponent counts differ");
  std::vector<std::vector<Complex>> comps;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (exponents[i] < 0)
      throw InvalidInput("monomial holomap: negative exponent");
    std::vector<Complex> c(static_cast<std::size_t>(exponents[i]) + 1, Complex{0.0, 0.0});
    c.back() = coeffs[i];
    comps.push_back(std::move(c));
  }
  return Holomap(std::move(comps));
}

std::optional<std::vector<int>> Holomap::monomial_exponents() const {
  std::vector<int> out;
  for (const auto& c : components_) {
    int found = -1;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] == Complex{0.0, 0.0})
        continue;
      if (found >= 0)
        return std::nullopt;
      found = static_cast<int>(k);
    }
    if (found < 0)
      return std::nullopt;
    out.push_back(found);
  }
  return out;
}

namespace {

std::vector<Complex> eval_all(const std::vector<std::vector<Complex>>& polys, Complex z) {
  std::vector<Complex> out;
  out.reserve(polys.size());
  for (const auto& p : polys)
    out.push_back(horner(p, z));
  return out;
}

} // namespace

std::vector<Complex> Holomap::eval(Complex z) const { return eval_all(components_, z); }
std::vector<Complex> Holomap::deriv(Complex z) const { return eval_all(first_, z); }
std::vector<Complex> Holomap::second_deriv(Complex z) const { return eval_all(second_, z); }

BoundaryGrid::BoundaryGrid(std::size_t n) {
  if (n == 0)
    throw InvalidInput("boundary grid needs at least one node");
  nodes_.reserve(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k)
    nodes_.push_back(std::polar(1.0, step * static_cast<double>(k)));
}

std::vector<double> transversality_profile(const Holomap& h, const BoundaryGrid& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (const auto& zeta : grid.nodes())
    out.push_back(std::abs(inner(h.deriv(zeta), h.eval(zeta))));
  return out;
}

double transversality_margin(const Holomap& h, const BoundaryGrid& grid) {
  const auto profile = transversality_profile(h, grid);
  return *std::min_element(profile.begin(), profile.end());
}

InjectivityReport boundary_injectivity_check(const Holomap& h, const BoundaryGrid& grid,
                                             const Tolerances& tol) {
  std::vector<std::vector<Complex>> images;
  images.reserve(grid.size());
  for (const auto& zeta : grid.nodes())
    images.push_back(h.eval(zeta));

  InjectivityReport r;
  r.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < h.dim(); ++c)
        s += std::norm(images[i][c] - images[j][c]);
      const double dist = std::sqrt(s);
      r.min_separation = std::min(r.min_separation, dist);
      if (dist <= tol.tol_inj && r.injective) {
        r.injective = false;
        r.witness = std::make_pair(i, j);
      }
    }
  return r;
}

HolomapDiagnostics check_holomap(const Holomap& h, const BoundaryGrid& grid,
                                 const Tolerances& tol) {
  HolomapDiagnostics d;
  const double outer = 1.0 - tol.eps_ball;
  for (int ir = 1; ir <= tol.interior_radii; ++ir) {
    const double r = outer * ir / tol.interior_radii;
    for (int ia = 0; ia < tol.interior_angles; ++ia) {
      const double theta = 2.0 * std::numbers::pi * ia / tol.interior_angles;
      d.max_interior_norm_sq =
          std::max(d.max_interior_norm_sq, norm_squared(h.eval(std::polar(r, theta))));
    }
  }
  d.max_interior_norm_sq = std::max(d.max_interior_norm_sq, norm_squared(h.eval({0.0, 0.0})));
  d.interior_ok = d.max_interior_norm_sq < 1.0;

  d.min_boundary_norm_sq = std::numeric_limits<double>::infinity();
  for (const auto& zeta : grid.nodes()) {
    const double n2 = norm_squared(h.eval(zeta));
    d.min_boundary_norm_sq = std::min(d.min_boundary_norm_sq, n2);
    d.max_boundary_norm_sq = std::max(d.max_boundary_norm_sq, n2);
  }
  d.boundary_normalized = d.min_boundary_norm_sq >= 1.0 - tol.tol_proper;
  return d;
}

} // namespace pickmap
