#pragma once

namespace pickmap {

// Every threshold used by the library lives here so that a single
// experiment config can override any of them.
struct Tolerances {
  double eps_ball = 1e-12;   // |z|^2 >= 1 - eps_ball is rejected
  double tol_node = 1e-10;   // Euclidean distinctness of nodes
  double tol_psd = 1e-10;    // min eig >= -tol_psd * trace
  double tol_herm = 1e-12;   // Hermitian symmetry, relative to max |entry|
  double tol_eig = 1e-10;
  double tol_eval = 1e-14;
  double tol_chol = 1e-12;   // ||L L* - (K + jitter I)||_max <= tol_chol * trace

  double tol_transversal = 1e-6;
  double tol_inj = 1e-8;
  double tol_proper = 1e-10;
  int interior_radii = 64;
  int interior_angles = 128;

  double tol_kernel = 1e-6;  // eigenvalues below this are kernel directions of R
  double tol_oracle = 1e-8;  // quadrature vs enumeration agreement
  double tol_hs_rel = 0.02;  // Hilbert-Schmidt refinement stability

  double tol_sep = 0.05;     // minimum distance between disjoint pieces
  double tol_union = 1e-8;   // slack in the disjoint-union combination bound
  double tol_cap = 1e-8;     // slack when comparing probe norms to a cap
};

} // namespace pickmap
