#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/laurent_poly.hpp"

namespace specgraph {

// Relative size below which the leading coefficient is treated as zero; the
// corresponding roots are "at infinity" and counted, not returned.
inline constexpr double kLeadingTolerance = 1e-12;

// QR sweeps allowed per unit of matrix dimension before giving up.
inline constexpr int kSweepsPerDim = 100;

inline constexpr int kMaxEigenDim = 4096;

// Roots sorted by (|z|, arg z).
struct RootSet {
  std::vector<cplx> roots;
  int degree_deficit = 0;
};

// Frobenius companion matrix of sum_m c_m z^m: ones on the subdiagonal and
// last column -c_m / c_top. Throws InvalidInput if c_top is zero or the
// polynomial is constant.
Eigen::MatrixXcd companion_in_z(std::span<const cplx> coeffs);

// All eigenvalues (with multiplicity, unordered) via balancing, Householder
// reduction to Hessenberg form and single-shift complex QR. Throws
// NumericalError after kSweepsPerDim * dim sweeps without convergence.
std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);

// Roots of sum_m c_m z^m, m = 0..size-1.
RootSet poly_roots(std::span<const cplx> coeffs);

// roots of P(z, E_k) for each energy, order-aligned with `energies`.
std::vector<RootSet> batch_roots(const LaurentCharPoly& poly,
                                 std::span<const cplx> energies,
                                 int workers = 0);

// Reusable scratch for the hot loop of field evaluation: roots come back
// unsorted, no allocation after warm-up. Not thread-safe; use one per thread.
class RootSolver {
 public:
  // Writes the finite roots into `roots` and returns the degree deficit.
  int solve(std::span<const cplx> coeffs, std::vector<cplx>& roots);

 private:
  std::vector<cplx> work_;
};

}  // namespace specgraph
