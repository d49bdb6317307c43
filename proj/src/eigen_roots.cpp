#include "specgraph/eigen_roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specgraph/error.hpp"
#include "specgraph/parallel.hpp"

namespace specgraph {
namespace {

// Column-major view over a square scratch buffer.
struct Square {
  cplx* data;
  int n;
  cplx& operator()(int r, int c) const { return data[r + c * n]; }
};

inline double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Parlett-Reinsch balancing with power-of-two factors (no permutations).
// Diagonal similarity, so Hessenberg structure is preserved.
void balance(Square h) {
  constexpr double kRadix = 2.0;
  constexpr double kRadixSq = kRadix * kRadix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < h.n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (int j = 0; j < h.n; ++j) {
        if (j == i) continue;
        c += abs1(h(j, i));
        r += abs1(h(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / kRadix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= kRadix;
        c *= kRadixSq;
      }
      g = r * kRadix;
      while (c >= g) {
        f /= kRadix;
        c /= kRadixSq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (int j = 0; j < h.n; ++j) h(i, j) *= inv;
        for (int j = 0; j < h.n; ++j) h(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (similarity transform).
void reduce_to_hessenberg(Square h) {
  const int n = h.n;
  std::vector<cplx> v(n);
  for (int k = 0; k + 2 < n; ++k) {
    double norm_sq = 0.0;
    for (int i = k + 1; i < n; ++i) norm_sq += std::norm(h(i, k));
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) continue;
    const cplx x0 = h(k + 1, k);
    const double ax0 = std::abs(x0);
    const cplx phase = ax0 == 0.0 ? cplx{1.0, 0.0} : x0 / ax0;
    const cplx alpha = -phase * norm;
    // v = x - alpha e1, then normalise to unit length.
    v[k + 1] = x0 - alpha;
    for (int i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm_sq = 0.0;
    for (int i = k + 1; i < n; ++i) vnorm_sq += std::norm(v[i]);
    if (vnorm_sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(vnorm_sq);
    for (int i = k + 1; i < n; ++i) v[i] *= inv;

    // Left: rows k+1..n-1, H <- (I - 2 v v^H) H.
    for (int j = k; j < n; ++j) {
      cplx dot{0.0, 0.0};
      for (int i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
      dot *= 2.0;
      for (int i = k + 1; i < n; ++i) h(i, j) -= v[i] * dot;
    }
    // Right: columns k+1..n-1, H <- H (I - 2 v v^H).
    for (int i = 0; i < n; ++i) {
      cplx dot{0.0, 0.0};
      for (int j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
      dot *= 2.0;
      for (int j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
    }
    for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
}

// Rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
inline void make_givens(cplx a, cplx b, double& c, cplx& s) {
  const double aa = std::abs(a);
  if (b == cplx{0.0, 0.0}) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = std::conj(b) / std::abs(b);
    return;
  }
  const double r = std::hypot(aa, std::abs(b));
  c = aa / r;
  s = (a / aa) * std::conj(b) / r;
}

// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
// Wilkinson shifts. Only the active diagonal block is updated, which is all
// that eigenvalues require. Destroys h.
void hessenberg_qr(Square h, cplx* eig, std::vector<cplx>& rot_s,
                   std::vector<double>& rot_c) {
  const int n = h.n;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  rot_s.resize(n);
  rot_c.resize(n);

  const long sweep_cap = static_cast<long>(kSweepsPerDim) * std::max(n, 1);
  long sweeps = 0;
  int hi = n - 1;
  int its = 0;
  while (hi >= 0) {
    if (hi == 0) {
      eig[0] = h(0, 0);
      break;
    }
    // Find the start of the unreduced block ending at hi.
    int lo = hi;
    while (lo > 0) {
      const double sub = abs1(h(lo, lo - 1));
      double scale = abs1(h(lo - 1, lo - 1)) + abs1(h(lo, lo));
      if (scale == 0.0) {
        for (int k = 0; k <= hi; ++k) scale += abs1(h(k, k));
      }
      if (sub <= kEps * scale || sub <= kTiny) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      its = 0;
      continue;
    }
    if (++sweeps > sweep_cap) {
      throw NumericalError("eigensolver",
                           "QR iteration did not converge after " +
                               std::to_string(sweep_cap) + " sweeps");
    }
    ++its;

    cplx mu;
    if (its % 10 == 0) {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1).real());
    } else {
      const cplx a = h(hi - 1, hi - 1);
      const cplx b = h(hi - 1, hi);
      const cplx c = h(hi, hi - 1);
      const cplx d = h(hi, hi);
      const cplx half_tr = 0.5 * (a + d);
      const cplx half_diff = 0.5 * (a - d);
      const cplx disc = std::sqrt(half_diff * half_diff + b * c);
      const cplx m1 = half_tr + disc;
      const cplx m2 = half_tr - disc;
      mu = abs1(m1 - d) < abs1(m2 - d) ? m1 : m2;
    }

    for (int k = lo; k <= hi; ++k) h(k, k) -= mu;
    for (int k = lo; k < hi; ++k) {
      double c;
      cplx s;
      make_givens(h(k, k), h(k + 1, k), c, s);
      rot_c[k] = c;
      rot_s[k] = s;
      for (int j = k; j <= hi; ++j) {
        const cplx x = h(k, j);
        const cplx y = h(k + 1, j);
        h(k, j) = c * x + s * y;
        h(k + 1, j) = -std::conj(s) * x + c * y;
      }
    }
    for (int k = lo; k < hi; ++k) {
      const double c = rot_c[k];
      const cplx s = rot_s[k];
      const int last = std::min(k + 1, hi);
      for (int i = lo; i <= last; ++i) {
        const cplx x = h(i, k);
        const cplx y = h(i, k + 1);
        h(i, k) = c * x + std::conj(s) * y;
        h(i, k + 1) = -s * x + c * y;
      }
    }
    for (int k = lo; k <= hi; ++k) h(k, k) += mu;
  }
}

struct QrScratch {
  std::vector<cplx> rot_s;
  std::vector<double> rot_c;
};

bool magnitude_less(cplx a, cplx b) {
  const double ma = std::abs(a);
  const double mb = std::abs(b);
  if (ma != mb) return ma < mb;
  return std::arg(a) < std::arg(b);
}

}  // namespace

Eigen::MatrixXcd companion_in_z(std::span<const cplx> coeffs) {
  if (coeffs.size() < 2) {
    throw InvalidInput("companion", "polynomial must have degree >= 1");
  }
  const int d = static_cast<int>(coeffs.size()) - 1;
  const cplx top = coeffs[d];
  if (top == cplx{0.0, 0.0}) {
    throw InvalidInput("companion", "leading coefficient is zero");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) m(k + 1, k) = 1.0;
  for (int k = 0; k < d; ++k) m(k, d - 1) = -coeffs[k] / top;
  return m;
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw InvalidInput("eigensolver", "matrix must be square");
  }
  const int n = static_cast<int>(m.rows());
  if (n > kMaxEigenDim) {
    throw InvalidInput("eigensolver", "matrix dimension exceeds " +
                                          std::to_string(kMaxEigenDim));
  }
  std::vector<cplx> out(n);
  if (n == 0) return out;
  std::vector<cplx> buffer(m.data(), m.data() + static_cast<std::size_t>(n) * n);
  for (const cplx& v : buffer) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError("eigensolver", "matrix has non-finite entries");
    }
  }
  Square h{buffer.data(), n};
  balance(h);
  reduce_to_hessenberg(h);
  QrScratch scratch;
  hessenberg_qr(h, out.data(), scratch.rot_s, scratch.rot_c);
  return out;
}

int RootSolver::solve(std::span<const cplx> coeffs, std::vector<cplx>& roots) {
  roots.clear();
  double max_abs = 0.0;
  for (const cplx& c : coeffs) max_abs = std::max(max_abs, std::abs(c));
  if (max_abs == 0.0 || !std::isfinite(max_abs)) {
    throw InvalidInput("roots", max_abs == 0.0
                                    ? "all coefficients are zero"
                                    : "non-finite coefficient");
  }
  int top = static_cast<int>(coeffs.size()) - 1;
  int deficit = 0;
  while (top > 0 && std::abs(coeffs[top]) < kLeadingTolerance * max_abs) {
    --top;
    ++deficit;
  }
  if (top == 0) return deficit;
  if (top == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
    return deficit;
  }

  const int d = top;
  work_.assign(static_cast<std::size_t>(d) * d, cplx{0.0, 0.0});
  Square h{work_.data(), d};
  const cplx lead = coeffs[top];
  for (int k = 0; k + 1 < d; ++k) h(k + 1, k) = 1.0;
  for (int k = 0; k < d; ++k) h(k, d - 1) = -coeffs[k] / lead;
  balance(h);

  roots.resize(d);
  thread_local QrScratch scratch;
  hessenberg_qr(h, roots.data(), scratch.rot_s, scratch.rot_c);
  return deficit;
}

RootSet poly_roots(std::span<const cplx> coeffs) {
  thread_local RootSolver solver;
  RootSet out;
  out.degree_deficit = solver.solve(coeffs, out.roots);
  std::sort(out.roots.begin(), out.roots.end(), magnitude_less);
  return out;
}

std::vector<RootSet> batch_roots(const LaurentCharPoly& poly,
                                 std::span<const cplx> energies,
                                 int workers) {
  if (energies.empty()) {
    throw InvalidInput("roots", "energy list is empty");
  }
  std::vector<RootSet> out(energies.size());
  parallel_for(
      energies.size(),
      [&](std::size_t k) {
        thread_local std::vector<cplx> coeffs;
        coeffs.resize(poly.degree() + 1);
        evaluate_coefficients(poly, energies[k], coeffs);
        try {
          out[k] = poly_roots(coeffs);
        } catch (const Error& e) {
          std::ostringstream msg;
          msg << e.what() << " (E = " << energies[k].real()
              << (energies[k].imag() < 0 ? "-" : "+")
              << std::abs(energies[k].imag()) << "i)";
          throw NumericalError("roots", msg.str());
        }
      },
      workers, 256);
  return out;
}

}  // namespace specgraph
