#include "specgraph/bloch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "specgraph/eigen_roots.hpp"
#include "specgraph/error.hpp"
#include "specgraph/expression.hpp"

namespace specgraph {
namespace {

// Bivariate Laurent polynomial keyed by (z exponent, E exponent).
using BiPoly = LaurentCharPoly::TermMap;

BiPoly multiply(const BiPoly& a, const BiPoly& b) {
  BiPoly out;
  for (const auto& [ka, va] : a) {
    for (const auto& [kb, vb] : b) {
      out[{ka.first + kb.first, ka.second + kb.second}] += va * vb;
    }
  }
  return out;
}

void add_scaled(BiPoly& acc, const BiPoly& x, double sign) {
  for (const auto& [k, v] : x) acc[k] += sign * v;
}

}  // namespace

BlochMatrix::BlochMatrix(int size) : size_(size) {
  if (size < 1) throw InvalidInput("bloch", "matrix must be at least 1x1");
  entries_.resize(static_cast<std::size_t>(size) * size);
}

BlochMatrix BlochMatrix::parse(
    const std::vector<std::vector<std::string>>& rows) {
  const int n = static_cast<int>(rows.size());
  BlochMatrix h(n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(rows[r].size()) != n) {
      throw InvalidInput("bloch", "matrix must be square");
    }
    for (int c = 0; c < n; ++c) {
      const Expression e = parse_expression(rows[r][c], false);
      for (const auto& [key, value] : e.terms) {
        if (key[1] != 0) {
          throw InvalidInput("bloch", "entries may depend on z only");
        }
        if (std::abs(value) >= kCoefficientTolerance) {
          h.at(r, c)[key[0]] += value;
        }
      }
    }
  }
  return h;
}

std::pair<int, int> BlochMatrix::hopping_range() const {
  int lo = 0;
  int hi = 0;
  for (const auto& entry : entries_) {
    for (const auto& [j, value] : entry) {
      if (value == cplx{0.0, 0.0}) continue;
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
  }
  return {lo, hi};
}

Eigen::MatrixXcd BlochMatrix::hopping_block(int j) const {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(size_, size_);
  for (int r = 0; r < size_; ++r) {
    for (int c = 0; c < size_; ++c) {
      const auto& entry = at(r, c);
      if (auto it = entry.find(j); it != entry.end()) t(r, c) = it->second;
    }
  }
  return t;
}

LaurentCharPoly char_poly_from_bloch(const BlochMatrix& h) {
  const int s = h.size();
  if (s > kMaxSymbolicBands) {
    throw InvalidInput("bloch", "symbolic determinant limited to " +
                                    std::to_string(kMaxSymbolicBands) +
                                    " bands");
  }
  std::vector<BiPoly> m(static_cast<std::size_t>(s) * s);
  for (int r = 0; r < s; ++r) {
    for (int c = 0; c < s; ++c) {
      BiPoly& cell = m[r * s + c];
      for (const auto& [j, value] : h.at(r, c)) cell[{j, 0}] += value;
      if (r == c) cell[{0, 1}] -= 1.0;
    }
  }

  // Laplace expansion with memoised minors: minor[mask] is the determinant of
  // rows 0..popcount(mask)-1 restricted to the columns in mask. Exact over the
  // ring, no divisions, O(s 2^s) polynomial products.
  const unsigned full = (1u << s) - 1u;
  std::vector<BiPoly> minor(full + 1);
  minor[0] = BiPoly{{{0, 0}, cplx{1.0, 0.0}}};
  for (unsigned mask = 1; mask <= full; ++mask) {
    const int row = std::popcount(mask) - 1;
    BiPoly acc;
    int position = 0;
    for (int c = 0; c < s; ++c) {
      if (!(mask & (1u << c))) continue;
      const BiPoly& entry = m[row * s + c];
      if (!entry.empty()) {
        const double sign = ((row + position) % 2 == 0) ? 1.0 : -1.0;
        add_scaled(acc, multiply(entry, minor[mask & ~(1u << c)]), sign);
      }
      ++position;
    }
    minor[mask] = std::move(acc);
  }

  try {
    return LaurentCharPoly::from_terms(minor[full]);
  } catch (const InvalidInput& e) {
    throw InvalidInput("bloch", std::string("invalid Hamiltonian: ") + e.what());
  }
}

BlochMatrix bloch_from_char_poly(const LaurentCharPoly& poly) {
  const int s = poly.bands();
  // A_m(z): coefficient of E^m.
  std::vector<BlochMatrix::Entry> a(s + 1);
  for (const auto& [key, value] : poly.monomials()) {
    a[key.second][key.first] += value;
  }
  const auto& lead = a[s];
  if (lead.empty()) {
    throw InvalidInput("bloch", "leading E coefficient vanishes");
  }
  if (lead.size() != 1 || lead.begin()->first != 0) {
    throw InvalidInput("bloch",
                       "leading E coefficient must be independent of z to "
                       "build a companion Bloch matrix");
  }
  const cplx lead_value = lead.begin()->second;

  BlochMatrix h(s);
  for (int k = 0; k + 1 < s; ++k) h.at(k + 1, k)[0] = 1.0;
  for (int m = 0; m < s; ++m) {
    for (const auto& [j, value] : a[m]) {
      h.at(m, s - 1)[j] = -value / lead_value;
    }
  }
  return h;
}

Eigen::MatrixXcd real_space_hamiltonian(const BlochMatrix& h, int cells,
                                        Boundary boundary, int max_dim) {
  const auto [lo, hi] = h.hopping_range();
  const int s = h.size();
  if (cells < hi - lo + 1) {
    throw InvalidInput("real_space", "need at least " +
                                         std::to_string(hi - lo + 1) +
                                         " cells for the hopping range");
  }
  if (static_cast<long>(cells) * s > max_dim) {
    throw InvalidInput("real_space", "dimension " + std::to_string(cells * s) +
                                         " exceeds max_dim " +
                                         std::to_string(max_dim));
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(cells * s, cells * s);
  for (int j = lo; j <= hi; ++j) {
    const Eigen::MatrixXcd t = h.hopping_block(j);
    if (t.isZero(0.0)) continue;
    for (int x = 0; x < cells; ++x) {
      int other = x - j;  // block (x, x') = T_{x - x'}
      if (other < 0 || other >= cells) {
        if (boundary == Boundary::Open) continue;
        other = ((other % cells) + cells) % cells;
      }
      out.block(x * s, other * s, s, s) += t;
    }
  }
  return out;
}

Eigen::MatrixXcd real_space_hamiltonian(const LaurentCharPoly& poly, int cells,
                                        Boundary boundary, int max_dim) {
  return real_space_hamiltonian(bloch_from_char_poly(poly), cells, boundary,
                                max_dim);
}

std::vector<cplx> chain_spectrum(const LaurentCharPoly& poly, int cells,
                                 Boundary boundary, int max_dim) {
  std::vector<cplx> ev =
      eigenvalues(real_space_hamiltonian(poly, cells, boundary, max_dim));
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return ev;
}

}  // namespace specgraph
