#include "specgraph/laurent_poly.hpp"

#include <algorithm>
#include <cmath>

#include "specgraph/error.hpp"
#include "specgraph/expression.hpp"

namespace specgraph {

EnergyPolynomial::EnergyPolynomial(std::vector<cplx> coeffs)
    : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == cplx{0.0, 0.0}) {
    coeffs_.pop_back();
  }
}

LaurentCharPoly LaurentCharPoly::from_terms(const TermMap& terms) {
  std::map<int, std::vector<cplx>> rows;
  for (const auto& [key, value] : terms) {
    if (std::abs(value) < kCoefficientTolerance) continue;
    const auto [n, m] = key;
    if (m < 0) {
      throw InvalidInput("poly", "negative powers of E are not allowed");
    }
    auto& row = rows[n];
    if (static_cast<int>(row.size()) <= m) row.resize(m + 1);
    row[m] += value;
  }

  LaurentCharPoly poly;
  for (auto& [n, row] : rows) {
    for (auto& c : row) {
      if (std::abs(c) < kCoefficientTolerance) c = 0.0;
    }
    EnergyPolynomial a(std::move(row));
    if (!a.is_zero()) poly.terms_.emplace(n, std::move(a));
  }
  if (poly.terms_.empty()) {
    throw InvalidInput("poly", "polynomial is identically zero");
  }

  const int lowest = poly.terms_.begin()->first;
  const int highest = poly.terms_.rbegin()->first;
  if (lowest > 0 || highest < 0) {
    throw InvalidInput("poly",
                       "z exponents must span 0 (lowest <= 0 <= highest); "
                       "divide out the common power of z");
  }
  poly.p_ = -lowest;
  poly.q_ = highest;
  for (const auto& [n, a] : poly.terms_) {
    poly.bands_ = std::max(poly.bands_, a.degree());
  }
  if (poly.bands_ < 1) {
    throw InvalidInput("poly", "polynomial does not depend on E");
  }
  return poly;
}

const EnergyPolynomial& LaurentCharPoly::coefficient(int n) const {
  static const EnergyPolynomial kZero;
  auto it = terms_.find(n);
  return it == terms_.end() ? kZero : it->second;
}

LaurentCharPoly::TermMap LaurentCharPoly::monomials() const {
  TermMap out;
  for (const auto& [n, a] : terms_) {
    for (int m = 0; m <= a.degree(); ++m) {
      if (a.coeffs()[m] != cplx{0.0, 0.0}) out[{n, m}] = a.coeffs()[m];
    }
  }
  return out;
}

namespace {

std::string monomial_text(int n, int m) {
  std::string out;
  if (n == 1) {
    out = "z";
  } else if (n != 0) {
    out = "z**" + std::to_string(n);
  }
  if (m > 0) {
    if (!out.empty()) out += "*";
    out += m == 1 ? "E" : "E**" + std::to_string(m);
  }
  return out;
}

}  // namespace

std::string LaurentCharPoly::to_string() const {
  std::vector<std::pair<cplx, std::string>> parts;
  for (const auto& [key, value] : monomials()) {
    parts.emplace_back(value, monomial_text(key.first, key.second));
  }
  return format_sum(parts);
}

LaurentCharPoly parse_char_poly(std::string_view text) {
  const Expression expr = parse_expression(text, /*allow_parameters=*/false);
  LaurentCharPoly::TermMap terms;
  for (const auto& [key, value] : expr.terms) {
    terms[{key[0], key[1]}] += value;
  }
  return LaurentCharPoly::from_terms(terms);
}

LaurentCharPoly reciprocal(const LaurentCharPoly& poly) {
  LaurentCharPoly::TermMap terms;
  for (const auto& [key, value] : poly.monomials()) {
    terms[{-key.first, key.second}] = value;
  }
  return LaurentCharPoly::from_terms(terms);
}

LaurentCharPoly scale(const LaurentCharPoly& poly, cplx factor) {
  if (factor == cplx{0.0, 0.0}) {
    throw InvalidInput("poly", "scale factor must be nonzero");
  }
  LaurentCharPoly::TermMap terms;
  for (const auto& [key, value] : poly.monomials()) terms[key] = value * factor;
  return LaurentCharPoly::from_terms(terms);
}

void evaluate_coefficients(const LaurentCharPoly& poly, cplx energy,
                           std::span<cplx> out) {
  std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
  for (const auto& [n, a] : poly.terms()) out[n + poly.p()] = a(energy);
}

std::vector<cplx> evaluate_coefficients(const LaurentCharPoly& poly,
                                        cplx energy) {
  std::vector<cplx> out(poly.degree() + 1);
  evaluate_coefficients(poly, energy, out);
  return out;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

ClassSignature class_signature(const LaurentCharPoly& poly) {
  ClassSignature sig;
  sig.b.assign(poly.degree() + 1, 0);
  for (const auto& [n, a] : poly.terms()) sig.b[n + poly.p()] = 1;
  // a'_n = a_{-n}, so b' lists the same bits from the other end.
  sig.b_prime.assign(sig.b.rbegin(), sig.b.rend());
  // The bits alone would lose where z^0 sits, and moving it changes the
  // spectrum, so each vector is keyed with its lowest exponent.
  std::string x = std::to_string(-poly.p()) + ":" + bits_to_string(sig.b);
  std::string y = std::to_string(-poly.q()) + ":" + bits_to_string(sig.b_prime);
  if (y < x) std::swap(x, y);
  sig.canonical_key = x == y ? x : x + "|" + y;
  return sig;
}

namespace {

bool is_real(cplx c) {
  return std::abs(c.imag()) <= kCoefficientTolerance * std::abs(c);
}

}  // namespace

CoefficientSymmetry coefficient_symmetry(const LaurentCharPoly& poly) {
  const auto monos = poly.monomials();
  if (std::all_of(monos.begin(), monos.end(),
                  [](const auto& kv) { return is_real(kv.second); })) {
    return CoefficientSymmetry::RealAxis;
  }
  // Coefficients of P(z, iE') are c * i^m; try each global phase i^k.
  const cplx powers_of_i[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) {
    bool all_real = true;
    for (const auto& [key, value] : monos) {
      const cplx rotated = value * powers_of_i[key.second % 4] /
                           powers_of_i[k];
      if (!is_real(rotated)) {
        all_real = false;
        break;
      }
    }
    if (all_real) return CoefficientSymmetry::ImagAxis;
  }
  return CoefficientSymmetry::None;
}

const char* to_string(CoefficientSymmetry symmetry) {
  switch (symmetry) {
    case CoefficientSymmetry::RealAxis: return "real-axis";
    case CoefficientSymmetry::ImagAxis: return "imag-axis";
    case CoefficientSymmetry::None: return "none";
  }
  return "none";
}

}  // namespace specgraph
