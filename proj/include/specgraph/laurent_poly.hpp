#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace specgraph {

using cplx = std::complex<double>;

// Coefficients whose magnitude falls below this after like terms are combined
// are dropped from the canonical form.
inline constexpr double kCoefficientTolerance = 1e-14;

// a(E) = c_0 + c_1 E + ... + c_s E^s. The trailing coefficient is nonzero
// unless the polynomial is identically zero (empty coefficient list).
class EnergyPolynomial {
 public:
  EnergyPolynomial() = default;
  explicit EnergyPolynomial(std::vector<cplx> coeffs);

  const std::vector<cplx>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  cplx operator()(cplx energy) const {
    cplx acc{0.0, 0.0};
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
      acc = acc * energy + *it;
    }
    return acc;
  }

  bool operator==(const EnergyPolynomial&) const = default;

 private:
  std::vector<cplx> coeffs_;
};

// P(z, E) = sum_{n=-p}^{q} a_n(E) z^n, kept in canonical form: like terms
// combined, negligible coefficients dropped, p and q tight.
class LaurentCharPoly {
 public:
  // (z exponent, E exponent) -> coefficient.
  using TermMap = std::map<std::pair<int, int>, cplx>;

  // Canonicalizes and validates. Throws InvalidInput for the zero polynomial,
  // a polynomial without E, negative E powers, or a z-range not straddling 0.
  static LaurentCharPoly from_terms(const TermMap& terms);

  int p() const { return p_; }
  int q() const { return q_; }
  int degree() const { return p_ + q_; }
  int bands() const { return bands_; }

  // a_n(E); the zero polynomial when z^n is absent.
  const EnergyPolynomial& coefficient(int n) const;
  const std::map<int, EnergyPolynomial>& terms() const { return terms_; }
  TermMap monomials() const;

  // Canonical text form, accepted back by parse_char_poly.
  std::string to_string() const;

  bool operator==(const LaurentCharPoly&) const = default;

 private:
  std::map<int, EnergyPolynomial> terms_;
  int p_ = 0;
  int q_ = 0;
  int bands_ = 0;
};

LaurentCharPoly parse_char_poly(std::string_view text);

// z -> 1/z; exponents span [-q, p] afterwards. Involutive.
LaurentCharPoly reciprocal(const LaurentCharPoly& poly);

// Multiplies every coefficient by `factor` (must be nonzero).
LaurentCharPoly scale(const LaurentCharPoly& poly, cplx factor);

// (a_{-p}(E), ..., a_q(E)).
std::vector<cplx> evaluate_coefficients(const LaurentCharPoly& poly,
                                        cplx energy);
void evaluate_coefficients(const LaurentCharPoly& poly, cplx energy,
                           std::span<cplx> out);

struct ClassSignature {
  std::vector<std::uint8_t> b;        // exponents -p..q of P
  std::vector<std::uint8_t> b_prime;  // exponents -q..p of P(1/z)
  std::string canonical_key;          // order-free encoding of {b, b'}

  bool operator==(const ClassSignature&) const = default;
};

ClassSignature class_signature(const LaurentCharPoly& poly);
std::string bits_to_string(std::span<const std::uint8_t> bits);

enum class CoefficientSymmetry { RealAxis, ImagAxis, None };

// RealAxis when every coefficient is real. ImagAxis when P(z, iE') has real
// coefficients after dividing out a single global phase i^m (m = 0..3); the
// spectral graph is then mirror-symmetric about Re E = 0.
CoefficientSymmetry coefficient_symmetry(const LaurentCharPoly& poly);
const char* to_string(CoefficientSymmetry symmetry);

}  // namespace specgraph
