#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/laurent_poly.hpp"

namespace specgraph {

// Square matrix H(z) whose entries are Laurent polynomials in z. The
// coefficient of z^j across all entries is the hopping block T_j.
class BlochMatrix {
 public:
  using Entry = std::map<int, cplx>;  // z exponent -> coefficient

  explicit BlochMatrix(int size);

  // Each entry is parsed with the polynomial grammar and may only use z.
  static BlochMatrix parse(const std::vector<std::vector<std::string>>& rows);

  int size() const { return size_; }
  Entry& at(int row, int col) { return entries_[row * size_ + col]; }
  const Entry& at(int row, int col) const { return entries_[row * size_ + col]; }

  // Lowest and highest z exponent over all entries, widened to include 0.
  std::pair<int, int> hopping_range() const;
  Eigen::MatrixXcd hopping_block(int j) const;

  bool operator==(const BlochMatrix&) const = default;

 private:
  int size_;
  std::vector<Entry> entries_;
};

inline constexpr int kMaxSymbolicBands = 8;

// det[H(z) - E I] expanded exactly over the Laurent ring. The E^s term
// carries the sign (-1)^s. Throws InvalidInput for s > 8 or a vanishing
// determinant.
LaurentCharPoly char_poly_from_bloch(const BlochMatrix& h);

// Companion matrix in E: subdiagonal ones and last column -A_m(z)/A_s where
// P = sum_m A_m(z) E^m. The leading coefficient A_s must be a nonzero
// constant. char_poly_from_bloch of the result equals (-1)^s P / A_s.
BlochMatrix bloch_from_char_poly(const LaurentCharPoly& poly);

enum class Boundary { Open, Periodic };

inline constexpr int kDefaultMaxDim = 500;

// Block-Toeplitz finite-chain Hamiltonian with block (x, x') = T_{x - x'},
// so H(z) = z gives a lower shift matrix. Periodic boundaries add the
// wrap-around blocks. Throws InvalidInput when cells < p + q + 1 or the
// dimension exceeds max_dim.
Eigen::MatrixXcd real_space_hamiltonian(const BlochMatrix& h, int cells,
                                        Boundary boundary,
                                        int max_dim = kDefaultMaxDim);
Eigen::MatrixXcd real_space_hamiltonian(const LaurentCharPoly& poly, int cells,
                                        Boundary boundary,
                                        int max_dim = kDefaultMaxDim);

// Eigenvalues of the finite chain sorted by (Re, Im).
std::vector<cplx> chain_spectrum(const LaurentCharPoly& poly, int cells,
                                 Boundary boundary = Boundary::Open,
                                 int max_dim = kDefaultMaxDim);

}  // namespace specgraph
