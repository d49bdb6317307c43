#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "specgraph/error.hpp"
#include "specgraph/laurent_poly.hpp"

namespace specgraph {

// Square region of the complex energy plane sampled at resolution^2 pixel
// centers. Row r, column c sits at
//   (re_min + (c + 0.5) h) + i (im_min + (r + 0.5) h),  h = width / resolution,
// so row 0 is the bottom (most negative Im E) edge.
struct EnergyWindow {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  int resolution = 256;

  static EnergyWindow square(cplx center, double half_width, int resolution);

  double width() const { return re_max - re_min; }
  double pitch() const { return width() / resolution; }
  cplx center() const {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
  cplx pixel_center(int row, int col) const {
    const double h = pitch();
    return {re_min + (col + 0.5) * h, im_min + (row + 0.5) * h};
  }
  // Fractional (row, col) whose pixel center is `e`.
  std::pair<double, double> to_pixel(cplx e) const {
    const double h = pitch();
    return {(e.imag() - im_min) / h - 0.5, (e.real() - re_min) / h - 0.5};
  }
  EnergyWindow with_resolution(int r) const {
    EnergyWindow w = *this;
    w.resolution = r;
    return w;
  }
  // Throws InvalidInput unless finite, square (to 1e-9 relative) and
  // resolution >= 16.
  void validate() const;
  bool operator==(const EnergyWindow&) const = default;
};

inline constexpr int kMinResolution = 16;
inline constexpr int kMaxFineResolution = 4096;
inline constexpr double kLogFloor = 1e-300;
inline constexpr double kMinHalfWidth = 1.0;

enum class FieldKind { Potential, Dos, GbzResidual, Binary };
const char* to_string(FieldKind kind);

// Row-major resolution x resolution grid.
struct ScalarField {
  EnergyWindow window;
  FieldKind kind = FieldKind::Potential;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(EnergyWindow w, FieldKind k, double fill = 0.0)
      : window(w),
        kind(k),
        values(static_cast<std::size_t>(w.resolution) * w.resolution, fill) {}

  int resolution() const { return window.resolution; }
  double& at(int row, int col) {
    return values[static_cast<std::size_t>(row) * window.resolution + col];
  }
  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * window.resolution + col];
  }
};

// Window enclosing the open-chain spectrum of `cells` unit cells, padded by
// pad_fraction of the half-range on each side and grown to a square. A point
// spectrum gets half-width kMinHalfWidth. With a mirror symmetry the window is
// offset by half a pixel of an `align_resolution` grid (default: resolution)
// so that the mirror axis runs through a row (column) of pixel centers there.
EnergyWindow estimate_window(const LaurentCharPoly& poly, int cells = 40,
                             double pad_fraction = 0.20, int resolution = 256,
                             int align_resolution = 0);

struct FieldOptions {
  bool use_symmetry = true;  // compute half the window and mirror
  int workers = 0;
};

// Pixel reflection induced by a coefficient symmetry. Rows (RealAxis) or
// columns (ImagAxis) k and index_sum - k hold mirror-image energies; pixels
// whose mirror falls outside the grid have no partner.
struct MirrorMap {
  CoefficientSymmetry axis = CoefficientSymmetry::None;
  int index_sum = 0;

  // The pixel whose value (r, c) copies: its mirror if that lies inside the
  // grid with a larger index, else (r, c) itself.
  std::pair<int, int> canonical(int res, int r, int c) const {
    if (axis == CoefficientSymmetry::RealAxis) {
      const int m = index_sum - r;
      if (m > r && m < res) r = m;
    } else if (axis == CoefficientSymmetry::ImagAxis) {
      const int m = index_sum - c;
      if (m > c && m < res) c = m;
    }
    return {r, c};
  }
};

// The polynomial's mirror symmetry if the window's pixel centers are closed
// under it, else an identity map.
MirrorMap mirror_map(const LaurentCharPoly& poly, const EnergyWindow& window);

// Phi(E) = -log|a_q(E)| - sum_{i=p+1}^{p+q} log|z_i(E)| for one energy.
double potential_at(const LaurentCharPoly& poly, cplx energy);

ScalarField spectral_potential(const LaurentCharPoly& poly,
                               const EnergyWindow& window,
                               const FieldOptions& options = {});

// rho = -(1/2pi) * 5-point Laplacian / h^2 with replicate padding.
ScalarField density_of_states(const ScalarField& phi, bool clamp = true);

// |z_{p+1}(E)| - |z_p(E)| per pixel; requires p >= 1 and q >= 1.
ScalarField gbz_residual(const LaurentCharPoly& poly,
                         const EnergyWindow& window,
                         const FieldOptions& options = {});

struct RefinementPlan {
  std::vector<std::uint8_t> mask;  // coarse resolution, dilated
  int base_resolution = 0;
  int subdivision = 1;
  std::vector<int> refined;  // coarse pixel indices (row * base + col)
  // Fine pixels where rho was computed: the subdivided mask, closed under the
  // window's mirror symmetry.
  std::vector<std::uint8_t> fine_mask;
  double refined_fraction = 0.0;  // fine_mask count / fine pixel count
};

struct AdaptiveResult {
  ScalarField coarse_phi;
  ScalarField coarse_dos;
  ScalarField phi;     // fine; unrefined pixels carry the coarse parent value
  ScalarField dos;     // fine; zero outside the refined region
  ScalarField binary;  // fine
  RefinementPlan plan;
};

struct AdaptiveOptions {
  int base_resolution = 256;
  int subdivision = 4;
  bool refine_all = false;  // skip the coarse mask (consistency checks)
  FieldOptions field;
};

class EmptySpectrumError : public Error {
 public:
  EmptySpectrumError(std::string message, ScalarField coarse)
      : Error("dos", std::move(message)), coarse_(std::move(coarse)) {}
  const ScalarField& coarse_field() const { return coarse_; }

 private:
  ScalarField coarse_;
};

// Two-stage computation: coarse Phi and rho, global-mean mask dilated by the
// 2x2 element, then Phi and rho on the subdivided masked pixels only. The
// final binary field thresholds the composed rho (zero outside the refined
// region) by its mean over the whole window.
AdaptiveResult adaptive_dos(const LaurentCharPoly& poly,
                            const EnergyWindow& window,
                            const AdaptiveOptions& options = {});

}  // namespace specgraph
