#include "specgraph/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

#include "specgraph/bloch.hpp"
#include "specgraph/eigen_roots.hpp"
#include "specgraph/expression.hpp"
#include "specgraph/morphology.hpp"
#include "specgraph/parallel.hpp"

namespace specgraph {
namespace {

std::string describe(cplx e) {
  return "E=" + format_complex(e);
}

// Per-thread scratch for the per-pixel root solve.
struct PixelSolver {
  RootSolver solver;
  std::vector<cplx> coeffs;
  std::vector<cplx> roots;
  std::vector<double> mags;

  // Fills `mags` with the sorted root magnitudes; returns the effective
  // leading coefficient and writes the degree deficit.
  cplx solve(const LaurentCharPoly& poly, cplx energy, int& deficit) {
    coeffs.resize(static_cast<std::size_t>(poly.degree()) + 1);
    evaluate_coefficients(poly, energy, coeffs);
    try {
      deficit = solver.solve(coeffs, roots);
    } catch (const Error& e) {
      throw NumericalError("potential", std::string(e.what()) + " at " +
                                            describe(energy));
    }
    mags.resize(roots.size());
    for (std::size_t k = 0; k < roots.size(); ++k) mags[k] = std::abs(roots[k]);
    std::sort(mags.begin(), mags.end());
    return coeffs[coeffs.size() - 1 - static_cast<std::size_t>(deficit)];
  }
};

PixelSolver& pixel_solver() {
  thread_local PixelSolver s;
  return s;
}

double safe_log(double x) { return std::log(std::max(x, kLogFloor)); }

double potential_with(PixelSolver& s, const LaurentCharPoly& poly, cplx e) {
  int deficit = 0;
  const cplx lead = s.solve(poly, e, deficit);
  // Roots at infinity pair with the vanishing leading coefficient; the
  // product |a_q| * prod |z_inf| stays finite, so they are dropped together.
  double phi = -safe_log(std::abs(lead));
  const int keep = std::max(0, poly.q() - deficit);
  const int n = static_cast<int>(s.mags.size());
  for (int k = std::max(0, n - keep); k < n; ++k) phi -= safe_log(s.mags[k]);
  return phi;
}

double residual_with(PixelSolver& s, const LaurentCharPoly& poly, cplx e) {
  int deficit = 0;
  s.solve(poly, e, deficit);
  const int p = poly.p();
  if (static_cast<int>(s.mags.size()) <= p) {
    return std::numeric_limits<double>::infinity();
  }
  return s.mags[p] - s.mags[p - 1];
}

template <typename PixelFn>
ScalarField fill_field(const LaurentCharPoly& poly, const EnergyWindow& window,
                       FieldKind kind, const FieldOptions& options,
                       PixelFn fn) {
  window.validate();
  const MirrorMap mirror =
      options.use_symmetry ? mirror_map(poly, window) : MirrorMap{};
  const int res = window.resolution;
  ScalarField out(window, kind);
  parallel_for(
      static_cast<std::size_t>(res),
      [&](std::size_t i) {
        const int r = static_cast<int>(i);
        PixelSolver& s = pixel_solver();
        for (int c = 0; c < res; ++c) {
          if (mirror.canonical(res, r, c) != std::pair{r, c}) continue;
          out.at(r, c) = fn(s, window.pixel_center(r, c));
        }
      },
      options.workers, 1);
  for (int r = 0; r < res; ++r) {
    for (int c = 0; c < res; ++c) {
      const auto [rr, cc] = mirror.canonical(res, r, c);
      if (rr != r || cc != c) out.at(r, c) = out.at(rr, cc);
    }
  }
  return out;
}

}  // namespace

EnergyWindow EnergyWindow::square(cplx center, double half_width,
                                  int resolution) {
  EnergyWindow w;
  w.re_min = center.real() - half_width;
  w.re_max = center.real() + half_width;
  w.im_min = center.imag() - half_width;
  w.im_max = center.imag() + half_width;
  w.resolution = resolution;
  return w;
}

void EnergyWindow::validate() const {
  const double wr = re_max - re_min;
  const double wi = im_max - im_min;
  if (!std::isfinite(wr) || !std::isfinite(wi) || !(wr > 0.0) || !(wi > 0.0)) {
    throw InvalidInput("window", "window bounds must be finite and increasing");
  }
  if (std::abs(wr - wi) > 1e-9 * std::max(wr, wi)) {
    throw InvalidInput("window", "window must be square");
  }
  if (resolution < kMinResolution) {
    throw InvalidInput("window", "resolution must be at least " +
                                     std::to_string(kMinResolution));
  }
}

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Potential: return "potential";
    case FieldKind::Dos: return "dos";
    case FieldKind::GbzResidual: return "gbz_residual";
    case FieldKind::Binary: return "binary";
  }
  return "unknown";
}

EnergyWindow estimate_window(const LaurentCharPoly& poly, int cells,
                             double pad_fraction, int resolution,
                             int align_resolution) {
  if (!(pad_fraction >= 0.0)) {
    throw InvalidInput("window", "pad fraction must be non-negative");
  }
  const auto h = real_space_hamiltonian(poly, cells, Boundary::Open);
  const auto ev = eigenvalues(h);
  double re_lo = INFINITY, re_hi = -INFINITY, im_lo = INFINITY, im_hi = -INFINITY;
  for (const cplx& e : ev) {
    re_lo = std::min(re_lo, e.real());
    re_hi = std::max(re_hi, e.real());
    im_lo = std::min(im_lo, e.imag());
    im_hi = std::max(im_hi, e.imag());
  }
  const double re_pad = pad_fraction * 0.5 * (re_hi - re_lo);
  const double im_pad = pad_fraction * 0.5 * (im_hi - im_lo);
  re_lo -= re_pad;
  re_hi += re_pad;
  im_lo -= im_pad;
  im_hi += im_pad;

  const CoefficientSymmetry sym = coefficient_symmetry(poly);
  cplx center{0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)};
  if (sym == CoefficientSymmetry::RealAxis) center.imag(0.0);
  if (sym == CoefficientSymmetry::ImagAxis) center.real(0.0);
  double half = std::max({re_hi - center.real(), center.real() - re_lo,
                          im_hi - center.imag(), center.imag() - im_lo});
  if (!(half > 1e-9 * std::max(1.0, std::abs(center)))) half = kMinHalfWidth;
  EnergyWindow w = EnergyWindow::square(center, half, resolution);

  // A line of spectrum on the axis then falls on one pixel row instead of
  // straddling two, and thins to a symmetric skeleton.
  const int align = align_resolution > 0 ? align_resolution : resolution;
  const double shift = half / align;
  if (sym == CoefficientSymmetry::RealAxis) {
    w.im_min -= shift;
    w.im_max -= shift;
  } else if (sym == CoefficientSymmetry::ImagAxis) {
    w.re_min -= shift;
    w.re_max -= shift;
  }
  return w;
}

MirrorMap mirror_map(const LaurentCharPoly& poly, const EnergyWindow& window) {
  const CoefficientSymmetry sym = coefficient_symmetry(poly);
  if (sym == CoefficientSymmetry::None) return {};
  const double h = window.pitch();
  const double lo = sym == CoefficientSymmetry::RealAxis ? window.im_min
                                                         : window.re_min;
  // Pixel k sits at lo + (k + 0.5) h; the axis maps k to -2 lo / h - 1 - k.
  const double sum = -2.0 * lo / h - 1.0;
  const double rounded = std::round(sum);
  if (std::abs(sum - rounded) > 1e-6 || rounded < 0.0 ||
      rounded > 2.0 * (window.resolution - 1)) {
    return {};
  }
  return {sym, static_cast<int>(rounded)};
}

double potential_at(const LaurentCharPoly& poly, cplx energy) {
  return potential_with(pixel_solver(), poly, energy);
}

ScalarField spectral_potential(const LaurentCharPoly& poly,
                               const EnergyWindow& window,
                               const FieldOptions& options) {
  return fill_field(poly, window, FieldKind::Potential, options,
                    [&](PixelSolver& s, cplx e) {
                      return potential_with(s, poly, e);
                    });
}

ScalarField gbz_residual(const LaurentCharPoly& poly,
                         const EnergyWindow& window,
                         const FieldOptions& options) {
  if (poly.p() < 1 || poly.q() < 1) {
    throw InvalidInput("gbz", "residual needs p >= 1 and q >= 1, got p=" +
                                  std::to_string(poly.p()) +
                                  " q=" + std::to_string(poly.q()));
  }
  return fill_field(poly, window, FieldKind::GbzResidual, options,
                    [&](PixelSolver& s, cplx e) {
                      return residual_with(s, poly, e);
                    });
}

namespace {

inline double laplacian_dos(const ScalarField& phi, int r, int c, double scale,
                            bool clamp) {
  const int n = phi.resolution();
  const double center = phi.at(r, c);
  const double north = phi.at(std::min(r + 1, n - 1), c);
  const double south = phi.at(std::max(r - 1, 0), c);
  const double east = phi.at(r, std::min(c + 1, n - 1));
  const double west = phi.at(r, std::max(c - 1, 0));
  const double v = -((north + south) + (east + west) - 4.0 * center) * scale;
  return clamp ? (v > 0.0 ? v : 0.0) : v;
}

double dos_scale(const EnergyWindow& w) {
  const double h = w.pitch();
  return 1.0 / (2.0 * std::numbers::pi * h * h);
}

}  // namespace

ScalarField density_of_states(const ScalarField& phi, bool clamp) {
  const int n = phi.resolution();
  if (n < 3) throw InvalidInput("dos", "potential grid must be at least 3x3");
  ScalarField out(phi.window, FieldKind::Dos);
  const double scale = dos_scale(phi.window);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) out.at(r, c) = laplacian_dos(phi, r, c, scale, clamp);
  }
  return out;
}

AdaptiveResult adaptive_dos(const LaurentCharPoly& poly,
                            const EnergyWindow& window,
                            const AdaptiveOptions& options) {
  const int base = options.base_resolution;
  const int m = options.subdivision;
  if (m < 1) throw InvalidInput("dos", "subdivision must be positive");
  if (static_cast<long>(base) * m > kMaxFineResolution) {
    throw InvalidInput("dos", "fine resolution exceeds " +
                                  std::to_string(kMaxFineResolution));
  }
  const EnergyWindow coarse_window = window.with_resolution(base);
  coarse_window.validate();

  AdaptiveResult res;
  res.coarse_phi = spectral_potential(poly, coarse_window, options.field);
  res.coarse_dos = density_of_states(res.coarse_phi);

  BinaryImage mask(coarse_window);
  if (options.refine_all) {
    std::fill(mask.bits.begin(), mask.bits.end(), 1);
  } else {
    const BinaryImage above = binarize_mean(res.coarse_dos);
    if (above.count() == 0) {
      throw EmptySpectrumError("empty spectrum window: no coarse pixel above "
                               "the mean density of states",
                               res.coarse_dos);
    }
    mask = dilate_disk2(above);
  }

  RefinementPlan& plan = res.plan;
  plan.base_resolution = base;
  plan.subdivision = m;
  for (int k = 0; k < base * base; ++k) {
    if (mask.bits[k]) plan.refined.push_back(k);
  }
  plan.mask = mask.bits;

  const int fine = base * m;
  const EnergyWindow fine_window = window.with_resolution(fine);
  const MirrorMap mirror =
      options.field.use_symmetry ? mirror_map(poly, fine_window) : MirrorMap{};
  const auto fine_index = [fine](int r, int c) {
    return static_cast<std::size_t>(r) * fine + c;
  };

  // Fine pixels whose rho is needed, plus the 4-neighbor halo whose Phi the
  // stencil reads.
  std::vector<std::uint8_t> refined(static_cast<std::size_t>(fine) * fine, 0);
  std::vector<std::uint8_t> needed(refined.size(), 0);
  for (int k : plan.refined) {
    const int r0 = (k / base) * m;
    const int c0 = (k % base) * m;
    for (int dr = 0; dr < m; ++dr) {
      for (int dc = 0; dc < m; ++dc) refined[fine_index(r0 + dr, c0 + dc)] = 1;
    }
  }
  // The coarse grid is generally not mirror-symmetric (and the 2x2 element is
  // anchored off-center), so close the refined set under the mirror here.
  std::size_t refined_count = 0;
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      const auto [rr, cc] = mirror.canonical(fine, r, c);
      const std::uint8_t v = refined[fine_index(r, c)] | refined[fine_index(rr, cc)];
      refined[fine_index(r, c)] = refined[fine_index(rr, cc)] = v;
    }
  }
  for (std::uint8_t v : refined) refined_count += v;
  plan.refined_fraction =
      static_cast<double>(refined_count) / (static_cast<double>(fine) * fine);
  plan.fine_mask = refined;
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      if (!refined[fine_index(r, c)]) continue;
      needed[fine_index(r, c)] = 1;
      if (r > 0) needed[fine_index(r - 1, c)] = 1;
      if (r + 1 < fine) needed[fine_index(r + 1, c)] = 1;
      if (c > 0) needed[fine_index(r, c - 1)] = 1;
      if (c + 1 < fine) needed[fine_index(r, c + 1)] = 1;
    }
  }

  std::vector<std::size_t> todo;
  std::vector<std::uint8_t> queued(refined.size(), 0);
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      if (!needed[fine_index(r, c)]) continue;
      const auto [rr, cc] = mirror.canonical(fine, r, c);
      const std::size_t k = fine_index(rr, cc);
      if (!queued[k]) {
        queued[k] = 1;
        todo.push_back(k);
      }
    }
  }
  std::sort(todo.begin(), todo.end());

  res.phi = ScalarField(fine_window, FieldKind::Potential);
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      res.phi.at(r, c) = res.coarse_phi.at(r / m, c / m);
    }
  }
  parallel_for(
      todo.size(),
      [&](std::size_t i) {
        const std::size_t k = todo[i];
        const int r = static_cast<int>(k / fine);
        const int c = static_cast<int>(k % fine);
        res.phi.values[k] =
            potential_with(pixel_solver(), poly, fine_window.pixel_center(r, c));
      },
      options.field.workers, 256);
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      if (!needed[fine_index(r, c)]) continue;
      const auto [rr, cc] = mirror.canonical(fine, r, c);
      res.phi.at(r, c) = res.phi.at(rr, cc);
    }
  }

  res.dos = ScalarField(fine_window, FieldKind::Dos);
  const double scale = dos_scale(fine_window);
  double sum = 0.0;
  for (int r = 0; r < fine; ++r) {
    for (int c = 0; c < fine; ++c) {
      if (!refined[fine_index(r, c)]) continue;
      const double v = laplacian_dos(res.phi, r, c, scale, true);
      res.dos.at(r, c) = v;
      sum += v;
    }
  }
  // Global mean over the whole window; unrefined pixels contribute zeros.
  const double threshold = sum / (static_cast<double>(fine) * fine);
  res.binary = ScalarField(fine_window, FieldKind::Binary);
  for (std::size_t k = 0; k < refined.size(); ++k) {
    if (refined[k] && res.dos.values[k] > threshold) res.binary.values[k] = 1.0;
  }
  return res;
}

}  // namespace specgraph
