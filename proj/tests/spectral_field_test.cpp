#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "specgraph/bloch.hpp"
#include "specgraph/eigen_roots.hpp"
#include "specgraph/error.hpp"
#include "specgraph/morphology.hpp"
#include "specgraph/spectral_field.hpp"

namespace specgraph {
namespace {

const char* const kChain = "z + z**-1 - E";
const char* const kTree = "-z**-2 - E - z + z**4";

EnergyWindow square(double cx, double cy, double half, int res) {
  return EnergyWindow::square({cx, cy}, half, res);
}

TEST(EnergyWindow, PixelConvention) {
  const EnergyWindow w = square(0.0, 0.0, 2.0, 256);
  const double h = 4.0 / 256;
  EXPECT_DOUBLE_EQ(w.pitch(), h);
  EXPECT_EQ(w.pixel_center(0, 0), cplx(-2.0 + h / 2, -2.0 + h / 2));
  const auto [r, c] = w.to_pixel(w.pixel_center(17, 201));
  EXPECT_NEAR(r, 17.0, 1e-9);
  EXPECT_NEAR(c, 201.0, 1e-9);
}

TEST(EnergyWindow, Validation) {
  EnergyWindow w = square(0.0, 0.0, 1.0, 16);
  EXPECT_NO_THROW(w.validate());
  w.resolution = 15;
  EXPECT_THROW(w.validate(), InvalidInput);
  w = square(0.0, 0.0, 1.0, 64);
  w.re_max = 2.0;
  EXPECT_THROW(w.validate(), InvalidInput);
  w = square(0.0, 0.0, 1.0, 64);
  w.im_min = NAN;
  EXPECT_THROW(w.validate(), InvalidInput);
}

TEST(SpectralPotential, OneSidedHoppingIsMinusLogAbsE) {
  const LaurentCharPoly poly = parse_char_poly("z - E");
  const EnergyWindow w = square(0.1, -0.2, 1.5, 48);
  const ScalarField phi = spectral_potential(poly, w);
  EXPECT_EQ(phi.kind, FieldKind::Potential);
  for (int r = 0; r < 48; ++r) {
    for (int c = 0; c < 48; ++c) {
      EXPECT_NEAR(phi.at(r, c), -std::log(std::abs(w.pixel_center(r, c))), 1e-12);
    }
  }
}

TEST(SpectralPotential, HermitianChainAtFive) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  const double z2 = (5.0 + std::sqrt(21.0)) / 2.0;
  EXPECT_NEAR(potential_at(poly, 5.0), -std::log(z2), 1e-12);
  EXPECT_NEAR(potential_at(poly, 5.0), -1.566, 1e-3);
}

TEST(SpectralPotential, MirroredMatchesDirect) {
  const LaurentCharPoly poly = parse_char_poly(kTree);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 64);
  ASSERT_EQ(mirror_map(poly, w).axis, CoefficientSymmetry::RealAxis);
  FieldOptions direct;
  direct.use_symmetry = false;
  const ScalarField a = spectral_potential(poly, w);
  const ScalarField b = spectral_potential(poly, w, direct);
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    EXPECT_NEAR(a.values[k], b.values[k], 1e-10);
  }
  const MirrorMap m = mirror_map(poly, w);
  double worst = 0.0;
  for (int r = 0; r < 64; ++r) {
    const int mr = m.index_sum - r;
    if (mr < 0 || mr >= 64) continue;
    for (int c = 0; c < 64; ++c) {
      EXPECT_EQ(a.at(r, c), a.at(mr, c));
      worst = std::max(worst, std::abs(b.at(r, c) - b.at(mr, c)));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(SpectralPotential, ImaginaryAxisMirror) {
  // P(z, iE') real in E': coefficients of E^k are i^k times reals.
  const LaurentCharPoly poly = parse_char_poly("z**2 + z**-1 - 1j*E");
  ASSERT_EQ(coefficient_symmetry(poly), CoefficientSymmetry::ImagAxis);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 48);
  ASSERT_EQ(mirror_map(poly, w).axis, CoefficientSymmetry::ImagAxis);
  FieldOptions direct;
  direct.use_symmetry = false;
  const ScalarField a = spectral_potential(poly, w);
  const ScalarField b = spectral_potential(poly, w, direct);
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    EXPECT_NEAR(a.values[k], b.values[k], 1e-10);
  }
}

TEST(SpectralPotential, WorkerCountDoesNotMatter) {
  const LaurentCharPoly poly = parse_char_poly("z**2 + 0.5j*z**-1 - E + 0.3*z**-2");
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 40);
  FieldOptions one, four;
  one.workers = 1;
  four.workers = 4;
  EXPECT_EQ(spectral_potential(poly, w, one).values,
            spectral_potential(poly, w, four).values);
}

TEST(SpectralPotential, ConstantShiftTranslatesField) {
  const EnergyWindow w = square(0.0, 0.0, 2.5, 64);
  const double h = w.pitch();
  const cplx shift{5 * h, -3 * h};
  // a_0(E) = -E becomes a_0(E - c) = -E + c.
  const LaurentCharPoly base = parse_char_poly(kChain);
  LaurentCharPoly::TermMap terms = base.monomials();
  terms[{0, 0}] += shift;
  const LaurentCharPoly moved = LaurentCharPoly::from_terms(terms);
  EnergyWindow w2 = w;
  w2.re_min += shift.real();
  w2.re_max += shift.real();
  w2.im_min += shift.imag();
  w2.im_max += shift.imag();
  const ScalarField a = spectral_potential(base, w);
  const ScalarField b = spectral_potential(moved, w2);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(DensityOfStates, QuadraticFieldHasExactLaplacian) {
  const EnergyWindow w = square(0.3, -0.1, 1.0, 32);
  ScalarField phi(w, FieldKind::Potential);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) phi.at(r, c) = std::norm(w.pixel_center(r, c));
  }
  const ScalarField raw = density_of_states(phi, false);
  const ScalarField clamped = density_of_states(phi);
  EXPECT_EQ(clamped.kind, FieldKind::Dos);
  for (int r = 1; r < 31; ++r) {
    for (int c = 1; c < 31; ++c) {
      EXPECT_NEAR(raw.at(r, c), -4.0 / (2.0 * std::numbers::pi), 1e-10);
      EXPECT_EQ(clamped.at(r, c), 0.0);
    }
  }
  for (double v : clamped.values) EXPECT_GE(v, 0.0);
}

TEST(DensityOfStates, HarmonicFieldVanishes) {
  const EnergyWindow w = square(0.0, 0.0, 3.0, 32);
  ScalarField phi(w, FieldKind::Potential);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const cplx e = w.pixel_center(r, c);
      phi.at(r, c) = e.real() + 2.0 * (e.real() * e.real() - e.imag() * e.imag());
    }
  }
  const ScalarField rho = density_of_states(phi, false);
  for (int r = 1; r < 31; ++r) {
    for (int c = 1; c < 31; ++c) EXPECT_NEAR(rho.at(r, c), 0.0, 1e-10);
  }
}

TEST(DensityOfStates, ReplicatePaddingAtBorder) {
  const EnergyWindow w = square(0.0, 0.0, 1.0, 16);
  ScalarField phi(w, FieldKind::Potential, 2.0);
  phi.at(0, 5) = 1.0;  // border pixel below its neighbors
  const ScalarField rho = density_of_states(phi, false);
  const double h2 = w.pitch() * w.pitch();
  // Neighbors: row 1 (2), columns 4 and 6 (2), and the padded copy of itself.
  EXPECT_NEAR(rho.at(0, 5), -(2.0 + 2.0 + 2.0 + 1.0 - 4.0) / h2 / (2.0 * std::numbers::pi),
              1e-9);
  EXPECT_THROW(density_of_states(ScalarField(square(0, 0, 1, 2), FieldKind::Potential)),
               InvalidInput);
}

TEST(DensityOfStates, HermitianChainMassSitsOnTheSegment) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 128);
  const ScalarField rho = density_of_states(spectral_potential(poly, w));
  double total = 0.0, near = 0.0;
  const double h = w.pitch();
  for (int r = 0; r < 128; ++r) {
    for (int c = 0; c < 128; ++c) {
      const cplx e = w.pixel_center(r, c);
      total += rho.at(r, c);
      if (std::abs(e.imag()) <= h && std::abs(e.real()) <= 2.0 + h) near += rho.at(r, c);
    }
  }
  EXPECT_GT(near / total, 0.99);
}

TEST(DensityOfStates, HarmonicOffTheLocus) {
  for (const char* text : {kChain, kTree, "z**2 + z**-1 - E", "z**-2 + 0.5*z - E + z**2"}) {
    const LaurentCharPoly poly = parse_char_poly(text);
    const EnergyWindow w = estimate_window(poly, 40, 0.2, 128);
    const ScalarField rho = density_of_states(spectral_potential(poly, w), false);
    double peak = 0.0;
    for (double v : rho.values) peak = std::max(peak, v);
    std::size_t quiet = 0;
    for (double v : rho.values) quiet += std::abs(v) < 1e-3 * peak;
    EXPECT_GE(static_cast<double>(quiet) / rho.values.size(), 0.90) << text;
  }
}

TEST(GbzResidual, HermitianChainValues) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  const ScalarField g = gbz_residual(poly, square(0.0, 0.0, 6.0, 16));
  EXPECT_EQ(g.kind, FieldKind::GbzResidual);
  for (double v : g.values) EXPECT_GE(v, 0.0);

  // Odd resolution puts the middle pixel center on the window center.
  const ScalarField at0 = gbz_residual(poly, square(0.0, 0.0, 0.17, 17));
  EXPECT_NEAR(at0.at(8, 8), 0.0, 1e-12);
  const ScalarField at5 = gbz_residual(poly, square(5.0, 0.0, 0.17, 17));
  const double z2 = (5.0 + std::sqrt(21.0)) / 2.0;
  EXPECT_NEAR(at5.at(8, 8), z2 - 1.0 / z2, 1e-9);
  EXPECT_NEAR(at5.at(8, 8), 4.58, 1e-2);
}

TEST(GbzResidual, RejectsOneSidedPolynomials) {
  const EnergyWindow w = square(0.0, 0.0, 1.0, 16);
  EXPECT_THROW(gbz_residual(parse_char_poly("z - E"), w), InvalidInput);
  EXPECT_THROW(gbz_residual(parse_char_poly("z**-1 - E"), w), InvalidInput);
}

TEST(EstimateWindow, HermitianChain) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  const EnergyWindow w = estimate_window(poly);
  EXPECT_NO_THROW(w.validate());
  EXPECT_EQ(w.resolution, 256);
  // Eigenvalues 2 cos(n pi / 41) span [-e, e], padded by 20% of the half-range.
  const double e = 2.0 * std::cos(std::numbers::pi / 41.0);
  EXPECT_NEAR(w.re_max - w.re_min, 2.0 * 1.2 * e, 1e-9);
  EXPECT_LT(w.re_min, -e);
  EXPECT_GT(w.re_max, e);
  EXPECT_LT(w.im_min, 0.0);
  EXPECT_GT(w.im_max, 0.0);
  EXPECT_NEAR(std::abs(w.center()), 0.0, w.pitch());
}

TEST(EstimateWindow, PointSpectrumUsesMinimumHalfWidth) {
  const EnergyWindow w = estimate_window(parse_char_poly("z - E"));
  EXPECT_NEAR(w.width(), 2.0 * kMinHalfWidth, 1e-12);
  EXPECT_NEAR(std::abs(w.center()), 0.0, w.pitch());
}

TEST(EstimateWindow, ContainsFiniteChainSpectrum) {
  const LaurentCharPoly poly = parse_char_poly(kTree);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 128);
  for (const cplx& e : eigenvalues(real_space_hamiltonian(poly, 40, Boundary::Open))) {
    EXPECT_GT(e.real(), w.re_min);
    EXPECT_LT(e.real(), w.re_max);
    EXPECT_GT(e.imag(), w.im_min);
    EXPECT_LT(e.imag(), w.im_max);
  }
}

TEST(EstimateWindow, SymmetricWindowsPutTheAxisOnPixelCenters) {
  const LaurentCharPoly poly = parse_char_poly(kTree);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 64, 256);
  const MirrorMap fine = mirror_map(poly, w.with_resolution(256));
  EXPECT_EQ(fine.axis, CoefficientSymmetry::RealAxis);
  EXPECT_EQ(fine.index_sum % 2, 0);
  EXPECT_NEAR(w.with_resolution(256).pixel_center(fine.index_sum / 2, 0).imag(), 0.0, 1e-12);
}

TEST(AdaptiveDos, RefinesASmallFraction) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 64, 256);
  AdaptiveOptions opts;
  opts.base_resolution = 64;
  const AdaptiveResult res = adaptive_dos(poly, w, opts);
  EXPECT_EQ(res.phi.resolution(), 256);
  EXPECT_EQ(res.binary.kind, FieldKind::Binary);
  EXPECT_LE(res.plan.refined_fraction, 0.10);
  EXPECT_GT(res.plan.refined_fraction, 0.0);
  // The coarse mask is a horizontal band around the real axis.
  const double h = w.with_resolution(64).pitch();
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      if (!res.plan.mask[static_cast<std::size_t>(r) * 64 + c]) continue;
      EXPECT_LT(std::abs(w.with_resolution(64).pixel_center(r, c).imag()), 3 * h);
    }
  }
  // Composed rho vanishes outside the refined region, which covers the
  // subdivided mask.
  ASSERT_EQ(res.plan.fine_mask.size(), 256u * 256u);
  std::size_t refined = 0;
  for (int r = 0; r < 256; ++r) {
    for (int c = 0; c < 256; ++c) {
      const std::size_t k = static_cast<std::size_t>(r) * 256 + c;
      refined += res.plan.fine_mask[k];
      if (res.plan.mask[static_cast<std::size_t>(r / 4) * 64 + c / 4]) {
        EXPECT_TRUE(res.plan.fine_mask[k]);
      }
      if (!res.plan.fine_mask[k]) {
        EXPECT_EQ(res.dos.at(r, c), 0.0);
        EXPECT_EQ(res.binary.at(r, c), 0.0);
      }
    }
  }
  EXPECT_DOUBLE_EQ(res.plan.refined_fraction, refined / (256.0 * 256.0));
}

TEST(AdaptiveDos, RefineAllAtUnitSubdivisionIsTheDirectPipeline) {
  const LaurentCharPoly poly = parse_char_poly(kTree);
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 64);
  AdaptiveOptions opts;
  opts.base_resolution = 64;
  opts.subdivision = 1;
  opts.refine_all = true;
  const AdaptiveResult res = adaptive_dos(poly, w, opts);
  const ScalarField phi = spectral_potential(poly, w);
  const ScalarField rho = density_of_states(phi);
  EXPECT_EQ(res.phi.values, phi.values);
  EXPECT_EQ(res.dos.values, rho.values);
  EXPECT_EQ(from_field(res.binary).bits, binarize_mean(rho).bits);
  EXPECT_DOUBLE_EQ(res.plan.refined_fraction, 1.0);
}

TEST(AdaptiveDos, MatchesUniformComputation) {
  for (const char* text : {kChain, kTree}) {
    const LaurentCharPoly poly = parse_char_poly(text);
    const EnergyWindow w = estimate_window(poly, 40, 0.2, 64, 256);
    AdaptiveOptions opts;
    opts.base_resolution = 64;
    const AdaptiveResult res = adaptive_dos(poly, w, opts);
    const BinaryImage uniform =
        binarize_mean(density_of_states(spectral_potential(poly, w.with_resolution(256))));
    const BinaryImage adaptive = from_field(res.binary);
    std::size_t both = 0, either = 0;
    for (std::size_t k = 0; k < uniform.bits.size(); ++k) {
      both += uniform.bits[k] && adaptive.bits[k];
      either += uniform.bits[k] || adaptive.bits[k];
    }
    EXPECT_GE(static_cast<double>(both) / either, 0.99) << text;
  }
}

TEST(AdaptiveDos, RejectsOversizedGrids) {
  const LaurentCharPoly poly = parse_char_poly(kChain);
  AdaptiveOptions opts;
  opts.base_resolution = 2048;
  opts.subdivision = 4;
  EXPECT_THROW(adaptive_dos(poly, square(0, 0, 2, 2048), opts), InvalidInput);
}

}  // namespace
}  // namespace specgraph
