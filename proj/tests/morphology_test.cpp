#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "specgraph/morphology.hpp"
#include "specgraph/pipeline.hpp"
#include "specgraph/skeleton_graph.hpp"
#include "specgraph/spectral_field.hpp"

namespace specgraph {
namespace {

BinaryImage from_rows(const std::vector<std::string>& rows) {
  BinaryImage img = BinaryImage::blank(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      img.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c] == '#';
    }
  }
  return img;
}

BinaryImage random_image(std::mt19937_64& rng, int n, double density) {
  BinaryImage img = BinaryImage::blank(n);
  std::bernoulli_distribution on(density);
  for (auto& b : img.bits) b = on(rng);
  return img;
}

// Unions of disks, rectangles and annuli with a sprinkle of noise.
BinaryImage random_blobs(std::mt19937_64& rng, int n) {
  BinaryImage img = BinaryImage::blank(n);
  std::uniform_int_distribution<int> pos(2, n - 3);
  std::uniform_int_distribution<int> size(2, n / 4);
  std::uniform_int_distribution<int> shapes(1, 5);
  std::uniform_int_distribution<int> kind(0, 2);
  const int count = shapes(rng);
  for (int s = 0; s < count; ++s) {
    const int cr = pos(rng), cc = pos(rng), a = size(rng), b = size(rng);
    const int k = kind(rng);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const double d = std::hypot(r - cr, c - cc);
        bool in = false;
        if (k == 0) in = d <= a;
        if (k == 1) in = std::abs(r - cr) <= a && std::abs(c - cc) <= b / 2;
        if (k == 2) in = d <= a + 2 && d >= a - 1;
        if (in) img.at(r, c) = 1;
      }
    }
  }
  std::bernoulli_distribution flip(0.01);
  for (auto& b : img.bits) {
    if (flip(rng)) b ^= 1;
  }
  return img;
}

bool subset(const BinaryImage& a, const BinaryImage& b) {
  for (std::size_t k = 0; k < a.bits.size(); ++k) {
    if (a.bits[k] && !b.bits[k]) return false;
  }
  return true;
}

bool one_pixel_wide(const BinaryImage& img) {
  for (int r = 0; r < img.resolution(); ++r) {
    for (int c = 0; c < img.resolution(); ++c) {
      if (img.at(r, c) && neighborhood(img, r, c) == 0xFF) return false;
    }
  }
  return true;
}

TEST(BinarizeMean, StrictlyAboveTheMean) {
  ScalarField f(EnergyWindow::square({0, 0}, 1.0, 16), FieldKind::Dos);
  f.values[37] = 256.0;  // mean 1; the other pixels are zero
  EXPECT_EQ(binarize_mean(f).count(), 1u);
  EXPECT_EQ(binarize_mean(f).bits[37], 1);

  ScalarField flat(EnergyWindow::square({0, 0}, 1.0, 16), FieldKind::Dos, 3.5);
  EXPECT_EQ(binarize_mean(flat).count(), 0u);
}

TEST(BinarizeMean, FourValueExample) {
  // {0, 0, 0, 4} repeated: the mean is 1 and only the 4s survive.
  ScalarField f(EnergyWindow::square({0, 0}, 1.0, 16), FieldKind::Dos);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = k % 4 == 3 ? 4.0 : 0.0;
  const BinaryImage img = binarize_mean(f);
  EXPECT_EQ(img.count(), f.values.size() / 4);
  for (std::size_t k = 0; k < f.values.size(); ++k) EXPECT_EQ(img.bits[k], k % 4 == 3);
}

TEST(BinarizeMean, SupportRestrictsTheMean) {
  ScalarField f(EnergyWindow::square({0, 0}, 1.0, 16), FieldKind::Dos, 1.0);
  std::vector<std::uint8_t> support(f.values.size(), 0);
  support[0] = support[1] = 1;
  f.values[0] = 3.0;
  const BinaryImage img = binarize_mean(f, support);
  EXPECT_EQ(img.count(), 1u);
  EXPECT_EQ(img.bits[0], 1);
  EXPECT_THROW(binarize_mean(f, std::vector<std::uint8_t>(3, 1)), InvalidInput);
}

TEST(BinarizeMean, HermitianChainIsOneComponent) {
  const LaurentCharPoly poly = parse_char_poly("z + z**-1 - E");
  const EnergyWindow w = estimate_window(poly, 40, 0.2, 128);
  const BinaryImage img = binarize_mean(density_of_states(spectral_potential(poly, w)));
  EXPECT_GT(img.count(), 0u);
  EXPECT_EQ(count_components(img), 1);
}

TEST(Dilate, SinglePixelBecomesTwoByTwo) {
  BinaryImage img = BinaryImage::blank(16);
  img.at(5, 7) = 1;
  const BinaryImage out = dilate_disk2(img);
  EXPECT_EQ(out.count(), 4u);
  EXPECT_TRUE(out.at(5, 7) && out.at(6, 7) && out.at(5, 8) && out.at(6, 8));
  EXPECT_EQ(dilate_disk2(BinaryImage::blank(16)).count(), 0u);
}

TEST(Dilate, DistributesOverUnionAndIsMonotone) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const BinaryImage a = random_image(rng, 24, 0.1);
    const BinaryImage b = random_image(rng, 24, 0.1);
    BinaryImage u = a;
    for (std::size_t k = 0; k < u.bits.size(); ++k) u.bits[k] |= b.bits[k];
    BinaryImage du = dilate_disk2(a);
    const BinaryImage db = dilate_disk2(b);
    for (std::size_t k = 0; k < du.bits.size(); ++k) du.bits[k] |= db.bits[k];
    EXPECT_EQ(dilate_disk2(u), du);
    EXPECT_TRUE(subset(a, dilate_disk2(a)));
    EXPECT_TRUE(subset(dilate_disk2(a), dilate_disk2(u)));
  }
}

TEST(IsSimple, KnownConfigurations) {
  EXPECT_FALSE(is_simple(0x00));                  // isolated pixel
  EXPECT_TRUE(is_simple(0x01));                   // end of a line
  EXPECT_FALSE(is_simple(0x11));                  // N and S: a bridge
  EXPECT_TRUE(is_simple(0x07));                   // N, NE, E: a corner
  EXPECT_FALSE(is_simple(0xFF));                  // interior
  EXPECT_FALSE(is_simple(0x55));                  // plus-shaped crossing
  EXPECT_TRUE(is_simple(0x83));                   // NW, N, NE: edge of a blob
}

TEST(Skeletonize, RectangleBecomesHorizontalPath) {
  BinaryImage img = BinaryImage::blank(16);
  for (int r = 6; r < 9; ++r) {
    for (int c = 3; c < 13; ++c) img.at(r, c) = 1;
  }
  const BinaryImage skel = skeletonize(img);
  ASSERT_GT(skel.count(), 0u);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      if (skel.at(r, c)) {
        EXPECT_EQ(r, 7) << "pixel off the midline at column " << c;
      }
    }
  }
  const RoleCounts roles = count_roles(classify_pixels(skel));
  EXPECT_EQ(roles.leaf, 2u);
  EXPECT_EQ(roles.junction, 0u);
  EXPECT_GE(skel.count(), 6u);
}

TEST(Skeletonize, AnnulusBecomesOneCycle) {
  BinaryImage img = BinaryImage::blank(32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) {
      const double d = std::hypot(r - 15.5, c - 15.5);
      img.at(r, c) = d >= 6.0 && d <= 10.0;
    }
  }
  const BinaryImage skel = skeletonize(img);
  EXPECT_EQ(count_components(skel), 1);
  EXPECT_EQ(count_holes(skel), 1);
  EXPECT_TRUE(one_pixel_wide(skel));
  const RoleCounts roles = count_roles(classify_pixels(skel));
  EXPECT_EQ(roles.leaf, 0u);
  EXPECT_EQ(roles.junction, 0u);
  EXPECT_EQ(roles.path, skel.count());
}

TEST(Skeletonize, RandomBlobsKeepTopology) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryImage img = random_blobs(rng, 40);
    const BinaryImage skel = skeletonize(img);
    ASSERT_EQ(count_components(skel), count_components(img)) << "trial " << trial;
    ASSERT_EQ(count_holes(skel), count_holes(img)) << "trial " << trial;
    ASSERT_EQ(euler_characteristic(skel), euler_characteristic(img));
    ASSERT_TRUE(subset(skel, img));
    ASSERT_TRUE(one_pixel_wide(skel));
    ASSERT_EQ(skeletonize(skel), skel) << "not idempotent, trial " << trial;
  }
}

TEST(Skeletonize, WorkerCountDoesNotMatter) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const BinaryImage img = random_blobs(rng, 48);
    EXPECT_EQ(skeletonize(img, 1), skeletonize(img, 3));
  }
}

TEST(Skeletonize, SymmetricInputGivesSymmetricSkeleton) {
  std::mt19937_64 rng(17);
  const int n = 41;
  MirrorMap rows;
  rows.axis = CoefficientSymmetry::RealAxis;
  rows.index_sum = n - 1;
  MirrorMap cols;
  cols.axis = CoefficientSymmetry::ImagAxis;
  cols.index_sum = n - 1;
  for (int trial = 0; trial < 50; ++trial) {
    BinaryImage img = random_blobs(rng, n);
    const bool by_rows = trial % 2 == 0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const int mr = by_rows ? n - 1 - r : r;
        const int mc = by_rows ? c : n - 1 - c;
        img.at(r, c) |= img.at(mr, mc);
        img.at(mr, mc) = img.at(r, c);
      }
    }
    const BinaryImage skel = skeletonize(img, 0, by_rows ? rows : cols);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const int mr = by_rows ? n - 1 - r : r;
        const int mc = by_rows ? c : n - 1 - c;
        ASSERT_EQ(skel.at(r, c), skel.at(mr, mc)) << "trial " << trial;
      }
    }
    EXPECT_EQ(euler_characteristic(skel), euler_characteristic(img));
  }
}

TEST(Skeletonize, CayleyTreeSkeletonIsATree) {
  const LaurentCharPoly poly = parse_char_poly("-z**-2 - E - z + z**4");
  ExtractionConfig config;
  config.base_resolution = 128;
  const Extraction ex = extract(poly, config);
  EXPECT_EQ(count_components(ex.skeleton), 1);
  EXPECT_EQ(count_holes(ex.skeleton), 0);
  EXPECT_TRUE(one_pixel_wide(ex.skeleton));
  EXPECT_TRUE(subset(ex.skeleton, from_field(ex.fields.binary)));
}

TEST(Components, CountsAndHoles) {
  const BinaryImage img = from_rows({
      "#####...........",
      "#...#.....#.....",
      "#####......#....",
      "...........#....",
      "......#.........",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
      "................",
  });
  EXPECT_EQ(count_components(img), 3);
  EXPECT_EQ(count_holes(img), 1);
  EXPECT_EQ(euler_characteristic(img), 2);
  int count = 0;
  const std::vector<int> labels = label_components(img, &count);
  EXPECT_EQ(count, 3);
  EXPECT_EQ(labels[0], labels[2 * 16 + 4]);
  EXPECT_EQ(labels[16 + 1], -1);
}

}  // namespace
}  // namespace specgraph
