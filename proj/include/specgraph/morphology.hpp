#pragma once

#include <cstdint>
#include <vector>

#include "specgraph/spectral_field.hpp"

namespace specgraph {

// Square {0,1} image sharing the ScalarField pixel layout. Pixels outside the
// grid count as background everywhere.
struct BinaryImage {
  EnergyWindow window;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;
  explicit BinaryImage(const EnergyWindow& w)
      : window(w),
        bits(static_cast<std::size_t>(w.resolution) * w.resolution, 0) {}
  // Unit-pitch image over [0, n]^2 for fixtures.
  static BinaryImage blank(int n);

  int resolution() const { return window.resolution; }
  std::uint8_t& at(int row, int col) {
    return bits[static_cast<std::size_t>(row) * window.resolution + col];
  }
  std::uint8_t at(int row, int col) const {
    return bits[static_cast<std::size_t>(row) * window.resolution + col];
  }
  // Bounds-checked read; outside pixels are 0.
  std::uint8_t get(int row, int col) const {
    const int n = window.resolution;
    return row < 0 || col < 0 || row >= n || col >= n ? 0 : at(row, col);
  }
  std::size_t count() const;
  bool operator==(const BinaryImage&) const = default;
};

ScalarField to_field(const BinaryImage& img);
BinaryImage from_field(const ScalarField& field);  // bit = value != 0

// Bit set iff value > mean over all pixels. A constant field is empty.
BinaryImage binarize_mean(const ScalarField& field);
// Mean taken over pixels with support != 0 only; bits outside stay clear.
BinaryImage binarize_mean(const ScalarField& field,
                          const std::vector<std::uint8_t>& support);

// 2x2 square element anchored at its top-left cell:
// out(r, c) = in(r, c) | in(r-1, c) | in(r, c-1) | in(r-1, c-1).
BinaryImage dilate_disk2(const BinaryImage& img);

// Homotopy-preserving thinning to a one-pixel-wide skeleton (8-connected
// foreground, 4-connected background). Border pixels are peeled in fully
// parallel rounds that need no scan order; the thin residue is finished
// sequentially, removing pixels together with their image under `mirror`
// (a reflection the input is invariant under, if any) so that the skeleton
// keeps that symmetry. The result does not depend on the worker count.
BinaryImage skeletonize(const BinaryImage& img, int workers = 0,
                        const MirrorMap& mirror = {});

// True when deleting the center of the 3x3 neighborhood `nbrs` keeps the
// topology. Bit k of `nbrs` is neighbor k in the order
// N, NE, E, SE, S, SW, W, NW.
bool is_simple(std::uint8_t nbrs);
std::uint8_t neighborhood(const BinaryImage& img, int row, int col);

// Component labels (-1 for background), 8-connected foreground.
std::vector<int> label_components(const BinaryImage& img, int* count = nullptr);
int count_components(const BinaryImage& img);
// 4-connected background components not reaching the image border.
int count_holes(const BinaryImage& img);
inline int euler_characteristic(const BinaryImage& img) {
  return count_components(img) - count_holes(img);
}

}  // namespace specgraph
