#include "specgraph/morphology.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdlib>

#include "specgraph/parallel.hpp"

namespace specgraph {
namespace {

// Neighbor k of the ring N, NE, E, SE, S, SW, W, NW as (row, col) offsets.
constexpr std::array<int, 8> kDr{-1, -1, 0, 1, 1, 1, 0, -1};
constexpr std::array<int, 8> kDc{0, 1, 1, 1, 0, -1, -1, -1};

std::array<bool, 256> build_simple_table() {
  std::array<bool, 256> table{};
  for (int cfg = 0; cfg < 256; ++cfg) {
    // Components among the ring cells: foreground with 8-adjacency,
    // background with 4-adjacency (and only those touching a 4-neighbor of
    // the center count).
    auto components = [&](bool fg) {
      std::array<int, 8> label;
      label.fill(-1);
      int count = 0;
      for (int s = 0; s < 8; ++s) {
        if (((cfg >> s) & 1) != fg || label[s] >= 0) continue;
        bool counts = fg || s % 2 == 0;
        std::array<int, 8> stack{};
        int top = 0;
        stack[top++] = s;
        label[s] = count;
        while (top > 0) {
          const int a = stack[--top];
          for (int b = 0; b < 8; ++b) {
            if (label[b] >= 0 || ((cfg >> b) & 1) != fg) continue;
            const int dr = std::abs(kDr[a] - kDr[b]);
            const int dc = std::abs(kDc[a] - kDc[b]);
            const bool adjacent = fg ? std::max(dr, dc) == 1 : dr + dc == 1;
            if (!adjacent) continue;
            label[b] = count;
            if (b % 2 == 0) counts = true;
            stack[top++] = b;
          }
        }
        if (counts) ++count;
      }
      return count;
    };
    table[cfg] = components(true) == 1 && components(false) == 1;
  }
  return table;
}

const std::array<bool, 256>& simple_table() {
  static const std::array<bool, 256> table = build_simple_table();
  return table;
}

inline int bit(std::uint8_t nbrs, int k) { return (nbrs >> k) & 1; }

bool removable(const BinaryImage& img, int r, int c) {
  const std::uint8_t nbrs = neighborhood(img, r, c);
  return std::popcount(static_cast<unsigned>(nbrs)) >= 2 && is_simple(nbrs);
}

// Mirror partner of (r, c), or (r, c) itself when it has none in the grid.
std::pair<int, int> mirror_of(const MirrorMap& m, int n, int r, int c) {
  int pr = r, pc = c;
  if (m.axis == CoefficientSymmetry::RealAxis) pr = m.index_sum - r;
  if (m.axis == CoefficientSymmetry::ImagAxis) pc = m.index_sum - c;
  if (pr < 0 || pr >= n || pc < 0 || pc >= n) return {r, c};
  return {pr, pc};
}

}  // namespace

BinaryImage BinaryImage::blank(int n) {
  EnergyWindow w;
  w.re_min = w.im_min = 0.0;
  w.re_max = w.im_max = n;
  w.resolution = n;
  return BinaryImage(w);
}

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

ScalarField to_field(const BinaryImage& img) {
  ScalarField f(img.window, FieldKind::Binary);
  for (std::size_t k = 0; k < img.bits.size(); ++k) f.values[k] = img.bits[k];
  return f;
}

BinaryImage from_field(const ScalarField& field) {
  BinaryImage img(field.window);
  for (std::size_t k = 0; k < img.bits.size(); ++k) {
    img.bits[k] = field.values[k] != 0.0;
  }
  return img;
}

BinaryImage binarize_mean(const ScalarField& field) {
  return binarize_mean(field, std::vector<std::uint8_t>(field.values.size(), 1));
}

BinaryImage binarize_mean(const ScalarField& field,
                          const std::vector<std::uint8_t>& support) {
  if (support.size() != field.values.size()) {
    throw InvalidInput("binarize", "support mask does not match the field");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (!support[k]) continue;
    sum += field.values[k];
    ++n;
  }
  BinaryImage img(field.window);
  if (n == 0) return img;
  const double mean = sum / static_cast<double>(n);
  for (std::size_t k = 0; k < support.size(); ++k) {
    img.bits[k] = support[k] && field.values[k] > mean;
  }
  return img;
}

BinaryImage dilate_disk2(const BinaryImage& img) {
  const int n = img.resolution();
  BinaryImage out(img.window);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      out.at(r, c) = img.get(r, c) | img.get(r - 1, c) | img.get(r, c - 1) |
                     img.get(r - 1, c - 1);
    }
  }
  return out;
}

bool is_simple(std::uint8_t nbrs) { return simple_table()[nbrs]; }

std::uint8_t neighborhood(const BinaryImage& img, int row, int col) {
  std::uint8_t out = 0;
  for (int k = 0; k < 8; ++k) {
    out |= static_cast<std::uint8_t>(img.get(row + kDr[k], col + kDc[k]) << k);
  }
  return out;
}

BinaryImage skeletonize(const BinaryImage& img, int workers, const MirrorMap& mirror) {
  BinaryImage out = img;
  const int n = out.resolution();
  std::vector<std::uint8_t> candidate(out.bits.size(), 0);
  std::vector<std::uint8_t> doomed(out.bits.size(), 0);

  // Symmetric stage: all border pixels that are simple non-endpoints form the
  // candidate set P; a candidate goes only if it stays simple whatever subset
  // of its candidate neighbors is removed with it (P-simple), so the whole
  // batch can be deleted at once. No scan order is involved, which keeps the
  // result equivariant under grid reflections.
  bool changed = true;
  while (changed) {
    changed = false;
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
          const int r = static_cast<int>(i);
          for (int c = 0; c < n; ++c) {
            bool take = false;
            if (out.at(r, c)) {
              const std::uint8_t nbrs = neighborhood(out, r, c);
              const bool border = !(bit(nbrs, 0) && bit(nbrs, 2) && bit(nbrs, 4) &&
                                    bit(nbrs, 6));
              take = border && std::popcount(static_cast<unsigned>(nbrs)) >= 2 &&
                     is_simple(nbrs);
            }
            candidate[static_cast<std::size_t>(r) * n + c] = take;
          }
        },
        workers, 16);
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t i) {
          const int r = static_cast<int>(i);
          for (int c = 0; c < n; ++c) {
            const std::size_t k = static_cast<std::size_t>(r) * n + c;
            doomed[k] = 0;
            if (!candidate[k]) continue;
            const std::uint8_t nbrs = neighborhood(out, r, c);
            std::uint8_t peers = 0;
            for (int d = 0; d < 8; ++d) {
              const int rr = r + kDr[d], cc = c + kDc[d];
              if (rr >= 0 && rr < n && cc >= 0 && cc < n &&
                  candidate[static_cast<std::size_t>(rr) * n + cc]) {
                peers |= static_cast<std::uint8_t>(1u << d);
              }
            }
            bool ok = true;
            // Every subset of peers, the empty one included.
            for (unsigned sub = peers;; sub = (sub - 1) & peers) {
              if (!is_simple(static_cast<std::uint8_t>(nbrs & ~sub))) {
                ok = false;
                break;
              }
              if (sub == 0) break;
            }
            doomed[k] = ok;
          }
        },
        workers, 16);
    for (std::size_t k = 0; k < out.bits.size(); ++k) {
      if (doomed[k]) {
        out.bits[k] = 0;
        changed = true;
      }
    }
  }

  // What is left is thin except where a band is an even number of pixels
  // wide, which needs a tie-break in scan order. Pixels go together with
  // their mirror image so that a symmetric input stays symmetric; a pair
  // that cannot go together stays.
  changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const auto [mr, mc] = mirror.canonical(n, r, c);
        if ((mr != r || mc != c) || !out.at(r, c) || !removable(out, r, c)) continue;
        out.at(r, c) = 0;
        const auto [pr, pc] = mirror_of(mirror, n, r, c);
        if (pr != r || pc != c) {
          if (out.at(pr, pc) && removable(out, pr, pc)) {
            out.at(pr, pc) = 0;
          } else {
            out.at(r, c) = 1;
            continue;
          }
        }
        changed = true;
      }
    }
  }
  return out;
}

std::vector<int> label_components(const BinaryImage& img, int* count) {
  const int n = img.resolution();
  std::vector<int> label(img.bits.size(), -1);
  std::vector<int> stack;
  int next = 0;
  for (int start = 0; start < n * n; ++start) {
    if (!img.bits[start] || label[start] >= 0) continue;
    label[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int r = k / n, c = k % n;
      for (int d = 0; d < 8; ++d) {
        const int rr = r + kDr[d], cc = c + kDc[d];
        if (!img.get(rr, cc)) continue;
        const int kk = rr * n + cc;
        if (label[kk] >= 0) continue;
        label[kk] = next;
        stack.push_back(kk);
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

int count_components(const BinaryImage& img) {
  int count = 0;
  label_components(img, &count);
  return count;
}

int count_holes(const BinaryImage& img) {
  const int n = img.resolution();
  std::vector<std::uint8_t> seen(img.bits.size(), 0);
  std::vector<int> stack;
  int holes = 0;
  for (int start = 0; start < n * n; ++start) {
    if (img.bits[start] || seen[start]) continue;
    bool border = false;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int r = k / n, c = k % n;
      for (int d = 0; d < 8; d += 2) {
        const int rr = r + kDr[d], cc = c + kDc[d];
        if (rr < 0 || cc < 0 || rr >= n || cc >= n) {
          border = true;
          continue;
        }
        const int kk = rr * n + cc;
        if (img.bits[kk] || seen[kk]) continue;
        seen[kk] = 1;
        stack.push_back(kk);
      }
    }
    if (!border) ++holes;
  }
  return holes;
}

}  // namespace specgraph
