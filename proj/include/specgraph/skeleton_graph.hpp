#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "specgraph/morphology.hpp"
#include "specgraph/spectral_field.hpp"

namespace specgraph {

enum class PixelRole : std::uint8_t { Background, Isolated, Leaf, Path, Junction };
const char* to_string(PixelRole role);

// Two skeleton pixels are linked when 4-adjacent, or diagonal with both
// shared 4-neighbors clear. Dropping the redundant diagonals keeps the
// 8-connected components but makes corners of a thin line plain path pixels.
bool skeleton_linked(const BinaryImage& skel, int r0, int c0, int r1, int c1);

// Role from the number of linked neighbors: 0 isolated, 1 leaf, 2 path,
// 3+ junction.
std::vector<PixelRole> classify_pixels(const BinaryImage& skel);

struct RoleCounts {
  std::size_t isolated = 0;
  std::size_t leaf = 0;
  std::size_t path = 0;
  std::size_t junction = 0;
};
RoleCounts count_roles(const std::vector<PixelRole>& roles);

using Pixel = std::pair<int, int>;  // (row, col)

struct PixelGraph {
  struct Node {
    double row = 0.0;  // centroid of `pixels`
    double col = 0.0;
    std::vector<Pixel> pixels;
  };
  struct Edge {
    int u = 0;
    int v = 0;
    // Traced pixels from a pixel of node u to a pixel of node v, inclusive.
    std::vector<Pixel> pixels;
  };
  int resolution = 0;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};

// Junction clusters (8-connected) become one node each, as do leaves and
// isolated pixels. Every run of path pixels between nodes becomes an edge;
// a cycle without junctions becomes a self-loop on its lexicographically
// smallest pixel.
PixelGraph trace_edges(const BinaryImage& skel, const std::vector<PixelRole>& roles);

struct GraphNode {
  cplx pos;
  double dos = 0.0;
  double potential = 0.0;
  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 0.0;  // polyline length of pts in energy units
  std::vector<cplx> pts;
  double avg_dos = 0.0;
  double avg_potential = 0.0;
  bool operator==(const GraphEdge&) const = default;
};

// Node ids are positions in `nodes`. Parallel edges and self-loops allowed.
struct SpectralMultigraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  bool operator==(const SpectralMultigraph&) const = default;
};

double polyline_length(const std::vector<cplx>& pts);
std::vector<int> node_degrees(const SpectralMultigraph& g);  // self-loop adds 2
int count_components(const SpectralMultigraph& g);

// Pixel positions become pixel-center energies. Edge pts are the endpoint
// node positions with the interior traced pixels between them; averages run
// over the traced pixels; node values come from the nearest pixel.
SpectralMultigraph to_energy_coords(const PixelGraph& g, const ScalarField& phi,
                                    const ScalarField& dos);

struct MergeOptions {
  double tol_px = 5.0;         // single-linkage radius; 0 disables merging
  double short_edge_px = 0.0;  // contract edges shorter than this; 0 disables
  bool remove_isolated = true;
};

// Post-processing in energy units with `pitch` energy per pixel: merge nodes
// within tol_px, contract short edges, then drop nodes without edges. Moved
// nodes have their new position added to the ends of incident edges' pts.
SpectralMultigraph merge_nearby_nodes(const SpectralMultigraph& g, double pitch,
                                      const MergeOptions& options = {});

}  // namespace specgraph
