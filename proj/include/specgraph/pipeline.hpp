#pragma once

#include <optional>

#include "specgraph/laurent_poly.hpp"
#include "specgraph/morphology.hpp"
#include "specgraph/skeleton_graph.hpp"
#include "specgraph/spectral_field.hpp"

namespace specgraph {

struct ExtractionConfig {
  int base_resolution = 256;
  int subdivision = 4;
  double merge_tol_px = 5.0;
  double short_edge_px = 20.0;  // contracts tip spurs left by thinning
  int cells = 40;  // open chain used to size the window
  double pad_fraction = 0.20;
  bool use_symmetry = true;
  int workers = 0;
  std::optional<EnergyWindow> window;  // overrides the estimate; resolution ignored

  bool operator==(const ExtractionConfig&) const = default;
};

struct GraphStats {
  int node_count = 0;
  int edge_count = 0;
  int component_count = 0;
  double refined_fraction = 0.0;
  bool operator==(const GraphStats&) const = default;
};

struct Extraction {
  EnergyWindow window;  // at the fine resolution
  AdaptiveResult fields;
  BinaryImage skeleton;
  SpectralMultigraph raw_graph;  // before merging
  SpectralMultigraph graph;
  GraphStats stats;
};

// Window estimate, adaptive DOS, thinning, tracing and post-processing.
// Failures are rethrown with the stage preserved and the polynomial named.
Extraction extract(const LaurentCharPoly& poly, const ExtractionConfig& config = {});

inline SpectralMultigraph spectral_graph(const LaurentCharPoly& poly,
                                         const ExtractionConfig& config = {}) {
  return extract(poly, config).graph;
}

GraphStats graph_stats(const SpectralMultigraph& g, double refined_fraction);

}  // namespace specgraph
