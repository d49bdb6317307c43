#include "specgraph/pipeline.hpp"

#include "specgraph/error.hpp"

namespace specgraph {

GraphStats graph_stats(const SpectralMultigraph& g, double refined_fraction) {
  GraphStats s;
  s.node_count = static_cast<int>(g.nodes.size());
  s.edge_count = static_cast<int>(g.edges.size());
  s.component_count = count_components(g);
  s.refined_fraction = refined_fraction;
  return s;
}

Extraction extract(const LaurentCharPoly& poly, const ExtractionConfig& config) {
  try {
    const EnergyWindow base =
        config.window ? config.window->with_resolution(config.base_resolution)
                      : estimate_window(poly, config.cells, config.pad_fraction,
                                        config.base_resolution,
                                        config.base_resolution * config.subdivision);
    Extraction out;
    AdaptiveOptions opts;
    opts.base_resolution = config.base_resolution;
    opts.subdivision = config.subdivision;
    opts.field.use_symmetry = config.use_symmetry;
    opts.field.workers = config.workers;
    out.fields = adaptive_dos(poly, base, opts);
    out.window = out.fields.binary.window;

    const MirrorMap mirror =
        config.use_symmetry ? mirror_map(poly, out.window) : MirrorMap{};
    out.skeleton = skeletonize(from_field(out.fields.binary), config.workers, mirror);
    const PixelGraph pixels = trace_edges(out.skeleton, classify_pixels(out.skeleton));
    out.raw_graph = to_energy_coords(pixels, out.fields.phi, out.fields.dos);

    MergeOptions merge;
    merge.tol_px = config.merge_tol_px;
    merge.short_edge_px = config.short_edge_px;
    out.graph = merge_nearby_nodes(out.raw_graph, out.window.pitch(), merge);
    out.stats = graph_stats(out.graph, out.fields.plan.refined_fraction);
    return out;
  } catch (const EmptySpectrumError&) {
    throw;
  } catch (const Error& e) {
    const std::string what = e.what();
    const std::string prefix = e.stage() + ": ";
    throw Error(e.stage(), what.substr(what.rfind(prefix, 0) == 0 ? prefix.size() : 0) +
                               " (polynomial " + poly.to_string() + ")");
  }
}

}  // namespace specgraph
