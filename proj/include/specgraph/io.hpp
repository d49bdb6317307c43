#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "specgraph/morphology.hpp"
#include "specgraph/pipeline.hpp"
#include "specgraph/skeleton_graph.hpp"
#include "specgraph/spectral_field.hpp"

namespace specgraph {

inline constexpr std::string_view kSchemaVersion = "1.0";

struct GraphDocument {
  std::string schema_version{kSchemaVersion};
  std::string polynomial;  // canonical text form
  ExtractionConfig config;  // workers is not recorded
  EnergyWindow window;
  SpectralMultigraph graph;
  GraphStats stats;

  bool operator==(const GraphDocument&) const = default;
};

GraphDocument make_document(const LaurentCharPoly& poly, const ExtractionConfig& config,
                            const Extraction& extraction);

// Canonical JSON: sorted keys, shortest round-trip floats, complex numbers as
// [re, im] pairs, nodes and edges in id order, newline-terminated.
std::string serialize_graph(const GraphDocument& doc);

// Throws InvalidInput (stage "io") on malformed documents or an unknown
// schema_version.
GraphDocument parse_graph(std::string_view json);

// GraphML with pos/dos/potential node attributes and weight/avg_dos/
// avg_potential edge attributes. Edge ids are e0, e1, ... so parallel edges
// stay distinct. With include_pts each edge carries its trajectory as
// "re,im;re,im;...".
std::string export_graphml(const SpectralMultigraph& g, bool include_pts = true);

// PNG rendering. Field styles: "terrain" (potential), "inferno" (density),
// "gray". Values are scaled linearly between the field's finite min and max;
// "inferno" first takes a square root so faint bands stay visible. Row 0 of
// the grid (lowest Im E) is the bottom of the image.
std::vector<std::uint8_t> render_field(const ScalarField& field, std::string_view style);
// Set pixels white on black, one image pixel per grid pixel.
std::vector<std::uint8_t> render_binary(const BinaryImage& img);
// Edges drawn along their pts over a dimmed background (black if null), nodes
// as 3x3 squares.
std::vector<std::uint8_t> render_graph(const SpectralMultigraph& g, const EnergyWindow& window,
                                       const ScalarField* background = nullptr);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major from the top, 3 bytes per pixel
};
RgbImage decode_png(const std::vector<std::uint8_t>& png);

// Binary grid dump, little-endian: 8-byte magic "SGFIELD1", uint32 kind,
// uint32 resolution, float64 re_min, re_max, im_min, im_max, then
// resolution^2 float64 values row-major.
std::string dump_field(const ScalarField& field);
ScalarField read_field(std::string_view bytes);

// "re,im" rows, sorted by (Re, Im), shortest round-trip decimals.
std::string spectrum_csv(std::vector<cplx> values);

// Writes through a temporary file in the same directory and renames it over
// `path`, creating parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace specgraph
