#include "specgraph/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "specgraph/error.hpp"
#include "specgraph/expression.hpp"

namespace specgraph {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw InvalidInput("io", message); }

json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

json window_json(const EnergyWindow& w) {
  return {{"re_min", w.re_min}, {"re_max", w.re_max}, {"im_min", w.im_min},
          {"im_max", w.im_max}, {"resolution", w.resolution}};
}

json config_json(const ExtractionConfig& c) {
  return {{"base_resolution", c.base_resolution},
          {"subdivision", c.subdivision},
          {"merge_tol_px", c.merge_tol_px},
          {"short_edge_px", c.short_edge_px},
          {"cells", c.cells},
          {"pad_fraction", c.pad_fraction},
          {"use_symmetry", c.use_symmetry},
          {"window", c.window ? window_json(*c.window) : json(nullptr)}};
}

json document_json(const GraphDocument& doc) {
  json nodes = json::array();
  for (std::size_t i = 0; i < doc.graph.nodes.size(); ++i) {
    const GraphNode& n = doc.graph.nodes[i];
    nodes.push_back({{"id", i},
                     {"pos", complex_json(n.pos)},
                     {"dos", n.dos},
                     {"potential", n.potential}});
  }
  json edges = json::array();
  for (std::size_t k = 0; k < doc.graph.edges.size(); ++k) {
    const GraphEdge& e = doc.graph.edges[k];
    json pts = json::array();
    for (cplx p : e.pts) pts.push_back(complex_json(p));
    edges.push_back({{"id", k},
                     {"u", e.u},
                     {"v", e.v},
                     {"weight", e.weight},
                     {"point_count", e.pts.size()},
                     {"pts", std::move(pts)},
                     {"avg_dos", e.avg_dos},
                     {"avg_potential", e.avg_potential}});
  }
  return {{"schema_version", doc.schema_version},
          {"polynomial", doc.polynomial},
          {"config", config_json(doc.config)},
          {"window", window_json(doc.window)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)},
          {"stats",
           {{"node_count", doc.stats.node_count},
            {"edge_count", doc.stats.edge_count},
            {"component_count", doc.stats.component_count},
            {"refined_fraction", doc.stats.refined_fraction}}}};
}

// nlohmann's own float output is round-trip safe but not always the shortest
// form, so floats go through to_chars. Objects are std::map-backed and
// therefore already key-sorted.
void write_json(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += json(key).dump();
        out += ':';
        write_json(value, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        write_json(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      // -0 would read back as the integer 0.
      const double v = j.get<double>() + 0.0;
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.append(buf, ptr);
      break;
    }
    default:
      out += j.dump();
  }
}

double number(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail("complex values are [re, im] pairs");
  const auto part = [](const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  return {part(j[0]), part(j[1])};
}

EnergyWindow window_from(const json& j) {
  EnergyWindow w;
  w.re_min = number(j, "re_min");
  w.re_max = number(j, "re_max");
  w.im_min = number(j, "im_min");
  w.im_max = number(j, "im_max");
  w.resolution = j.at("resolution").get<int>();
  return w;
}

}  // namespace

GraphDocument make_document(const LaurentCharPoly& poly, const ExtractionConfig& config,
                            const Extraction& extraction) {
  GraphDocument doc;
  doc.polynomial = poly.to_string();
  doc.config = config;
  doc.config.workers = 0;
  doc.window = extraction.window;
  doc.graph = extraction.graph;
  doc.stats = extraction.stats;
  return doc;
}

std::string serialize_graph(const GraphDocument& doc) {
  std::string out;
  write_json(document_json(doc), out);
  out += '\n';
  return out;
}

GraphDocument parse_graph(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  try {
    GraphDocument doc;
    doc.schema_version = j.at("schema_version").get<std::string>();
    if (doc.schema_version != kSchemaVersion) {
      fail("unsupported schema_version '" + doc.schema_version + "'");
    }
    doc.polynomial = j.at("polynomial").get<std::string>();

    const json& c = j.at("config");
    doc.config.base_resolution = c.at("base_resolution").get<int>();
    doc.config.subdivision = c.at("subdivision").get<int>();
    doc.config.merge_tol_px = number(c, "merge_tol_px");
    doc.config.short_edge_px = number(c, "short_edge_px");
    doc.config.cells = c.at("cells").get<int>();
    doc.config.pad_fraction = number(c, "pad_fraction");
    doc.config.use_symmetry = c.at("use_symmetry").get<bool>();
    doc.config.workers = 0;
    if (!c.at("window").is_null()) doc.config.window = window_from(c.at("window"));

    doc.window = window_from(j.at("window"));

    for (const json& n : j.at("nodes")) {
      if (n.at("id").get<std::size_t>() != doc.graph.nodes.size()) fail("node ids out of order");
      doc.graph.nodes.push_back({complex_from(n.at("pos")), number(n, "dos"),
                                 number(n, "potential")});
    }
    const int node_count = static_cast<int>(doc.graph.nodes.size());
    for (const json& e : j.at("edges")) {
      if (e.at("id").get<std::size_t>() != doc.graph.edges.size()) fail("edge ids out of order");
      GraphEdge edge;
      edge.u = e.at("u").get<int>();
      edge.v = e.at("v").get<int>();
      if (edge.u < 0 || edge.v < 0 || edge.u >= node_count || edge.v >= node_count) {
        fail("edge endpoint out of range");
      }
      edge.weight = number(e, "weight");
      for (const json& p : e.at("pts")) edge.pts.push_back(complex_from(p));
      edge.avg_dos = number(e, "avg_dos");
      edge.avg_potential = number(e, "avg_potential");
      doc.graph.edges.push_back(std::move(edge));
    }

    const json& s = j.at("stats");
    doc.stats.node_count = s.at("node_count").get<int>();
    doc.stats.edge_count = s.at("edge_count").get<int>();
    doc.stats.component_count = s.at("component_count").get<int>();
    doc.stats.refined_fraction = number(s, "refined_fraction");
    return doc;
  } catch (const json::exception& e) {
    fail(std::string("malformed graph document: ") + e.what());
  }
}

std::string export_graphml(const SpectralMultigraph& g, bool include_pts) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"pos\" for=\"node\" attr.name=\"pos\" attr.type=\"string\"/>\n"
         "  <key id=\"dos\" for=\"node\" attr.name=\"dos\" attr.type=\"double\"/>\n"
         "  <key id=\"potential\" for=\"node\" attr.name=\"potential\" attr.type=\"double\"/>\n"
         "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
         "  <key id=\"avg_dos\" for=\"edge\" attr.name=\"avg_dos\" attr.type=\"double\"/>\n"
         "  <key id=\"avg_potential\" for=\"edge\" attr.name=\"avg_potential\" "
         "attr.type=\"double\"/>\n";
  if (include_pts) {
    out << "  <key id=\"pts\" for=\"edge\" attr.name=\"pts\" attr.type=\"string\"/>\n";
  }
  out << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  const auto pair = [](cplx c) { return format_real(c.real()) + "," + format_real(c.imag()); };
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"pos\">" << pair(n.pos) << "</data>\n"
        << "      <data key=\"dos\">" << format_real(n.dos) << "</data>\n"
        << "      <data key=\"potential\">" << format_real(n.potential) << "</data>\n"
        << "    </node>\n";
  }
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const GraphEdge& e = g.edges[k];
    out << "    <edge id=\"e" << k << "\" source=\"n" << e.u << "\" target=\"n" << e.v << "\">\n"
        << "      <data key=\"weight\">" << format_real(e.weight) << "</data>\n"
        << "      <data key=\"avg_dos\">" << format_real(e.avg_dos) << "</data>\n"
        << "      <data key=\"avg_potential\">" << format_real(e.avg_potential) << "</data>\n";
    if (include_pts) {
      out << "      <data key=\"pts\">";
      for (std::size_t i = 0; i < e.pts.size(); ++i) out << (i ? ";" : "") << pair(e.pts[i]);
      out << "</data>\n";
    }
    out << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

namespace {

using Rgb = std::array<std::uint8_t, 3>;

struct ColorStop {
  double t;
  Rgb color;
};

const std::vector<ColorStop> kTerrain{{0.00, {51, 51, 153}},  {0.15, {0, 153, 255}},
                                      {0.25, {0, 204, 102}},  {0.50, {255, 255, 153}},
                                      {0.75, {128, 92, 84}},  {1.00, {255, 255, 255}}};
const std::vector<ColorStop> kInferno{{0.00, {0, 0, 4}},      {0.25, {87, 16, 110}},
                                      {0.50, {188, 55, 84}},  {0.75, {249, 142, 9}},
                                      {1.00, {252, 255, 164}}};
const std::vector<ColorStop> kGray{{0.0, {0, 0, 0}}, {1.0, {255, 255, 255}}};

Rgb lookup(const std::vector<ColorStop>& map, double t) {
  t = std::clamp(t, 0.0, 1.0);
  std::size_t k = 1;
  while (k + 1 < map.size() && map[k].t < t) ++k;
  const ColorStop& a = map[k - 1];
  const ColorStop& b = map[k];
  const double f = (t - a.t) / (b.t - a.t);
  Rgb out;
  for (int i = 0; i < 3; ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(a.color[i] + f * (b.color[i] - a.color[i])));
  }
  return out;
}

struct Canvas {
  int n = 0;
  std::vector<std::uint8_t> rgb;  // top row first

  explicit Canvas(int size) : n(size), rgb(static_cast<std::size_t>(size) * size * 3, 0) {}
  // Grid row 0 is the bottom image row.
  void set(int row, int col, Rgb c) {
    if (row < 0 || col < 0 || row >= n || col >= n) return;
    std::memcpy(&rgb[(static_cast<std::size_t>(n - 1 - row) * n + col) * 3], c.data(), 3);
  }
};

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

std::vector<std::uint8_t> encode_png(int width, int height, const std::uint8_t* pixels,
                                     int channels) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("io", "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("io", "PNG encoding failed");
  }
  png_set_write_fn(png, &out, append_bytes, nullptr);
  png_set_IHDR(png, info, width, height, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int r = 0; r < height; ++r) {
    png_write_row(png, const_cast<png_bytep>(pixels + r * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::pair<double, double> finite_range(const std::vector<double>& values) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

Canvas paint_field(const ScalarField& field, std::string_view style) {
  const std::vector<ColorStop>* map = nullptr;
  bool sqrt_scale = false;
  if (style == "terrain") {
    map = &kTerrain;
  } else if (style == "inferno") {
    map = &kInferno;
    sqrt_scale = true;
  } else if (style == "gray") {
    map = &kGray;
  } else {
    throw InvalidInput("io", "unsupported render style '" + std::string(style) + "'");
  }
  auto [lo, hi] = finite_range(field.values);
  const auto scaled = [&](double v) {
    if (sqrt_scale) return std::sqrt(std::max(v - lo, 0.0));
    return v - lo;
  };
  const double span = hi > lo ? scaled(hi) : 0.0;
  const int n = field.resolution();
  Canvas canvas(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double v = field.at(r, c);
      if (!std::isfinite(v)) continue;
      canvas.set(r, c, lookup(*map, span > 0.0 ? scaled(v) / span : 0.0));
    }
  }
  return canvas;
}

void draw_line(Canvas& canvas, double r0, double c0, double r1, double c1, Rgb color) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(r1 - r0),
                                                                    std::abs(c1 - c0)))));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    canvas.set(static_cast<int>(std::lround(r0 + t * (r1 - r0))),
               static_cast<int>(std::lround(c0 + t * (c1 - c0))), color);
  }
}

}  // namespace

std::vector<std::uint8_t> render_field(const ScalarField& field, std::string_view style) {
  const Canvas canvas = paint_field(field, style);
  return encode_png(canvas.n, canvas.n, canvas.rgb.data(), 3);
}

std::vector<std::uint8_t> render_binary(const BinaryImage& img) {
  const int n = img.resolution();
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      gray[static_cast<std::size_t>(n - 1 - r) * n + c] = img.at(r, c) ? 255 : 0;
    }
  }
  return encode_png(n, n, gray.data(), 1);
}

std::vector<std::uint8_t> render_graph(const SpectralMultigraph& g, const EnergyWindow& window,
                                       const ScalarField* background) {
  Canvas canvas(window.resolution);
  if (background) {
    if (background->resolution() != window.resolution) {
      throw InvalidInput("io", "background resolution does not match the window");
    }
    canvas = paint_field(*background, "inferno");
    for (auto& b : canvas.rgb) b = static_cast<std::uint8_t>(b / 3);
  }
  const Rgb edge_color{0, 220, 255};
  const Rgb node_color{255, 60, 60};
  for (const GraphEdge& e : g.edges) {
    for (std::size_t k = 0; k + 1 < e.pts.size(); ++k) {
      const auto [r0, c0] = window.to_pixel(e.pts[k]);
      const auto [r1, c1] = window.to_pixel(e.pts[k + 1]);
      draw_line(canvas, r0, c0, r1, c1, edge_color);
    }
  }
  for (const GraphNode& n : g.nodes) {
    const auto [r, c] = window.to_pixel(n.pos);
    const int rr = static_cast<int>(std::lround(r));
    const int cc = static_cast<int>(std::lround(c));
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) canvas.set(rr + dr, cc + dc, node_color);
    }
  }
  return encode_png(canvas.n, canvas.n, canvas.rgb.data(), 3);
}

namespace {

struct ReadState {
  const std::vector<std::uint8_t>* data;
  std::size_t offset;
};

void read_bytes(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<ReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->data->size()) png_error(png, "truncated PNG");
  std::memcpy(out, state->data->data() + state->offset, length);
  state->offset += length;
}

}  // namespace

RgbImage decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8)) fail("not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error("io", "libpng initialization failed");
  }
  RgbImage img;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("PNG decoding failed");
  }
  ReadState state{&bytes, 0};
  png_set_read_fn(png, &state, read_bytes);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int r = 0; r < img.height; ++r) {
    png_read_row(png, img.rgb.data() + static_cast<std::size_t>(r) * img.width * 3, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

namespace {

constexpr char kFieldMagic[8] = {'S', 'G', 'F', 'I', 'E', 'L', 'D', '1'};
constexpr std::size_t kFieldHeader = 8 + 4 + 4 + 4 * 8;

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::string dump_field(const ScalarField& field) {
  std::string out(kFieldMagic, sizeof(kFieldMagic));
  out.reserve(kFieldHeader + field.values.size() * 8);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.resolution()));
  put(out, field.window.re_min);
  put(out, field.window.re_max);
  put(out, field.window.im_min);
  put(out, field.window.im_max);
  for (double v : field.values) put(out, v);
  return out;
}

ScalarField read_field(std::string_view bytes) {
  if (bytes.size() < kFieldHeader || bytes.substr(0, 8) != std::string_view(kFieldMagic, 8)) {
    fail("not a field dump");
  }
  std::size_t offset = 8;
  const auto kind = take<std::uint32_t>(bytes, offset);
  const auto res = take<std::uint32_t>(bytes, offset);
  if (kind > static_cast<std::uint32_t>(FieldKind::Binary)) fail("unknown field kind");
  EnergyWindow w;
  w.re_min = take<double>(bytes, offset);
  w.re_max = take<double>(bytes, offset);
  w.im_min = take<double>(bytes, offset);
  w.im_max = take<double>(bytes, offset);
  w.resolution = static_cast<int>(res);
  if (bytes.size() != kFieldHeader + static_cast<std::size_t>(res) * res * 8) {
    fail("field dump size does not match its header");
  }
  ScalarField field(w, static_cast<FieldKind>(kind));
  std::memcpy(field.values.data(), bytes.data() + offset, field.values.size() * 8);
  return field;
}

std::string spectrum_csv(std::vector<cplx> values) {
  std::sort(values.begin(), values.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::string out = "re,im\n";
  for (cplx v : values) out += format_real(v.real()) + "," + format_real(v.imag()) + "\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io", "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("io", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("io", "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace specgraph
