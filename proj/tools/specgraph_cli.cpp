#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "specgraph/bloch.hpp"
#include "specgraph/io.hpp"
#include "specgraph/parallel.hpp"
#include "specgraph/pipeline.hpp"
#include "specgraph/sweep.hpp"

namespace fs = std::filesystem;
using namespace specgraph;

namespace {

std::vector<double> split_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("usage", std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

void emit(const std::string& path, std::string_view bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
  } else {
    write_file_atomic(path, bytes);
  }
}

void emit_png(const fs::path& path, const std::vector<std::uint8_t>& png) {
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
}

struct ExtractArgs {
  std::string poly;
  std::string window;
  int res = 256;
  int refine = 4;
  double merge_tol = 5.0;
  double short_edge = 20.0;
  bool no_symmetry = false;
  std::string out;
  std::string plots;
  bool graphml = false;
};

int run_extract(const ExtractArgs& a) {
  const LaurentCharPoly poly = parse_char_poly(a.poly);
  ExtractionConfig config;
  config.base_resolution = a.res;
  config.subdivision = a.refine;
  config.merge_tol_px = a.merge_tol;
  config.short_edge_px = a.short_edge;
  config.use_symmetry = !a.no_symmetry;
  if (!a.window.empty()) {
    const std::vector<double> w = split_numbers(a.window, "--window");
    if (w.size() != 4) throw InvalidInput("usage", "--window takes re_min,re_max,im_min,im_max");
    config.window = EnergyWindow{w[0], w[1], w[2], w[3], a.res};
    config.window->validate();
  }
  const Extraction ex = extract(poly, config);
  emit(a.out, serialize_graph(make_document(poly, config, ex)));

  if (a.graphml) {
    if (a.out.empty() || a.out == "-") throw InvalidInput("usage", "--graphml needs --out FILE");
    write_file_atomic(fs::path(a.out).replace_extension(".graphml"), export_graphml(ex.graph));
  }
  if (!a.plots.empty()) {
    const fs::path dir(a.plots);
    emit_png(dir / "potential.png", render_field(ex.fields.phi, "terrain"));
    emit_png(dir / "dos.png", render_field(ex.fields.dos, "inferno"));
    emit_png(dir / "skeleton.png", render_binary(ex.skeleton));
    emit_png(dir / "graph.png", render_graph(ex.graph, ex.window, &ex.fields.dos));
  }
  std::cerr << poly.to_string() << ": " << ex.stats.node_count << " nodes, "
            << ex.stats.edge_count << " edges, " << ex.stats.component_count
            << " components, refined " << 100.0 * ex.stats.refined_fraction << "%\n";
  return 0;
}

int run_sweep_command(const std::string& spec_path, const std::string& out_dir, int jobs) {
  SweepConfig cfg = parse_sweep_config(read_file(spec_path));
  if (jobs > 0) cfg.spec.workers = jobs;
  fs::path dir = out_dir.empty() ? cfg.output_dir : fs::path(out_dir);
  if (dir.empty()) throw InvalidInput("usage", "no output directory (--out or output_dir)");
  if (dir.is_relative() && out_dir.empty()) dir = fs::path(spec_path).parent_path() / dir;

  const ParamPolyTemplate t = ParamPolyTemplate::parse(cfg.template_text);
  const SweepResult result = run_sweep(t, cfg.spec, [](std::size_t done, std::size_t total) {
    std::fprintf(stderr, "\r%zu/%zu rows", done, total);
    if (done == total) std::fputc('\n', stderr);
  });
  write_sweep(result, dir);

  std::map<RowStatus, int> counts;
  for (const SweepRow& row : result.rows) ++counts[row.status];
  std::cerr << result.rows.size() << " rows: " << counts[RowStatus::Ok] << " ok, "
            << counts[RowStatus::Empty] << " empty, " << counts[RowStatus::Failed]
            << " failed -> " << dir.string() << "\n";
  return 0;
}

int run_enumerate(const ClassEnumSpec& spec, const std::string& out) {
  const Enumeration e = enumerate_classes(spec);
  nlohmann::json classes = nlohmann::json::array();
  for (const EnumeratedClass& c : e.classes) {
    classes.push_back({{"key", c.signature.canonical_key},
                       {"b", bits_to_string(c.signature.b)},
                       {"b_prime", bits_to_string(c.signature.b_prime)},
                       {"p", c.p},
                       {"q", c.q},
                       {"template", c.representative.text()}});
  }
  nlohmann::json per_range = nlohmann::json::object();
  for (const auto& [range, n] : e.per_range) per_range[std::to_string(range)] = n;
  const nlohmann::json doc{{"bands", spec.bands},
                           {"ranges", spec.ranges},
                           {"generated", e.generated},
                           {"count", e.classes.size()},
                           {"per_range", per_range},
                           {"classes", classes}};
  emit(out, doc.dump(2) + "\n");
  std::cerr << e.classes.size() << " classes from " << e.generated << " candidates\n";
  return 0;
}

int run_spectrum(const std::string& poly_text, int cells, bool pbc, const std::string& out) {
  const LaurentCharPoly poly = parse_char_poly(poly_text);
  emit(out, spectrum_csv(chain_spectrum(poly, cells, pbc ? Boundary::Periodic : Boundary::Open)));
  return 0;
}

int run_gbz(const std::string& poly_text, int res, const std::string& window,
            const std::string& out) {
  const LaurentCharPoly poly = parse_char_poly(poly_text);
  EnergyWindow w = estimate_window(poly, 40, 0.20, res);
  if (!window.empty()) {
    const std::vector<double> v = split_numbers(window, "--window");
    if (v.size() != 4) throw InvalidInput("usage", "--window takes re_min,re_max,im_min,im_max");
    w = EnergyWindow{v[0], v[1], v[2], v[3], res};
    w.validate();
  }
  const ScalarField field = gbz_residual(poly, w);
  if (fs::path(out).extension() == ".png") {
    emit_png(out, render_field(field, "inferno"));
  } else {
    emit(out, dump_field(field));
  }
  return 0;
}

// A polynomial with a leading minus would otherwise parse as a short-option
// cluster; whitespace is insignificant to the polynomial grammar.
std::vector<std::string> shield_polynomials(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (auto& a : args) {
    if (a.size() > 1 && a[0] == '-' && a.find_first_of(" *+/()") != std::string::npos) {
      a.insert(0, " ");
    }
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-boundary spectral graphs from characteristic polynomials P(z, E).", "specgraph"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 0;
  app.add_option("-j,--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  ExtractArgs ex;
  auto* extract_cmd = app.add_subcommand("extract", "Extract the spectral graph of one polynomial");
  extract_cmd->add_option("poly", ex.poly, "Polynomial, e.g. \"z + z**-1 - E\"")->required();
  extract_cmd->add_option("--window", ex.window, "re_min,re_max,im_min,im_max (default: estimated)");
  extract_cmd->add_option("--res", ex.res, "Coarse resolution")->check(CLI::Range(16, 4096));
  extract_cmd->add_option("--refine", ex.refine, "Subdivision factor")->check(CLI::Range(1, 64));
  extract_cmd->add_option("--merge-tol", ex.merge_tol, "Node merge radius in pixels")
      ->check(CLI::NonNegativeNumber);
  extract_cmd->add_option("--short-edge", ex.short_edge, "Spur/short-edge limit in pixels")
      ->check(CLI::NonNegativeNumber);
  extract_cmd->add_flag("--no-symmetry", ex.no_symmetry, "Compute the full window");
  extract_cmd->add_option("--out", ex.out, "Graph JSON (default: stdout)");
  extract_cmd->add_option("--plots", ex.plots, "Directory for potential/dos/skeleton/graph PNGs");
  extract_cmd->add_flag("--graphml", ex.graphml, "Also write GraphML next to --out");

  std::string spec_path, sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
  sweep_cmd->add_option("--spec", spec_path, "Sweep config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", sweep_out, "Output directory (overrides output_dir)");

  ClassEnumSpec enum_spec;
  std::string enum_out;
  bool fixed_free = false;
  auto* enum_cmd = app.add_subcommand("enumerate", "List polynomial classes");
  enum_cmd->add_option("--bands", enum_spec.bands, "Number of bands s")->check(CLI::PositiveNumber);
  enum_cmd->add_option("--ranges", enum_spec.ranges, "Hopping ranges p+q")->delimiter(',');
  enum_cmd->add_option("--free", enum_spec.free_coefficients, "Free coefficients per class");
  enum_cmd->add_flag("--constant-interior", enum_spec.constant_interior,
                     "Allow constant interior hoppings");
  enum_cmd->add_flag("--free-constant-only", fixed_free,
                     "Free coefficients only on E-independent monomials");
  enum_cmd->add_option("--out", enum_out, "JSON output (default: stdout)");

  std::string spec_poly, spec_out;
  int cells = 0;
  bool pbc = false;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "Finite-chain eigenvalues as CSV");
  spectrum_cmd->add_option("poly", spec_poly, "Polynomial")->required();
  spectrum_cmd->add_option("--cells", cells, "Unit cells")->required()->check(CLI::PositiveNumber);
  spectrum_cmd->add_flag("--pbc", pbc, "Periodic instead of open boundaries");
  spectrum_cmd->add_option("--out", spec_out, "CSV output (default: stdout)");

  std::string gbz_poly, gbz_out, gbz_window;
  int gbz_res = 256;
  auto* gbz_cmd = app.add_subcommand("gbz", "GBZ residual field |z_(p+1)| - |z_p|");
  gbz_cmd->add_option("poly", gbz_poly, "Polynomial")->required();
  gbz_cmd->add_option("--res", gbz_res, "Resolution")->check(CLI::Range(16, 4096));
  gbz_cmd->add_option("--window", gbz_window, "re_min,re_max,im_min,im_max");
  gbz_cmd->add_option("--out", gbz_out, "Field dump, or a PNG heatmap for *.png")->required();

  std::vector<std::string> args = shield_polynomials(argc, argv);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  set_default_workers(jobs);
  enum_spec.free_on_energy_slots = !fixed_free;

  std::string current_poly;
  try {
    if (*extract_cmd) return current_poly = ex.poly, run_extract(ex);
    if (*sweep_cmd) return run_sweep_command(spec_path, sweep_out, jobs);
    if (*enum_cmd) return run_enumerate(enum_spec, enum_out);
    if (*spectrum_cmd) return current_poly = spec_poly, run_spectrum(spec_poly, cells, pbc, spec_out);
    if (*gbz_cmd) return current_poly = gbz_poly, run_gbz(gbz_poly, gbz_res, gbz_window, gbz_out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n  " << current_poly << "\n  "
              << std::string(e.position(), ' ') << "^\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.stage() == "usage" ? 64 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
