#include "specgraph/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "json.hpp"
#include "specgraph/error.hpp"
#include "specgraph/parallel.hpp"

namespace specgraph {

ParamPolyTemplate ParamPolyTemplate::parse(std::string_view text) {
  ParamPolyTemplate t;
  t.text_ = std::string(text);
  t.expr_ = parse_expression(text, /*allow_parameters=*/true);
  t.params_ = t.expr_.parameters();
  std::sort(t.params_.begin(), t.params_.end());
  return t;
}

LaurentCharPoly ParamPolyTemplate::bind(const std::map<std::string, cplx>& values) const {
  for (const auto& name : params_) {
    if (!values.count(name)) throw InvalidInput("bind", "missing value for parameter '" + name + "'");
  }
  for (const auto& [name, value] : values) {
    if (!std::binary_search(params_.begin(), params_.end(), name)) {
      throw InvalidInput("bind", "template has no parameter '" + name + "'");
    }
  }
  LaurentCharPoly::TermMap terms;
  for (const auto& [key, coeff] : expr_.terms) {
    cplx c = coeff;
    for (std::size_t v = 2; v < key.size(); ++v) {
      if (key[v] == 0) continue;
      const cplx x = values.at(expr_.variables[v]);
      if (key[v] < 0 && x == cplx{0.0, 0.0}) {
        throw InvalidInput("bind", "parameter '" + expr_.variables[v] + "' divides by zero");
      }
      c *= std::pow(x, key[v]);
    }
    terms[{key[0], key[1]}] += c;
  }
  return LaurentCharPoly::from_terms(terms);
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw InvalidInput("sweep", "linspace needs at least one value");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = count > 1 ? (hi - lo) / (count - 1) : 0.0;
  for (int k = 0; k < count; ++k) out[k] = lo + k * step;
  if (count > 1) out.back() = hi;
  return out;
}

std::vector<cplx> coefficient_grid(const std::vector<double>& re_values,
                                   const std::vector<double>& im_values) {
  std::vector<cplx> out;
  out.reserve(re_values.size() * im_values.size());
  for (double re : re_values) {
    for (double im : im_values) out.emplace_back(re, im);
  }
  return out;
}

std::vector<cplx> coefficient_grid(int re_count, int im_count, double re_max, double im_max) {
  return coefficient_grid(linspace(-re_max, re_max, re_count),
                          linspace(-im_max, im_max, im_count));
}

namespace {

std::string monomial_text(const std::string& coeff, int e_power, int z_power) {
  std::vector<std::string> factors;
  if (!coeff.empty()) factors.push_back(coeff);
  if (e_power == 1) factors.push_back("E");
  if (e_power > 1) factors.push_back("E**" + std::to_string(e_power));
  if (z_power == 1) factors.push_back("z");
  if (z_power != 0 && z_power != 1) factors.push_back("z**" + std::to_string(z_power));
  if (factors.empty()) return "1";
  std::string out = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) out += "*" + factors[k];
  return out;
}

}  // namespace

Enumeration enumerate_classes(const ClassEnumSpec& spec) {
  if (spec.bands < 1) throw InvalidInput("enumerate", "bands must be at least 1");
  if (spec.free_coefficients < 0 || spec.free_coefficients > 26) {
    throw InvalidInput("enumerate", "free_coefficients must be in [0, 26]");
  }
  std::vector<int> ranges = spec.ranges;
  std::sort(ranges.begin(), ranges.end());
  ranges.erase(std::unique(ranges.begin(), ranges.end()), ranges.end());
  for (int r : ranges) {
    if (r < 2) throw InvalidInput("enumerate", "hopping ranges must be at least 2");
  }

  const int s = spec.bands;
  constexpr int kEmpty = -1;
  Enumeration out;
  std::set<std::string> seen;

  for (int range : ranges) {
    out.per_range[range] = 0;
    for (int p = 1; p < range; ++p) {
      const int q = range - p;
      std::vector<int> slots;  // interior exponents other than 0
      for (int i = -p + 1; i < q; ++i) {
        if (i != 0) slots.push_back(i);
      }
      const int n_free = std::min<int>(spec.free_coefficients, static_cast<int>(slots.size()));

      // Which slots are free: all n_free-subsets in lexicographic order.
      std::vector<std::uint8_t> pick(slots.size(), 0);
      std::fill(pick.begin(), pick.begin() + n_free, 1);
      do {
        // Per-slot E-degree options; index slots.size() is z^0.
        std::vector<std::vector<int>> options(slots.size() + 1);
        for (std::size_t k = 0; k < slots.size(); ++k) {
          if (pick[k]) {
            options[k].push_back(0);
            if (spec.free_on_energy_slots) {
              for (int e = 1; e < s; ++e) options[k].push_back(e);
            }
          } else {
            options[k].push_back(kEmpty);
            if (spec.constant_interior) options[k].push_back(0);
            for (int e = 1; e < s; ++e) options[k].push_back(e);
          }
        }
        options.back().push_back(kEmpty);
        for (int e = 1; e < s; ++e) options.back().push_back(e);

        std::vector<std::size_t> choice(options.size(), 0);
        while (true) {
          ++out.generated;
          std::vector<std::string> terms{"-" + monomial_text("", s, 0), monomial_text("", 0, -p),
                                         monomial_text("", 0, q)};
          char name = 'a';
          for (std::size_t k = 0; k < slots.size(); ++k) {
            const int e = options[k][choice[k]];
            if (e == kEmpty) continue;
            terms.push_back(monomial_text(pick[k] ? std::string(1, name++) : "", e, slots[k]));
          }
          if (const int e = options.back()[choice.back()]; e != kEmpty) {
            terms.push_back(monomial_text("", e, 0));
          }
          std::string text = terms[0];
          for (std::size_t k = 1; k < terms.size(); ++k) text += " + " + terms[k];

          ParamPolyTemplate t = ParamPolyTemplate::parse(text);
          std::map<std::string, cplx> ones;
          for (const auto& name_k : t.params()) ones[name_k] = 1.0;
          ClassSignature sig = class_signature(t.bind(ones));
          if (seen.insert(sig.canonical_key).second) {
            out.classes.push_back({std::move(sig), std::move(t), p, q});
            ++out.per_range[range];
          }

          std::size_t k = 0;
          while (k < choice.size() && ++choice[k] == options[k].size()) choice[k++] = 0;
          if (k == choice.size()) break;
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
  }
  return out;
}

const char* to_string(RowStatus status) {
  switch (status) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Empty: return "empty";
    case RowStatus::Failed: return "failed";
  }
  return "?";
}

SweepResult run_sweep(const ParamPolyTemplate& t, const SweepSpec& spec,
                      const SweepProgress& progress) {
  SweepResult result;
  result.params = t.params();
  std::vector<std::size_t> sizes;
  for (const auto& name : result.params) {
    const auto it = spec.values.find(name);
    if (it == spec.values.end()) throw InvalidInput("sweep", "no values for parameter '" + name + "'");
    if (it->second.empty()) throw InvalidInput("sweep", "empty value list for '" + name + "'");
    sizes.push_back(it->second.size());
  }
  for (const auto& [name, values] : spec.values) {
    if (!std::binary_search(result.params.begin(), result.params.end(), name)) {
      throw InvalidInput("sweep", "template has no parameter '" + name + "'");
    }
  }

  std::size_t total = 1;
  for (std::size_t n : sizes) total *= n;
  result.rows.resize(total);
  for (std::size_t row = 0; row < total; ++row) {
    std::size_t rest = row;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const auto& name = result.params[k];
      result.rows[row].params[name] = spec.values.at(name)[rest % sizes[k]];
      rest /= sizes[k];
    }
  }

  // Parallelism goes to rows; each extraction then runs single-threaded.
  const int workers = resolve_workers(spec.workers);
  ExtractionConfig config = spec.config;
  if (workers > 1) config.workers = 1;
  std::atomic<std::size_t> done{0};

  parallel_for(
      total,
      [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        try {
          const LaurentCharPoly poly = t.bind(row.params);
          row.polynomial = poly.to_string();
          row.class_key = class_signature(poly).canonical_key;
          try {
            const Extraction ex = extract(poly, config);
            row.document = make_document(poly, config, ex);
            row.status = ex.graph.nodes.empty() ? RowStatus::Empty : RowStatus::Ok;
          } catch (const EmptySpectrumError& e) {
            row.status = RowStatus::Empty;
            row.stage = e.stage();
            row.message = e.what();
            GraphDocument doc;
            doc.polynomial = row.polynomial;
            doc.config = config;
            doc.config.workers = 0;
            doc.window = e.coarse_field().window;
            row.document = std::move(doc);
          }
        } catch (const Error& e) {
          row.status = RowStatus::Failed;
          row.stage = e.stage();
          row.message = e.what();
        } catch (const std::exception& e) {
          row.status = RowStatus::Failed;
          row.stage = "internal";
          row.message = e.what();
        }
        const std::size_t n = ++done;
        if (progress) progress(n, total);
      },
      workers, 1);
  return result;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string row_file_name(std::size_t row) {
  std::string digits = std::to_string(row);
  if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
  return "row_" + digits + ".json";
}

std::string manifest_csv(const SweepResult& result) {
  std::string out = "row";
  for (const auto& name : result.params) out += "," + csv_field(name);
  out += ",polynomial,class_key,status,node_count,edge_count,component_count,stage,message\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const SweepRow& row = result.rows[i];
    out += std::to_string(i);
    for (const auto& name : result.params) out += "," + format_complex(row.params.at(name));
    const bool has_doc = row.status != RowStatus::Failed;
    const GraphStats& s = row.document.stats;
    out += "," + csv_field(row.polynomial) + "," + csv_field(row.class_key) + "," +
           to_string(row.status) + "," + (has_doc ? std::to_string(s.node_count) : "") + "," +
           (has_doc ? std::to_string(s.edge_count) : "") + "," +
           (has_doc ? std::to_string(s.component_count) : "") + "," + csv_field(row.stage) +
           "," + csv_field(row.message) + "\n";
  }
  return out;
}

void write_sweep(const SweepResult& result, const std::filesystem::path& dir) {
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (result.rows[i].status == RowStatus::Failed) continue;
    write_file_atomic(dir / "graphs" / row_file_name(i), serialize_graph(result.rows[i].document));
  }
  write_file_atomic(dir / "manifest.csv", manifest_csv(result));
}

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& message) {
  throw InvalidInput("config", message);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* where) {
  if (!obj.is_object()) config_error(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      config_error(std::string("unknown key '") + key + "' in " + where);
    }
  }
}

cplx value_from(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  config_error("parameter values are numbers or [re, im] pairs, got " + v.dump());
}

std::vector<double> linspace_from(const json& v) {
  if (!v.is_array() || v.size() != 3 || !v[2].is_number_integer()) {
    config_error("linspace ranges are [lo, hi, count], got " + v.dump());
  }
  return linspace(v[0].get<double>(), v[1].get<double>(), v[2].get<int>());
}

std::vector<cplx> values_from(const std::string& name, const json& v) {
  if (v.is_array()) {
    std::vector<cplx> out;
    for (const json& x : v) out.push_back(value_from(x));
    if (out.empty()) config_error("empty value list for '" + name + "'");
    return out;
  }
  if (v.is_object() && v.contains("linspace")) {
    check_keys(v, {"linspace"}, ("params." + name).c_str());
    std::vector<cplx> out;
    for (double x : linspace_from(v.at("linspace"))) out.emplace_back(x);
    return out;
  }
  if (v.is_object() && v.contains("grid")) {
    check_keys(v, {"grid"}, ("params." + name).c_str());
    const json& g = v.at("grid");
    check_keys(g, {"re", "im"}, ("params." + name + ".grid").c_str());
    return coefficient_grid(linspace_from(g.at("re")), linspace_from(g.at("im")));
  }
  config_error("cannot read values for '" + name + "'");
}

}  // namespace

SweepConfig parse_sweep_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  try {
    check_keys(j, {"template", "params", "output_dir", "workers", "extraction"}, "sweep config");
    if (!j.at("params").is_object()) config_error("params must be an object");
    SweepConfig out;
    out.template_text = j.at("template").get<std::string>();
    for (const auto& [name, v] : j.at("params").items()) out.spec.values[name] = values_from(name, v);
    if (j.contains("output_dir")) out.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("workers")) out.spec.workers = j.at("workers").get<int>();
    if (j.contains("extraction")) {
      const json& x = j.at("extraction");
      check_keys(x,
                 {"resolution", "refine", "merge_tol_px", "short_edge_px", "cells",
                  "pad_fraction", "use_symmetry", "window"},
                 "extraction");
      ExtractionConfig& c = out.spec.config;
      if (x.contains("resolution")) c.base_resolution = x.at("resolution").get<int>();
      if (x.contains("refine")) c.subdivision = x.at("refine").get<int>();
      if (x.contains("merge_tol_px")) c.merge_tol_px = x.at("merge_tol_px").get<double>();
      if (x.contains("short_edge_px")) c.short_edge_px = x.at("short_edge_px").get<double>();
      if (x.contains("cells")) c.cells = x.at("cells").get<int>();
      if (x.contains("pad_fraction")) c.pad_fraction = x.at("pad_fraction").get<double>();
      if (x.contains("use_symmetry")) c.use_symmetry = x.at("use_symmetry").get<bool>();
      if (x.contains("window")) {
        const auto w = x.at("window").get<std::vector<double>>();
        if (w.size() != 4) config_error("window is [re_min, re_max, im_min, im_max]");
        c.window = EnergyWindow{w[0], w[1], w[2], w[3], c.base_resolution};
        c.window->validate();
      }
    }
    return out;
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

}  // namespace specgraph
