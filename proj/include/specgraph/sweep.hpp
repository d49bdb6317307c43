#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "specgraph/expression.hpp"
#include "specgraph/io.hpp"
#include "specgraph/laurent_poly.hpp"
#include "specgraph/pipeline.hpp"

namespace specgraph {

// A characteristic polynomial whose coefficients may name free parameters,
// e.g. "z**2 + a/z**2 + b*E*z - E**4".
class ParamPolyTemplate {
 public:
  static ParamPolyTemplate parse(std::string_view text);

  const std::string& text() const { return text_; }
  const std::vector<std::string>& params() const { return params_; }  // sorted

  // Substitutes every parameter and canonicalizes. Throws InvalidInput
  // (stage "bind") unless `values` names exactly the template's parameters.
  LaurentCharPoly bind(const std::map<std::string, cplx>& values) const;

 private:
  std::string text_;
  Expression expr_;
  std::vector<std::string> params_;
};

inline LaurentCharPoly bind_parameters(const ParamPolyTemplate& t,
                                       const std::map<std::string, cplx>& values) {
  return t.bind(values);
}

// `count` evenly spaced reals from lo to hi inclusive (just lo when count is 1).
std::vector<double> linspace(double lo, double hi, int count);

// re + i*im over the Cartesian product, re in the outer loop.
std::vector<cplx> coefficient_grid(const std::vector<double>& re_values,
                                   const std::vector<double>& im_values);
std::vector<cplx> coefficient_grid(int re_count = 13, int im_count = 7, double re_max = 10.0,
                                   double im_max = 5.0);

struct ClassEnumSpec {
  int bands = 1;
  std::vector<int> ranges{4, 5, 6};  // hopping ranges p + q
  int free_coefficients = 2;
  // A non-free interior monomial with E-degree 0 is a plain constant hopping;
  // by default such slots are left empty.
  bool constant_interior = false;
  // Free coefficients may sit on E-carrying monomials (a E^k z^j).
  bool free_on_energy_slots = true;
};

struct EnumeratedClass {
  ClassSignature signature;
  ParamPolyTemplate representative;
  int p = 0;
  int q = 0;
};

struct Enumeration {
  std::vector<EnumeratedClass> classes;
  std::map<int, int> per_range;  // unique classes first seen at each range
  std::size_t generated = 0;     // candidates before deduplication
};

// Base -E^s + z^-p + z^q for every p, q >= 1 with p + q in `ranges`. Each
// interior z^i (i != 0) is empty or carries E^k, k < s; z^0 may add E^k with
// 1 <= k < s. min(free_coefficients, interior slots) distinct z^j, j != 0,
// get the free coefficients a, b, ... Candidates are keyed by class
// signature (with a = b = 1) and the first of each key is kept.
Enumeration enumerate_classes(const ClassEnumSpec& spec);

struct SweepSpec {
  std::map<std::string, std::vector<cplx>> values;
  ExtractionConfig config;
  int workers = 0;  // rows in flight; 0 = default
};

enum class RowStatus { Ok, Empty, Failed };
const char* to_string(RowStatus status);

struct SweepRow {
  std::map<std::string, cplx> params;
  RowStatus status = RowStatus::Ok;
  std::string polynomial;  // empty when binding failed
  std::string class_key;
  std::string stage;  // failed rows only
  std::string message;
  GraphDocument document;  // Ok and Empty rows
};

struct SweepResult {
  std::vector<std::string> params;  // sorted
  std::vector<SweepRow> rows;
};

// Rows enumerate the parameter product with the first (sorted) parameter
// varying fastest, matching a flattened meshgrid. Rows run over a worker pool;
// a failing row is recorded and the others continue. `progress` receives the
// number of finished rows and the total, from worker threads.
using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;
SweepResult run_sweep(const ParamPolyTemplate& t, const SweepSpec& spec,
                      const SweepProgress& progress = {});

// row, one column per parameter, polynomial, class_key, status, node_count,
// edge_count, component_count, stage, message.
std::string manifest_csv(const SweepResult& result);

// graphs/row_NNNNN.json for every row with a document, then manifest.csv.
// Every file is written atomically.
void write_sweep(const SweepResult& result, const std::filesystem::path& dir);
std::string row_file_name(std::size_t row);

struct SweepConfig {
  std::string template_text;
  SweepSpec spec;
  std::filesystem::path output_dir;
};

// JSON config. Keys: "template" (string), "params" (name -> value list or
// {"linspace": [lo, hi, n]} or {"grid": {"re": [lo, hi, n], "im": [lo, hi, n]}}),
// optional "output_dir", "workers" and "extraction" with any of "resolution",
// "refine", "merge_tol_px", "short_edge_px", "cells", "pad_fraction",
// "use_symmetry", "window" ([re_min, re_max, im_min, im_max]). Values are
// numbers or [re, im] pairs. Unknown keys are rejected.
SweepConfig parse_sweep_config(std::string_view json_text);

}  // namespace specgraph
