#pragma once

#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace specgraph {

// Sparse multivariate Laurent polynomial produced by the expression parser.
// variables[0] is "z", variables[1] is "E", the rest are free parameters in
// order of first appearance. Every key has one exponent per variable.
struct Expression {
  std::vector<std::string> variables;
  std::map<std::vector<int>, std::complex<double>> terms;

  std::vector<std::string> parameters() const {
    return {variables.begin() + 2, variables.end()};
  }
};

// Grammar: variables z and E, optional named parameters, operators
// + - * / ** and parentheses, integer exponents, complex literals such as
// 2, 1.5i, 3j, (1+2i); bare i or j is the imaginary unit. Division is only
// defined by single-term expressions. Whitespace is insignificant and there
// is no implicit multiplication. Throws ParseError with the offending
// character position.
Expression parse_expression(std::string_view text, bool allow_parameters);

// Shortest decimal text that reads back to exactly the same double(s).
std::string format_real(double value);
std::string format_complex(std::complex<double> value);

// Joins signed terms into "a + b - c" form. Each entry is a coefficient and
// the monomial text ("" for a constant).
std::string format_sum(
    const std::vector<std::pair<std::complex<double>, std::string>>& terms);

}  // namespace specgraph
