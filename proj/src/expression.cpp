#include "specgraph/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "specgraph/error.hpp"

namespace specgraph {
namespace {

using cplx = std::complex<double>;
using Key = std::vector<int>;
using TermMap = std::map<Key, cplx>;

constexpr int kMaxPower = 64;

enum class TokenKind { Number, Identifier, Plus, Minus, Star, Slash, Power,
                       LParen, RParen, End };

struct Token {
  TokenKind kind;
  std::size_t pos;
  std::string text;
  cplx value{};  // numbers only
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      // Exponent: lowercase e followed by digits (E is the energy variable).
      if (i < s.size() && s[i] == 'e') {
        std::size_t k = i + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          i = k;
          while (i < s.size() && is_digit(s[i])) ++i;
        }
      }
      const std::string literal(s.substr(start, i - start));
      const double magnitude = std::strtod(literal.c_str(), nullptr);
      cplx value{magnitude, 0.0};
      if (i < s.size() && (s[i] == 'i' || s[i] == 'j') &&
          (i + 1 >= s.size() || !is_ident_char(s[i + 1]))) {
        value = cplx{0.0, magnitude};
        ++i;
      }
      out.push_back({TokenKind::Number, start, literal, value});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(s[i])) ++i;
      out.push_back({TokenKind::Identifier, start,
                     std::string(s.substr(start, i - start))});
      continue;
    }
    switch (c) {
      case '+': out.push_back({TokenKind::Plus, start, "+"}); ++i; break;
      case '-': out.push_back({TokenKind::Minus, start, "-"}); ++i; break;
      case '/': out.push_back({TokenKind::Slash, start, "/"}); ++i; break;
      case '(': out.push_back({TokenKind::LParen, start, "("}); ++i; break;
      case ')': out.push_back({TokenKind::RParen, start, ")"}); ++i; break;
      case '*':
        if (i + 1 < s.size() && s[i + 1] == '*') {
          out.push_back({TokenKind::Power, start, "**"});
          i += 2;
        } else {
          out.push_back({TokenKind::Star, start, "*"});
          ++i;
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         start);
    }
  }
  out.push_back({TokenKind::End, s.size(), ""});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<std::string> variables)
      : tokens_(std::move(tokens)), variables_(std::move(variables)) {}

  TermMap parse() {
    TermMap result = expr();
    if (peek().kind != TokenKind::End) {
      throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    }
    return result;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  bool accept(TokenKind kind) {
    if (peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  Key zero_key() const { return Key(variables_.size(), 0); }

  TermMap constant(cplx value) const { return {{zero_key(), value}}; }

  static void add_into(TermMap& acc, const TermMap& rhs, double sign) {
    for (const auto& [key, value] : rhs) acc[key] += sign * value;
  }

  static TermMap multiply(const TermMap& a, const TermMap& b) {
    TermMap out;
    for (const auto& [ka, va] : a) {
      for (const auto& [kb, vb] : b) {
        Key key = ka;
        for (std::size_t i = 0; i < key.size(); ++i) key[i] += kb[i];
        out[key] += va * vb;
      }
    }
    return out;
  }

  // Inverse of a single-term expression; throws otherwise.
  static std::optional<TermMap> invert_monomial(const TermMap& t) {
    std::optional<std::pair<Key, cplx>> only;
    for (const auto& [key, value] : t) {
      if (value == cplx{0.0, 0.0}) continue;
      if (only) return std::nullopt;
      only = {key, value};
    }
    if (!only) return std::nullopt;
    Key key = only->first;
    for (int& e : key) e = -e;
    return TermMap{{key, 1.0 / only->second}};
  }

  TermMap expr() {
    TermMap acc = term();
    while (true) {
      if (accept(TokenKind::Plus)) {
        add_into(acc, term(), 1.0);
      } else if (accept(TokenKind::Minus)) {
        add_into(acc, term(), -1.0);
      } else {
        return acc;
      }
    }
  }

  TermMap term() {
    TermMap acc = unary();
    while (true) {
      if (accept(TokenKind::Star)) {
        acc = multiply(acc, unary());
      } else if (peek().kind == TokenKind::Slash) {
        const std::size_t at = take().pos;
        auto inverse = invert_monomial(unary());
        if (!inverse) {
          throw ParseError("division is only defined by a single nonzero term",
                           at);
        }
        acc = multiply(acc, *inverse);
      } else {
        return acc;
      }
    }
  }

  TermMap unary() {
    if (accept(TokenKind::Plus)) return unary();
    if (accept(TokenKind::Minus)) {
      TermMap t = unary();
      for (auto& [key, value] : t) value = -value;
      return t;
    }
    return power();
  }

  int integer_exponent() {
    const bool parenthesized = accept(TokenKind::LParen);
    int sign = 1;
    while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      if (take().kind == TokenKind::Minus) sign = -sign;
    }
    const Token& tok = peek();
    if (tok.kind != TokenKind::Number || tok.value.imag() != 0.0 ||
        tok.text.find_first_of(".e") != std::string::npos) {
      throw ParseError("integer exponent expected", tok.pos);
    }
    ++pos_;
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(),
                                     tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{} || value > kMaxPower) {
      throw ParseError("exponent out of range", tok.pos);
    }
    if (parenthesized && !accept(TokenKind::RParen)) {
      throw ParseError("expected ')'", peek().pos);
    }
    return sign * value;
  }

  TermMap power() {
    TermMap base = primary();
    if (peek().kind != TokenKind::Power) return base;
    const std::size_t at = take().pos;
    const int exponent = integer_exponent();
    if (exponent < 0) {
      auto inverse = invert_monomial(base);
      if (!inverse) {
        throw ParseError("negative powers need a single nonzero term", at);
      }
      base = *inverse;
    }
    TermMap result = constant(1.0);
    for (int k = 0; k < std::abs(exponent); ++k) result = multiply(result, base);
    return result;
  }

  TermMap primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::Number:
        ++pos_;
        return constant(tok.value);
      case TokenKind::Identifier: {
        ++pos_;
        if (tok.text == "i" || tok.text == "j") return constant({0.0, 1.0});
        for (std::size_t v = 0; v < variables_.size(); ++v) {
          if (variables_[v] == tok.text) {
            Key key = zero_key();
            key[v] = 1;
            return {{key, 1.0}};
          }
        }
        throw ParseError("unknown symbol '" + tok.text + "'", tok.pos);
      }
      case TokenKind::LParen: {
        ++pos_;
        TermMap inner = expr();
        if (!accept(TokenKind::RParen)) {
          throw ParseError("expected ')'", peek().pos);
        }
        return inner;
      }
      case TokenKind::End:
        throw ParseError("unexpected end of expression", tok.pos);
      default:
        throw ParseError("unexpected '" + tok.text + "'", tok.pos);
    }
  }

  std::vector<Token> tokens_;
  std::vector<std::string> variables_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text, bool allow_parameters) {
  std::vector<Token> tokens = tokenize(text);
  std::vector<std::string> variables{"z", "E"};
  for (const Token& tok : tokens) {
    if (tok.kind != TokenKind::Identifier) continue;
    if (tok.text == "z" || tok.text == "E" || tok.text == "i" ||
        tok.text == "j") {
      continue;
    }
    if (!allow_parameters) {
      throw ParseError("unknown symbol '" + tok.text + "'", tok.pos);
    }
    if (std::find(variables.begin(), variables.end(), tok.text) ==
        variables.end()) {
      variables.push_back(tok.text);
    }
  }
  if (tokens.size() == 1) throw ParseError("empty expression", 0);

  Parser parser(std::move(tokens), variables);
  Expression out{variables, parser.parse()};
  return out;
}

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string format_complex(std::complex<double> value) {
  const double re = value.real();
  const double im = value.imag();
  if (im == 0.0) return format_real(re);
  if (re == 0.0) return format_real(im) + "i";
  std::string out = "(" + format_real(re);
  out += im < 0.0 ? "-" : "+";
  out += format_real(std::abs(im)) + "i)";
  return out;
}

std::string format_sum(
    const std::vector<std::pair<std::complex<double>, std::string>>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [coeff, monomial] : terms) {
    // Pull a leading minus out of negative real and negative imaginary
    // coefficients so "x - 2*z" reads naturally.
    bool negative = false;
    std::complex<double> c = coeff;
    if ((c.imag() == 0.0 && c.real() < 0.0) ||
        (c.real() == 0.0 && c.imag() < 0.0)) {
      negative = true;
      c = -c;
    }
    std::string body;
    if (monomial.empty()) {
      body = format_complex(c);
    } else if (c == std::complex<double>{1.0, 0.0}) {
      body = monomial;
    } else {
      body = format_complex(c) + "*" + monomial;
    }
    if (first) {
      out = negative ? "-" + body : body;
      first = false;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

}  // namespace specgraph
