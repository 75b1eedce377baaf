#pragma once

// Minimal analytic expressions for scenario parameters: sums of products of
// sin(a u), cos(a u), exp(a u) and integer powers u^n in the axis variables
// x, y, t. The family is closed under differentiation, so scenarios built
// from it can hand out exact derivative fields.
//
// Grammar:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := (number | factor) (['*'] (number | factor))*
//   factor := func '(' [number ['*']] var ')' | var ['^' uint]
//   func   := sin | cos | exp ; var := x | y | t

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "gcme/core.hpp"

namespace gcme {

struct ExprFactor {
  enum class Kind { kSin, kCos, kExp, kPow };
  Kind kind;
  Axis axis;
  double freq = 1.0;  // argument scale for sin/cos/exp
  int power = 1;      // exponent for kPow

  double eval(double u) const {
    switch (kind) {
      case Kind::kSin: return std::sin(freq * u);
      case Kind::kCos: return std::cos(freq * u);
      case Kind::kExp: return std::exp(freq * u);
      case Kind::kPow: {
        double r = 1.0;
        for (int i = 0; i < power; ++i) r *= u;
        return r;
      }
    }
    return 0.0;
  }
};

struct ExprTerm {
  double coef = 1.0;
  std::vector<ExprFactor> factors;

  double eval(const std::array<double, 3>& pos) const {
    double v = coef;
    for (const ExprFactor& f : factors) v *= f.eval(pos[static_cast<int>(f.axis)]);
    return v;
  }
};

class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& text);

  double eval(const std::array<double, 3>& pos) const {
    double v = 0.0;
    for (const ExprTerm& t : terms_) v += t.eval(pos);
    return v;
  }

  /// Exact derivative along one axis; stays inside the same family.
  Expr derivative(Axis wrt) const {
    Expr out;
    for (const ExprTerm& term : terms_) {
      for (std::size_t i = 0; i < term.factors.size(); ++i) {
        const ExprFactor& f = term.factors[i];
        if (f.axis != wrt) continue;
        double dcoef = 0.0;
        bool keep_factor = true;
        ExprFactor df = f;
        switch (f.kind) {
          case ExprFactor::Kind::kSin:
            dcoef = f.freq;
            df.kind = ExprFactor::Kind::kCos;
            break;
          case ExprFactor::Kind::kCos:
            dcoef = -f.freq;
            df.kind = ExprFactor::Kind::kSin;
            break;
          case ExprFactor::Kind::kExp:
            dcoef = f.freq;
            break;
          case ExprFactor::Kind::kPow:
            dcoef = static_cast<double>(f.power);
            df.power = f.power - 1;
            keep_factor = df.power >= 1;
            break;
        }
        if (dcoef == 0.0) continue;
        ExprTerm dterm;
        dterm.coef = term.coef * dcoef;
        for (std::size_t j = 0; j < term.factors.size(); ++j) {
          if (j == i) {
            if (keep_factor) dterm.factors.push_back(df);
          } else {
            dterm.factors.push_back(term.factors[j]);
          }
        }
        out.terms_.push_back(std::move(dterm));
      }
    }
    return out;
  }

  bool uses_axis(Axis a) const {
    for (const ExprTerm& t : terms_)
      for (const ExprFactor& f : t.factors)
        if (f.axis == a) return true;
    return false;
  }

  const std::string& source() const { return source_; }

 private:
  std::vector<ExprTerm> terms_;
  std::string source_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  std::vector<ExprTerm> run() {
    std::vector<ExprTerm> terms;
    double sign = consume_sign();
    while (true) {
      ExprTerm t = parse_term();
      t.coef *= sign;
      terms.push_back(std::move(t));
      skip_ws();
      if (peek() == '+' || peek() == '-') {
        sign = consume_sign();
        continue;
      }
      break;
    }
    skip_ws();
    if (i_ != s_.size()) fail("trailing input");
    return terms;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("expression '" + s_ + "': " + why);
  }

  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  double consume_sign() {
    skip_ws();
    double sign = 1.0;
    if (peek() == '+') ++i_;
    else if (peek() == '-') { sign = -1.0; ++i_; }
    return sign;
  }

  bool at_number() const {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double parse_number() {
    const char* begin = s_.c_str() + i_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    i_ += static_cast<std::size_t>(end - begin);
    if (!std::isfinite(v)) fail("non-finite number");
    return v;
  }

  std::string parse_ident() {
    std::size_t start = i_;
    while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ == start) fail("expected a name");
    return s_.substr(start, i_ - start);
  }

  Axis parse_axis(const std::string& name) {
    if (name == "x") return Axis::X;
    if (name == "y") return Axis::Y;
    if (name == "t") return Axis::T;
    fail("unknown variable '" + name + "' (expected x, y or t)");
  }

  ExprTerm parse_term() {
    ExprTerm term;
    bool any = false;
    while (true) {
      skip_ws();
      if (at_number()) {
        term.coef *= parse_number();
        any = true;
      } else if (std::isalpha(static_cast<unsigned char>(peek()))) {
        const std::string name = parse_ident();
        if (name == "sin" || name == "cos" || name == "exp") {
          term.factors.push_back(parse_call(name));
        } else {
          ExprFactor f;
          f.kind = ExprFactor::Kind::kPow;
          f.axis = parse_axis(name);
          f.power = 1;
          skip_ws();
          if (peek() == '^') {
            ++i_;
            skip_ws();
            if (!at_number()) fail("expected an exponent after '^'");
            const double p = parse_number();
            if (p < 0.0 || p != std::floor(p) || p > 16.0)
              fail("exponent must be a small non-negative integer");
            f.power = static_cast<int>(p);
          }
          term.factors.push_back(f);
        }
        any = true;
      } else {
        fail(std::string("unexpected character '") + peek() + "'");
      }
      skip_ws();
      if (peek() == '*') {
        ++i_;
        continue;
      }
      if (at_number() || std::isalpha(static_cast<unsigned char>(peek()))) continue;
      break;
    }
    if (!any) fail("empty term");
    return term;
  }

  ExprFactor parse_call(const std::string& func) {
    skip_ws();
    if (peek() != '(') fail("expected '(' after " + func);
    ++i_;
    skip_ws();
    ExprFactor f;
    f.kind = func == "sin" ? ExprFactor::Kind::kSin
             : func == "cos" ? ExprFactor::Kind::kCos
                             : ExprFactor::Kind::kExp;
    f.freq = 1.0;
    if (at_number() || peek() == '-' || peek() == '+') {
      f.freq = parse_number();
      skip_ws();
      if (peek() == '*') { ++i_; skip_ws(); }
    }
    f.axis = parse_axis(parse_ident());
    skip_ws();
    if (peek() != ')') fail("expected ')' in " + func + "(...)");
    ++i_;
    return f;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Expr Expr::parse(const std::string& text) {
  Expr e;
  detail::ExprParser parser(text);
  e.terms_ = parser.run();
  e.source_ = text;
  return e;
}

}  // namespace gcme
