#include "freelab/expression.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "freelab/errors.hpp"

namespace freelab {

namespace {

using Fn = std::function<cplx(double)>;

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Fn parse() {
    Fn f = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError("expression '" + s_ + "': " + what + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn sum() {
    Fn lhs = product();
    while (true) {
      if (eat('+')) {
        Fn rhs = product();
        lhs = [lhs, rhs](double x) { return lhs(x) + rhs(x); };
      } else if (eat('-')) {
        Fn rhs = product();
        lhs = [lhs, rhs](double x) { return lhs(x) - rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn product() {
    Fn lhs = unary();
    while (true) {
      if (eat('*')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double x) { return lhs(x) * rhs(x); };
      } else if (eat('/')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double x) { return lhs(x) / rhs(x); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary() {
    if (eat('-')) {
      Fn f = unary();
      return [f](double x) { return -f(x); };
    }
    if (eat('+')) return unary();
    return power();
  }

  Fn power() {
    Fn base = primary();
    if (!eat('^')) return base;
    Fn expo = unary();  // right associative
    return [base, expo](double x) {
      const cplx e = expo(x);
      const cplx b = base(x);
      if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64)
        return std::pow(b, static_cast<int>(e.real()));
      return std::pow(b, e);
    };
  }

  Fn primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      Fn f = sum();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return [v](double) { return cplx(v, 0.0); };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return [](double x) { return cplx(x, 0.0); };
      if (name == "i") return [](double) { return cplx(0.0, 1.0); };
      if (name == "pi") return [](double) { return cplx(M_PI, 0.0); };
      if (name == "e") return [](double) { return cplx(M_E, 0.0); };
      using Unary = cplx (*)(cplx);
      static const std::map<std::string, Unary> functions = {
          {"exp", [](cplx z) { return std::exp(z); }},   {"log", [](cplx z) { return std::log(z); }},
          {"sqrt", [](cplx z) { return std::sqrt(z); }}, {"sin", [](cplx z) { return std::sin(z); }},
          {"cos", [](cplx z) { return std::cos(z); }},   {"tan", [](cplx z) { return std::tan(z); }},
          {"sinh", [](cplx z) { return std::sinh(z); }}, {"cosh", [](cplx z) { return std::cosh(z); }},
          {"tanh", [](cplx z) { return std::tanh(z); }}, {"abs", [](cplx z) { return cplx(std::abs(z), 0.0); }},
          {"re", [](cplx z) { return cplx(z.real(), 0.0); }}, {"im", [](cplx z) { return cplx(z.imag(), 0.0); }},
          {"conj", [](cplx z) { return std::conj(z); }}};
      auto it = functions.find(name);
      if (it == functions.end()) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!eat('(')) fail("expected '(' after " + name);
      Fn arg = sum();
      if (!eat(')')) fail("expected ')'");
      const Unary op = it->second;
      return [op, arg](double x) { return op(arg(x)); };
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string text) : text_(std::move(text)) { eval_ = Parser(text_).parse(); }

}  // namespace freelab
