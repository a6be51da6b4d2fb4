#pragma once

// Complex-valued expressions in one real variable x, e.g. "exp(i*3*x)" or
// "1/(x - 0.5 - 0.1*i)", compiled into callable spectral functions.

#include <complex>
#include <functional>
#include <memory>
#include <string>

namespace freelab {

using cplx = std::complex<double>;

class Expression {
 public:
  /// Grammar: sums, products, quotients, powers '^', unary signs, parentheses,
  /// numbers, the constants i, pi, e, the variable x and the functions exp,
  /// log, sqrt, sin, cos, tan, sinh, cosh, tanh, abs, re, im, conj. Throws
  /// ValidationError with the column of the first offending character.
  explicit Expression(std::string text);

  cplx operator()(double x) const { return eval_(x); }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::function<cplx(double)> eval_;
};

}  // namespace freelab
