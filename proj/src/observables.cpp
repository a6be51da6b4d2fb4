#include "freelab/observables.hpp"

#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "freelab/errors.hpp"

namespace freelab {

Matrix identity_observable(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix traceless_diagonal_pm1(Eigen::Index n) {
  Matrix a = Matrix::Zero(n, n);
  const Eigen::Index half = n / 2;
  for (Eigen::Index i = 0; i < half; ++i) {
    a(i, i) = 1.0;
    a(half + i, half + i) = -1.0;
  }
  return a;
}

Matrix rank_one_projection_traceless(Eigen::Index n) {
  Matrix a = Matrix::Zero(n, n);
  a(0, 0) = 1.0;
  a.diagonal().array() -= 1.0 / static_cast<double>(n);
  return a;
}

Matrix random_hermitian_traceless(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = {g(gen), g(gen)};
  Matrix a = (x + x.adjoint()) / 2.0;
  a.diagonal().array() -= a.trace() / static_cast<double>(n);
  const double second = std::sqrt((a * a).trace().real() / static_cast<double>(n));
  return a / second;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Matrix single_generator(const std::string& name, Eigen::Index n) {
  if (name == "identity") return identity_observable(n);
  if (name == "traceless-diagonal-pm1") return traceless_diagonal_pm1(n);
  if (name == "rank-one-projection-traceless") return rank_one_projection_traceless(n);
  const std::string prefix = "random-hermitian-traceless";
  if (name.rfind(prefix, 0) == 0) {
    std::string rest = name.substr(prefix.size());
    std::uint64_t seed = 0;
    if (!rest.empty()) {
      if (rest.front() != '(' || rest.back() != ')') throw ValidationError("malformed observable '" + name + "'");
      rest = rest.substr(1, rest.size() - 2);
      std::size_t used = 0;
      try {
        seed = std::stoull(rest, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != rest.size()) throw ValidationError("malformed seed in observable '" + name + "'");
    }
    return random_hermitian_traceless(n, seed);
  }
  throw ValidationError("unknown observable '" + name +
                        "' (expected identity, traceless-diagonal-pm1, rank-one-projection-traceless or "
                        "random-hermitian-traceless(SEED))");
}

}  // namespace

Matrix named_observable(const std::string& spec, Eigen::Index n) {
  if (n < 1) throw ValidationError("observable dimension must be positive");
  Matrix total = Matrix::Zero(n, n);
  std::stringstream ss(spec);
  std::string term;
  bool any = false;
  while (std::getline(ss, term, '+')) {
    term = trim(term);
    if (term.empty()) throw ValidationError("empty term in observable '" + spec + "'");
    double coeff = 1.0;
    if (const auto star = term.find('*'); star != std::string::npos) {
      const std::string c = trim(term.substr(0, star));
      std::size_t used = 0;
      try {
        coeff = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) throw ValidationError("malformed coefficient in observable '" + spec + "'");
      term = trim(term.substr(star + 1));
    }
    total += coeff * single_generator(term, n);
    any = true;
  }
  if (!any) throw ValidationError("empty observable description");
  if (trim(spec).back() == '+') throw ValidationError("empty term in observable '" + spec + "'");
  return total;
}

Matrix read_observable(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line()) throw ValidationError("observable file is empty");
  long n = 0;
  {
    std::istringstream h(line);
    if (!(h >> n) || n < 1 || !(h >> std::ws).eof())
      throw ValidationError("line " + std::to_string(line_no) + ": expected a positive dimension");
  }
  Matrix a(n, n);
  for (long r = 0; r < n; ++r) {
    if (!next_line()) throw ValidationError("observable file ends before row " + std::to_string(r + 1));
    std::istringstream row(line);
    for (long c = 0; c < n; ++c) {
      double re = 0, im = 0;
      if (!(row >> re >> im))
        throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) + " 're im' pairs");
      a(r, c) = {re, im};
    }
    if (!(row >> std::ws).eof()) throw ValidationError("line " + std::to_string(line_no) + ": trailing data");
  }
  if (next_line()) throw ValidationError("line " + std::to_string(line_no) + ": data after the last row");
  return a;
}

void write_observable(const Matrix& a, std::ostream& out) {
  out.precision(17);
  out << a.rows() << '\n';
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) out << (c ? " " : "") << a(r, c).real() << ' ' << a(r, c).imag();
    out << '\n';
  }
}

Vector unit_vector(Eigen::Index n, Eigen::Index i) {
  if (i < 0 || i >= n) throw ValidationError("unit vector index out of range");
  Vector v = Vector::Zero(n);
  v(i) = 1.0;
  return v;
}

std::pair<Vector, Vector> random_unit_pair(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = {g(gen), g(gen)};
  for (Eigen::Index i = 0; i < n; ++i) y(i) = {g(gen), g(gen)};
  return {x.normalized(), y.normalized()};
}

}  // namespace freelab
