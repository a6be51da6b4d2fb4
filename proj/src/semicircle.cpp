#include "freelab/semicircle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freelab/detail/lattice_tables.hpp"
#include "freelab/errors.hpp"
#include "freelab/ncp.hpp"

namespace freelab {

using detail::Mask;

cplx stieltjes_m(cplx z) {
  if (z.imag() == 0.0) throw DomainError("Stieltjes transform needs Im z != 0");
  if (z.imag() < 0.0) return std::conj(stieltjes_m(std::conj(z)));
  // The product of principal roots keeps the branch cut on [-2, 2] and avoids
  // cancellation between z and sqrt(z^2 - 4) for large |z|.
  cplx m = -2.0 / (z + std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
  if (m.imag() <= 0.0) m = 1.0 / m;
  return m;
}

cplx q_from_m(cplx m_a, cplx m_b) {
  const cplx p = m_a * m_b;
  if (std::abs(1.0 - p) < 1e-14) throw SingularityError("pair factor q_ab is singular (m_a m_b = 1)");
  return p / (1.0 - p);
}

cplx q_factor(cplx z_a, cplx z_b) { return q_from_m(stieltjes_m(z_a), stieltjes_m(z_b)); }

std::vector<cplx> stieltjes_taylor(cplx z, std::size_t order) {
  // Matching powers of h in m(z+h)^2 + (z+h) m(z+h) + 1 = 0 gives
  // (2c_0 + z) c_j = -c_{j-1} - sum_{i=1}^{j-1} c_i c_{j-i}.
  std::vector<cplx> c(order + 1);
  c[0] = stieltjes_m(z);
  const cplx lead = c[0] - 1.0 / c[0];  // 2c_0 + z
  for (std::size_t j = 1; j <= order; ++j) {
    cplx rhs = -c[j - 1];
    for (std::size_t i = 1; i < j; ++i) rhs -= c[i] * c[j - i];
    c[j] = rhs / lead;
  }
  return c;
}

// ---------------------------------------------------------------------------

SpectralTuple::SpectralTuple(std::vector<cplx> z) : z_(std::move(z)) {
  if (z_.empty()) throw ValidationError("spectral tuple must be nonempty");
  if (z_.size() > 32) throw SizeLimitError("spectral tuple", z_.size(), 32);
  eta_star_ = std::numeric_limits<double>::infinity();
  for (cplx zi : z_) {
    if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag())) throw DomainError("spectral parameter is not finite");
    if (std::abs(zi.imag()) < kImaginaryFloor)
      throw DomainError("spectral parameter has |Im z| below the floor " + std::to_string(kImaginaryFloor));
    if (std::abs(zi.real()) > kRealRange) throw DomainError("spectral parameter has |Re z| > 3");
    const cplx mi = stieltjes_m(zi);
    m_.push_back(mi);
    eta_star_ = std::min(eta_star_, std::abs(zi.imag()));
    rho_ = std::max(rho_, std::abs(mi.imag()) / M_PI);
  }
  const auto k = static_cast<Eigen::Index>(z_.size());
  q_.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = a; b < k; ++b) q_(a, b) = q_(b, a) = q_from_m(m_[static_cast<std::size_t>(a)], m_[static_cast<std::size_t>(b)]);
}

SpectralTuple SpectralTuple::subtuple(std::uint32_t positions) const {
  std::vector<cplx> sub;
  for (std::size_t i = 0; i < z_.size(); ++i)
    if (positions & (std::uint32_t{1} << i)) sub.push_back(z_[i]);
  return SpectralTuple(std::move(sub));
}

SpectralTuple SpectralTuple::conjugate() const {
  std::vector<cplx> c;
  for (cplx zi : z_) c.push_back(std::conj(zi));
  return SpectralTuple(std::move(c));
}

// ---------------------------------------------------------------------------

namespace {

bool lex_less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

// Divided difference on every subset of the lexicographically sorted tuple.
// Each non-coincident subset removes one endpoint of its widest pair, which
// keeps the quotient denominators as large as possible.
class NewtonMemo {
 public:
  explicit NewtonMemo(std::vector<cplx> z) : z_(std::move(z)), memo_(std::size_t{1} << z_.size()), done_(memo_.size(), 0) {}

  cplx value(Mask s) {
    if (done_[s]) return memo_[s];
    cplx v;
    const int first = detail::lowest_index(s);
    if (detail::popcount(s) == 1) {
      v = stieltjes_m(z_[static_cast<std::size_t>(first)]);
    } else {
      int best_a = -1, best_b = -1;
      double widest = -1.0;
      for (Mask ra = s; ra != 0; ra &= ra - 1) {
        const int a = detail::lowest_index(ra);
        for (Mask rb = ra & (ra - 1); rb != 0; rb &= rb - 1) {
          const int b = detail::lowest_index(rb);
          const double gap = std::abs(z_[static_cast<std::size_t>(a)] - z_[static_cast<std::size_t>(b)]);
          if (gap > widest) {
            widest = gap;
            best_a = a;
            best_b = b;
          }
        }
      }
      if (widest == 0.0) {
        v = stieltjes_taylor(z_[static_cast<std::size_t>(first)], static_cast<std::size_t>(detail::popcount(s)) - 1).back();
      } else {
        const Mask without_a = s & ~(Mask{1} << best_a);
        const Mask without_b = s & ~(Mask{1} << best_b);
        v = (value(without_b) - value(without_a)) /
            (z_[static_cast<std::size_t>(best_a)] - z_[static_cast<std::size_t>(best_b)]);
      }
    }
    done_[s] = 1;
    return memo_[s] = v;
  }

 private:
  std::vector<cplx> z_;
  std::vector<cplx> memo_;
  std::vector<char> done_;
};

QuadratureSpec fallback_spec(double eta) {
  QuadratureSpec spec;
  const double needed = 2000.0 * kQuadratureEtaFloor / eta;
  while (static_cast<double>(spec.nodes) < needed) spec.nodes *= 2;
  spec.max_nodes = std::max(spec.max_nodes, spec.nodes * 64);
  return spec;
}

}  // namespace

cplx divided_difference_recursive(const SpectralTuple& t) {
  std::vector<cplx> z(t.z().begin(), t.z().end());
  std::sort(z.begin(), z.end(), lex_less);

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double gap = std::abs(z[i] - z[j]);
      if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
  if (min_gap < kProximityThreshold) return divided_difference_quadrature(t, fallback_spec(t.eta_star()));

  if (z.size() > 20) throw SizeLimitError("divided_difference_recursive", z.size(), 20);
  NewtonMemo memo(std::move(z));
  return memo.value(static_cast<Mask>((std::size_t{1} << t.size()) - 1));
}

cplx divided_difference_quadrature(const SpectralTuple& t, const QuadratureSpec& spec) {
  spec.validate();
  const double floor = kQuadratureEtaFloor * 2000.0 / static_cast<double>(spec.nodes);
  if (t.eta_star() < floor)
    throw DomainError("quadrature needs eta_* >= " + std::to_string(floor) + " at " + std::to_string(spec.nodes) +
                      " nodes; raise the node count");
  const auto z = t.z();
  // Integrand is symmetric in the z's; multiplying in sorted order makes the
  // result bitwise invariant under permutations of the tuple.
  std::vector<cplx> sorted(z.begin(), z.end());
  std::sort(sorted.begin(), sorted.end(), lex_less);
  return sc_average(
      [&sorted](double x) {
        cplx p = 1.0;
        for (cplx zi : sorted) p /= (x - zi);
        return p;
      },
      spec);
}

namespace {

cplx graph_sum(std::span<const cplx> m, const Eigen::MatrixXcd& q, Mask positions, bool connected_only) {
  const std::size_t n = static_cast<std::size_t>(detail::popcount(positions));
  if (n == 0) throw ValidationError("graph sum over an empty set");
  if (n > kNcgEnumerationCap) throw SizeLimitError("non-crossing graph sum", n, kNcgEnumerationCap);
  std::vector<Eigen::Index> pos;
  for (Mask r = positions; r != 0; r &= r - 1) {
    const int p = detail::lowest_index(r);
    if (static_cast<std::size_t>(p) >= m.size()) throw ValidationError("graph sum position outside the tuple");
    pos.push_back(p);
  }
  cplx sum{};
  for (const auto& g : detail::ncg_table(n)) {
    if (connected_only && !g.connected) continue;
    cplx term = 1.0;
    for (auto [a, b] : g.edges) term *= q(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]);
    sum += term;
  }
  cplx prod = 1.0;
  for (Eigen::Index p : pos) prod *= m[static_cast<std::size_t>(p)];
  return prod * sum;
}

void check_shapes(std::span<const cplx> m, const Eigen::MatrixXcd& q) {
  if (q.rows() != static_cast<Eigen::Index>(m.size()) || q.cols() != q.rows())
    throw ValidationError("pair-factor matrix does not match the Stieltjes values");
}

}  // namespace

cplx divided_difference_graph(std::span<const cplx> m, const Eigen::MatrixXcd& q) {
  check_shapes(m, q);
  if (m.size() > kNcgEnumerationCap) throw SizeLimitError("divided_difference_graph", m.size(), kNcgEnumerationCap);
  return graph_sum(m, q, static_cast<Mask>((std::size_t{1} << m.size()) - 1), false);
}

cplx divided_difference_graph(const SpectralTuple& t) { return divided_difference_graph(t.m(), t.q()); }

cplx m_circ(std::span<const cplx> m, const Eigen::MatrixXcd& q, std::uint32_t positions) {
  check_shapes(m, q);
  return graph_sum(m, q, positions, true);
}

cplx m_circ(const SpectralTuple& t, std::uint32_t positions) { return m_circ(t.m(), t.q(), positions); }

double divided_difference_bound(const SpectralTuple& t) {
  double max_im = 0.0;
  for (cplx mi : t.m()) max_im = std::max(max_im, std::abs(mi.imag()));
  return std::pow(t.eta_star(), 1.0 - static_cast<double>(t.size())) * max_im;
}

// ---------------------------------------------------------------------------

NcgPolynomials ncg_generating_polynomials(std::size_t n) {
  const auto graphs = enumerate_ncg(GroundSet::first_n(static_cast<int>(n)));
  NcgPolynomials out;
  for (const auto& g : graphs) {
    const std::size_t e = g.num_edges();
    if (out.a.size() <= e) out.a.resize(e + 1, 0);
    ++out.a[e];
    if (g.is_dissection()) {
      if (out.b.size() <= e) out.b.resize(e + 1, 0);
      ++out.b[e];
    }
  }
  return out;
}

cplx eval_polynomial(std::span<const std::int64_t> coeffs, cplx w) {
  cplx v{};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * w + static_cast<double>(*it);
  return v;
}

DerivativeIdentityReport verify_derivative_identity(cplx z, std::size_t n) {
  if (n == 0) throw ValidationError("derivative identity needs n >= 1");
  const auto poly = ncg_generating_polynomials(n);
  const cplx m = stieltjes_m(z);
  DerivativeIdentityReport r;
  r.graph_value = std::pow(m, static_cast<int>(n)) * eval_polynomial(poly.a, q_from_m(m, m));
  r.taylor_value = stieltjes_taylor(z, n - 1).back();
  r.quadrature_value = divided_difference_quadrature(SpectralTuple(std::vector<cplx>(n, z)));
  r.residual = std::max(std::abs(r.graph_value - r.taylor_value), std::abs(r.graph_value - r.quadrature_value));
  return r;
}

}  // namespace freelab
