#pragma once

// Scalar analysis attached to the semicircle law: density, Stieltjes
// transform, pair factors, divided differences of m by three independent
// routes, semicircular averages, and the Bessel-function quantities phi and
// theta governing the time evolution.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace freelab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Semicircle density and quadrature

/// sqrt(4 - x^2) / (2 pi) on [-2, 2], zero outside.
double rho_sc(double x);

/// Gauss-Chebyshev (second kind) rule for the weight rho_sc. The rule is
/// evaluated at `nodes` and then repeatedly doubled until two successive
/// levels agree; doubling reuses every previous node.
struct QuadratureSpec {
  std::size_t nodes = 2000;
  std::size_t max_nodes = std::size_t{1} << 17;
  double rel_tol = 1e-12;

  /// Throws ValidationError unless 8 <= nodes <= max_nodes and rel_tol > 0.
  void validate() const;
};

struct QuadratureResult {
  cplx value;
  std::size_t nodes_used = 0;  // finest level evaluated
  double last_change = 0.0;    // |I_2n - I_n| at the accepted level
};

/// Integral of f against rho_sc. Throws AccuracyError when refinement does not
/// settle below max_nodes.
QuadratureResult sc_integrate(const std::function<cplx(double)>& f, const QuadratureSpec& spec = {});

/// <f>_sc, the semicircular average of f.
cplx sc_average(const std::function<cplx(double)>& f, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// Bessel J1 and the evolution kernels

double bessel_j1(double x);
/// <e^{isx}>_sc = J1(2s)/s, with phi(0) = 1.
double phi(double s);
/// J1(2t) sqrt(t) for t >= 0. Throws DomainError for t < 0.
double theta(double t);
/// J1(x) - sqrt(2/(pi x)) cos(x - 3pi/4), the error of the leading large-x
/// form. Throws DomainError for x <= 0.
double bessel_asymptotic_residual(double x);

// ---------------------------------------------------------------------------
// Stieltjes transform

/// Root of m^2 + z m + 1 = 0 with Im m * Im z > 0. Throws DomainError when
/// Im z == 0.
cplx stieltjes_m(cplx z);

/// q_ab = m_a m_b / (1 - m_a m_b) from precomputed Stieltjes values. Throws
/// SingularityError when |1 - m_a m_b| < 1e-14.
cplx q_from_m(cplx m_a, cplx m_b);
cplx q_factor(cplx z_a, cplx z_b);

/// Taylor coefficients c_0..c_order of m around z, so that c_j equals the
/// coincident divided difference m[z,...,z] with j+1 entries.
std::vector<cplx> stieltjes_taylor(cplx z, std::size_t order);

/// Smallest admissible |Im z| for a SpectralTuple entry.
inline constexpr double kImaginaryFloor = 1e-9;
/// Largest admissible |Re z|.
inline constexpr double kRealRange = 3.0;

/// Ordered spectral parameters with cached m_i, pair factors q_ab, eta_* and
/// rho. Immutable after construction.
class SpectralTuple {
 public:
  /// Throws DomainError if any z has Im z == 0, |Im z| < kImaginaryFloor or
  /// |Re z| > kRealRange, and ValidationError for an empty list.
  explicit SpectralTuple(std::vector<cplx> z);

  std::size_t size() const { return z_.size(); }
  std::span<const cplx> z() const { return z_; }
  std::span<const cplx> m() const { return m_; }
  cplx z(std::size_t i) const { return z_[i]; }
  cplx m(std::size_t i) const { return m_[i]; }
  const Eigen::MatrixXcd& q() const { return q_; }
  cplx q(std::size_t a, std::size_t b) const { return q_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)); }

  double eta_star() const { return eta_star_; }
  double rho() const { return rho_; }

  /// Sub-tuple on the positions selected by bit i of `positions`.
  SpectralTuple subtuple(std::uint32_t positions) const;

  /// Same tuple with every z replaced by its conjugate.
  SpectralTuple conjugate() const;

 private:
  std::vector<cplx> z_;
  std::vector<cplx> m_;
  Eigen::MatrixXcd q_;
  double eta_star_ = 0.0;
  double rho_ = 0.0;
};

// ---------------------------------------------------------------------------
// Divided differences m[z_1, ..., z_k]

/// Gaps below this switch the recursive route to quadrature.
inline constexpr double kProximityThreshold = 1e-4;
/// Below this eta the default node count is not trusted.
inline constexpr double kQuadratureEtaFloor = 1e-3;

/// Difference-quotient recursion. Exactly coincident parameters use the Taylor
/// coefficients of m; a nonzero gap below kProximityThreshold delegates the
/// whole tuple to the quadrature route.
cplx divided_difference_recursive(const SpectralTuple& t);

/// Integral of rho_sc(x) prod_i 1/(x - z_i). Throws DomainError if
/// eta_* < kQuadratureEtaFloor * (2000 / nodes), AccuracyError on refinement
/// failure.
cplx divided_difference_quadrature(const SpectralTuple& t, const QuadratureSpec& spec = {});

/// (prod m_s) sum over all non-crossing graphs E of q_E. Throws SizeLimitError
/// above the graph enumeration cap.
cplx divided_difference_graph(const SpectralTuple& t);
/// Same sum from raw Stieltjes values and pair factors (used to inject faults).
cplx divided_difference_graph(std::span<const cplx> m, const Eigen::MatrixXcd& q);

/// m_circ on the positions selected by `positions` (bit i = position i):
/// (prod m_s) sum over connected non-crossing graphs on those positions.
cplx m_circ(const SpectralTuple& t, std::uint32_t positions);
cplx m_circ(std::span<const cplx> m, const Eigen::MatrixXcd& q, std::uint32_t positions);

/// eta_*^{1-k} max_i |Im m_i|, an upper bound for |m[z_1..z_k]|.
double divided_difference_bound(const SpectralTuple& t);

// ---------------------------------------------------------------------------
// Graph generating polynomials

struct NcgPolynomials {
  std::vector<std::int64_t> a;  // a[j] = number of graphs in NCG([n]) with j edges
  std::vector<std::int64_t> b;  // same for dissection graphs
};

NcgPolynomials ncg_generating_polynomials(std::size_t n);

/// Evaluates a polynomial given by ascending coefficients at w.
cplx eval_polynomial(std::span<const std::int64_t> coeffs, cplx w);

struct DerivativeIdentityReport {
  cplx graph_value;       // m(z)^n a_n(q(z,z))
  cplx taylor_value;      // m^{(n-1)}(z)/(n-1)! from the Taylor recursion
  cplx quadrature_value;  // m[z,...,z] by quadrature
  double residual = 0.0;  // max of |graph - taylor| and |graph - quadrature|
};

/// Compares m[z,...,z] (n entries) with m(z)^n a_n(q(z,z)).
DerivativeIdentityReport verify_derivative_identity(cplx z, std::size_t n);

}  // namespace freelab
