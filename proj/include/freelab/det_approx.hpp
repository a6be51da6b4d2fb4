#pragma once

// Deterministic approximations of alternating chains: pi-partial traces, the
// matrix M_[k] by partition, graph and recursive constructions, and the
// function-level predictions built from semicircle or phi free cumulants.
//
// Chains are passed as spans of square matrices. A chain of order k pairs k
// spectral parameters (or functions) with A_1..A_{k-1} for matrix-valued and
// isotropic quantities, or with A_1..A_k for averaged traces. Every product of
// observables is taken in increasing index order.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "freelab/cumulants.hpp"
#include "freelab/ncp.hpp"
#include "freelab/semicircle.hpp"
#include "json.hpp"

namespace freelab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr std::size_t kPartitionRouteCap = 8;
inline constexpr std::size_t kGraphRouteCap = 6;

/// <A> = tr(A)/N.
cplx normalized_trace(const Matrix& a);
/// <AB> in O(N^2) without forming the product.
cplx normalized_trace_product(const Matrix& a, const Matrix& b);
/// <x, y> = x^* y.
cplx inner(const Vector& x, const Vector& y);

/// Matrices A_1..A_n of common dimension with optional vectors x, y.
class ObservableChain {
 public:
  /// Throws ValidationError on an empty list, non-square or mismatched
  /// matrices, non-finite entries, or vectors of the wrong length.
  explicit ObservableChain(std::vector<Matrix> matrices);
  ObservableChain(std::vector<Matrix> matrices, Vector x, Vector y);

  std::size_t size() const { return matrices_.size(); }
  Eigen::Index dim() const { return matrices_.front().rows(); }
  std::span<const Matrix> matrices() const { return matrices_; }
  const Matrix& operator[](std::size_t i) const { return matrices_[i]; }

  bool has_vectors() const { return x_.has_value(); }
  const Vector& x() const { return *x_; }
  const Vector& y() const { return *y_; }

 private:
  std::vector<Matrix> matrices_;
  std::optional<Vector> x_, y_;
};

/// pTr_pi(A_1..A_{k-1}) for pi on [k].
Matrix partial_trace(const NonCrossingPartition& pi, std::span<const Matrix> a);
/// <A_1,..,A_k>_pi for pi on [k].
cplx pi_trace(const NonCrossingPartition& pi, std::span<const Matrix> a);

struct PartitionTerm {
  NonCrossingPartition pi;        // partition carrying the cumulant weight
  NonCrossingPartition kreweras;  // K(pi), which carries the traces
  cplx weight;                    // prod_{B in pi} f_circ[B]
  std::optional<cplx> value;      // scalar contribution, when one is defined
};

nlohmann::json to_json(const PartitionTerm& term);

struct ScalarPrediction {
  cplx value;
  std::vector<PartitionTerm> terms;

  nlohmann::json to_json() const;
};

struct PredictionResult {
  Matrix matrix;
  std::vector<PartitionTerm> terms;  // empty for the recursive construction

  /// <matrix A_k>.
  cplx averaged(const Matrix& a_k) const;
  /// <x, matrix y>.
  cplx isotropic(const Vector& x, const Vector& y) const;
};

// ---------------------------------------------------------------------------
// Partition sums for an arbitrary cumulant table

/// sum_pi pTr_{K(pi)}(A_1..A_{k-1}) prod_{B in pi} c[B], with k = c.k().
/// When x and y are given each term also records <x, term y>.
PredictionResult chain_from_cumulants(const SetFunction& c, std::span<const Matrix> a,
                                      const Vector* x = nullptr, const Vector* y = nullptr);

/// sum_pi <A_1..A_k>_{K(pi)} prod_{B in pi} c[B], without materializing the
/// matrix part.
ScalarPrediction averaged_from_cumulants(const SetFunction& c, std::span<const Matrix> a);

/// Isotropic scalar <x, (chain_from_cumulants) y> with its term breakdown.
ScalarPrediction isotropic_from_cumulants(const SetFunction& c, std::span<const Matrix> a, const Vector& x,
                                          const Vector& y);

// ---------------------------------------------------------------------------
// M_[k]

/// m[B] for every nonempty subset B of the tuple's positions, via the
/// recursive divided-difference route.
SetFunction m_moment_table(const SpectralTuple& t);

/// Free cumulants m_circ of m_moment_table.
SetFunction m_cumulant_table(const SpectralTuple& t);

PredictionResult m_matrix_partition(const SpectralTuple& t, std::span<const Matrix> a);
/// <M_[k] A_k> by the partition route, scalar path.
ScalarPrediction m_averaged(const SpectralTuple& t, std::span<const Matrix> a);

PredictionResult m_matrix_graph(const SpectralTuple& t, std::span<const Matrix> a);
/// Graph route from raw m values and pair factors (fault injection hook).
PredictionResult m_matrix_graph(std::span<const cplx> m, const Eigen::MatrixXcd& q, std::span<const Matrix> a);

enum class RecursionLine { expand_first, expand_last };

PredictionResult m_matrix_recursive(const SpectralTuple& t, std::span<const Matrix> a,
                                    RecursionLine line = RecursionLine::expand_first);

struct TraceRecursionReport {
  cplx direct;      // <M_[k]> from the partition route
  cplx recursive;   // <M_[1,k) A_{k-1} - A_1 M_(1,k]> / (z_1 - z_k)
  double residual;  // |direct - recursive| / scale
  double scale;     // max(|direct|, (|<M_[1,k)A_{k-1}>| + |<A_1 M_(1,k]>|) / |z_1 - z_k|)
};

/// Checks the trace recursion for A_1..A_{k-1}. Throws DomainError when
/// |z_1 - z_k| < 1e-6 and ValidationError when k < 2.
TraceRecursionReport check_trace_recursion(const SpectralTuple& t, std::span<const Matrix> a);

struct MBoundReport {
  double averaged_ratio;  // |<M A_k>| eta_*^{k-1-ceil(a/2)} / (rho prod ||A_j||)
  double norm_ratio;      // ||M|| eta_*^{k-1} / (rho prod_{j<k} ||A_j||)
  double averaged_value;  // |<M A_k>|
  double norm_value;      // ||M||
  double eta_star;
  double rho;
};

/// Scaling diagnostics for A_1..A_k with `traceless_count` traceless matrices.
MBoundReport m_bound_check(const SpectralTuple& t, std::span<const Matrix> a, std::size_t traceless_count);

/// Largest singular value.
double operator_norm(const Matrix& a);

// ---------------------------------------------------------------------------
// Function-level predictions

using ScalarFunction = std::function<cplx(double)>;

/// sc[S] = <prod_{i in S} f_i>_sc by quadrature.
SetFunction sc_moment_table(std::span<const ScalarFunction> f, const QuadratureSpec& spec = {});
/// phi[S] = phi(sum_{i in S} s_i).
SetFunction phi_moment_table(std::span<const double> s);

/// Averaged prediction for <f_1(W)A_1 ... f_k(W)A_k>.
ScalarPrediction f_prediction(std::span<const ScalarFunction> f, std::span<const Matrix> a,
                              const QuadratureSpec& spec = {});
/// Isotropic prediction for <x, f_1(W)A_1 ... A_{k-1} f_k(W) y>.
ScalarPrediction f_prediction_isotropic(std::span<const ScalarFunction> f, std::span<const Matrix> a,
                                        const Vector& x, const Vector& y, const QuadratureSpec& spec = {});

/// Averaged prediction for <e^{is_1 W}A_1 ... e^{is_k W}A_k>.
ScalarPrediction exp_prediction(std::span<const double> s, std::span<const Matrix> a);
ScalarPrediction exp_prediction_isotropic(std::span<const double> s, std::span<const Matrix> a, const Vector& x,
                                          const Vector& y);

// ---------------------------------------------------------------------------
// Large-time closed forms

/// A - <A> I.
Matrix traceless_part(const Matrix& a);

/// <A(t)B> ~ <A><B> + theta(t)^2 <(A-<A>)(B-<B>)> / t^3. Throws DomainError
/// for t <= 0.
cplx two_observable_asymptotic(double t, const Matrix& a, const Matrix& b);
/// <x, A(t) y> ~ <x,y><A> + theta(t)^2 <x, (A-<A>) y> / t^3.
cplx two_observable_asymptotic_isotropic(double t, const Matrix& a, const Vector& x, const Vector& y);

struct ThreeObservableTerms {
  cplx product;      // <A><B><C>
  cplx s_term;       // theta(s)^2 <A><B°C°> / s^3
  cplx t_term;       // theta(t)^2 <B><A°C°> / t^3
  cplx gap_term;     // theta(t-s)^2 <C><A°B°> / (t-s)^3
  cplx triple_term;  // theta(s)theta(t)theta(t-s) <A°B°C°> / (s t (t-s))^{3/2}
  cplx value;        // sum of the five

  nlohmann::json to_json() const;
};

/// Five-term large-time form of <A(t)B(s)C>. Throws DomainError unless
/// 0 < s < t.
ThreeObservableTerms three_observable_asymptotic(double t, double s, const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace freelab
