#pragma once

// Finite-N Wigner ensembles: sampling, cached eigendecomposition, spectral
// matrix functions, resolvents, Heisenberg evolution and chain evaluation in
// the eigenbasis.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freelab/semicircle.hpp"

namespace freelab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Symmetry { real_symmetric, complex_hermitian };
enum class EntryLaw { gaussian, rademacher, uniform };

std::string to_string(Symmetry s);
std::string to_string(EntryLaw l);
Symmetry parse_symmetry(const std::string& text);
EntryLaw parse_entry_law(const std::string& text);

struct EnsembleSpec {
  Symmetry symmetry = Symmetry::complex_hermitian;
  EntryLaw offdiag_law = EntryLaw::gaussian;
  EntryLaw diag_law = EntryLaw::gaussian;
  /// E chi_d^2; defaults to 2 (real symmetric) or 1 (complex Hermitian).
  std::optional<double> diag_variance;
  /// E chi_od^2 in the complex case, a real number in [-1, 1].
  double offdiag_pseudo_variance = 0.0;
  std::size_t n = 0;

  double effective_diag_variance() const;
  /// Throws ValidationError on n < 2, a negative diagonal variance, or a
  /// pseudo-variance outside [-1, 1] (or nonzero in the real case).
  void validate() const;

  static EnsembleSpec gue(std::size_t n);
  static EnsembleSpec goe(std::size_t n);
};

/// Master seed plus the pure mapping (grid index, sample index) -> substream
/// seed. Substreams do not depend on how work is split across workers.
struct SeedPlan {
  std::uint64_t master = 0;

  std::uint64_t substream(std::uint64_t grid_index, std::uint64_t sample_index) const;
};

class WignerSample {
 public:
  /// Wraps a self-adjoint matrix and computes its eigendecomposition. Throws
  /// ValidationError if `w` is not square and self-adjoint, NumericError if
  /// the eigensolver fails.
  WignerSample(Matrix w, bool real_symmetric, std::uint64_t seed);

  Eigen::Index n() const { return w_.rows(); }
  const Matrix& w() const { return w_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Matrix& eigenvectors() const { return u_; }
  std::uint64_t seed() const { return seed_; }
  bool real_symmetric() const { return real_; }

  /// U^* A U.
  Matrix rotate(const Matrix& a) const;
  /// U^* x.
  Vector rotate(const Vector& x) const;

  /// ||U diag(lambda) U^* - W||_F / ||W||_F.
  double reconstruction_error() const;
  /// ||U^* U - I||_F.
  double unitarity_error() const;

 private:
  Matrix w_;
  Eigen::VectorXd lambda_;
  Matrix u_;
  std::uint64_t seed_;
  bool real_;
};

/// Draws W with w_ab = chi_od / sqrt(N) (a < b) and w_aa = chi_d / sqrt(N).
WignerSample sample_wigner(const EnsembleSpec& spec, std::uint64_t seed);

using SpectralFunction = std::function<cplx(double)>;

/// Range on which matrix functions are evaluated; eigenvalues outside use the
/// value at the nearest endpoint.
inline constexpr double kSpectralWindow = 3.0;

/// f evaluated on the sample's spectrum with the constant extension outside
/// [-3, 3]; each clamped eigenvalue is logged and counted.
Eigen::VectorXcd spectral_values(const WignerSample& s, const SpectralFunction& f);
/// Number of eigenvalues clamped by spectral_values since program start.
std::uint64_t clamped_eigenvalue_count();

/// U f(Lambda) U^*.
Matrix matrix_function(const WignerSample& s, const SpectralFunction& f);
/// (W - z)^{-1} = U (Lambda - z)^{-1} U^*. Throws DomainError for Im z == 0.
Matrix resolvent(const WignerSample& s, cplx z);
/// e^{itW} A e^{-itW}.
Matrix heisenberg(const WignerSample& s, const Matrix& a, double t);

/// Observables (and optional vectors) rotated into a sample's eigenbasis once,
/// so that every chain over them costs O(N^2) per factor.
class RotatedChain {
 public:
  RotatedChain(const WignerSample& s, std::span<const Matrix> a);
  RotatedChain(const WignerSample& s, std::span<const Matrix> a, const Vector& x, const Vector& y);
  /// Chain over matrices (and vectors) already in the eigenbasis; the same
  /// rotated matrix may appear several times without being copied.
  explicit RotatedChain(std::vector<std::shared_ptr<const Matrix>> rotated, std::optional<Vector> x = {},
                        std::optional<Vector> y = {});

  std::size_t size() const { return a_.size(); }
  const Matrix& operator[](std::size_t i) const { return *a_[i]; }
  bool has_vectors() const { return x_.has_value(); }
  const Vector& x() const { return *x_; }
  const Vector& y() const { return *y_; }
  /// A_1 o A_2^T for two-matrix chains without vectors, else null.
  const Matrix* pair_product() const { return pair_.get(); }

 private:
  void init_pair_product();

  std::vector<std::shared_ptr<const Matrix>> a_;
  std::optional<Vector> x_, y_;
  std::shared_ptr<const Matrix> pair_;
};

enum class ChainMode { averaged, isotropic };

/// <f_1(W)A_1 ... f_k(W)A_k> (averaged, k matrices) or
/// <x, f_1(W)A_1 ... A_{k-1} f_k(W) y> (isotropic, k-1 matrices).
cplx chain_value(const WignerSample& s, const RotatedChain& a, std::span<const SpectralFunction> f, ChainMode mode);
/// Resolvent chain; delegates to the function overload with f_i = 1/(x - z_i).
cplx chain_value(const WignerSample& s, const RotatedChain& a, const SpectralTuple& t, ChainMode mode);

/// Same chain from precomputed spectral values d_i = f_i(lambda).
cplx chain_value(const RotatedChain& a, std::span<const Eigen::VectorXcd> d, ChainMode mode);

/// Writes "index,eigenvalue" lines.
void write_eigenvalues_csv(const WignerSample& s, std::ostream& out);

}  // namespace freelab
