#include "freelab/wigner.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <iostream>
#include <random>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "freelab/errors.hpp"

namespace freelab {

std::string to_string(Symmetry s) { return s == Symmetry::real_symmetric ? "real-symmetric" : "complex-hermitian"; }

std::string to_string(EntryLaw l) {
  switch (l) {
    case EntryLaw::gaussian: return "gaussian";
    case EntryLaw::rademacher: return "rademacher";
    case EntryLaw::uniform: return "uniform";
  }
  return "gaussian";
}

Symmetry parse_symmetry(const std::string& text) {
  if (text == "real-symmetric" || text == "goe" || text == "real") return Symmetry::real_symmetric;
  if (text == "complex-hermitian" || text == "gue" || text == "complex") return Symmetry::complex_hermitian;
  throw ValidationError("unknown symmetry class '" + text + "' (expected real-symmetric or complex-hermitian)");
}

EntryLaw parse_entry_law(const std::string& text) {
  if (text == "gaussian") return EntryLaw::gaussian;
  if (text == "rademacher") return EntryLaw::rademacher;
  if (text == "uniform") return EntryLaw::uniform;
  throw ValidationError("unknown entry law '" + text + "' (expected gaussian, rademacher or uniform)");
}

double EnsembleSpec::effective_diag_variance() const {
  if (diag_variance) return *diag_variance;
  return symmetry == Symmetry::real_symmetric ? 2.0 : 1.0;
}

void EnsembleSpec::validate() const {
  if (n < 2) throw ValidationError("ensemble dimension must be at least 2");
  if (!(effective_diag_variance() >= 0.0)) throw ValidationError("diagonal variance must be non-negative");
  if (symmetry == Symmetry::real_symmetric && offdiag_pseudo_variance != 0.0)
    throw ValidationError("a pseudo-variance only applies to complex Hermitian ensembles");
  if (!(std::abs(offdiag_pseudo_variance) <= 1.0)) throw ValidationError("pseudo-variance must lie in [-1, 1]");
}

EnsembleSpec EnsembleSpec::gue(std::size_t n) {
  EnsembleSpec s;
  s.n = n;
  return s;
}

EnsembleSpec EnsembleSpec::goe(std::size_t n) {
  EnsembleSpec s;
  s.symmetry = Symmetry::real_symmetric;
  s.n = n;
  return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t SeedPlan::substream(std::uint64_t grid_index, std::uint64_t sample_index) const {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (grid_index * 0xd1b54a32d192ed03ULL));
  return splitmix64(h ^ (sample_index * 0xabc98388fb8fac03ULL));
}

// ---------------------------------------------------------------------------

WignerSample::WignerSample(Matrix w, bool real_symmetric, std::uint64_t seed)
    : w_(std::move(w)), seed_(seed), real_(real_symmetric) {
  const Eigen::Index n = w_.rows();
  if (n < 1 || w_.cols() != n) throw ValidationError("Wigner matrix must be square");
  if (!w_.allFinite()) throw ValidationError("Wigner matrix has non-finite entries");
  const double asym = (w_ - w_.adjoint()).norm();
  if (asym > 1e-12 * std::max(1.0, w_.norm())) throw ValidationError("Wigner matrix is not self-adjoint");
  if (real_ && w_.imag().norm() != 0.0) throw ValidationError("real symmetric sample has imaginary entries");

  lambda_.resize(n);
  lapack_int found = 0;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int info = 0;
  if (real_) {
    Eigen::MatrixXd a = w_.real();
    Eigen::MatrixXd z(n, n);
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', static_cast<lapack_int>(n), a.data(), static_cast<lapack_int>(n),
                          0.0, 0.0, 0, 0, 0.0, &found, lambda_.data(), z.data(), static_cast<lapack_int>(n), support.data());
    u_ = z.cast<cplx>();
  } else {
    Matrix a = w_;
    u_.resize(n, n);
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', static_cast<lapack_int>(n), a.data(), static_cast<lapack_int>(n),
                          0.0, 0.0, 0, 0, 0.0, &found, lambda_.data(), u_.data(), static_cast<lapack_int>(n), support.data());
  }
  if (info != 0 || found != static_cast<lapack_int>(n))
    throw NumericError("eigensolver failed (info=" + std::to_string(info) + ", found " + std::to_string(found) + " of " +
                       std::to_string(n) + " eigenpairs, seed " + std::to_string(seed_) + ")");
}

Matrix WignerSample::rotate(const Matrix& a) const {
  if (a.rows() != n() || a.cols() != n()) throw ValidationError("observable dimension does not match the sample");
  // Diagonal observables need a single product: U^* (D U).
  if (a.isDiagonal(0.0)) return u_.adjoint() * (a.diagonal().asDiagonal() * u_);
  return u_.adjoint() * (a * u_);
}

Vector WignerSample::rotate(const Vector& x) const {
  if (x.size() != n()) throw ValidationError("vector dimension does not match the sample");
  return u_.adjoint() * x;
}

double WignerSample::reconstruction_error() const {
  const Matrix r = u_ * lambda_.cast<cplx>().asDiagonal() * u_.adjoint();
  return (r - w_).norm() / std::max(w_.norm(), 1e-300);
}

double WignerSample::unitarity_error() const {
  return (u_.adjoint() * u_ - Matrix::Identity(n(), n())).norm();
}

WignerSample sample_wigner(const EnsembleSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-std::sqrt(3.0), std::sqrt(3.0));
  auto draw = [&](EntryLaw law) -> double {
    switch (law) {
      case EntryLaw::gaussian: return gauss(gen);
      case EntryLaw::rademacher: return (gen() & 1U) ? 1.0 : -1.0;
      case EntryLaw::uniform: return uniform(gen);
    }
    return 0.0;
  };

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag_sd = std::sqrt(spec.effective_diag_variance());
  const bool real = spec.symmetry == Symmetry::real_symmetric;
  // chi = alpha X + i beta Y has E|chi|^2 = 1 and E chi^2 = alpha^2 - beta^2.
  const double alpha = real ? 1.0 : std::sqrt((1.0 + spec.offdiag_pseudo_variance) / 2.0);
  const double beta = real ? 0.0 : std::sqrt((1.0 - spec.offdiag_pseudo_variance) / 2.0);

  Matrix w(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    w(a, a) = diag_sd * draw(spec.diag_law) * scale;
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double re = alpha * draw(spec.offdiag_law);
      const double im = real ? 0.0 : beta * draw(spec.offdiag_law);
      w(a, b) = cplx(re, im) * scale;
      w(b, a) = std::conj(w(a, b));
    }
  }
  return WignerSample(std::move(w), real, seed);
}

// ---------------------------------------------------------------------------

namespace {
std::atomic<std::uint64_t> g_clamped{0};
}

std::uint64_t clamped_eigenvalue_count() { return g_clamped.load(); }

Eigen::VectorXcd spectral_values(const WignerSample& s, const SpectralFunction& f) {
  const auto& lambda = s.eigenvalues();
  Eigen::VectorXcd d(lambda.size());
  std::uint64_t clamped = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    double x = lambda(i);
    if (std::abs(x) > kSpectralWindow) {
      x = std::copysign(kSpectralWindow, x);
      ++clamped;
    }
    d(i) = f(x);
  }
  if (clamped) {
    g_clamped += clamped;
    std::clog << "freelab: warning: " << clamped << " eigenvalue(s) outside [-3, 3] evaluated by constant extension (seed "
              << s.seed() << ")\n";
  }
  return d;
}

Matrix matrix_function(const WignerSample& s, const SpectralFunction& f) {
  const Eigen::VectorXcd d = spectral_values(s, f);
  return (s.eigenvectors() * d.asDiagonal()) * s.eigenvectors().adjoint();
}

Matrix resolvent(const WignerSample& s, cplx z) {
  if (z.imag() == 0.0) throw DomainError("resolvent needs Im z != 0");
  return matrix_function(s, [z](double x) { return 1.0 / (x - z); });
}

Matrix heisenberg(const WignerSample& s, const Matrix& a, double t) {
  const Eigen::VectorXcd d = spectral_values(s, [t](double x) { return std::exp(cplx(0.0, t * x)); });
  const Matrix rotated = s.rotate(a);
  const Matrix evolved = d.asDiagonal() * rotated * d.conjugate().asDiagonal();
  return s.eigenvectors() * evolved * s.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------

RotatedChain::RotatedChain(const WignerSample& s, std::span<const Matrix> a) {
  a_.reserve(a.size());
  for (const auto& m : a) a_.push_back(std::make_shared<const Matrix>(s.rotate(m)));
  init_pair_product();
}

RotatedChain::RotatedChain(std::vector<std::shared_ptr<const Matrix>> rotated, std::optional<Vector> x,
                           std::optional<Vector> y)
    : a_(std::move(rotated)), x_(std::move(x)), y_(std::move(y)) {
  if (x_.has_value() != y_.has_value()) throw ValidationError("isotropic chains need both vectors");
  for (const auto& m : a_) {
    if (!m) throw ValidationError("rotated chain holds a null matrix");
    if (m->rows() != a_.front()->rows() || m->cols() != m->rows())
      throw ValidationError("rotated chain matrices must be square of one dimension");
  }
  init_pair_product();
}

// <D_1 A_1 D_2 A_2> = sum_ab d1_a (A_1)_ab d2_b (A_2)_ba = d1^T (A_1 o A_2^T) d2,
// so the Hadamard product is formed once and each evaluation is one gemv.
void RotatedChain::init_pair_product() {
  if (a_.size() == 2 && !x_) pair_ = std::make_shared<const Matrix>(a_[0]->cwiseProduct(a_[1]->transpose()));
}

RotatedChain::RotatedChain(const WignerSample& s, std::span<const Matrix> a, const Vector& x, const Vector& y)
    : RotatedChain(s, a) {
  x_ = s.rotate(x);
  y_ = s.rotate(y);
}

cplx chain_value(const RotatedChain& a, std::span<const Eigen::VectorXcd> d, ChainMode mode) {
  const std::size_t k = d.size();
  if (k == 0) throw ValidationError("chain needs at least one function");
  if (mode == ChainMode::averaged) {
    if (a.size() != k) throw ValidationError("averaged chain of order k needs k observables");
    const auto n = static_cast<double>(d[0].size());
    if (k == 1) return (d[0].array() * a[0].diagonal().array()).sum() / n;
    if (k == 2 && a.pair_product()) return (d[0].array() * (*a.pair_product() * d[1]).array()).sum() / n;
    Matrix x = d[0].asDiagonal() * a[0];
    for (std::size_t i = 1; i + 1 < k; ++i) x = (x * d[i].asDiagonal()) * a[i];
    // tr(X D_k A_k) = sum_ab X_ab d_b (A_k)_ba
    return ((x * d[k - 1].asDiagonal()).cwiseProduct(a[k - 1].transpose())).sum() / n;
  }
  if (!a.has_vectors()) throw ValidationError("isotropic chain needs vectors x and y");
  if (a.size() + 1 != k) throw ValidationError("isotropic chain of order k needs k-1 observables");
  Vector v = d[k - 1].cwiseProduct(a.y());
  for (std::size_t i = k - 1; i-- > 0;) v = d[i].cwiseProduct(a[i] * v);
  return a.x().dot(v);
}

cplx chain_value(const WignerSample& s, const RotatedChain& a, std::span<const SpectralFunction> f, ChainMode mode) {
  std::vector<Eigen::VectorXcd> d;
  d.reserve(f.size());
  for (const auto& fi : f) d.push_back(spectral_values(s, fi));
  return chain_value(a, d, mode);
}

cplx chain_value(const WignerSample& s, const RotatedChain& a, const SpectralTuple& t, ChainMode mode) {
  std::vector<SpectralFunction> f;
  for (cplx z : t.z()) f.emplace_back([z](double x) { return 1.0 / (x - z); });
  return chain_value(s, a, f, mode);
}

void write_eigenvalues_csv(const WignerSample& s, std::ostream& out) {
  out << "index,eigenvalue\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < s.eigenvalues().size(); ++i) out << i << ',' << s.eigenvalues()(i) << '\n';
}

}  // namespace freelab
