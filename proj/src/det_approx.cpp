#include "freelab/det_approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "freelab/detail/lattice_tables.hpp"
#include "freelab/errors.hpp"

namespace freelab {

using detail::Mask;

cplx normalized_trace(const Matrix& a) { return a.trace() / static_cast<double>(a.rows()); }

cplx normalized_trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw ValidationError("trace of product: shape mismatch");
  return a.cwiseProduct(b.transpose()).sum() / static_cast<double>(a.rows());
}

cplx inner(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ValidationError("inner product: length mismatch");
  return x.dot(y);  // conjugate-linear in x
}

// ---------------------------------------------------------------------------

namespace {

void check_matrices(std::span<const Matrix> a) {
  for (const auto& m : a) {
    if (m.rows() != m.cols()) throw ValidationError("observable is not square");
    if (m.rows() != a.front().rows()) throw ValidationError("observables have different dimensions");
    if (!m.allFinite()) throw ValidationError("observable has non-finite entries");
  }
}

}  // namespace

ObservableChain::ObservableChain(std::vector<Matrix> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw ValidationError("observable chain is empty");
  check_matrices(matrices_);
}

ObservableChain::ObservableChain(std::vector<Matrix> matrices, Vector x, Vector y)
    : ObservableChain(std::move(matrices)) {
  if (x.size() != dim() || y.size() != dim()) throw ValidationError("chain vectors have the wrong length");
  x_ = std::move(x);
  y_ = std::move(y);
}

// ---------------------------------------------------------------------------

namespace {

// Ordered products and normalized traces of sub-chains, keyed by the mask of
// participating positions.
class ChainCache {
 public:
  explicit ChainCache(std::span<const Matrix> a) : a_(a) {}

  const Matrix& product(Mask m) {
    if (detail::popcount(m) == 1) return a_[static_cast<std::size_t>(detail::lowest_index(m))];
    if (auto it = products_.find(m); it != products_.end()) return it->second;
    const int top = 31 - __builtin_clz(m);
    Matrix p = product(m & ~(Mask{1} << top)) * a_[static_cast<std::size_t>(top)];
    return products_.emplace(m, std::move(p)).first->second;
  }

  cplx trace(Mask m) {
    if (auto it = traces_.find(m); it != traces_.end()) return it->second;
    cplx v;
    if (detail::popcount(m) == 1) {
      v = normalized_trace(a_[static_cast<std::size_t>(detail::lowest_index(m))]);
    } else {
      const int top = 31 - __builtin_clz(m);
      v = normalized_trace_product(product(m & ~(Mask{1} << top)), a_[static_cast<std::size_t>(top)]);
    }
    return traces_[m] = v;
  }

  // <x, product(m) y>, identity for m == 0.
  cplx sandwich(Mask m, const Vector& x, const Vector& y) {
    if (auto it = sandwiches_.find(m); it != sandwiches_.end()) return it->second;
    Vector v = y;
    for (int i = 31; i >= 0; --i)
      if (m & (Mask{1} << i)) v = a_[static_cast<std::size_t>(i)] * v;
    return sandwiches_[m] = x.dot(v);
  }

 private:
  std::span<const Matrix> a_;
  std::map<Mask, Matrix> products_;
  std::map<Mask, cplx> traces_;
  std::map<Mask, cplx> sandwiches_;
};

NonCrossingPartition partition_from_masks(const std::vector<Mask>& masks, const GroundSet& ground) {
  std::vector<Block> blocks;
  for (Mask m : masks) {
    Block b;
    for (Mask r = m; r != 0; r &= r - 1) b.push_back(ground[static_cast<std::size_t>(detail::lowest_index(r))]);
    blocks.push_back(std::move(b));
  }
  return detail::unchecked_partition(ground, std::move(blocks));
}

std::vector<PartitionTerm> make_terms(std::size_t k, const std::vector<cplx>& weights) {
  const GroundSet ground = GroundSet::first_n(static_cast<int>(k));
  const auto& table = detail::ncp_table(k);
  std::vector<PartitionTerm> terms;
  terms.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    terms.push_back({partition_from_masks(table[i].blocks, ground), partition_from_masks(table[i].kreweras_blocks, ground),
                     weights[i], std::nullopt});
  return terms;
}

std::vector<cplx> cumulant_weights(const SetFunction& c) {
  const auto& table = detail::ncp_table(c.k());
  std::vector<cplx> w;
  w.reserve(table.size());
  for (const auto& e : table) {
    cplx p = 1.0;
    for (Mask b : e.blocks) p *= c[b];
    w.push_back(p);
  }
  return w;
}

void check_order(std::size_t k, std::size_t cap, const char* what) {
  if (k == 0) throw ValidationError(std::string(what) + ": chain order must be at least 1");
  if (k > cap) throw SizeLimitError(what, k, cap);
}

// Sum over partitions of weight * pTr_{K(pi)}(A_1..A_{k-1}). Terms sharing a
// leading product are combined before any matrix arithmetic.
PredictionResult build_chain(std::size_t k, const std::vector<cplx>& weights, std::span<const Matrix> a,
                             const Vector* x, const Vector* y, bool build_matrix) {
  if (a.size() + 1 != k)
    throw ValidationError("chain of order " + std::to_string(k) + " needs " + std::to_string(k - 1) + " matrices, got " +
                          std::to_string(a.size()));
  check_matrices(a);
  if ((x == nullptr) != (y == nullptr)) throw ValidationError("isotropic evaluation needs both x and y");
  if (x && !a.empty() && (x->size() != a.front().rows() || y->size() != a.front().rows()))
    throw ValidationError("isotropic vectors have the wrong length");

  const auto& table = detail::ncp_table(k);
  PredictionResult out;
  out.terms = make_terms(k, weights);
  ChainCache cache(a);
  const Mask last = Mask{1} << (k - 1);
  std::map<Mask, cplx> by_lead;

  for (std::size_t i = 0; i < table.size(); ++i) {
    cplx coeff = weights[i];
    Mask lead = 0;
    for (Mask b : table[i].kreweras_blocks) {
      if (b & last) lead = b & ~last;
      else coeff *= cache.trace(b);
    }
    by_lead[lead] += coeff;
    if (x) out.terms[i].value = coeff * (lead == 0 ? x->dot(*y) : cache.sandwich(lead, *x, *y));
  }

  if (build_matrix) {
    if (a.empty()) {
      // Order one: a multiple of the identity, kept as a 1x1 matrix.
      out.matrix = Matrix::Constant(1, 1, by_lead[0]);
    } else {
      const Eigen::Index n = a.front().rows();
      out.matrix = Matrix::Zero(n, n);
      for (const auto& [lead, coeff] : by_lead) {
        if (lead == 0) out.matrix.diagonal().array() += coeff;
        else out.matrix += coeff * cache.product(lead);
      }
    }
  }
  return out;
}

ScalarPrediction build_averaged(std::size_t k, const std::vector<cplx>& weights, std::span<const Matrix> a) {
  if (a.size() != k)
    throw ValidationError("averaged chain of order " + std::to_string(k) + " needs " + std::to_string(k) +
                          " matrices, got " + std::to_string(a.size()));
  check_matrices(a);
  const auto& table = detail::ncp_table(k);
  ScalarPrediction out;
  out.terms = make_terms(k, weights);
  ChainCache cache(a);
  out.value = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    cplx v = weights[i];
    for (Mask b : table[i].kreweras_blocks) v *= cache.trace(b);
    out.terms[i].value = v;
    out.value += v;
  }
  return out;
}

ScalarPrediction collect_isotropic(PredictionResult&& r) {
  ScalarPrediction out;
  out.value = 0.0;
  for (const auto& t : r.terms) out.value += *t.value;
  out.terms = std::move(r.terms);
  return out;
}

}  // namespace

Matrix partial_trace(const NonCrossingPartition& pi, std::span<const Matrix> a) {
  const std::size_t k = pi.ground().size();
  if (!(pi.ground() == GroundSet::first_n(static_cast<int>(k))))
    throw ValidationError("partial_trace needs a partition of [k]");
  if (a.size() + 1 != k) throw ValidationError("partial_trace needs k-1 matrices");
  if (a.empty()) throw ValidationError("partial_trace needs at least one matrix to fix the dimension");
  check_matrices(a);
  ChainCache cache(a);
  cplx coeff = 1.0;
  Mask lead = 0;
  for (const auto& b : pi.blocks()) {
    Mask m = 0;
    for (int e : b)
      if (static_cast<std::size_t>(e) != k) m |= Mask{1} << (e - 1);
    if (b.back() == static_cast<int>(k)) lead = m;
    else coeff *= cache.trace(m);
  }
  if (lead == 0) return coeff * Matrix::Identity(a.front().rows(), a.front().rows());
  return coeff * cache.product(lead);
}

cplx pi_trace(const NonCrossingPartition& pi, std::span<const Matrix> a) {
  const std::size_t k = pi.ground().size();
  if (!(pi.ground() == GroundSet::first_n(static_cast<int>(k)))) throw ValidationError("pi_trace needs a partition of [k]");
  if (a.size() != k) throw ValidationError("pi_trace needs k matrices");
  check_matrices(a);
  ChainCache cache(a);
  cplx v = 1.0;
  for (const auto& b : pi.blocks()) {
    Mask m = 0;
    for (int e : b) m |= Mask{1} << (e - 1);
    v *= cache.trace(m);
  }
  return v;
}

nlohmann::json to_json(const PartitionTerm& term) {
  nlohmann::json j{{"pi", term.pi.to_string()},
                   {"kreweras", term.kreweras.to_string()},
                   {"weight", {term.weight.real(), term.weight.imag()}}};
  if (term.value) j["value"] = {term.value->real(), term.value->imag()};
  return j;
}

nlohmann::json ScalarPrediction::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& t : terms) arr.push_back(freelab::to_json(t));
  return {{"value", {value.real(), value.imag()}}, {"terms", arr}};
}

cplx PredictionResult::averaged(const Matrix& a_k) const {
  if (matrix.rows() == 1 && a_k.rows() != 1) return matrix(0, 0) * normalized_trace(a_k);
  return normalized_trace_product(matrix, a_k);
}

cplx PredictionResult::isotropic(const Vector& x, const Vector& y) const {
  if (matrix.rows() == 1 && x.size() != 1) return matrix(0, 0) * inner(x, y);
  if (x.size() != matrix.rows() || y.size() != matrix.rows()) throw ValidationError("isotropic vectors have the wrong length");
  return x.dot(matrix * y);
}

// ---------------------------------------------------------------------------

PredictionResult chain_from_cumulants(const SetFunction& c, std::span<const Matrix> a, const Vector* x,
                                      const Vector* y) {
  check_order(c.k(), kPartitionRouteCap, "chain_from_cumulants");
  return build_chain(c.k(), cumulant_weights(c), a, x, y, true);
}

ScalarPrediction averaged_from_cumulants(const SetFunction& c, std::span<const Matrix> a) {
  check_order(c.k(), kPartitionRouteCap, "averaged_from_cumulants");
  return build_averaged(c.k(), cumulant_weights(c), a);
}

ScalarPrediction isotropic_from_cumulants(const SetFunction& c, std::span<const Matrix> a, const Vector& x,
                                          const Vector& y) {
  check_order(c.k(), kPartitionRouteCap, "isotropic_from_cumulants");
  if (a.empty() && x.size() != y.size()) throw ValidationError("isotropic vectors have different lengths");
  return collect_isotropic(build_chain(c.k(), cumulant_weights(c), a, &x, &y, false));
}

SetFunction m_moment_table(const SpectralTuple& t) {
  if (t.size() > kSetFunctionCap) throw SizeLimitError("m_moment_table", t.size(), kSetFunctionCap);
  SetFunction out(t.size());
  for (Mask s = 1; s <= out.full_mask(); ++s) out[s] = divided_difference_recursive(t.subtuple(s));
  return out;
}

SetFunction m_cumulant_table(const SpectralTuple& t) { return free_cumulant_table(m_moment_table(t)); }

PredictionResult m_matrix_partition(const SpectralTuple& t, std::span<const Matrix> a) {
  check_order(t.size(), kPartitionRouteCap, "m_matrix_partition");
  return chain_from_cumulants(m_cumulant_table(t), a);
}

ScalarPrediction m_averaged(const SpectralTuple& t, std::span<const Matrix> a) {
  check_order(t.size(), kPartitionRouteCap, "m_averaged");
  return averaged_from_cumulants(m_cumulant_table(t), a);
}

PredictionResult m_matrix_graph(std::span<const cplx> m, const Eigen::MatrixXcd& q, std::span<const Matrix> a) {
  const std::size_t k = m.size();
  check_order(k, kGraphRouteCap, "m_matrix_graph");
  if (q.rows() != static_cast<Eigen::Index>(k) || q.cols() != q.rows())
    throw ValidationError("pair-factor matrix does not match the Stieltjes values");
  const auto& graphs = detail::ncg_table(k);
  std::vector<cplx> weights(detail::ncp_table(k).size(), cplx{});
  for (const auto& g : graphs) {
    cplx qe = 1.0;
    for (auto [u, v] : g.edges) qe *= q(u, v);
    weights[g.partition_index] += qe;
  }
  cplx prod = 1.0;
  for (cplx mi : m) prod *= mi;
  for (auto& w : weights) w *= prod;
  return build_chain(k, weights, a, nullptr, nullptr, true);
}

PredictionResult m_matrix_graph(const SpectralTuple& t, std::span<const Matrix> a) {
  return m_matrix_graph(t.m(), t.q(), a);
}

PredictionResult m_matrix_recursive(const SpectralTuple& t, std::span<const Matrix> a, RecursionLine line) {
  const std::size_t k = t.size();
  check_order(k, kPartitionRouteCap, "m_matrix_recursive");
  if (a.size() + 1 != k) throw ValidationError("m_matrix_recursive needs k-1 matrices");
  check_matrices(a);
  PredictionResult out;
  if (k == 1) {
    out.matrix = Matrix::Constant(1, 1, t.m(0));
    return out;
  }
  const Eigen::Index n = a.front().rows();
  const Matrix id = Matrix::Identity(n, n);

  // mats[i][j] = M_[i,j] (0-based, inclusive); traces[i][j] = <M_[i,j]>.
  std::vector<std::vector<Matrix>> mats(k, std::vector<Matrix>(k));
  std::vector<std::vector<cplx>> traces(k, std::vector<cplx>(k));
  for (std::size_t i = 0; i < k; ++i) {
    mats[i][i] = t.m(i) * id;
    traces[i][i] = t.m(i);
  }
  for (std::size_t len = 1; len < k; ++len) {
    for (std::size_t i = 0; i + len < k; ++i) {
      const std::size_t j = i + len;
      const cplx qij = t.q(i, j);
      Matrix edge = (line == RecursionLine::expand_first) ? Matrix(a[i] * mats[i + 1][j]) : Matrix(mats[i][j - 1] * a[j - 1]);
      const cplx edge_trace = normalized_trace(edge);
      Matrix acc = edge;
      acc.diagonal().array() += qij * edge_trace;
      // Expanding at the first index keeps M_[l,j] as a matrix; expanding at
      // the last index keeps M_[i,l] instead.
      for (std::size_t l = i + 1; l < j; ++l) {
        const bool keep_right = line == RecursionLine::expand_first;
        Matrix inner_part = keep_right ? mats[l][j] : mats[i][l];
        inner_part.diagonal().array() += qij * (keep_right ? traces[l][j] : traces[i][l]);
        acc += (keep_right ? traces[i][l] : traces[l][j]) * inner_part;
      }
      const cplx lead = (line == RecursionLine::expand_first) ? t.m(i) : t.m(j);
      mats[i][j] = lead * acc;
      traces[i][j] = normalized_trace(mats[i][j]);
    }
  }
  out.matrix = std::move(mats[0][k - 1]);
  return out;
}

TraceRecursionReport check_trace_recursion(const SpectralTuple& t, std::span<const Matrix> a) {
  const std::size_t k = t.size();
  if (k < 2) throw ValidationError("trace recursion needs k >= 2");
  if (a.size() + 1 != k) throw ValidationError("trace recursion needs k-1 matrices");
  const cplx gap = t.z(0) - t.z(k - 1);
  if (std::abs(gap) < 1e-6) throw DomainError("trace recursion needs |z_1 - z_k| >= 1e-6");

  const Mask all = static_cast<Mask>((std::size_t{1} << k) - 1);
  const SpectralTuple head = t.subtuple(all & ~(Mask{1} << (k - 1)));  // z_1..z_{k-1}
  const SpectralTuple tail = t.subtuple(all & ~Mask{1});               // z_2..z_k
  const PredictionResult m_head = m_matrix_partition(head, a.first(k - 2));
  const PredictionResult m_tail = m_matrix_partition(tail, a.subspan(1));
  const cplx left = m_head.averaged(a[k - 2]);  // <M_[1,k) A_{k-1}>
  const cplx right = m_tail.averaged(a[0]);     // <A_1 M_(1,k]> by cyclicity

  TraceRecursionReport r;
  r.direct = normalized_trace(m_matrix_partition(t, a).matrix);
  r.recursive = (left - right) / gap;
  r.scale = std::max(std::abs(r.direct), (std::abs(left) + std::abs(right)) / std::abs(gap));
  r.residual = r.scale > 0 ? std::abs(r.direct - r.recursive) / r.scale : 0.0;
  return r;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

MBoundReport m_bound_check(const SpectralTuple& t, std::span<const Matrix> a, std::size_t traceless_count) {
  const std::size_t k = t.size();
  if (a.size() != k) throw ValidationError("m_bound_check needs k matrices");
  if (traceless_count > k) throw ValidationError("more traceless matrices than the chain holds");
  const PredictionResult m = m_matrix_partition(t, a.first(k - 1));
  double norms_lead = 1.0;
  for (std::size_t j = 0; j + 1 < k; ++j) norms_lead *= operator_norm(a[j]);
  const double norm_last = operator_norm(a[k - 1]);

  MBoundReport r;
  r.eta_star = t.eta_star();
  r.rho = t.rho();
  r.averaged_value = std::abs(m.averaged(a[k - 1]));
  r.norm_value = m.matrix.rows() == 1 ? std::abs(m.matrix(0, 0)) : operator_norm(m.matrix);
  const double kk = static_cast<double>(k);
  const double half = std::ceil(static_cast<double>(traceless_count) / 2.0);
  r.averaged_ratio = r.averaged_value * std::pow(r.eta_star, kk - 1 - half) / (r.rho * norms_lead * norm_last);
  r.norm_ratio = r.norm_value * std::pow(r.eta_star, kk - 1) / (r.rho * norms_lead);
  return r;
}

// ---------------------------------------------------------------------------

SetFunction sc_moment_table(std::span<const ScalarFunction> f, const QuadratureSpec& spec) {
  if (f.empty()) throw ValidationError("sc_moment_table needs at least one function");
  SetFunction out(f.size());
  for (Mask s = 1; s <= out.full_mask(); ++s) {
    out[s] = sc_average(
        [&f, s](double x) {
          cplx p = 1.0;
          for (Mask r = s; r != 0; r &= r - 1) p *= f[static_cast<std::size_t>(detail::lowest_index(r))](x);
          return p;
        },
        spec);
  }
  return out;
}

SetFunction phi_moment_table(std::span<const double> s) {
  if (s.empty()) throw ValidationError("phi_moment_table needs at least one time");
  SetFunction out(s.size());
  for (Mask m = 1; m <= out.full_mask(); ++m) {
    double total = 0.0;
    for (Mask r = m; r != 0; r &= r - 1) total += s[static_cast<std::size_t>(detail::lowest_index(r))];
    out[m] = phi(total);
  }
  return out;
}

ScalarPrediction f_prediction(std::span<const ScalarFunction> f, std::span<const Matrix> a, const QuadratureSpec& spec) {
  check_order(f.size(), kPartitionRouteCap, "f_prediction");
  return averaged_from_cumulants(free_cumulant_table(sc_moment_table(f, spec)), a);
}

ScalarPrediction f_prediction_isotropic(std::span<const ScalarFunction> f, std::span<const Matrix> a, const Vector& x,
                                        const Vector& y, const QuadratureSpec& spec) {
  check_order(f.size(), kPartitionRouteCap, "f_prediction_isotropic");
  return isotropic_from_cumulants(free_cumulant_table(sc_moment_table(f, spec)), a, x, y);
}

ScalarPrediction exp_prediction(std::span<const double> s, std::span<const Matrix> a) {
  check_order(s.size(), kPartitionRouteCap, "exp_prediction");
  return averaged_from_cumulants(free_cumulant_table(phi_moment_table(s)), a);
}

ScalarPrediction exp_prediction_isotropic(std::span<const double> s, std::span<const Matrix> a, const Vector& x,
                                          const Vector& y) {
  check_order(s.size(), kPartitionRouteCap, "exp_prediction_isotropic");
  return isotropic_from_cumulants(free_cumulant_table(phi_moment_table(s)), a, x, y);
}

// ---------------------------------------------------------------------------

Matrix traceless_part(const Matrix& a) {
  Matrix out = a;
  out.diagonal().array() -= normalized_trace(a);
  return out;
}

namespace {

double decay_factor(double t) {
  if (!(t > 0.0)) throw DomainError("large-time form needs a positive time");
  const double th = theta(t);
  return th * th / (t * t * t);
}

}  // namespace

cplx two_observable_asymptotic(double t, const Matrix& a, const Matrix& b) {
  return normalized_trace(a) * normalized_trace(b) +
         decay_factor(t) * normalized_trace_product(traceless_part(a), traceless_part(b));
}

cplx two_observable_asymptotic_isotropic(double t, const Matrix& a, const Vector& x, const Vector& y) {
  return inner(x, y) * normalized_trace(a) + decay_factor(t) * inner(x, traceless_part(a) * y);
}

nlohmann::json ThreeObservableTerms::to_json() const {
  auto c = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  return {{"product", c(product)}, {"s_term", c(s_term)},           {"t_term", c(t_term)},
          {"gap_term", c(gap_term)}, {"triple_term", c(triple_term)}, {"value", c(value)}};
}

ThreeObservableTerms three_observable_asymptotic(double t, double s, const Matrix& a, const Matrix& b, const Matrix& c) {
  if (!(s > 0.0 && t > s)) throw DomainError("five-term form needs 0 < s < t");
  const cplx ta = normalized_trace(a), tb = normalized_trace(b), tc = normalized_trace(c);
  const Matrix ra = traceless_part(a), rb = traceless_part(b), rc = traceless_part(c);
  const double gap = t - s;
  ThreeObservableTerms r;
  r.product = ta * tb * tc;
  r.s_term = decay_factor(s) * ta * normalized_trace_product(rb, rc);
  r.t_term = decay_factor(t) * tb * normalized_trace_product(ra, rc);
  r.gap_term = decay_factor(gap) * tc * normalized_trace_product(ra, rb);
  r.triple_term = theta(s) * theta(t) * theta(gap) / std::pow(s * t * gap, 1.5) * normalized_trace_product(ra * rb, rc);
  r.value = r.product + r.s_term + r.t_term + r.gap_term + r.triple_term;
  return r;
}

}  // namespace freelab
