#include "freelab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "freelab/cumulants.hpp"
#include "freelab/det_approx.hpp"
#include "freelab/errors.hpp"
#include "freelab/ncp.hpp"
#include "freelab/reference.hpp"
#include "freelab/semicircle.hpp"

namespace freelab {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed(); });
}

double VerifyReport::worst_residual() const {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.worst_residual);
  return w;
}

namespace {

using Rng = std::mt19937_64;

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

double rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

class Battery {
 public:
  explicit Battery(VerifyReport& report) : report_(report) {}

  // Runs `body`, which feeds residuals through the accumulator it receives.
  void check(const std::string& name, double tolerance, const std::function<void(IdentityCheck&)>& body) {
    IdentityCheck c;
    c.name = name;
    c.tolerance = tolerance;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.worst_residual = std::numeric_limits<double>::infinity();
      std::fprintf(stderr, "freelab: verify: %s raised: %s\n", name.c_str(), e.what());
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report_.checks.push_back(c);
  }

 private:
  VerifyReport& report_;
};

void record(IdentityCheck& c, double residual) {
  ++c.cases;
  // NaN must register as a failure.
  if (!(residual <= c.worst_residual)) c.worst_residual = std::isnan(residual) ? INFINITY : residual;
}

cplx random_z(Rng& rng) {
  std::uniform_real_distribution<double> re(-3.0, 3.0), eta(0.05, 2.0);
  std::bernoulli_distribution upper(0.5);
  return {re(rng), upper(rng) ? eta(rng) : -eta(rng)};
}

SpectralTuple random_tuple(Rng& rng, std::size_t k) {
  std::vector<cplx> z;
  for (std::size_t i = 0; i < k; ++i) z.push_back(random_z(rng));
  return SpectralTuple(std::move(z));
}

Matrix random_matrix(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  return a;
}

SetFunction random_table(Rng& rng, std::size_t k) {
  std::normal_distribution<double> g;
  SetFunction f(k);
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) f[s] = cplx(g(rng), g(rng));
  return f;
}

// Entries of a set-function table can cancel to near zero, so table residuals
// are measured against the largest entry.
double table_scale(const SetFunction& f) {
  double m = 1e-300;
  for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) m = std::max(m, std::abs(f[s]));
  return m;
}

Eigen::MatrixXcd perturbed(const Eigen::MatrixXcd& q, double eps) { return q * (1.0 + eps); }

}  // namespace

VerifyReport run_verify_suite(const VerifyOptions& opt) {
  if (opt.k_max == 0 || opt.k_max > 8) throw ValidationError("verify k-max must lie in [1, 8]");
  const std::size_t kk = opt.k_max;
  const std::size_t k_analytic = std::min<std::size_t>(kk, 6);
  // Combinatorial sizes follow the full defaults unless k_max asks for less.
  auto size_cap = [kk](std::size_t full) { return kk >= 6 ? full : std::min(full, kk); };
  const double eps = opt.perturb_q;

  VerifyReport report;
  Battery b(report);

  // ---- lattice -----------------------------------------------------------
  b.check("ncp.catalan_counts", 0.0, [&](IdentityCheck& c) {
    for (unsigned n = 1; n <= size_cap(10); ++n) {
      const auto count = enumerate_ncp(GroundSet::first_n(static_cast<int>(n))).size();
      const bool ok = catalan(n) == count && reference::catalan_recurrence(n) == count;
      record(c, ok ? 0.0 : 1.0);
    }
  });
  b.check("ncp.kreweras_block_count", 0.0, [&](IdentityCheck& c) {
    for (int n = 1; n <= static_cast<int>(size_cap(8)); ++n)
      for (const auto& pi : enumerate_ncp(GroundSet::first_n(n)))
        record(c, pi.num_blocks() + kreweras(pi).num_blocks() == static_cast<std::size_t>(n) + 1 ? 0.0 : 1.0);
  });
  b.check("ncp.kreweras_square_is_rotation", 0.0, [&](IdentityCheck& c) {
    for (int n = 1; n <= static_cast<int>(size_cap(8)); ++n)
      for (const auto& pi : enumerate_ncp(GroundSet::first_n(n)))
        record(c, kreweras(kreweras(pi)) == rotate(pi, -1) ? 0.0 : 1.0);
  });
  b.check("ncp.kreweras_reverses_order", 0.0, [&](IdentityCheck& c) {
    for (int n = 1; n <= static_cast<int>(size_cap(6)); ++n) {
      const auto all = enumerate_ncp(GroundSet::first_n(n));
      std::vector<NonCrossingPartition> k;
      for (const auto& pi : all) k.push_back(kreweras(pi));
      for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = 0; j < all.size(); ++j)
          record(c, refinement_leq(all[i], all[j]) == refinement_leq(k[j], k[i]) ? 0.0 : 1.0);
    }
  });
  b.check("ncp.mobius_closed_form", 0.0, [&](IdentityCheck& c) {
    for (int n = 1; n <= static_cast<int>(size_cap(7)); ++n)
      for (const auto& pi : enumerate_ncp(GroundSet::first_n(n)))
        record(c, static_cast<double>(std::llabs(mobius_to_top(pi) - reference::mobius_recursive(pi))));
    record(c, std::abs(mobius_to_top(NonCrossingPartition::parse("1 2|3|4")) - 2.0));
    record(c, std::abs(mobius_to_top(NonCrossingPartition::parse("1 3|2|4")) - 1.0));
  });
  b.check("ncg.generating_polynomials", 0.0, [&](IdentityCheck& c) {
    for (unsigned n = 1; n <= size_cap(8); ++n) {
      const auto poly = ncg_generating_polynomials(n);
      record(c, poly.a == reference::graph_polynomial(n) ? 0.0 : 1.0);
      if (n >= 3) record(c, poly.b == reference::dissection_polynomial(n) ? 0.0 : 1.0);
      const auto total = enumerate_ncg(GroundSet::first_n(static_cast<int>(n))).size();
      std::int64_t at_one = 0;
      for (auto coeff : poly.a) at_one += coeff;
      record(c, static_cast<double>(std::llabs(at_one - static_cast<std::int64_t>(total))));
    }
  });
  b.check("ncg.connected_component_decomposition", 0.0, [&](IdentityCheck& c) {
    // |NCG(S)| = sum over pi of prod_B |connected NCG(B)|.
    std::vector<std::int64_t> connected(9, 0);
    for (int n = 1; n <= static_cast<int>(size_cap(7)); ++n) {
      connected[static_cast<std::size_t>(n)] =
          static_cast<std::int64_t>(enumerate_connected_ncg(GroundSet::first_n(n)).size());
      std::int64_t sum = 0;
      for (const auto& pi : enumerate_ncp(GroundSet::first_n(n))) {
        std::int64_t prod = 1;
        for (const auto& block : pi.blocks()) prod *= connected[block.size()];
        sum += prod;
      }
      record(c, static_cast<double>(
                    std::llabs(sum - static_cast<std::int64_t>(enumerate_ncg(GroundSet::first_n(n)).size()))));
    }
  });

  // ---- cumulants ---------------------------------------------------------
  b.check("cumulants.round_trip", 1e-12, [&](IdentityCheck& c) {
    Rng rng(opt.seed);
    const std::size_t top = size_cap(7);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t k = 1 + static_cast<std::size_t>(rep) % top;
      const SetFunction f = random_table(rng, k);
      const SetFunction back = moments_from_cumulants(free_cumulant_table(f));
      for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) record(c, std::abs(back[s] - f[s]) / table_scale(f));
    }
  });
  b.check("cumulants.mobius_vs_recursive", 1e-12, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 1);
    for (std::size_t k = 1; k <= size_cap(6); ++k) {
      const SetFunction f = random_table(rng, k);
      const SetFunction a = free_cumulant_table(f), r = reference::cumulants_recursive(f);
      for (SetFunction::Mask s = 1; s <= f.full_mask(); ++s) record(c, std::abs(a[s] - r[s]) / table_scale(r));
    }
  });

  // ---- divided differences -----------------------------------------------
  b.check("dd.recursive_vs_quadrature", 1e-8, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 2);
    for (int rep = 0; rep < 200; ++rep) {
      const auto t = random_tuple(rng, 1 + static_cast<std::size_t>(rep) % k_analytic);
      record(c, rel_err(divided_difference_recursive(t), divided_difference_quadrature(t)));
    }
  });
  b.check("dd.recursive_vs_graph", 1e-8, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 2);
    for (int rep = 0; rep < 200; ++rep) {
      const auto t = random_tuple(rng, 1 + static_cast<std::size_t>(rep) % k_analytic);
      record(c, rel_err(divided_difference_recursive(t), divided_difference_graph(t.m(), perturbed(t.q(), eps))));
    }
  });
  b.check("dd.permutation_symmetry", 1e-10, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 3);
    for (int rep = 0; rep < 50; ++rep) {
      const auto t = random_tuple(rng, 1 + static_cast<std::size_t>(rep) % k_analytic);
      std::vector<cplx> z(t.z().begin(), t.z().end());
      std::shuffle(z.begin(), z.end(), rng);
      const SpectralTuple p(z);
      record(c, rel_err(divided_difference_recursive(t), divided_difference_recursive(p)));
      record(c, rel_err(divided_difference_quadrature(t), divided_difference_quadrature(p)));
      record(c, rel_err(divided_difference_graph(t), divided_difference_graph(p)));
    }
  });
  b.check("dd.eta_bound", 0.0, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 4);
    // The bound needs k >= 2: for k = 1 it would read |m| <= |Im m|, false
    // outside the spectrum.
    if (k_analytic < 2) return;
    for (int rep = 0; rep < 200; ++rep) {
      const auto t = random_tuple(rng, 2 + static_cast<std::size_t>(rep) % (k_analytic - 1));
      // Residual is the excess over the bound, allowing for rounding.
      const double excess = std::abs(divided_difference_recursive(t)) - divided_difference_bound(t) * (1 + 1e-12);
      record(c, std::max(0.0, excess));
    }
  });
  b.check("dd.derivative_identity", 1e-8, [&](IdentityCheck& c) {
    for (cplx z : {cplx(0, 1), cplx(0.5, 0.3), cplx(-1.7, 0.2), cplx(2.5, -0.8)})
      for (std::size_t n = 1; n <= std::min<std::size_t>(kk, 8); ++n)
        record(c, verify_derivative_identity(z, n).residual /
                      std::max(std::abs(stieltjes_taylor(z, n - 1).back()),
                               divided_difference_bound(SpectralTuple(std::vector<cplx>(n, z)))));
  });
  b.check("mcirc.connected_graphs_vs_mobius", 1e-10, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 5);
    for (int rep = 0; rep < 100; ++rep) {
      const auto t = random_tuple(rng, 1 + static_cast<std::size_t>(rep) % k_analytic);
      const SetFunction inverted = m_cumulant_table(t);
      const Eigen::MatrixXcd q = perturbed(t.q(), eps);
      for (SetFunction::Mask s = 1; s <= inverted.full_mask(); ++s)
        record(c, std::abs(m_circ(t.m(), q, s) - inverted[s]) / table_scale(inverted));
    }
  });

  // ---- M_[k] ----------------------------------------------------------------
  struct Instance {
    SpectralTuple t;
    std::vector<Matrix> a;
  };
  std::vector<Instance> instances;
  {
    Rng rng(opt.seed + 6);
    std::uniform_int_distribution<int> dim(1, 16);
    const std::size_t k_lo = std::min<std::size_t>(2, k_analytic);
    for (int rep = 0; rep < 100; ++rep) {
      const std::size_t k = k_lo + static_cast<std::size_t>(rep) % (k_analytic - k_lo + 1);
      const Eigen::Index n = dim(rng);
      Instance inst{random_tuple(rng, k), {}};
      for (std::size_t j = 0; j + 1 < k; ++j) inst.a.push_back(random_matrix(rng, n));
      if (inst.a.empty()) inst.a.push_back(random_matrix(rng, n));  // k == 1 still needs a dimension
      instances.push_back(std::move(inst));
    }
  }
  auto lead = [](const Instance& in) {
    return std::span<const Matrix>(in.a.data(), in.t.size() - 1);
  };
  b.check("mk.partition_vs_graph", 1e-10, [&](IdentityCheck& c) {
    for (const auto& in : instances) {
      const Matrix p = m_matrix_partition(in.t, lead(in)).matrix;
      const Matrix g = m_matrix_graph(in.t.m(), perturbed(in.t.q(), eps), lead(in)).matrix;
      record(c, rel_err(p, g));
    }
  });
  b.check("mk.partition_vs_recursive", 1e-10, [&](IdentityCheck& c) {
    for (const auto& in : instances) {
      const Matrix p = m_matrix_partition(in.t, lead(in)).matrix;
      record(c, rel_err(p, m_matrix_recursive(in.t, lead(in), RecursionLine::expand_first).matrix));
      record(c, rel_err(p, m_matrix_recursive(in.t, lead(in), RecursionLine::expand_last).matrix));
    }
  });
  b.check("mk.trace_recursion", 1e-9, [&](IdentityCheck& c) {
    for (const auto& in : instances) {
      if (in.t.size() < 2 || std::abs(in.t.z(0) - in.t.z(in.t.size() - 1)) < 1e-6) continue;
      record(c, check_trace_recursion(in.t, lead(in)).residual);
    }
  });
  b.check("mk.identity_collapse", 1e-10, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 7);
    for (std::size_t k = 1; k <= k_analytic; ++k) {
      const auto t = random_tuple(rng, k);
      const std::vector<Matrix> ones(k == 1 ? 1 : k - 1, Matrix::Identity(3, 3));
      const Matrix m = m_matrix_partition(t, std::span<const Matrix>(ones.data(), k - 1)).matrix;
      const cplx dd = divided_difference_recursive(t);
      const Matrix expect = m.rows() == 1 ? Matrix::Constant(1, 1, dd) : Matrix(dd * Matrix::Identity(3, 3));
      record(c, rel_err(m, expect));
    }
  });
  b.check("mk.adjoint_symmetry", 1e-10, [&](IdentityCheck& c) {
    // M(z_1..z_k; A_1..A_{k-1})^* = M(conj z_k..conj z_1; A_{k-1}^*..A_1^*).
    for (std::size_t r = 0; r < std::min<std::size_t>(instances.size(), 30); ++r) {
      const auto& in = instances[r];
      const std::size_t k = in.t.size();
      std::vector<cplx> z;
      for (std::size_t i = k; i-- > 0;) z.push_back(std::conj(in.t.z(i)));
      std::vector<Matrix> adj;
      for (std::size_t j = k - 1; j-- > 0;) adj.push_back(in.a[j].adjoint());
      const Matrix lhs = m_matrix_partition(in.t, lead(in)).matrix.adjoint();
      const Matrix rhs = m_matrix_partition(SpectralTuple(z), adj).matrix;
      record(c, rel_err(lhs, rhs));
    }
  });

  // ---- Bessel kernels and function-level predictions ----------------------
  b.check("bessel.phi_vs_quadrature", 1e-8, [&](IdentityCheck& c) {
    for (int i = 0; i <= 200; ++i) {
      const double s = 0.25 * i;
      const cplx q = sc_average([s](double x) { return std::exp(cplx(0, s * x)); });
      record(c, std::abs(q - phi(s)));
    }
  });
  b.check("bessel.asymptotic_residual", 5.0, [&](IdentityCheck& c) {
    // Residual scaled by x^{3/2}, against the harness constant 5.
    for (double x : {20.0, 50.0, 100.0}) record(c, std::abs(bessel_asymptotic_residual(x)) * std::pow(x, 1.5));
  });
  b.check("prediction.exp_vs_quadrature", 1e-8, [&](IdentityCheck& c) {
    Rng rng(opt.seed + 8);
    std::uniform_real_distribution<double> time(-6.0, 6.0);
    for (std::size_t k = 1; k <= std::min<std::size_t>(k_analytic, 4); ++k) {
      std::vector<double> s;
      std::vector<ScalarFunction> f;
      std::vector<Matrix> a;
      for (std::size_t i = 0; i < k; ++i) {
        s.push_back(time(rng));
        const double si = s.back();
        f.push_back([si](double x) { return std::exp(cplx(0, si * x)); });
        a.push_back(random_matrix(rng, 4));
      }
      record(c, rel_err(exp_prediction(s, a).value, f_prediction(f, a).value));
    }
  });
  return report;
}

void print_report(const VerifyReport& report, std::ostream& out) {
  char line[256];
  for (const auto& c : report.checks) {
    std::snprintf(line, sizeof line, "%s %-40s worst %-11.3e tol %-9.1e cases %-6zu %.2fs\n", c.passed() ? "PASS" : "FAIL",
                  c.name.c_str(), c.worst_residual, c.tolerance, c.cases, c.seconds);
    out << line;
  }
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.passed() ? 0 : 1;
  std::snprintf(line, sizeof line, "%zu identities, %zu failed\n", report.checks.size(), failed);
  out << line;
}

}  // namespace freelab
