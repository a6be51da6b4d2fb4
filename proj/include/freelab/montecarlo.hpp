#pragma once

// Seeded Monte Carlo over independent Wigner draws. Work is spread over a
// worker pool, per-sample results are stored by sample index, and statistics
// are reduced with a fixed pairwise tree, so output is bit-identical for any
// worker count.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "freelab/wigner.hpp"

namespace freelab {

struct Statistic {
  cplx mean;
  double variance = 0.0;   // sample variance of |X - mean|, denominator n-1
  double std_error = 0.0;  // sqrt(variance / n)
  std::size_t n = 0;
};

/// Pairwise (cascade) sum with a fixed split, independent of threading.
cplx pairwise_sum(std::span<const cplx> v);
double pairwise_sum(std::span<const double> v);

/// Statistics of one component. Throws ValidationError for fewer than 2 values.
Statistic summarize(std::span<const cplx> values);

struct MonteCarloResult {
  std::vector<Statistic> stats;              // one per estimator component
  std::vector<std::vector<cplx>> per_sample;  // [sample][component]

  /// Values of one component across samples.
  std::vector<cplx> component(std::size_t c) const;
};

/// Estimator for one draw: receives the substream seed and the sample index
/// and returns a fixed-length vector of values.
using SeededEstimator = std::function<std::vector<cplx>(std::uint64_t seed, std::size_t sample_index)>;
/// Estimator evaluated on a freshly sampled Wigner matrix.
using SampleEstimator = std::function<std::vector<cplx>(const WignerSample& sample, std::size_t sample_index)>;

/// Resolves a worker count: `requested` if nonzero, else $FREELAB_WORKERS,
/// else 1.
std::size_t resolve_workers(std::size_t requested);

/// Runs `estimator` for sample indices 0..n_samples-1 with seeds
/// plan.substream(grid_index, i). Throws ValidationError when n_samples < 2 or
/// component counts differ across samples; rethrows the first estimator error.
MonteCarloResult monte_carlo(const SeededEstimator& estimator, std::size_t n_samples, const SeedPlan& plan,
                             std::uint64_t grid_index, std::size_t workers = 0);

MonteCarloResult monte_carlo(const EnsembleSpec& spec, const SampleEstimator& estimator, std::size_t n_samples,
                             const SeedPlan& plan, std::uint64_t grid_index, std::size_t workers = 0);

}  // namespace freelab
