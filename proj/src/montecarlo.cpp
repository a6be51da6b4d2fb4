#include "freelab/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "freelab/errors.hpp"

namespace freelab {

namespace {

template <typename T>
T cascade(std::span<const T> v) {
  if (v.size() <= 8) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return cascade(v.first(half)) + cascade(v.subspan(half));
}

}  // namespace

cplx pairwise_sum(std::span<const cplx> v) { return cascade(v); }
double pairwise_sum(std::span<const double> v) { return cascade(v); }

Statistic summarize(std::span<const cplx> values) {
  if (values.size() < 2) throw ValidationError("statistics need at least two samples");
  Statistic s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  s.mean = pairwise_sum(values) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = std::norm(values[i] - s.mean);
  s.variance = pairwise_sum(std::span<const double>(sq)) / (n - 1.0);
  s.std_error = std::sqrt(s.variance / n);
  return s;
}

std::vector<cplx> MonteCarloResult::component(std::size_t c) const {
  std::vector<cplx> out;
  out.reserve(per_sample.size());
  for (const auto& row : per_sample) out.push_back(row.at(c));
  return out;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FREELAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ValidationError("FREELAB_WORKERS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return 1;
}

MonteCarloResult monte_carlo(const SeededEstimator& estimator, std::size_t n_samples, const SeedPlan& plan,
                             std::uint64_t grid_index, std::size_t workers) {
  if (n_samples < 2) throw ValidationError("Monte Carlo needs at least two samples");
  workers = std::min(resolve_workers(workers), n_samples);

  MonteCarloResult out;
  out.per_sample.resize(n_samples);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_samples) return;
      try {
        out.per_sample[i] = estimator(plan.substream(grid_index, i), i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_samples;
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t components = out.per_sample.front().size();
  for (const auto& row : out.per_sample)
    if (row.size() != components) throw ValidationError("estimator returned vectors of different lengths");
  for (std::size_t c = 0; c < components; ++c) out.stats.push_back(summarize(out.component(c)));
  return out;
}

MonteCarloResult monte_carlo(const EnsembleSpec& spec, const SampleEstimator& estimator, std::size_t n_samples,
                             const SeedPlan& plan, std::uint64_t grid_index, std::size_t workers) {
  spec.validate();
  return monte_carlo(
      [&](std::uint64_t seed, std::size_t i) { return estimator(sample_wigner(spec, seed), i); }, n_samples, plan,
      grid_index, workers);
}

}  // namespace freelab
