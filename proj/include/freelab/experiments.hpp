#pragma once

// Monte Carlo experiments behind the command-line tool. Each run reads its
// grids and ensemble from a RunConfig and returns records in a fixed order:
// grid points in configuration order, derived fits last.

#include <complex>
#include <string>
#include <vector>

#include "freelab/config.hpp"
#include "freelab/records.hpp"
#include "json.hpp"

namespace freelab {

/// Local-law deviations of resolvent chains over the (N, eta, k) grid.
///
/// Records per grid point (N, eta, k):
///   locallaw.averaged       <G_1A_1...G_kA_k> against <M_[k]A_k>
///   locallaw.averaged_abs   mean |chain - prediction| (prediction field 0)
///   locallaw.isotropic      <x, G_1A_1...G_k y> against <x, M_[k] y>
///   locallaw.isotropic_abs
/// then log-log slope fits of the *_abs means in N (expected -1 averaged,
/// -1/2 isotropic) and in eta (expected -k and 1/2 - k).
std::vector<ExperimentRecord> run_locallaw(const RunConfig& config);

/// Heisenberg-evolved correlations on a time grid.
///
///   thermalise.averaged          <A(t)B>, predicted by the exact phi-cumulant
///                                sum; params carry the large-time form
///   thermalise.isotropic         <x, A(t) y> (when enabled)
///   thermalise.three             <A(t)B(s)C> per configured (t, s) pair;
///                                params carry the five-term large-time form
///   thermalise.three_centered    same with traceless parts of A, B, C
///   thermalise.envelope_fit      power-law exponent of the maxima of
///                                |<A(t)B> - <A><B>| (expected -3)
std::vector<ExperimentRecord> run_thermalise(const RunConfig& config);

/// Alternating products of centered powers P_i = A_i^{a_i} - <A_i^{a_i}>
/// evolved to times t_i = (k - i) * separation.
///
///   freeness.point    one product at one separation
///   freeness.window   |mean| averaged over a window of separations; params
///                     carry the decay envelope, max|t| / N^{1/k} and a
///                     "degenerate" flag for zero separation
std::vector<ExperimentRecord> run_freeness(const RunConfig& config);

/// "#" header lines: command, UTC timestamp and the effective configuration.
std::vector<std::string> run_header(const RunConfig& config, const std::string& command);

/// Writes <out>/<command>.csv or .json plus <out>/<command>_summary.txt and
/// returns the data file path.
std::string write_run(const RunConfig& config, const std::string& command, const std::vector<ExperimentRecord>& records);

/// Observable from a named generator expression, or from a file when the
/// descriptor starts with '@'. Throws ValidationError on a dimension mismatch.
Eigen::MatrixXcd resolve_observable(const std::string& descriptor, Eigen::Index n);

/// Parses "a", "bi", "a+bi", "a-bi", "i" or "-i". Throws ValidationError.
std::complex<double> parse_complex(const std::string& text);

// Prediction entry points. Observable lists of length one are repeated to the
// chain length. Results hold "value" ([re, im]) and the per-partition "terms".
nlohmann::json predict_chain(const std::vector<std::complex<double>>& z, const std::vector<std::string>& observables,
                             Eigen::Index n);
nlohmann::json predict_exp(const std::vector<double>& s, const std::vector<std::string>& observables, Eigen::Index n);
nlohmann::json predict_f(const std::vector<std::string>& functions, std::size_t k,
                         const std::vector<std::string>& observables, Eigen::Index n);

}  // namespace freelab
