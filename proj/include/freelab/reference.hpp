#pragma once

// Slow, definition-level implementations kept as cross-checks for the fast
// routines. They share no code with the routes they check beyond the
// partition and graph enumerations.

#include <cstdint>
#include <vector>

#include "freelab/cumulants.hpp"
#include "freelab/ncp.hpp"

namespace freelab::reference {

/// mu(pi, 1_S) from mu(pi, pi) = 1 and sum_{pi <= rho <= sigma} mu(pi, rho) = 0,
/// evaluated over the whole interval [pi, 1_S] of NCP(S).
std::int64_t mobius_recursive(const NonCrossingPartition& pi);

/// f_circ by solving f[S] = sum_pi prod_B f_circ[B] for f_circ[S] in order of
/// increasing |S|.
SetFunction cumulants_recursive(const SetFunction& f);

/// C_n from C_{n+1} = sum_i C_i C_{n-i}.
std::uint64_t catalan_recurrence(unsigned n);

/// b_n(w) from b_3 = 1 and b_{n+1} = (1+2w) b_n + 2w(1+w) b_n' / n, as
/// ascending coefficients. Valid for n >= 3.
std::vector<std::int64_t> dissection_polynomial(unsigned n);

/// (1+w)^n b_n(w) for n > 2, 1+w for n = 2, 1 for n = 1.
std::vector<std::int64_t> graph_polynomial(unsigned n);

}  // namespace freelab::reference
