#pragma once

// Deterministic observables and vectors: named generators, a plain-text matrix
// format, and the default test vectors.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace freelab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

Matrix identity_observable(Eigen::Index n);
/// diag(+1,...,+1,-1,...,-1) with equal halves; a trailing 0 when n is odd.
Matrix traceless_diagonal_pm1(Eigen::Index n);
/// e_1 e_1^* - I/n.
Matrix rank_one_projection_traceless(Eigen::Index n);
/// Hermitian, traceless, normalized to <A^2> = 1, reproducible from `seed`.
Matrix random_hermitian_traceless(Eigen::Index n, std::uint64_t seed);

/// Parses a sum of named generators with optional real coefficients, e.g.
/// "identity", "2*traceless-diagonal-pm1", "identity+random-hermitian-traceless(7)".
/// Throws ValidationError on unknown names or malformed text.
Matrix named_observable(const std::string& spec, Eigen::Index n);

/// Text format: a first line holding the dimension N, then N lines of N
/// "re im" pairs. Throws ValidationError naming the offending line.
Matrix read_observable(std::istream& in);
void write_observable(const Matrix& a, std::ostream& out);

/// i-th standard basis vector.
Vector unit_vector(Eigen::Index n, Eigen::Index i);
/// Fixed pseudo-random pair of complex unit vectors.
std::pair<Vector, Vector> random_unit_pair(Eigen::Index n, std::uint64_t seed);

}  // namespace freelab
