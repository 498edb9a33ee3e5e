#pragma once

#include <functional>

#include "qbm/errors.hpp"

namespace qbm::contfrac {

enum class Direction { positive, negative };

// Coefficients of the three-term recurrence U_{n+1} = b_n U_n - a_n U_{n-1}
// (indices reverse for Direction::negative). a_n and b_n must be nonzero on the
// index range actually walked. The attached continued fraction is the one whose
// value W_n = U_n/U_{n-1} satisfies W_n = a_n / (b_n - W_{n+dir}); approximants
// here are always of that form, so the minimal-solution ratio of a convergent
// loxodromic fraction is the approximant limit (Pincherle).
struct RecurrenceSpec {
    std::function<double(long)> a;
    std::function<double(long)> b;
    Direction direction = Direction::positive;
};

// Limits of (b_n -+ sqrt(b_n^2 - 4 a_n))/2 with |beta_minus| < |beta_plus|.
struct LoxodromicTail {
    double beta_minus;
    double beta_plus;
};

struct CFValue {
    double value;
    int depth_used;
    double tail_seed;
    double error_estimate; // |difference of the last two accepted approximants|
};

// Depth-term approximant with tail value 0, by backward substitution from
// start + dir*(depth-1) toward start. depth = 1 gives a_start / b_start.
double classical_approximant(const RecurrenceSpec& spec, long start, int depth);

// Same with a seeded tail value; tail = 0 reproduces the classical approximant.
// Seeding at the attractive fixed-point limit accelerates convergence; seeding
// at the repulsive one converges to a different (wrong) value.
double modified_approximant(const RecurrenceSpec& spec, long start, int depth, double tail);

// Requires b_lim^2 - 4 a_lim > 0 (real loxodromic case); elliptic/parabolic
// tails are rejected rather than approximated.
LoxodromicTail tail_fixed_points(double a_lim, double b_lim);

// Ratio U~_at / U~_{at-dir} of the minimal solution, evaluated as the continued
// fraction with the tail seeded at the local attractive fixed point. Depth is
// doubled adaptively from initial_depth until two successive error estimates
// fall below tol.
CFValue minimal_solution_ratio(const RecurrenceSpec& spec, long at, double tol = 1e-12,
                               int initial_depth = 16, int max_depth = 1 << 16);

// a'_k = c_{k-dir} c_k a_k, b'_k = c_k b_k. All approximants started at `start`
// scale by c_{start-dir}; they coincide with the original ones whenever that
// factor is 1.
RecurrenceSpec equivalence_transform(const RecurrenceSpec& spec, std::function<double(long)> c);

} // namespace qbm::contfrac
