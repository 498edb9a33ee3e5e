#include "qbm/contfrac.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace qbm::contfrac {

namespace {

constexpr double kPoleEps = 1e-300;

long step_of(const RecurrenceSpec& spec) {
    return spec.direction == Direction::positive ? 1 : -1;
}

double backward_eval(const RecurrenceSpec& spec, long start, int depth, double tail) {
    const long step = step_of(spec);
    double w = tail;
    for (int j = depth - 1; j >= 0; --j) {
        const long k = start + step * j;
        const double den = spec.b(k) - w;
        if (std::fabs(den) < kPoleEps)
            throw PoleError("continued fraction: vanishing denominator at index " + std::to_string(k));
        w = spec.a(k) / den;
    }
    return w;
}

// Attractive root of w^2 - b w + a near the truncation index; 0 when the local
// pair is not real-loxodromic.
double local_attractive_seed(const RecurrenceSpec& spec, long k) {
    const double a = spec.a(k);
    const double b = spec.b(k);
    const double disc = b * b - 4.0 * a;
    if (disc <= 0.0) return 0.0;
    const double r = std::sqrt(disc);
    const double m1 = 0.5 * (b - r);
    const double m2 = 0.5 * (b + r);
    return std::fabs(m1) <= std::fabs(m2) ? m1 : m2;
}

} // namespace

double classical_approximant(const RecurrenceSpec& spec, long start, int depth) {
    if (depth < 1) throw DomainError("classical_approximant: depth must be >= 1");
    return backward_eval(spec, start, depth, 0.0);
}

double modified_approximant(const RecurrenceSpec& spec, long start, int depth, double tail) {
    if (depth < 1) throw DomainError("modified_approximant: depth must be >= 1");
    return backward_eval(spec, start, depth, tail);
}

LoxodromicTail tail_fixed_points(double a_lim, double b_lim) {
    const double disc = b_lim * b_lim - 4.0 * a_lim;
    if (disc <= 0.0)
        throw DomainError("tail_fixed_points: discriminant <= 0 (elliptic/parabolic tail)");
    const double r = std::sqrt(disc);
    const double lo = 0.5 * (b_lim - r);
    const double hi = 0.5 * (b_lim + r);
    LoxodromicTail t{lo, hi};
    if (std::fabs(lo) > std::fabs(hi)) std::swap(t.beta_minus, t.beta_plus);
    if (std::fabs(t.beta_minus) == std::fabs(t.beta_plus))
        throw DomainError("tail_fixed_points: |beta-| = |beta+|, no loxodromic ordering");
    return t;
}

CFValue minimal_solution_ratio(const RecurrenceSpec& spec, long at, double tol,
                               int initial_depth, int max_depth) {
    if (!(tol > 0.0)) throw DomainError("minimal_solution_ratio: tol must be > 0");
    const long step = step_of(spec);
    double prev = std::numeric_limits<double>::quiet_NaN();
    double err_prev = std::numeric_limits<double>::infinity();
    double seed = 0.0;
    for (int depth = initial_depth; depth <= max_depth; depth *= 2) {
        seed = local_attractive_seed(spec, at + step * depth);
        const double v = backward_eval(spec, at, depth, seed);
        if (!std::isnan(prev)) {
            const double err = std::fabs(v - prev);
            if (err <= tol && err_prev <= tol)
                return {v, depth, seed, err};
            err_prev = err;
        }
        prev = v;
    }
    throw NonConvergence("minimal_solution_ratio: depth budget exhausted at index " +
                         std::to_string(at));
}

RecurrenceSpec equivalence_transform(const RecurrenceSpec& spec, std::function<double(long)> c) {
    const long step = step_of(spec);
    auto a = spec.a;
    auto b = spec.b;
    auto cc = std::move(c);
    RecurrenceSpec out;
    out.direction = spec.direction;
    out.a = [a, cc, step](long k) {
        const double ck = cc(k);
        const double cp = cc(k - step);
        if (ck == 0.0 || cp == 0.0) throw DomainError("equivalence_transform: zero multiplier");
        return cp * ck * a(k);
    };
    out.b = [b, cc](long k) {
        const double ck = cc(k);
        if (ck == 0.0) throw DomainError("equivalence_transform: zero multiplier");
        return ck * b(k);
    };
    return out;
}

} // namespace qbm::contfrac
