#pragma once

#include "qbm/errors.hpp"
#include "qbm/log_signed.hpp"
#include "qbm/qseries.hpp"

namespace qbm::tq {

// Process parameter q > 1 together with the derived series base q^{-2} and the
// rate constant c_q = q^{-1}(q-1)^2(1+q). Owning the q > 1 <-> base in (0,1)
// translation here keeps raw bases out of every call site.
struct TqParams {
    double q;
    double base; // q^{-2}
    double c_q;

    explicit TqParams(double q_) : q(q_) {
        if (!(q_ > 1.0)) throw DomainError("TqParams: requires q > 1");
        base = 1.0 / (q_ * q_);
        c_q = (q_ - 1.0) * (q_ - 1.0) * (1.0 + q_) / q_;
    }
};

// A state of T_q = {+-q^n} u {0}.
struct TqState {
    enum class Kind { zero, positive, negative };
    Kind kind = Kind::zero;
    long n = 0;

    static TqState zero() { return {}; }
    static TqState pos(long n) { return {Kind::positive, n}; }
    static TqState neg(long n) { return {Kind::negative, n}; }

    double value(const TqParams& p) const {
        switch (kind) {
        case Kind::positive: return std::pow(p.q, static_cast<double>(n));
        case Kind::negative: return -std::pow(p.q, static_cast<double>(n));
        default: return 0.0;
        }
    }
};

enum class Method { phi01_ratio, phi11_ratio, continued_fraction, monte_carlo };
enum class HForm { phi01, phi11 };

struct LaplaceValue {
    double value;
    Method method;
    double error_estimate;
};

// mu^q({q^n}) = (q^{n+1} - q^{n-1})/2, the atom of the stationary measure.
double mu_point(long n, const TqParams& p);

// One-step transform H_0_down(lambda), both closed forms: the 0phi1 ratio at
// base q^{-1} and the 1phi1 ratio at base q^{-2}.
LaplaceValue h0_down(double lambda, const TqParams& p, HForm form = HForm::phi01);
// H_0_up(lambda) for the process killed at 0 (1phi1 ratio over q + lambda).
LaplaceValue h0_up(double lambda, const TqParams& p);

// H_{n,m}(lambda), any n, m; 1 when m == n. Downward values offer both closed
// forms; upward values have the single 1phi1 form. Prefactors like
// q^{m^2 - 2mn}/lambda^m are carried in log-signed space.
LaplaceValue h_nm(long n, long m, double lambda, const TqParams& p, HForm form = HForm::phi01);

// H_{n,-inf}(lambda) = E^{q^n}[e^{-lambda tau_0}].
LaplaceValue h_to_zero(long n, double lambda, const TqParams& p);
LogSigned h_to_zero_log(long n, double lambda, const TqParams& p);

// Continued-fraction evaluations of the same transforms (independent route,
// shares no series code with the closed forms above).
double h0_down_cf(double lambda, const TqParams& p, double tol = 1e-12);
double h0_up_cf(double lambda, const TqParams& p, double tol = 1e-12);
// Alternative closed forms from the contiguous-relation identities; evaluated
// only as cross-checks.
double h0_down_alt(double lambda, const TqParams& p);
double h0_up_alt(double lambda, const TqParams& p);

// Density of Y = sum_{i>=0} q^{-2i} T_i (rate-1 exponentials): the alternating
// exponential mixture; absolute accuracy degrades near t = 0 where the
// alternating sum cancels, values are clamped at 0 there.
double exp_series_density(double t, const TqParams& p);

// Density at t of the hitting time of 0 started from q^n: the q-Poisson
// mixture of scaled copies of exp_series_density.
double tau_zero_density(long n, double t, const TqParams& p,
                        qseries::SeriesControl ctrl = {});

// Laplace exponent of the inverse local time at 0 (product form), and the
// entrance-law sum route from the proof, kept as an oracle.
double psi_exponent(double lambda, const TqParams& p);
double psi_exponent_sum(double lambda, const TqParams& p, int n_max = 40);

// int_0^inf e^{-lambda t} n_t({q^n}) dt = mu^q({q^n}) H_{n,-inf}(lambda);
// symmetric in the sign of the state.
double entrance_law_lt(long n, double lambda, const TqParams& p);

// Resolvent of the process killed at 0, on {q^n : n in Z}.
double resolvent_killed(long m, long n, double lambda, const TqParams& p);
// Full resolvent R_lambda(x, {y}) assembled from the killed resolvent, the
// hitting transforms and the excursion ingredients; R(x, {0}) = 0.
double resolvent_full(TqState x, TqState y, double lambda, const TqParams& p);

} // namespace qbm::tq
