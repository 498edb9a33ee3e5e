#include "qbm/tq.hpp"

#include <cmath>

#include "qbm/contfrac.hpp"

namespace qbm::tq {

namespace {

using qseries::QBase;
using qseries::SeriesControl;
using qseries::n_infinity;

void require_lambda(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("tq: requires lambda > 0");
}

// 1phi1(0; b; q^{-2}; z) evaluated by multiplicative term updates. The huge
// b, z pairs coming from Corollary 6.1 keep a tame ratio z/b ~ 1/q, so the
// terms themselves stay bounded even when b overflows no intermediate here.
double phi11(double b, double z, const TqParams& p, SeriesControl ctrl = {}) {
    const double qh = p.base;
    double sum = 0.0, term = 1.0, qk = 1.0;
    int negligible = 0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        sum += term;
        term *= -qk * z / ((1.0 - b * qk) * (1.0 - qk * qh));
        qk *= qh;
        negligible = (std::fabs(term) <= ctrl.rel_tol * std::fabs(sum)) ? negligible + 1 : 0;
        if (negligible >= 3) return sum + term;
    }
    throw NonConvergence("tq: 1phi1 series did not converge");
}

// log (z; q^{-2})_inf as LogSigned
LogSigned lpoch_inf(double z, const TqParams& p) {
    return qseries::qpoch(z, QBase(p.base), n_infinity);
}

LogSigned lpoch_fin(double z, long m, const TqParams& p) {
    return qseries::qpoch(z, QBase(p.base), m);
}

// 0phi1(-; 0; q^{-1}; z) with log z supplied, so exponents far outside double
// range survive.
LogSigned phi01l(double log_z, const TqParams& p) {
    return qseries::phi01_log_from_logz(log_z, QBase(1.0 / p.q), {});
}

} // namespace

double mu_point(long n, const TqParams& p) {
    const double lq = std::log(p.q);
    return 0.5 * (std::exp((n + 1) * lq) - std::exp((n - 1) * lq));
}

LaplaceValue h_nm(long n, long m, double lambda, const TqParams& p, HForm form) {
    require_lambda(lambda);
    if (m == n) return {1.0, Method::phi01_ratio, 0.0};
    const double lq = std::log(p.q);
    const double llam = std::log(lambda);
    if (m < n) {
        const long M = n - m;
        if (form == HForm::phi01) {
            // q^{M^2 - 2Mn} lambda^{-M} phi(1/(lambda q^{2n+1})) / phi(1/(lambda q^{2m+1}))
            const double lpref =
                (static_cast<double>(M) * M - 2.0 * static_cast<double>(M) * n) * lq -
                M * llam;
            const LogSigned num = phi01l(-(llam + (2.0 * n + 1.0) * lq), p);
            const LogSigned den = phi01l(-(llam + (2.0 * m + 1.0) * lq), p);
            const double v = (LogSigned::from_log(lpref) * num / den).to_double();
            return {v, Method::phi01_ratio, 1e-13 * v};
        }
        // 1/( -lambda q^{2n-1}; q^{-2})_M times the 1phi1 ratio
        const double bn = -1.0 / (lambda * std::pow(p.q, 2.0 * n + 1.0));
        const double zn = bn / p.q;
        const double bm = -1.0 / (lambda * std::pow(p.q, 2.0 * m + 1.0));
        const double zm = bm / p.q;
        const LogSigned pref = LogSigned::one() / lpoch_fin(-lambda * std::pow(p.q, 2.0 * n - 1.0), M, p);
        const double ratio = phi11(bn, zn, p) / phi11(bm, zm, p);
        const double v = (pref * LogSigned::from_double(ratio)).to_double();
        return {v, Method::phi11_ratio, 1e-13 * std::fabs(v)};
    }
    // upward: 1/(q^M (-lambda q^{2n+2M-3}; q^{-2})_M) * phi11 ratio at z = q^{-3}
    const long M = m - n;
    const double z = std::pow(p.q, -3.0);
    const double bn = -lambda * std::pow(p.q, 2.0 * n - 3.0);
    const double bm = -lambda * std::pow(p.q, 2.0 * n + 2.0 * M - 3.0);
    const LogSigned pref =
        LogSigned::from_log(-static_cast<double>(M) * lq) / lpoch_fin(bm, M, p);
    const double ratio = phi11(bn, z, p) / phi11(bm, z, p);
    const double v = (pref * LogSigned::from_double(ratio)).to_double();
    return {v, Method::phi11_ratio, 1e-13 * std::fabs(v)};
}

LaplaceValue h0_down(double lambda, const TqParams& p, HForm form) {
    return h_nm(0, -1, lambda, p, form);
}

LaplaceValue h0_up(double lambda, const TqParams& p) {
    return h_nm(0, 1, lambda, p);
}

LogSigned h_to_zero_log(long n, double lambda, const TqParams& p) {
    require_lambda(lambda);
    const double b = -1.0 / (lambda * std::pow(p.q, 2.0 * n + 1.0));
    const double z = b / p.q;
    const LogSigned phi = LogSigned::from_double(phi11(b, z, p));
    // e_{q^{-2}}(-lambda q^{2n-1}) / e_{q^{-2}}(1/q) = (1/q;q^-2)_inf / (-lambda q^{2n-1};q^-2)_inf
    const LogSigned eratio =
        lpoch_inf(1.0 / p.q, p) / lpoch_inf(-lambda * std::pow(p.q, 2.0 * n - 1.0), p);
    return phi * eratio;
}

LaplaceValue h_to_zero(long n, double lambda, const TqParams& p) {
    const double v = h_to_zero_log(n, lambda, p).to_double();
    return {v, Method::phi11_ratio, 1e-13 * v};
}

double h0_down_cf(double lambda, const TqParams& p, double tol) {
    require_lambda(lambda);
    // fraction (6.1): a_k = q, b_k = 1 + q + lambda q^{2k}, k >= 0
    contfrac::RecurrenceSpec spec;
    spec.direction = contfrac::Direction::positive;
    const double q = p.q;
    spec.a = [q](long) { return q; };
    spec.b = [q, lambda](long k) { return 1.0 + q + lambda * std::pow(q, 2.0 * k); };
    return contfrac::minimal_solution_ratio(spec, 0, tol).value;
}

double h0_up_cf(double lambda, const TqParams& p, double tol) {
    require_lambda(lambda);
    // fraction (6.2): descending, a_k = 1/q, b_k = 1 + 1/q + lambda q^{2k-1}
    contfrac::RecurrenceSpec spec;
    spec.direction = contfrac::Direction::negative;
    const double q = p.q;
    spec.a = [q](long) { return 1.0 / q; };
    spec.b = [q, lambda](long k) { return 1.0 + 1.0 / q + lambda * std::pow(q, 2.0 * k - 1.0); };
    return contfrac::minimal_solution_ratio(spec, 0, tol).value;
}

double h0_down_alt(double lambda, const TqParams& p) {
    require_lambda(lambda);
    // contiguous-relation form: q / (q + lambda * phi11(-1/(q lambda); -1/lambda)
    //                                          / phi11(-1/(q lambda); -1/(q^2 lambda)))
    const double b = -1.0 / (p.q * lambda);
    const double r = phi11(b, -1.0 / lambda, p) / phi11(b, -1.0 / (p.q * p.q * lambda), p);
    return p.q / (p.q + lambda * r);
}

double h0_up_alt(double lambda, const TqParams& p) {
    require_lambda(lambda);
    const double b = -lambda / p.q;
    return 1.0 - phi11(b, 1.0 / p.q, p) / phi11(b, std::pow(p.q, -3.0), p);
}

double exp_series_density(double t, const TqParams& p) {
    if (!(t >= 0.0)) throw DomainError("exp_series_density: requires t >= 0");
    // f(t) = (q^{-2};q^{-2})_inf^{-1} sum_j q^{2j} e^{-q^{2j} t} / (q^2;q^2)_j,
    // the partial-fraction mixture of the convolution of Exp(q^{2j}) laws.
    const double q2 = p.q * p.q;
    double sum = 0.0;
    double coef = 1.0; // 1/(q^2;q^2)_j
    double rate = 1.0; // q^{2j}
    for (int j = 0; j < 400; ++j) {
        const double e = rate * t;
        sum += coef * rate * (e > 745.0 ? 0.0 : std::exp(-e));
        const double rate_next = rate * q2;
        coef /= (1.0 - rate_next);
        rate = rate_next;
        if (std::fabs(coef) * rate < 1e-22 || (e > 745.0 && j >= 2)) break;
    }
    const double norm = (LogSigned::one() / lpoch_inf(p.base, p)).to_double();
    // the alternating sum loses all relative precision as t -> 0 where the
    // true density vanishes; clamp the noise floor
    return std::max(norm * sum, 0.0);
}

double tau_zero_density(long n, double t, const TqParams& p, SeriesControl ctrl) {
    if (!(t > 0.0)) throw DomainError("tau_zero_density: requires t > 0");
    const double norm = lpoch_inf(1.0 / p.q, p).to_double(); // 1/e_{q^{-2}}(1/q)
    double sum = 0.0;
    double w = 1.0; // q^{-m}/(q^{-2};q^{-2})_m
    double qh = p.base;
    const double lq = std::log(p.q);
    for (int m = 0; m < ctrl.max_terms; ++m) {
        const double scale = std::exp((1.0 - 2.0 * (n + m)) * lq); // q^{1-2(n+m)}
        sum += w * scale * exp_series_density(scale * t, p);
        w *= (1.0 / p.q) / (1.0 - qh);
        qh *= p.base;
        if (w < 1e-18) break;
    }
    return norm * sum;
}

double psi_exponent(double lambda, const TqParams& p) {
    require_lambda(lambda);
    const LogSigned num = lpoch_inf(-1.0 / lambda, p) * lpoch_inf(-lambda * p.base, p);
    const LogSigned den = lpoch_inf(-lambda / p.q, p) * lpoch_inf(-1.0 / (lambda * p.q), p);
    return lambda * (p.q * p.q - 1.0) / p.q * (num / den).to_double();
}

double entrance_law_lt(long n, double lambda, const TqParams& p) {
    const double lq = std::log(p.q);
    const LogSigned mu = LogSigned::from_double(0.5 * (p.q * p.q - 1.0)) *
                         LogSigned::from_log((n - 1.0) * lq);
    return (mu * h_to_zero_log(n, lambda, p)).to_double();
}

double psi_exponent_sum(double lambda, const TqParams& p, int n_max) {
    require_lambda(lambda);
    double s = 0.0;
    for (long n = -n_max; n <= n_max; ++n) s += entrance_law_lt(n, lambda, p);
    return 2.0 * lambda * s;
}

double resolvent_killed(long m, long n, double lambda, const TqParams& p) {
    require_lambda(lambda);
    const double q = p.q;
    const double rate = std::pow(q, -2.0 * n + 1.0) + std::pow(q, -2.0 * n);
    const double up = h_nm(n - 1, n, lambda, p).value;
    const double down = h_nm(n + 1, n, lambda, p).value;
    const double bracket = 1.0 - (q / (q + 1.0)) * up - (1.0 / (q + 1.0)) * down;
    const double diag = 1.0 / (lambda + rate * bracket);
    if (m == n) return diag;
    return h_nm(m, n, lambda, p).value * diag;
}

double resolvent_full(TqState x, TqState y, double lambda, const TqParams& p) {
    require_lambda(lambda);
    using K = TqState::Kind;
    if (y.kind == K::zero) return 0.0; // mu^q({0}) = 0: the point is instantaneous
    if (x.kind == K::negative) {
        // R(-x, {-y}) mirror
        TqState xm = x, ym = y;
        xm.kind = K::positive;
        ym.kind = (y.kind == K::positive) ? K::negative : K::positive;
        return resolvent_full(xm, ym, lambda, p);
    }
    // R(0, {y}) = kappa_lambda int e^{-lambda t} n_t({y}) dt with kappa = 1/psi
    const double r0y = entrance_law_lt(y.n, lambda, p) / psi_exponent(lambda, p);
    if (x.kind == K::zero) return r0y;
    const double hx0 = h_to_zero(x.n, lambda, p).value;
    if (y.kind == K::negative) return hx0 * r0y;
    return resolvent_killed(x.n, y.n, lambda, p) + hx0 * r0y;
}

} // namespace qbm::tq
