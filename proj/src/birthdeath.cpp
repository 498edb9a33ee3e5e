#include "qbm/birthdeath.hpp"

#include <cmath>

namespace qbm::birthdeath {

namespace {

void require_lambda(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("birthdeath: requires lambda > 0");
}

void require_up_regime(const BirthDeathRates& r) {
    if (!r.regime.rates_vanish_up || !(r.regime.rho_limit > 1.0) ||
        !std::isfinite(r.regime.rho_limit))
        throw RegimeError("h_down: upper-tail regime (rates -> 0, rho -> rho in (1,inf)) not certified");
}

void require_down_regime(const BirthDeathRates& r) {
    if (!r.regime.beta_divergence_down || !(r.regime.rho_limit > 1.0) ||
        !std::isfinite(r.regime.rho_limit))
        throw RegimeError("h_up: lower-tail regime (beta -> inf, rho -> rho in (1,inf)) not certified");
}

} // namespace

BirthDeathRates rates_from_scattered_scale(std::function<double(long)> points, TailRegime regime) {
    auto t = std::move(points);
    auto gap = [t](long a, long b) {
        const double lo = t(a), hi = t(b);
        if (!(lo < hi)) throw DomainError("rates_from_scattered_scale: points not strictly increasing");
        return hi - lo;
    };
    BirthDeathRates r;
    r.delta = [gap](long n) { return 1.0 / (gap(n - 1, n) * gap(n - 1, n + 1)); };
    r.beta = [gap](long n) { return 1.0 / (gap(n, n + 1) * gap(n - 1, n + 1)); };
    r.regime = regime;
    return r;
}

BirthDeathRates tq_rates(double q) {
    if (!(q > 1.0)) throw DomainError("tq_rates: requires q > 1");
    BirthDeathRates r;
    r.delta = [q](long n) { return std::pow(q, 1.0 - 2.0 * static_cast<double>(n)); };
    r.beta = [q](long n) { return std::pow(q, -2.0 * static_cast<double>(n)); };
    r.regime = TailRegime{q, true, true};
    return r;
}

LaplaceValue h_down(const BirthDeathRates& r, long n, double lambda, double tol) {
    require_lambda(lambda);
    require_up_regime(r);
    // (4.8)-form spec: a_k = rho_k, b_k = 1 + rho_k + lambda/beta_k. Transformed
    // with c_k = beta_k it becomes a'_k = beta_{k-1} delta_k,
    // b'_k = beta_k + delta_k + lambda, whose tail map is the singular one with
    // fixed points 0 and lambda; the paper's convergence argument lives there.
    contfrac::RecurrenceSpec base;
    base.direction = contfrac::Direction::positive;
    base.a = [&r](long k) { return r.rho(k); };
    base.b = [&r, lambda](long k) { return 1.0 + r.rho(k) + lambda / r.beta(k); };
    const auto transformed = contfrac::equivalence_transform(base, [&r](long k) { return r.beta(k); });
    const auto cf = contfrac::minimal_solution_ratio(transformed, n, tol * r.beta(n - 1));
    const double v = cf.value / r.beta(n - 1);
    return {v, Method::continued_fraction, cf.error_estimate / r.beta(n - 1)};
}

LaplaceValue h_up(const BirthDeathRates& r, long n, double lambda, double tol) {
    require_lambda(lambda);
    require_down_regime(r);
    contfrac::RecurrenceSpec spec;
    spec.direction = contfrac::Direction::negative;
    spec.a = [&r](long k) { return 1.0 / r.rho(k); };
    spec.b = [&r, lambda](long k) { return 1.0 + 1.0 / r.rho(k) + lambda / r.delta(k); };
    const auto cf = contfrac::minimal_solution_ratio(spec, n, tol);
    return {cf.value, Method::continued_fraction, cf.error_estimate};
}

LaplaceValue h_path(const BirthDeathRates& r, long n, long m, double lambda, double tol) {
    if (m == n) return {1.0, Method::continued_fraction, 0.0};
    double log_sum = 0.0;
    double err = 0.0;
    if (m < n) {
        for (long k = n; k > m; --k) {
            const auto h = h_down(r, k, lambda, tol);
            log_sum += std::log(h.value);
            err += h.error_estimate / h.value;
        }
    } else {
        for (long k = n; k < m; ++k) {
            const auto h = h_up(r, k, lambda, tol);
            log_sum += std::log(h.value);
            err += h.error_estimate / h.value;
        }
    }
    const double v = std::exp(log_sum);
    return {v, Method::continued_fraction, err * v};
}

} // namespace qbm::birthdeath
