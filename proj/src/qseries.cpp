#include "qbm/qseries.hpp"

#include <cmath>
#include <cstdlib>

namespace qbm::qseries {

namespace {

constexpr double kPoleEps = 1e-300;
constexpr double kTailEps = 1e-17; // |z q^k| below this for 3 factors ends an infinite product

LogSigned finite_product(double z, double q, long n) {
    // prod_{k=0}^{n-1} (1 - z q^k)
    double lg = 0.0;
    int sign = 1;
    double zq = z;
    for (long k = 0; k < n; ++k) {
        const double f = 1.0 - zq;
        if (f == 0.0) return LogSigned::zero();
        lg += std::log(std::fabs(f));
        if (f < 0.0) sign = -sign;
        zq *= q;
    }
    return {lg, sign};
}

} // namespace

LogSigned qpoch(double z, QBase q, long n, SeriesControl ctrl) {
    if (z == 0.0) return LogSigned::one();
    if (n == n_infinity) {
        double lg = 0.0;
        int sign = 1;
        double zq = z;
        int small = 0;
        for (int k = 0; k < ctrl.max_terms; ++k) {
            const double f = 1.0 - zq;
            if (f == 0.0) return LogSigned::zero();
            lg += std::log(std::fabs(f));
            if (f < 0.0) sign = -sign;
            zq *= q.v;
            small = (std::fabs(zq) < kTailEps) ? small + 1 : 0;
            if (small >= 3) return {lg, sign};
        }
        throw NonConvergence("qpoch: infinite product did not settle within max_terms");
    }
    if (n >= 0) return finite_product(z, q.v, n);
    // (z;q)_{-m} = 1 / prod_{i=1}^{m} (1 - z q^{-i})
    const long m = -n;
    double lg = 0.0;
    int sign = 1;
    double zq = z;
    for (long i = 1; i <= m; ++i) {
        zq /= q.v;
        const double f = 1.0 - zq;
        if (std::fabs(f) < kPoleEps)
            throw PoleError("qpoch: factor vanishes under the negative-n extension");
        lg -= std::log(std::fabs(f));
        if (f < 0.0) sign = -sign;
    }
    return {lg, sign};
}

double rphis(const std::vector<double>& a, const std::vector<double>& b, QBase q,
             double z, SeriesControl ctrl) {
    const int r = static_cast<int>(a.size());
    const int s = static_cast<int>(b.size());
    if (r > s + 1 && z != 0.0)
        throw DomainError("rphis: divergent regime r > s+1");
    if (r == s + 1 && std::fabs(z) >= 1.0)
        throw DomainError("rphis: |z| must be < 1 when r = s+1");
    if (z == 0.0) return 1.0;

    const int extra = 1 + s - r; // power on the (-1)^k q^{k(k-1)/2} factor
    double sum = 0.0;
    double term = 1.0;
    double qk = 1.0; // q^k
    int negligible = 0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        sum += term;
        double num = 1.0;
        for (double ai : a) num *= (1.0 - ai * qk);
        double den = 1.0;
        for (double bj : b) {
            const double f = 1.0 - bj * qk;
            if (std::fabs(f) < kPoleEps)
                throw DomainError("rphis: lower parameter of the form q^{-k}");
            den *= f;
        }
        den *= (1.0 - q.v * qk); // the (q;q)_k factor
        double ratio = num / den * z;
        for (int e = 0; e < extra; ++e) ratio *= -qk;
        term *= ratio;
        if (term == 0.0) return sum; // terminating numerator parameter
        qk *= q.v;
        negligible = (std::fabs(term) <= ctrl.rel_tol * std::fabs(sum)) ? negligible + 1 : 0;
        if (negligible >= 3) return sum + term;
    }
    throw NonConvergence("rphis: series did not converge within max_terms");
}

LogSigned phi01_log_from_logz(double log_z, QBase q, SeriesControl ctrl) {
    // 0phi1(-;0;q;z) = sum_k q^{k(k-1)} z^k / (q;q)_k, all terms positive.
    const double lq = std::log(q.v);
    double lt = 0.0;   // log of current term
    double lmax = 0.0; // running max of log-terms
    double acc = 1.0;  // sum of exp(lt - lmax)
    double qk = q.v;   // q^{k+1}
    int falling = 0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        const double lnext = lt + 2.0 * k * lq + log_z - std::log1p(-qk);
        qk *= q.v;
        if (lnext > lmax) {
            acc = acc * std::exp(lmax - lnext) + 1.0;
            lmax = lnext;
            falling = 0;
        } else {
            acc += std::exp(lnext - lmax);
            falling = (lnext - lmax < std::log(ctrl.rel_tol)) ? falling + 1 : 0;
        }
        lt = lnext;
        if (falling >= 3) return LogSigned::from_log(lmax + std::log(acc));
    }
    throw NonConvergence("phi01_log: series did not converge within max_terms");
}

LogSigned phi01_log(double z, QBase q, SeriesControl ctrl) {
    if (z == 0.0) return LogSigned::one();
    if (!(z > 0.0)) throw DomainError("phi01_log: requires z >= 0");
    return phi01_log_from_logz(std::log(z), q, ctrl);
}

double eq_exp(double z, QBase q) {
    if (std::fabs(z) >= 1.0) throw DomainError("eq_exp: requires |z| < 1");
    const LogSigned p = qpoch(z, q, n_infinity);
    return (LogSigned::one() / p).to_double();
}

double Eq_exp(double z, QBase q) {
    return qpoch(-z, q, n_infinity).to_double();
}

double eq_exp_series(double z, QBase q, SeriesControl ctrl) {
    if (std::fabs(z) >= 1.0) throw DomainError("eq_exp_series: requires |z| < 1");
    double sum = 0.0, term = 1.0, qk = q.v;
    int negligible = 0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        sum += term;
        term *= z / (1.0 - qk);
        qk *= q.v;
        negligible = (std::fabs(term) <= ctrl.rel_tol * std::fabs(sum)) ? negligible + 1 : 0;
        if (negligible >= 3) return sum + term;
    }
    throw NonConvergence("eq_exp_series: no convergence within max_terms");
}

double Eq_exp_series(double z, QBase q, SeriesControl ctrl) {
    // E_q(z) = sum_k q^{k(k-1)/2} z^k / (q;q)_k
    double sum = 0.0, term = 1.0;
    double qk = 1.0, qk1 = q.v;
    int negligible = 0;
    for (int k = 0; k < ctrl.max_terms; ++k) {
        sum += term;
        term *= qk * z / (1.0 - qk1);
        qk *= q.v;
        qk1 *= q.v;
        negligible = (std::fabs(term) <= ctrl.rel_tol * std::fabs(sum)) ? negligible + 1 : 0;
        if (negligible >= 3) return sum + term;
    }
    throw NonConvergence("Eq_exp_series: no convergence within max_terms");
}

double psi01(double c, QBase q, double z, SeriesControl ctrl) {
    if (!(std::fabs(z) > std::fabs(c)))
        throw DomainError("psi01: requires |z| > |c|");
    if (z == 0.0) throw DomainError("psi01: z must be nonzero");
    const LogSigned num =
        qpoch(q.v, q, n_infinity, ctrl) * qpoch(z, q, n_infinity, ctrl) * qpoch(q.v / z, q, n_infinity, ctrl);
    const LogSigned den = qpoch(c, q, n_infinity, ctrl) * qpoch(c / z, q, n_infinity, ctrl);
    if (den.is_zero()) throw PoleError("psi01: denominator product vanishes");
    return (num / den).to_double();
}

double psi01_series(double c, QBase q, double z, int k_max) {
    // sum_{k=-k_max}^{k_max} (-1)^k q^{k(k-1)/2} z^k / (c;q)_k
    LogSigned acc = LogSigned::zero();
    const LogSigned lz = LogSigned::from_double(z);
    for (int k = -k_max; k <= k_max; ++k) {
        const double half = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
        LogSigned term = LogSigned::from_log(half * std::log(q.v), (k % 2 == 0) ? 1 : -1);
        term = term * lz.pow_int(k) / qpoch(c, q, k);
        acc = add(acc, term);
    }
    return acc.to_double();
}

} // namespace qbm::qseries
