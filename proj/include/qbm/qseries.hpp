#pragma once

#include <limits>
#include <vector>

#include "qbm/errors.hpp"
#include "qbm/log_signed.hpp"

namespace qbm::qseries {

// Base parameter for series and products. All q-series machinery here uses the
// 0 < q < 1 convention; the process parameter q > 1 of the T_q modules maps to
// base q^{-2} (and occasionally q^{-1}) before reaching this layer.
struct QBase {
    double v;
    explicit QBase(double value) : v(value) {
        if (!(value > 0.0) || !(value < 1.0))
            throw DomainError("QBase: base must lie in (0,1)");
    }
};

struct SeriesControl {
    double rel_tol = 1e-14;
    int max_terms = 10000;
};

// Sentinel for n = infinity in qpoch.
inline constexpr long n_infinity = std::numeric_limits<long>::max();

// q-shifted factorial (z; q)_n for n in Z or n_infinity, in log-signed form.
// Finite n >= 0 is the plain product; n < 0 uses the (z;q)_k = (z;q)_inf /
// (z q^k; q)_inf extension; n = infinity truncates once |z q^k| stays below
// 1e-17 for three consecutive factors.
LogSigned qpoch(double z, QBase q, long n, SeriesControl ctrl = {});

// Basic hypergeometric series rphis(a_1..a_r; b_1..b_s; q; z).
// Requires r <= s+1, |z| < 1 when r == s+1, and no b_j of the form q^{-k}.
double rphis(const std::vector<double>& a, const std::vector<double>& b, QBase q,
             double z, SeriesControl ctrl = {});

// 0phi1(-; 0; q; z) for z >= 0 in log space; log_z may be supplied directly so
// arguments far beyond double range are usable.
LogSigned phi01_log(double z, QBase q, SeriesControl ctrl = {});
LogSigned phi01_log_from_logz(double log_z, QBase q, SeriesControl ctrl = {});

// q-exponentials: e_q(z) = 1/(z;q)_inf (|z| < 1), E_q(z) = (-z;q)_inf.
double eq_exp(double z, QBase q);
double Eq_exp(double z, QBase q);
// Series routes, kept as independent cross-checks of the product forms.
double eq_exp_series(double z, QBase q, SeriesControl ctrl = {});
double Eq_exp_series(double z, QBase q, SeriesControl ctrl = {});

// Bilateral 0psi1(-; c; q; z) for |z| > |c| by the closed triple-product form
// (q, z, q/z; q)_inf / (c, c/z; q)_inf.
double psi01(double c, QBase q, double z, SeriesControl ctrl = {});
// Symmetrically truncated bilateral sum; retained as a cross-check oracle.
double psi01_series(double c, QBase q, double z, int k_max = 60);

} // namespace qbm::qseries
