#pragma once

#include <functional>

#include "qbm/contfrac.hpp"
#include "qbm/errors.hpp"

namespace qbm::birthdeath {

// Tail hypotheses certified analytically by the caller; they cannot be decided
// from finitely many rates, so nothing here tries to infer them numerically.
struct TailRegime {
    double rho_limit = 0.0;            // rho_{+-n} -> rho in (1, inf)
    bool beta_divergence_down = false; // beta_{-n} -> inf at the lower end
    bool rates_vanish_up = false;      // beta_n, delta_n -> 0 at the upper end
};

// Bilateral jump rates beta_n (up) and delta_n (down), indexed over Z.
struct BirthDeathRates {
    std::function<double(long)> beta;
    std::function<double(long)> delta;
    TailRegime regime;

    double rho(long n) const { return delta(n) / beta(n); }
};

enum class Method { continued_fraction };

struct LaplaceValue {
    double value;
    Method method;
    double error_estimate;
};

// Rates of the skip-free chain induced by a scattered scale window t_n:
// delta_n = 1/((t_n - t_{n-1})(t_{n+1} - t_{n-1})),
// beta_n  = 1/((t_{n+1} - t_n)(t_{n+1} - t_{n-1})).
BirthDeathRates rates_from_scattered_scale(std::function<double(long)> points,
                                           TailRegime regime = {});

// X-clock rates of the process on T_q: delta_n = q^{1-2n}, beta_n = q^{-2n}.
BirthDeathRates tq_rates(double q);

// H_n_down(lambda) = E^n[e^{-lambda tau_{n-1}}] via the minimal solution in the
// positive direction of U_{k+1} = (1 + rho_k + lambda/beta_k) U_k - rho_k U_{k-1},
// evaluated on the equivalence-transformed fraction whose coefficients vanish
// at the upper tail. Requires regime.rates_vanish_up with rho limit in (1,inf).
LaplaceValue h_down(const BirthDeathRates& r, long n, double lambda, double tol = 1e-12);

// H_n_up(lambda) = E^n[e^{-lambda tau_{n+1}}] for the chain killed at the lower
// accumulation point, via the minimal solution in the negative direction of
// U_{k-1} = (1 + 1/rho_k + lambda/delta_k) U_k - (1/rho_k) U_{k+1}.
// Requires regime.beta_divergence_down with rho limit in (1,inf).
LaplaceValue h_up(const BirthDeathRates& r, long n, double lambda, double tol = 1e-12);

// H_{n,m}(lambda) as the telescoped product of one-step transforms, accumulated
// in log space. m == n gives 1.
LaplaceValue h_path(const BirthDeathRates& r, long n, long m, double lambda, double tol = 1e-12);

} // namespace qbm::birthdeath
