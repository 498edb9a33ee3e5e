#include "qbm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "qbm/birthdeath.hpp"
#include "qbm/contfrac.hpp"
#include "qbm/qseries.hpp"
#include "qbm/sim.hpp"
#include "qbm/timescale.hpp"
#include "qbm/tq.hpp"

namespace qbm::validate {

namespace {

using qseries::QBase;

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

struct Worst {
    double v = 0.0;
    void note(double e) { v = std::max(v, e); }
};

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGLx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

template <typename F>
double gauss16(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += kGLw[i] * (f(c + h * kGLx[i]) + f(c - h * kGLx[i]));
    return s * h;
}

// integral over (0, inf) of a multi-scale integrand, by dyadic bands; stops
// once a band beyond t = 1 contributes less than band_tol
template <typename F>
double dyadic_integral(F&& f, int j_min, int j_max, double band_tol) {
    double total = gauss16(f, 0.0, std::ldexp(1.0, j_min));
    for (int j = j_min; j <= j_max; ++j) {
        const double a = std::ldexp(1.0, j), b = std::ldexp(1.0, j + 1);
        // split each octave for accuracy
        const double m = 0.5 * (a + b);
        const double v = gauss16(f, a, m) + gauss16(f, m, b);
        total += v;
        if (j > 0 && std::fabs(v) < band_tol) break;
    }
    return total;
}

} // namespace

CheckResult c01_qseries_identities(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(gen);
    };
    Worst qb, lim1, lim2, rec, tp;
    for (int it = 0; it < 200; ++it) {
        const QBase q(unif(0.05, 0.92));
        // q-binomial theorem
        {
            const double a = unif(-0.9, 0.9), z = unif(-0.9, 0.9);
            const double lhs = qseries::rphis({a}, {}, q, z);
            const double rhs = (qseries::qpoch(a * z, q, qseries::n_infinity) /
                                qseries::qpoch(z, q, qseries::n_infinity))
                                   .to_double();
            qb.note(rel_err(lhs, rhs));
        }
        // limit relation lim_{A} r+1phi_s(A, a; b; q; z/A) = rphis(a; b; q; z)
        {
            const double A = 1e8;
            const double a = unif(-0.8, 0.8), b = unif(-0.8, 0.8), z = unif(-0.8, 0.8);
            const double lhs = qseries::rphis({A, a}, {b}, q, z / A);
            const double rhs = qseries::rphis({a}, {b}, q, z);
            lim1.note(rel_err(lhs, rhs));
        }
        // limit relation lim_{B} rphi_{s+1}(a; B, b; q; B z) = rphis(a; b; q; z)
        {
            const double B = 1e8;
            const double a = unif(-0.8, 0.8), b = unif(-0.8, 0.8), z = unif(-0.8, 0.8);
            const double lhs = qseries::rphis({a}, {B, b}, q, B * z);
            const double rhs = qseries::rphis({a}, {b}, q, z);
            lim2.note(rel_err(lhs, rhs));
        }
        // e_q / E_q reciprocity
        {
            const double z = unif(-0.9, 0.9);
            rec.note(std::fabs(qseries::eq_exp(z, q) * qseries::Eq_exp(-z, q) - 1.0));
        }
        // triple-product extension, sum vs product; |c/z| kept <= 0.58 so the
        // |k| <= 60 bilateral truncation sits far below the 1e-9 gate
        {
            const double c = unif(-0.35, 0.35);
            const double sign = unif(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
            const double z = sign * unif(0.6, 0.95);
            const double lhs = qseries::psi01(c, q, z);
            const double rhs = qseries::psi01_series(c, q, z);
            tp.note(rel_err(lhs, rhs));
        }
    }
    const bool pass = qb.v < 1e-9 && lim1.v < 1e-6 && lim2.v < 1e-6 && rec.v < 1e-12 && tp.v < 1e-9;
    return {1, "q-series identity suite (200 draws each)", pass,
            "qbinom " + fmt("%.2e", qb.v) + ", limits " + fmt("%.2e", std::max(lim1.v, lim2.v)) +
                ", recip " + fmt("%.2e", rec.v) + ", triple " + fmt("%.2e", tp.v)};
}

CheckResult c02_cf_closed_form_agreement() {
    Worst w;
    for (double qv : {1.5, 2.0, 4.0}) {
        const tq::TqParams p(qv);
        for (double lam : {0.1, 1.0, 10.0}) {
            const double cf_down = tq::h0_down_cf(lam, p, 1e-13);
            const double d1 = tq::h0_down(lam, p, tq::HForm::phi01).value;
            const double d2 = tq::h0_down(lam, p, tq::HForm::phi11).value;
            w.note(rel_err(cf_down, d1));
            w.note(rel_err(cf_down, d2));
            w.note(rel_err(d1, d2));
            const double cf_up = tq::h0_up_cf(lam, p, 1e-13);
            const double u1 = tq::h0_up(lam, p).value;
            w.note(rel_err(cf_up, u1));
        }
    }
    return {2, "continued fraction vs closed forms on the (q, lambda) grid", w.v < 1e-9,
            "max rel err " + fmt("%.2e", w.v)};
}

CheckResult c03_small_lambda_limits() {
    const tq::TqParams p(2.0);
    const double down = tq::h0_down(1e-8, p).value;
    const double up = tq::h0_up(1e-8, p).value;
    const double e1 = std::fabs(down - 1.0);
    const double e2 = std::fabs(up - 1.0 / p.q);
    return {3, "lambda -> 0 limits: H0_down -> 1, H0_up -> 1/q", e1 < 1e-4 && e2 < 1e-4,
            "down " + fmt("%.2e", e1) + ", up " + fmt("%.2e", e2)};
}

CheckResult c04_scaling_laws() {
    const tq::TqParams p(2.0);
    Worst w;
    for (double lam : {0.3, 1.0, 2.7}) {
        for (auto [n, m] : {std::pair<long, long>{0, -1}, {2, -1}, {-1, 3}, {1, 4}}) {
            const double a = tq::h_nm(n + 1, m + 1, lam, p).value;
            const double b = tq::h_nm(n, m, p.q * p.q * lam, p).value;
            w.note(rel_err(a, b));
        }
        w.note(rel_err(tq::psi_exponent(p.base * lam, p), tq::psi_exponent(lam, p) / p.q));
        w.note(rel_err(tq::psi_exponent(1.0 / lam, p), tq::psi_exponent(lam, p) / lam));
    }
    return {4, "scaling identities for h_nm and psi", w.v < 1e-12,
            "max rel err " + fmt("%.2e", w.v)};
}

CheckResult c05_excursion_consistency() {
    const tq::TqParams p(2.0);
    Worst w;
    for (double lam : {0.5, 1.0, 2.0})
        w.note(rel_err(tq::psi_exponent_sum(lam, p, 40), tq::psi_exponent(lam, p)));
    return {5, "entrance-law sum equals psi (|n| <= 40)", w.v < 1e-8,
            "max rel err " + fmt("%.2e", w.v)};
}

CheckResult c06_density_validation() {
    const tq::TqParams p(2.0);
    const double mass =
        dyadic_integral([&](double t) { return t <= 0.0 ? 0.0 : tq::tau_zero_density(0, t, p); },
                        -20, 60, 3e-9);
    const double e_mass = std::fabs(mass - 1.0);
    Worst lt;
    for (double lam : {0.5, 1.0, 2.0}) {
        const double v = dyadic_integral(
            [&](double t) {
                return t <= 0.0 ? 0.0 : std::exp(-lam * t) * tq::tau_zero_density(0, t, p);
            },
            -20, 14, 1e-12);
        lt.note(std::fabs(v - tq::h_to_zero(0, lam, p).value));
    }
    return {6, "hitting density: normalization and Laplace transform", e_mass < 1e-6 && lt.v < 1e-6,
            "mass err " + fmt("%.2e", e_mass) + ", LT err " + fmt("%.2e", lt.v)};
}

CheckResult c07_resolvent_suite() {
    const tq::TqParams p(2.0);
    const double lam = 1.0;
    Worst db;
    // 10-state window {+-q^n : n in [-2, 2]}
    std::vector<tq::TqState> states;
    for (long n = -2; n <= 2; ++n) {
        states.push_back(tq::TqState::pos(n));
        states.push_back(tq::TqState::neg(n));
    }
    auto mu_of = [&](const tq::TqState& s) { return tq::mu_point(s.n, p); };
    for (const auto& x : states)
        for (const auto& y : states) {
            const double a = mu_of(x) * tq::resolvent_full(x, y, lam, p);
            const double b = mu_of(y) * tq::resolvent_full(y, x, lam, p);
            db.note(rel_err(a, b));
        }
    double total = 0.0;
    for (long n = -80; n <= 80; ++n) {
        total += tq::resolvent_full(tq::TqState::pos(0), tq::TqState::pos(n), lam, p);
        total += tq::resolvent_full(tq::TqState::pos(0), tq::TqState::neg(n), lam, p);
    }
    const double e_mass = std::fabs(lam * total - 1.0);
    double killed = 0.0;
    for (long n = -60; n <= 60; ++n) killed += tq::resolvent_killed(0, n, lam, p);
    const double e_killed = std::fabs(lam * killed - (1.0 - tq::h_to_zero(0, lam, p).value));
    const bool pass = db.v < 1e-9 && e_mass < 1e-5 && e_killed < 1e-6;
    return {7, "resolvent detailed balance and mass identities", pass,
            "balance " + fmt("%.2e", db.v) + ", mass " + fmt("%.2e", e_mass) + ", killed " +
                fmt("%.2e", e_killed)};
}

CheckResult c08_monte_carlo_cross_validation(std::uint64_t seed) {
    const tq::TqParams p(2.0);
    const double lam = 1.0;
    const long n_paths = 100000;
    Worst sigmas;
    std::string detail;

    auto compare = [&](const char* tag, sim::McEstimate est, double target) {
        const double s = std::fabs(est.mean - target) / est.std_error;
        sigmas.note(s);
        detail += std::string(tag) + " " + fmt("%.2f", s) + "se ";
    };
    compare("down", sim::estimate_laplace(sim::HitKind::down, 0, -1, lam, p, n_paths, {seed, 0}),
            tq::h0_down(lam, p).value);
    compare("up", sim::estimate_laplace(sim::HitKind::up, 0, 1, lam, p, n_paths, {seed, 1000}),
            tq::h0_up(lam, p).value);
    compare("tozero",
            sim::estimate_laplace(sim::HitKind::to_zero, 0, 0, lam, p, n_paths, {seed, 2000}),
            tq::h_to_zero(0, lam, p).value);
    compare("martingale", sim::martingale_stat(1.0, -12, p, n_paths, {seed, 3000}), 1.0);
    compare("qv", sim::quadratic_variation_stat(1.0, -12, p, n_paths, {seed, 4000}), 1.0);
    return {8, "Monte Carlo vs closed forms (10^5 paths, 3 SE)", sigmas.v <= 3.0, detail};
}

CheckResult c09_floor_splice_invariance(std::uint64_t seed) {
    const tq::TqParams p(2.0);
    const long n_draws = 10000;
    auto a = sim::sample_tau_zero_via_path(0, -6, p, n_draws, {seed, 5000});
    auto b = sim::sample_tau_zero_via_path(0, -10, p, n_draws, {seed, 6000});
    const double ks = sim::ks_two_sample(std::move(a), std::move(b));
    return {9, "tau_0 law invariant under floor placement {-6, -10}", ks < 0.02,
            "KS " + fmt("%.4f", ks)};
}

CheckResult c10_brownian_moment_limit() {
    const double q = 1.0 + 1e-4;
    Worst w;
    const double gaussian[7] = {1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0};
    for (int k = 2; k <= 6; k += 2)
        w.note(rel_err(timescale::moment_formula(0.0, k, 1.0, q), gaussian[k]));
    for (int k = 1; k <= 5; k += 2)
        w.note(std::fabs(timescale::moment_formula(0.0, k, 1.0, q)));
    return {10, "moments at q = 1+1e-4 match Gaussian moments (k <= 6)", w.v < 1e-3,
            "max rel err " + fmt("%.2e", w.v)};
}

CheckResult c11_gumbel_statistic(std::uint64_t seed) {
    // the target density must itself integrate to 1
    const double norm = dyadic_integral(
        [](double u) {
            const double x = u - 20.0; // shift (0,inf) band layout onto the real line
            return std::exp(-0.5 * (x + std::exp(-x))) / std::sqrt(2.0 * M_PI);
        },
        -4, 7, 1e-14);
    const double e_norm = std::fabs(norm - 1.0);
    const auto ks = sim::gumbel_limit_check({1.01}, 100000, {seed, 7000});
    const bool pass = ks[0] < 0.05 && e_norm < 1e-8;
    return {11, "limit-law statistic at q = 1.01 (statistical criterion)", pass,
            "KS " + fmt("%.4f", ks[0]) + ", density norm err " + fmt("%.2e", e_norm)};
}

CheckResult c12_time_scale_identities() {
    Worst w;
    // mu identities vs direct atom summation on Z and T_q windows
    {
        const auto z = timescale::TimeScale::integers();
        for (long u = -3; u <= 1; ++u)
            for (long v = u + 1; v <= u + 5; ++v) {
                double atoms = 0.0, first = 0.0;
                for (long k = u + 1; k < v; ++k) { atoms += 1.0; first += k; }
                w.note(std::fabs(z.mu_mass(u, v) - atoms));
                w.note(std::fabs(z.mu_first_moment(u, v) - first));
            }
    }
    {
        const double q = 2.0;
        const auto ts = timescale::TimeScale::tq(q);
        for (long u = -2; u <= 1; ++u)
            for (long v = u + 1; v <= u + 4; ++v) {
                double atoms = 0.0, first = 0.0;
                for (long k = u + 1; k < v; ++k) {
                    const double mass = 0.5 * (std::pow(q, k + 1) - std::pow(q, k - 1));
                    atoms += mass;
                    first += mass * std::pow(q, k);
                }
                const double a = std::pow(q, u), b = std::pow(q, v);
                w.note(std::fabs(ts.mu_mass(a, b) - atoms));
                w.note(std::fabs(ts.mu_first_moment(a, b) - first));
            }
    }
    // the three worked exit laws
    {
        const auto z = timescale::TimeScale::integers();
        const auto e = z.exit_law(0.0, 0.5);
        w.note(std::fabs(e.p_down - 0.5));
        w.note(std::fabs(e.p_up - 0.5));
        w.note(std::fabs(e.mean_time - 1.0));
    }
    {
        const auto r = timescale::TimeScale::real_line();
        const auto e = r.exit_law(0.0, 1.0);
        w.note(std::fabs(e.p_down - 0.5));
        w.note(std::fabs(e.mean_time - 1.0));
    }
    {
        const auto ts = timescale::TimeScale::tq(2.0);
        const auto e = ts.exit_law(1.0, 0.4);
        w.note(std::fabs(e.p_down - 2.0 / 3.0));
        w.note(std::fabs(e.p_up - 1.0 / 3.0));
        w.note(std::fabs(e.mean_time - 0.5));
    }
    // generator on T_q: Gf = 0 for f(x) = x, Gf = 1 for f(x) = x^2
    {
        const auto ts = timescale::TimeScale::tq(2.0);
        const tq::TqParams p(2.0);
        timescale::ScaleFn ident{[](double x) { return x; }, nullptr, nullptr};
        timescale::ScaleFn square{[](double x) { return x * x; }, nullptr, nullptr};
        for (long n : {-2L, 0L, 3L}) {
            const double x = std::pow(2.0, n);
            // xi-generator three-point value, times c_q to land on the X normalization
            w.note(std::fabs(p.c_q * ts.generator_apply(ident, x) - 0.0));
            w.note(std::fabs(ts.generator_apply(square, x) - 1.0));
            w.note(std::fabs(p.c_q * ts.generator_apply(ident, -x) - 0.0));
            w.note(std::fabs(ts.generator_apply(square, -x) - 1.0));
        }
    }
    return {12, "time-scale mu/exit/generator identities", w.v < 1e-12,
            "max abs err " + fmt("%.2e", w.v)};
}

CheckResult cf_identities(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(gen);
    };
    Worst w;
    for (int it = 0; it < 50; ++it) {
        // random loxodromic-ish spec with positive coefficients
        std::vector<double> av(64), bv(64);
        for (int i = 0; i < 64; ++i) {
            av[i] = unif(0.2, 1.0);
            bv[i] = unif(2.5, 4.0);
        }
        contfrac::RecurrenceSpec spec;
        spec.a = [av](long k) { return av[static_cast<size_t>(k)]; };
        spec.b = [bv](long k) { return bv[static_cast<size_t>(k)]; };
        // forward P/Q route: S(w) = (P_d + w P_{d-1}) / (Q_d + w Q_{d-1})
        for (int depth : {1, 5, 17, 30}) {
            double pm1 = 1.0, pp = 0.0, qm1 = 0.0, qq = 1.0;
            for (int j = 0; j < depth; ++j) {
                // fraction numerators are a_k with subtracted tails, i.e. the
                // recurrence X_j = b X_{j-1} - a X_{j-2} run on (P, Q)
                const double aj = av[j], bj = bv[j];
                const double pn = bj * pp - aj * pm1;
                const double qn = bj * qq - aj * qm1;
                pm1 = pp; pp = pn;
                qm1 = qq; qq = qn;
            }
            const double tail = unif(-0.5, 0.5);
            // W-form value relates to the paper's S-composition by sign flips
            const double forward = -(pp + (-tail) * pm1) / (qq + (-tail) * qm1);
            const double backward = contfrac::modified_approximant(spec, 0, depth, tail);
            w.note(rel_err(backward, forward));
        }
        // equivalence transform preserves every approximant when c_{-1} = 1
        std::vector<double> cv(64);
        for (int i = 0; i < 64; ++i) cv[i] = unif(0.25, 4.0);
        auto c = [cv](long k) { return k < 0 ? 1.0 : cv[static_cast<size_t>(k)]; };
        const auto t = contfrac::equivalence_transform(
            contfrac::RecurrenceSpec{spec.a, spec.b, contfrac::Direction::positive}, c);
        for (int depth : {1, 2, 7, 20})
            w.note(rel_err(contfrac::classical_approximant(t, 0, depth),
                           contfrac::classical_approximant(spec, 0, depth)));
    }
    return {0, "recurrence/fraction identities (P-Q form, equivalence transforms)", w.v < 1e-12,
            "max rel err " + fmt("%.2e", w.v)};
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
    return {c01_qseries_identities(seed),
            c02_cf_closed_form_agreement(),
            c03_small_lambda_limits(),
            c04_scaling_laws(),
            c05_excursion_consistency(),
            c06_density_validation(),
            c07_resolvent_suite(),
            c08_monte_carlo_cross_validation(seed),
            c09_floor_splice_invariance(seed),
            c10_brownian_moment_limit(),
            c11_gumbel_statistic(seed),
            c12_time_scale_identities()};
}

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed) {
    if (suite == "all") {
        auto v = run_all(seed);
        v.push_back(cf_identities(seed));
        return v;
    }
    if (suite == "identities")
        return {c01_qseries_identities(seed), cf_identities(seed), c10_brownian_moment_limit(),
                c12_time_scale_identities()};
    if (suite == "hitting")
        return {c02_cf_closed_form_agreement(), c03_small_lambda_limits(), c04_scaling_laws()};
    if (suite == "excursion")
        return {c05_excursion_consistency(), c06_density_validation(), c07_resolvent_suite()};
    if (suite == "montecarlo")
        return {c08_monte_carlo_cross_validation(seed), c09_floor_splice_invariance(seed),
                c11_gumbel_statistic(seed)};
    throw DomainError("validate: unknown suite '" + suite + "'");
}

} // namespace qbm::validate
