#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm::timescale {

// Left/right scattered (s) or dense (d) classification of a point.
enum class PointClass { ss, sd, ds, dd };

// Symbolic building blocks. Membership and neighbor queries are resolved from
// the block description, never from an enumerated point list, so the ss/sd/ds/dd
// classification cannot drift with float noise.
struct Interval {
    double lo, hi; // closed; lo may be -inf and hi may be +inf
};
struct Lattice {
    double step, offset; // {offset + k*step : k in Z}, step > 0
};
struct Geometric {
    double ratio; // > 1
    int sign;     // {sign * ratio^k : k in Z}; accumulates at 0
};
struct SinglePoint {
    double v;
};
using Block = std::variant<Interval, Lattice, Geometric, SinglePoint>;

// Caller-supplied function on the scale. Derivatives are only consulted on
// dense sides; no numerical differentiation happens internally.
struct ScaleFn {
    std::function<double(double)> value;
    std::function<double(double)> d1; // may be empty
    std::function<double(double)> d2; // may be empty
};

struct ExitLaw {
    double p_down, p_up, mean_time;
    double lower, upper; // the two exit states y = rho(x-r), z = sigma(x+r)
};

class TimeScale {
public:
    explicit TimeScale(std::vector<Block> blocks);

    static TimeScale real_line();
    static TimeScale integers();
    static TimeScale tq(double q); // {+-q^k : k in Z} united with {0}

    bool contains(double x) const;

    // sup{y in T : y < w} and inf{y in T : y > w} for arbitrary real w;
    // +-inf when the side is empty.
    double sup_below(double w) const;
    double inf_above(double w) const;

    // (rho(x), sigma(x)) for a member x; equal to x on dense sides.
    std::pair<double, double> rho_sigma(double x) const;
    PointClass classify(double x) const;

    // mu((u,v)) and int_(u,v) a mu(da) by the closed forms
    // v - u - (sigma(u)-u)/2 - (v-rho(v))/2 and
    // v^2/2 - u^2/2 - u (sigma(u)-u)/2 - v (v-rho(v))/2.
    double mu_mass(double u, double v) const;
    double mu_first_moment(double u, double v) const;

    // The generalized second-derivative generator, four-case form.
    double generator_apply(const ScaleFn& f, double x) const;

    // Exit data from the ball of radius r: probabilities to exit low/high and
    // the mean exit time (x-y)(z-x).
    ExitLaw exit_law(double x, double r) const;

    bool unbounded_above() const;
    bool unbounded_below() const;

    // One block per line: "interval lo hi", "lattice step offset",
    // "geometric q sign", "point v".
    std::string serialize() const;
    static TimeScale parse(std::istream& in);
    static TimeScale parse(const std::string& text);

    const std::vector<Block>& blocks() const { return blocks_; }

private:
    std::vector<Block> blocks_;
};

// Moment formula of the T_q process (q > 1 process convention, finite
// (q;q)_k products): E^x[xi_t^k] as a closed sum over m <= k of equal parity.
double moment_formula(double x, int k, double t, double q);

} // namespace qbm::timescale
