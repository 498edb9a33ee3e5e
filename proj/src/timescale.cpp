#include "qbm/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>

namespace qbm::timescale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSnapRel = 1e-12;

bool near(double a, double b) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= kSnapRel * scale;
}

// ---- per-block membership ----

bool block_contains(const Interval& b, double x) { return x >= b.lo && x <= b.hi; }

bool block_contains(const Lattice& b, double x) {
    const double k = std::round((x - b.offset) / b.step);
    return near(b.offset + k * b.step, x);
}

bool block_contains(const Geometric& b, double x) {
    if (b.sign > 0 ? !(x > 0.0) : !(x < 0.0)) return false;
    const double k = std::round(std::log(std::fabs(x)) / std::log(b.ratio));
    return near(b.sign * std::pow(b.ratio, k), x);
}

bool block_contains(const SinglePoint& b, double x) { return near(b.v, x); }

// ---- per-block sup of elements (or closure points) strictly below w ----

std::optional<double> block_below(const Interval& b, double w) {
    if (w > b.hi) return b.hi;
    if (w > b.lo) return w; // sup of [lo, w) inside the interval
    return std::nullopt;
}

std::optional<double> block_below(const Lattice& b, double w) {
    double k = std::floor((w - b.offset) / b.step);
    double x = b.offset + k * b.step;
    while (x >= w || near(x, w)) { k -= 1.0; x = b.offset + k * b.step; }
    while (b.offset + (k + 1.0) * b.step < w && !near(b.offset + (k + 1.0) * b.step, w)) {
        k += 1.0; x = b.offset + k * b.step;
    }
    return x;
}

std::optional<double> block_below(const Geometric& b, double w) {
    const double lr = std::log(b.ratio);
    if (b.sign > 0) {
        if (!(w > 0.0)) return std::nullopt;
        double k = std::floor(std::log(w) / lr);
        double x = std::pow(b.ratio, k);
        while (x >= w || near(x, w)) { k -= 1.0; x = std::pow(b.ratio, k); }
        while (std::pow(b.ratio, k + 1.0) < w && !near(std::pow(b.ratio, k + 1.0), w)) {
            k += 1.0; x = std::pow(b.ratio, k);
        }
        return x;
    }
    // elements -ratio^k accumulate at 0 from below
    if (w >= 0.0) return 0.0; // closure point of the block
    const double aw = -w;
    double k = std::ceil(std::log(aw) / lr);
    while (!(std::pow(b.ratio, k) > aw) || near(std::pow(b.ratio, k), aw)) k += 1.0;
    while (k - 1.0 > -1e18 && std::pow(b.ratio, k - 1.0) > aw && !near(std::pow(b.ratio, k - 1.0), aw))
        k -= 1.0;
    return -std::pow(b.ratio, k);
}

std::optional<double> block_below(const SinglePoint& b, double w) {
    if (b.v < w && !near(b.v, w)) return b.v;
    return std::nullopt;
}

// ---- per-block inf of elements (or closure points) strictly above w ----

std::optional<double> block_above(const Interval& b, double w) {
    if (w < b.lo) return b.lo;
    if (w < b.hi) return w;
    return std::nullopt;
}

std::optional<double> block_above(const Lattice& b, double w) {
    double k = std::ceil((w - b.offset) / b.step);
    double x = b.offset + k * b.step;
    while (x <= w || near(x, w)) { k += 1.0; x = b.offset + k * b.step; }
    while (b.offset + (k - 1.0) * b.step > w && !near(b.offset + (k - 1.0) * b.step, w)) {
        k -= 1.0; x = b.offset + k * b.step;
    }
    return x;
}

std::optional<double> block_above(const Geometric& b, double w) {
    const double lr = std::log(b.ratio);
    if (b.sign > 0) {
        if (w <= 0.0) return 0.0; // closure point
        double k = std::ceil(std::log(w) / lr);
        double x = std::pow(b.ratio, k);
        while (x <= w || near(x, w)) { k += 1.0; x = std::pow(b.ratio, k); }
        while (std::pow(b.ratio, k - 1.0) > w && !near(std::pow(b.ratio, k - 1.0), w))
            { k -= 1.0; x = std::pow(b.ratio, k); }
        return x;
    }
    if (!(w < 0.0)) return std::nullopt;
    const double aw = -w;
    double k = std::floor(std::log(aw) / lr);
    while (!(std::pow(b.ratio, k) < aw) || near(std::pow(b.ratio, k), aw)) k -= 1.0;
    while (std::pow(b.ratio, k + 1.0) < aw && !near(std::pow(b.ratio, k + 1.0), aw)) k += 1.0;
    return -std::pow(b.ratio, k);
}

std::optional<double> block_above(const SinglePoint& b, double w) {
    if (b.v > w && !near(b.v, w)) return b.v;
    return std::nullopt;
}

void validate_block(const Block& blk) {
    if (const auto* iv = std::get_if<Interval>(&blk)) {
        if (!(iv->lo < iv->hi) && !(iv->lo == iv->hi))
            throw DomainError("timescale: interval requires lo <= hi");
    } else if (const auto* la = std::get_if<Lattice>(&blk)) {
        if (!(la->step > 0.0)) throw DomainError("timescale: lattice step must be > 0");
    } else if (const auto* ge = std::get_if<Geometric>(&blk)) {
        if (!(ge->ratio > 1.0)) throw DomainError("timescale: geometric ratio must be > 1");
        if (ge->sign != 1 && ge->sign != -1)
            throw DomainError("timescale: geometric sign must be +-1");
    }
}

std::string fmt(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_num(const std::string& tok) {
    if (tok == "inf") return kInf;
    if (tok == "-inf") return -kInf;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw DomainError("timescale: bad number '" + tok + "'");
    return v;
}

} // namespace

TimeScale::TimeScale(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw DomainError("timescale: no blocks");
    for (const auto& b : blocks_) validate_block(b);
    // A geometric block accumulates at 0; the union is closed only if 0 itself
    // belongs to some block.
    for (const auto& b : blocks_) {
        if (std::holds_alternative<Geometric>(b) && !contains(0.0))
            throw DomainError("timescale: geometric block requires 0 in the scale (closedness)");
    }
    // Disjointness for the decidable pairs: interval overlap and points/lattice
    // members landing inside another block's interval.
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const auto* iv = std::get_if<Interval>(&blocks_[i]);
        if (!iv) continue;
        for (size_t j = 0; j < blocks_.size(); ++j) {
            if (i == j) continue;
            if (const auto* jv = std::get_if<Interval>(&blocks_[j])) {
                if (i < j && std::max(iv->lo, jv->lo) < std::min(iv->hi, jv->hi))
                    throw DomainError("timescale: overlapping intervals");
            } else if (const auto* pt = std::get_if<SinglePoint>(&blocks_[j])) {
                if (pt->v > iv->lo && pt->v < iv->hi)
                    throw DomainError("timescale: point inside interval");
            } else if (const auto* la = std::get_if<Lattice>(&blocks_[j])) {
                const double k = std::ceil((iv->lo - la->offset) / la->step);
                if (la->offset + k * la->step < iv->hi)
                    throw DomainError("timescale: lattice meets interval interior");
            }
        }
    }
}

TimeScale TimeScale::real_line() { return TimeScale({Interval{-kInf, kInf}}); }
TimeScale TimeScale::integers() { return TimeScale({Lattice{1.0, 0.0}}); }
TimeScale TimeScale::tq(double q) {
    if (!(q > 1.0)) throw DomainError("timescale: tq requires q > 1");
    return TimeScale({Geometric{q, +1}, Geometric{q, -1}, SinglePoint{0.0}});
}

bool TimeScale::contains(double x) const {
    for (const auto& b : blocks_)
        if (std::visit([x](const auto& blk) { return block_contains(blk, x); }, b)) return true;
    return false;
}

double TimeScale::sup_below(double w) const {
    double best = -kInf;
    bool any = false;
    for (const auto& b : blocks_) {
        auto c = std::visit([w](const auto& blk) { return block_below(blk, w); }, b);
        if (c) { best = any ? std::max(best, *c) : *c; any = true; }
    }
    return any ? best : -kInf;
}

double TimeScale::inf_above(double w) const {
    double best = kInf;
    bool any = false;
    for (const auto& b : blocks_) {
        auto c = std::visit([w](const auto& blk) { return block_above(blk, w); }, b);
        if (c) { best = any ? std::min(best, *c) : *c; any = true; }
    }
    return any ? best : kInf;
}

std::pair<double, double> TimeScale::rho_sigma(double x) const {
    if (!contains(x)) throw MembershipError("timescale: point is not a member");
    double r = sup_below(x);
    double s = inf_above(x);
    // rho(x) = x exactly when x is left-dense; snap limits that equal x.
    if (near(r, x)) r = x;
    if (near(s, x)) s = x;
    return {r, s};
}

PointClass TimeScale::classify(double x) const {
    const auto [r, s] = rho_sigma(x);
    const bool ls = r != x; // left-scattered
    const bool rs = s != x;
    if (ls && rs) return PointClass::ss;
    if (ls) return PointClass::sd;
    if (rs) return PointClass::ds;
    return PointClass::dd;
}

double TimeScale::mu_mass(double u, double v) const {
    if (!contains(u) || !contains(v)) throw MembershipError("mu_mass: endpoints must be members");
    if (!(u < v)) throw OrderError("mu_mass: requires u < v");
    const auto [ru, su] = rho_sigma(u);
    const auto [rv, sv] = rho_sigma(v);
    (void)ru; (void)sv;
    return v - u - 0.5 * (su - u) - 0.5 * (v - rv);
}

double TimeScale::mu_first_moment(double u, double v) const {
    if (!contains(u) || !contains(v))
        throw MembershipError("mu_first_moment: endpoints must be members");
    if (!(u < v)) throw OrderError("mu_first_moment: requires u < v");
    const auto [ru, su] = rho_sigma(u);
    const auto [rv, sv] = rho_sigma(v);
    (void)ru; (void)sv;
    return 0.5 * (v * v - u * u) - u * 0.5 * (su - u) - v * 0.5 * (v - rv);
}

double TimeScale::generator_apply(const ScaleFn& f, double x) const {
    if (!f.value) throw DomainError("generator_apply: f.value missing");
    const auto [r, s] = rho_sigma(x);
    switch (classify(x)) {
    case PointClass::ss:
        return f.value(r) / ((x - r) * (s - r)) - f.value(x) / ((x - r) * (s - x)) +
               f.value(s) / ((s - x) * (s - r));
    case PointClass::sd:
        if (!f.d1) throw MissingDerivative("generator_apply: f' required at a right-dense point");
        return (f.value(r) - f.value(x)) / ((x - r) * (x - r)) + f.d1(x) / (x - r);
    case PointClass::ds:
        if (!f.d1) throw MissingDerivative("generator_apply: f' required at a left-dense point");
        return -f.d1(x) / (s - x) + (f.value(s) - f.value(x)) / ((s - x) * (s - x));
    case PointClass::dd:
    default:
        if (!f.d2) throw MissingDerivative("generator_apply: f'' required at a two-sided dense point");
        return 0.5 * f.d2(x);
    }
}

ExitLaw TimeScale::exit_law(double x, double r) const {
    if (!contains(x)) throw MembershipError("exit_law: x is not a member");
    if (!(r > 0.0)) throw DomainError("exit_law: radius must be > 0");
    const double y = sup_below(x - r);
    const double z = inf_above(x + r);
    if (!std::isfinite(y) || !std::isfinite(z))
        throw UnboundedError("exit_law: exit state does not exist on one side");
    ExitLaw e;
    e.lower = y;
    e.upper = z;
    e.p_down = (z - x) / (z - y);
    e.p_up = (x - y) / (z - y);
    e.mean_time = (x - y) * (z - x);
    return e;
}

bool TimeScale::unbounded_above() const {
    for (const auto& b : blocks_) {
        if (const auto* iv = std::get_if<Interval>(&b)) {
            if (iv->hi == kInf) return true;
        } else if (std::holds_alternative<Lattice>(b)) {
            return true;
        } else if (const auto* ge = std::get_if<Geometric>(&b)) {
            if (ge->sign > 0) return true;
        }
    }
    return false;
}

bool TimeScale::unbounded_below() const {
    for (const auto& b : blocks_) {
        if (const auto* iv = std::get_if<Interval>(&b)) {
            if (iv->lo == -kInf) return true;
        } else if (std::holds_alternative<Lattice>(b)) {
            return true;
        } else if (const auto* ge = std::get_if<Geometric>(&b)) {
            if (ge->sign < 0) return true;
        }
    }
    return false;
}

std::string TimeScale::serialize() const {
    std::ostringstream os;
    for (const auto& b : blocks_) {
        if (const auto* iv = std::get_if<Interval>(&b))
            os << "interval " << fmt(iv->lo) << ' ' << fmt(iv->hi) << '\n';
        else if (const auto* la = std::get_if<Lattice>(&b))
            os << "lattice " << fmt(la->step) << ' ' << fmt(la->offset) << '\n';
        else if (const auto* ge = std::get_if<Geometric>(&b))
            os << "geometric " << fmt(ge->ratio) << ' ' << ge->sign << '\n';
        else if (const auto* pt = std::get_if<SinglePoint>(&b))
            os << "point " << fmt(pt->v) << '\n';
    }
    return os.str();
}

TimeScale TimeScale::parse(std::istream& in) {
    std::vector<Block> blocks;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind.empty() || kind[0] == '#') continue;
        std::string t1, t2;
        if (kind == "interval") {
            ls >> t1 >> t2;
            blocks.push_back(Interval{parse_num(t1), parse_num(t2)});
        } else if (kind == "lattice") {
            ls >> t1 >> t2;
            blocks.push_back(Lattice{parse_num(t1), parse_num(t2)});
        } else if (kind == "geometric") {
            ls >> t1 >> t2;
            blocks.push_back(Geometric{parse_num(t1), static_cast<int>(parse_num(t2))});
        } else if (kind == "point") {
            ls >> t1;
            blocks.push_back(SinglePoint{parse_num(t1)});
        } else {
            throw DomainError("timescale: unknown block kind '" + kind + "'");
        }
    }
    return TimeScale(std::move(blocks));
}

TimeScale TimeScale::parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

double moment_formula(double x, int k, double t, double q) {
    if (!(q > 1.0)) throw DomainError("moment_formula: requires q > 1");
    if (k < 0) throw DomainError("moment_formula: requires k >= 0");
    if (!(t > 0.0)) throw DomainError("moment_formula: requires t > 0");
    const double c_q = (q - 1.0) * (q - 1.0) * (1.0 + q) / q;
    // finite (q;q)_j with the q > 1 process convention; use expm1 so q near 1
    // keeps full precision
    auto qq = [&](int j) {
        double p = 1.0;
        for (int i = 1; i <= j; ++i) p *= -std::expm1(i * std::log(q));
        return p;
    };
    const double qqk = qq(k);
    double sum = 0.0;
    for (int m = k % 2; m <= k; m += 2) {
        const int h = (k - m) / 2;
        double fact = 1.0;
        for (int i = 2; i <= h; ++i) fact *= i;
        const double coef = std::pow(c_q, -h) * (qqk / qq(m)) *
                            std::exp(0.25 * (static_cast<double>(m) * m - static_cast<double>(k) * k) * std::log(q)) *
                            std::pow(t, h) / fact;
        sum += coef * std::pow(x, m);
    }
    return sum;
}

} // namespace qbm::timescale
