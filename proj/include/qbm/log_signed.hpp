#pragma once

#include <cmath>

namespace qbm {

// Signed value carried in log space: sign * exp(log_mag). sign == 0 encodes an
// exact zero and log_mag is then meaningless. Survives factors like q^{n^2}
// that overflow double long before a final ratio is formed.
struct LogSigned {
    double log_mag = 0.0;
    int sign = 0;

    LogSigned() = default;
    LogSigned(double lm, int s) : log_mag(lm), sign(s) {}

    static LogSigned zero() { return {0.0, 0}; }
    static LogSigned one() { return {0.0, 1}; }

    static LogSigned from_double(double x) {
        if (x == 0.0) return zero();
        return {std::log(std::fabs(x)), x > 0.0 ? 1 : -1};
    }
    static LogSigned from_log(double lm, int s = 1) { return {lm, s}; }

    bool is_zero() const { return sign == 0; }

    // Underflows to 0 and overflows to +-inf like ordinary doubles would.
    double to_double() const {
        if (sign == 0) return 0.0;
        return static_cast<double>(sign) * std::exp(log_mag);
    }

    friend LogSigned operator*(const LogSigned& a, const LogSigned& b) {
        if (a.sign == 0 || b.sign == 0) return zero();
        return {a.log_mag + b.log_mag, a.sign * b.sign};
    }
    friend LogSigned operator/(const LogSigned& a, const LogSigned& b) {
        if (a.sign == 0) return zero();
        return {a.log_mag - b.log_mag, a.sign * b.sign};
    }
    LogSigned& operator*=(const LogSigned& o) { *this = *this * o; return *this; }
    LogSigned& operator/=(const LogSigned& o) { *this = *this / o; return *this; }
    LogSigned operator-() const { return {log_mag, -sign}; }

    LogSigned pow_int(long k) const {
        if (sign == 0) return k == 0 ? one() : zero();
        const int s = (sign < 0 && (k & 1L)) ? -1 : 1;
        return {log_mag * static_cast<double>(k), s};
    }

    // Signed addition via max-factoring.
    friend LogSigned add(const LogSigned& a, const LogSigned& b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        const LogSigned& hi = (a.log_mag >= b.log_mag) ? a : b;
        const LogSigned& lo = (a.log_mag >= b.log_mag) ? b : a;
        const double r = static_cast<double>(hi.sign) +
                         static_cast<double>(lo.sign) * std::exp(lo.log_mag - hi.log_mag);
        if (r == 0.0) return zero();
        return {hi.log_mag + std::log(std::fabs(r)), r > 0.0 ? 1 : -1};
    }
};

} // namespace qbm
