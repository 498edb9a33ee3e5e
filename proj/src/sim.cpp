#include "qbm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "qbm/qseries.hpp"

namespace qbm::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr long kBlockSize = 4096;

// Deterministic block partition: block b draws from stream base+b; partial
// moments are reduced in block order, so thread count never changes results.
template <typename PerSample>
McEstimate run_moments(long n_samples, RngStream base, Exec exec, PerSample&& per_sample) {
    if (n_samples < 1) throw DomainError("sim: n_samples must be >= 1");
    const long blocks = (n_samples + kBlockSize - 1) / kBlockSize;
    std::vector<double> s1(blocks, 0.0), s2(blocks, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
#endif
    for (long b = 0; b < blocks; ++b) {
        Rng rng(RngStream{base.master_seed, base.stream_index + static_cast<std::uint64_t>(b)});
        const long lo = b * kBlockSize;
        const long hi = std::min(n_samples, lo + kBlockSize);
        double a1 = 0.0, a2 = 0.0;
        for (long i = lo; i < hi; ++i) {
            const double x = per_sample(rng);
            a1 += x;
            a2 += x * x;
        }
        s1[b] = a1;
        s2[b] = a2;
    }
    double t1 = 0.0, t2 = 0.0;
    for (long b = 0; b < blocks; ++b) { t1 += s1[b]; t2 += s2[b]; }
    McEstimate e;
    e.n_samples = n_samples;
    e.mean = t1 / n_samples;
    const double var = std::max(0.0, t2 / n_samples - e.mean * e.mean);
    e.std_error = std::sqrt(var / n_samples);
    return e;
}

template <typename PerSample>
std::vector<double> run_samples(long n_samples, RngStream base, Exec exec, PerSample&& per_sample) {
    if (n_samples < 1) throw DomainError("sim: n_samples must be >= 1");
    std::vector<double> out(n_samples);
    const long blocks = (n_samples + kBlockSize - 1) / kBlockSize;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
#endif
    for (long b = 0; b < blocks; ++b) {
        Rng rng(RngStream{base.master_seed, base.stream_index + static_cast<std::uint64_t>(b)});
        const long lo = b * kBlockSize;
        const long hi = std::min(n_samples, lo + kBlockSize);
        for (long i = lo; i < hi; ++i) out[i] = per_sample(rng);
    }
    return out;
}

struct QPoissonKey {
    double q;
    bool operator<(const QPoissonKey& o) const { return q < o.q; }
};

const std::vector<double>& q_poisson_table(const tq::TqParams& p) {
    static std::map<QPoissonKey, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p.q});
    if (it != cache.end()) return it->second;

    // weights w_k = q^{-k}/(q^{-2};q^{-2})_k, accumulated until the tail is
    // negligible, then normalized into a CDF
    std::vector<double> cdf;
    double w = 1.0, total = 0.0, qh = p.base;
    for (int k = 0; k < 2000000; ++k) {
        total += w;
        cdf.push_back(total);
        const double ratio = (1.0 / p.q) / (1.0 - qh);
        w *= ratio;
        qh *= p.base;
        if (ratio < 1.0 && w / (1.0 - ratio) < 1e-16 * total) break;
    }
    for (double& c : cdf) c /= total;
    cdf.back() = 1.0;
    return cache.emplace(QPoissonKey{p.q}, std::move(cdf)).first->second;
}

} // namespace

Rng::Rng(RngStream s) {
    std::uint64_t x = s.master_seed ^ (0x9E3779B97F4A7C15ULL * (s.stream_index + 1));
    // burn the splitmix chain into a full mt19937_64 seed sequence
    std::seed_seq seq{splitmix64(x), splitmix64(x), splitmix64(x), splitmix64(x),
                      splitmix64(x), splitmix64(x), splitmix64(x), splitmix64(x)};
    eng_.seed(seq);
}

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::exponential() {
    // u in [0,1) so 1-u in (0,1]; -log1p(-u) never hits log(0)
    return -std::log1p(-uniform());
}

const std::vector<double>& q_poisson_cdf(const tq::TqParams& p) { return q_poisson_table(p); }

int sample_q_poisson(const tq::TqParams& p, Rng& rng) {
    const auto& cdf = q_poisson_table(p);
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(it - cdf.begin());
}

double sample_tau_zero(long n, const tq::TqParams& p, Rng& rng, double tail_tol) {
    if (!(tail_tol > 0.0)) throw DomainError("sample_tau_zero: tail_tol must be > 0");
    const int N = sample_q_poisson(p, rng);
    const double qm2 = p.base;
    double sum = 0.0, w = 1.0;
    // expected tail after term i is q^{-2(i+1)}/(1-q^{-2})
    for (int i = 0; i < 1000000; ++i) {
        sum += w * rng.exponential();
        w *= qm2;
        if (w / (1.0 - qm2) < tail_tol * sum && i >= 1) break;
    }
    const double scale = std::exp((2.0 * n + 2.0 * N - 1.0) * std::log(p.q));
    return scale * sum;
}

PathRecord simulate_path(tq::TqState start, double horizon, long floor_exponent,
                         const tq::TqParams& p, RngStream rng_stream,
                         std::optional<long> target_exponent) {
    if (start.kind == tq::TqState::Kind::zero)
        throw DomainError("simulate_path: start must be nonzero");
    if (!(horizon > 0.0)) throw DomainError("simulate_path: horizon must be > 0");
    if (floor_exponent >= start.n)
        throw DomainError("simulate_path: floor must lie below the start exponent");
    Rng rng(rng_stream);

    const bool mirror = start.kind == tq::TqState::Kind::negative;
    auto state_of = [&](long e) {
        return mirror ? tq::TqState::neg(e) : tq::TqState::pos(e);
    };

    PathRecord rec;
    rec.states.push_back(start);
    double t = 0.0;
    long e = start.n;
    const double p_down = p.q / (1.0 + p.q);
    for (;;) {
        const double rate = (1.0 + p.q) * std::exp(-2.0 * e * std::log(p.q));
        const double hold = rng.exponential() / rate;
        if (t + hold >= horizon) {
            rec.terminated_by = PathRecord::Termination::time_horizon;
            return rec;
        }
        t += hold;
        e += (rng.uniform() < p_down) ? -1 : +1;
        rec.jump_times.push_back(t);
        rec.states.push_back(state_of(e));
        if (target_exponent && e == *target_exponent) {
            rec.terminated_by = PathRecord::Termination::hit_target;
            return rec;
        }
        if (e <= floor_exponent) {
            // exact residual hitting-time draw; positions below the floor are
            // not resolved, only the total time to 0
            const double residual = sample_tau_zero(e, p, rng);
            t += residual;
            rec.jump_times.push_back(t);
            rec.states.push_back(tq::TqState::zero());
            rec.terminated_by = PathRecord::Termination::hit_floor_spliced;
            return rec;
        }
    }
}

namespace {

// One e^{-lambda tau} sample for the three hit kinds. Up-paths that fall a
// kill_gap below the start are treated as killed (they hit 0 first with
// probability 1 - q^{-gap}; the neglected re-climb mass is < q^{-gap}).
double laplace_sample(HitKind kind, long n, long m, double lambda, const tq::TqParams& p,
                      Rng& rng) {
    const double p_down = p.q / (1.0 + p.q);
    const double l2q = 2.0 * std::log(p.q);
    double t = 0.0;
    long e = n;
    switch (kind) {
    case HitKind::to_zero: {
        const long floor_e = n - 24;
        for (;;) {
            const double rate = (1.0 + p.q) * std::exp(-e * l2q);
            t += rng.exponential() / rate;
            e += (rng.uniform() < p_down) ? -1 : +1;
            if (e <= floor_e) {
                t += sample_tau_zero(e, p, rng);
                return std::exp(-lambda * t);
            }
        }
    }
    case HitKind::down:
        if (m >= n) throw DomainError("estimate_laplace: down kind requires m < n");
        for (;;) {
            const double rate = (1.0 + p.q) * std::exp(-e * l2q);
            t += rng.exponential() / rate;
            e += (rng.uniform() < p_down) ? -1 : +1;
            if (e == m) return lambda == 0.0 ? 1.0 : std::exp(-lambda * t);
        }
    case HitKind::up:
    default: {
        if (m <= n) throw DomainError("estimate_laplace: up kind requires m > n");
        const long gap = std::max<long>(40, static_cast<long>(std::ceil(70.0 / std::log2(p.q))));
        const long kill_e = n - gap;
        for (;;) {
            const double rate = (1.0 + p.q) * std::exp(-e * l2q);
            t += rng.exponential() / rate;
            e += (rng.uniform() < p_down) ? -1 : +1;
            if (e == m) return std::exp(-lambda * t);
            if (e <= kill_e) return 0.0;
        }
    }
    }
}

} // namespace

McEstimate estimate_laplace(HitKind kind, long n, long m, double lambda, const tq::TqParams& p,
                            long n_samples, RngStream rng, Exec exec) {
    if (lambda < 0.0) throw DomainError("estimate_laplace: lambda must be >= 0");
    if (n_samples < 100) throw DomainError("estimate_laplace: n_samples must be >= 100");
    return run_moments(n_samples, rng, exec,
                       [&](Rng& r) { return laplace_sample(kind, n, m, lambda, p, r); });
}

namespace {

// X at min(horizon, tau_0) from q^0, plus the stopped time, in one pass.
// Spliced paths whose total tau_0 overshoots the horizon sit below the floor
// at the horizon; their position is bounded by q^{floor}, treated as 0.
struct StoppedSample {
    double x;
    double time;
};

StoppedSample stopped_path_sample(double horizon, long floor_e, const tq::TqParams& p, Rng& rng) {
    const double p_down = p.q / (1.0 + p.q);
    const double l2q = 2.0 * std::log(p.q);
    double t = 0.0;
    long e = 0;
    for (;;) {
        const double rate = (1.0 + p.q) * std::exp(-e * l2q);
        const double hold = rng.exponential() / rate;
        if (t + hold >= horizon) return {std::exp(e * 0.5 * l2q), horizon};
        t += hold;
        e += (rng.uniform() < p_down) ? -1 : +1;
        if (e <= floor_e) {
            const double tau = t + sample_tau_zero(e, p, rng);
            if (tau >= horizon) return {0.0, horizon}; // |X| <= q^{floor} at the horizon
            return {0.0, tau};
        }
    }
}

} // namespace

McEstimate martingale_stat(double horizon, long floor_exponent, const tq::TqParams& p,
                           long n_samples, RngStream rng, Exec exec) {
    return run_moments(n_samples, rng, exec, [&](Rng& r) {
        return stopped_path_sample(horizon, floor_exponent, p, r).x;
    });
}

McEstimate quadratic_variation_stat(double s, long floor_exponent, const tq::TqParams& p,
                                    long n_samples, RngStream rng, Exec exec) {
    // xi_s = X_{s/c_q}; report xi^2 - time on the xi clock
    return run_moments(n_samples, rng, exec, [&](Rng& r) {
        const auto smp = stopped_path_sample(s / p.c_q, floor_exponent, p, r);
        return smp.x * smp.x - smp.time * p.c_q;
    });
}

std::vector<double> sample_tau_zero_batch(long n, const tq::TqParams& p, long count,
                                          RngStream rng, double tail_tol, Exec exec) {
    return run_samples(count, rng, exec,
                       [&](Rng& r) { return sample_tau_zero(n, p, r, tail_tol); });
}

double gumbel_limit_cdf(double x) {
    return std::erfc(std::exp(-0.5 * x) / std::sqrt(2.0));
}

std::vector<double> gumbel_limit_check(const std::vector<double>& q_values, long n_samples,
                                       RngStream rng, Exec exec) {
    if (n_samples < 10000) throw DomainError("gumbel_limit_check: n_samples must be >= 10^4");
    std::vector<double> out;
    out.reserve(q_values.size());
    std::uint64_t stream = rng.stream_index;
    for (double q : q_values) {
        if (!(q > 1.0) || !(q <= 1.2))
            throw DomainError("gumbel_limit_check: each q must lie in (1, 1.2]");
        const tq::TqParams p(q);
        auto samples = run_samples(n_samples, RngStream{rng.master_seed, stream}, exec,
                                   [&](Rng& r) {
                                       const int N = sample_q_poisson(p, r);
                                       return 2.0 * std::log(q) * N + std::log(q - 1.0);
                                   });
        stream += static_cast<std::uint64_t>((n_samples + kBlockSize - 1) / kBlockSize);
        out.push_back(ks_to_cdf(std::move(samples), gumbel_limit_cdf));
    }
    return out;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_to_cdf(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(F - static_cast<double>(i + 1) / n));
    }
    return d;
}

} // namespace qbm::sim
