#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "qbm/errors.hpp"
#include "qbm/tq.hpp"

namespace qbm::sim {

// A reproducible substream: identical (master_seed, stream_index) pairs yield
// identical draws; distinct indices yield independent streams.
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// Deterministic engine bound to one stream. Uniform and exponential draws are
// hand-rolled from raw 64-bit output so results are bit-identical across
// standard libraries.
class Rng {
public:
    explicit Rng(RngStream s);
    std::uint64_t raw() { return eng_(); }
    double uniform();     // in [0, 1)
    double exponential(); // rate 1

private:
    std::mt19937_64 eng_;
};

struct PathRecord {
    enum class Termination { time_horizon, hit_target, hit_floor_spliced };
    std::vector<double> jump_times;         // strictly increasing
    std::vector<tq::TqState> states;        // jump_times.size() + 1, start first
    Termination terminated_by = Termination::time_horizon;
};

// Serial reference vs OpenMP execution of replica batches. Replicas are
// partitioned into fixed blocks with one substream per block and combined in
// block order, so both modes produce bit-identical results for a given seed,
// independent of thread count.
enum class Exec { serial, parallel };

// Embedded-chain simulation of X on T_q from a nonzero start: holds at q^n for
// Exp(q^{-2n}(1+q)), steps down with probability q/(1+q). On reaching
// floor_exponent the residual time to 0 is spliced in by one exact draw of the
// hitting law and the record ends at state 0. Negative starts mirror by sign
// symmetry.
PathRecord simulate_path(tq::TqState start, double horizon, long floor_exponent,
                         const tq::TqParams& p, RngStream rng,
                         std::optional<long> target_exponent = std::nullopt);

// Exact draw of the hitting time of 0 from q^n: q^{2n+2N-1} sum q^{-2i} T_i
// with N q-Poisson and T_i unit exponentials, truncated once the expected tail
// falls below tail_tol times the partial sum.
double sample_tau_zero(long n, const tq::TqParams& p, Rng& rng, double tail_tol = 1e-12);

// The q-Poisson mixing law P{N=k} prop. to q^{-k}/(q^{-2};q^{-2})_k. The
// inverse-CDF table is precomputed per q and cached read-only.
int sample_q_poisson(const tq::TqParams& p, Rng& rng);
const std::vector<double>& q_poisson_cdf(const tq::TqParams& p);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

enum class HitKind { down, up, to_zero };

// Monte Carlo estimate of E^n[e^{-lambda tau_m}] (m ignored for to_zero, where
// the exact floor splice is used). Up-paths are killed at 0 per the killed
// semantics and contribute 0.
McEstimate estimate_laplace(HitKind kind, long n, long m, double lambda,
                            const tq::TqParams& p, long n_samples, RngStream rng,
                            Exec exec = Exec::parallel);

// Empirical mean of X stopped at min(horizon, tau_0) from q^0; targets x = 1.
McEstimate martingale_stat(double horizon, long floor_exponent, const tq::TqParams& p,
                           long n_samples, RngStream rng, Exec exec = Exec::parallel);

// Empirical mean of xi_{s ^ tau}^2 - (s ^ tau) at the xi clock (xi_s = X_{s/c_q})
// from xi_0 = 1; targets x^2 = 1.
McEstimate quadratic_variation_stat(double s, long floor_exponent, const tq::TqParams& p,
                                    long n_samples, RngStream rng, Exec exec = Exec::parallel);

// Batch of exact tau_0 draws (for distributional checks).
std::vector<double> sample_tau_zero_batch(long n, const tq::TqParams& p, long count,
                                          RngStream rng, double tail_tol = 1e-12,
                                          Exec exec = Exec::parallel);

// Limit distribution of 2 log(q) N + log(q-1): CDF is erfc(e^{-x/2}/sqrt(2)).
double gumbel_limit_cdf(double x);
// KS distance of the sampled statistic to that CDF, one entry per q.
std::vector<double> gumbel_limit_check(const std::vector<double>& q_values, long n_samples,
                                       RngStream rng, Exec exec = Exec::parallel);

// Kolmogorov-Smirnov helpers (samples are copied and sorted internally).
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_to_cdf(std::vector<double> samples, const std::function<double(double)>& cdf);

} // namespace qbm::sim
