#pragma once

// Monte Carlo play of games B and C on lattices of any size: mixing-time
// warm-up, streaming profit accumulation, and the Politis-Romano overlapping
// block estimator of the CLT variance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "parrondo/lattice.hpp"
#include "parrondo/params.hpp"
#include "parrondo/rng.hpp"

namespace parrondo {

// Bit-packed M x N board without the 25-site cap of the exact path.
class SimState {
public:
    SimState(LatticeDims d, bool ones = false)
        : dims_(d), words_((d.sites() + 63) / 64, ones ? ~0ull : 0ull) {
        if (ones) {
            const int rem = d.sites() % 64;
            if (rem) words_.back() &= (1ull << rem) - 1;
        }
    }
    static SimState from_bits(LatticeDims d, std::uint32_t bits) {
        SimState s(d);
        s.words_[0] = bits;
        return s;
    }

    LatticeDims dims() const { return dims_; }
    bool get(int k) const { return (words_[k >> 6] >> (k & 63)) & 1ull; }
    void set(int k, bool v) {
        const std::uint64_t mask = 1ull << (k & 63);
        if (v)
            words_[k >> 6] |= mask;
        else
            words_[k >> 6] &= ~mask;
    }
    int neighbor_count(int i, int j) const {
        const int M = dims_.M, N = dims_.N;
        const int up = i + 1 == M ? 0 : i + 1, dn = i == 0 ? M - 1 : i - 1;
        const int rt = j + 1 == N ? 0 : j + 1, lf = j == 0 ? N - 1 : j - 1;
        return get(up * N + j) + get(dn * N + j) + get(i * N + rt) + get(i * N + lf);
    }
    const std::vector<std::uint64_t>& words() const { return words_; }
    bool operator==(const SimState&) const = default;

private:
    LatticeDims dims_;
    std::vector<std::uint64_t> words_;
};

// One turn: pick a site from the row/column streams, toss the coin for its
// neighbor-winner count. Returns the profit, +1 or -1.
inline int step(SimState& x, const ParamVector& p, RngStreams& streams) {
    const int i = static_cast<int>(streams.rows.bounded(static_cast<std::uint32_t>(x.dims().M)));
    const int j = static_cast<int>(streams.cols.bounded(static_cast<std::uint32_t>(x.dims().N)));
    const int m = x.neighbor_count(i, j);
    const bool win = streams.uniforms.uniform01() <= p[m];
    x.set(i * x.dims().N + j, win);
    return win ? 1 : -1;
}

// Upper bound on the mixing time of the game-A chain (lazy walk on the
// MN-dimensional hypercube): ceil(MN (ln M + ln N + ln(1/eps))).
inline long long mixing_warmup(LatticeDims d, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("eps must be in (0,1]");
    return static_cast<long long>(
        std::ceil(d.sites() * (std::log(d.M) + std::log(d.N) + std::log(1.0 / eps))));
}

inline double default_block_constant(LatticeDims d) {
    // Table-3 style defaults: c = 10 up to 100 players, ~sqrt(MN) above.
    return d.sites() <= 100 ? 10.0 : std::round(std::sqrt(static_cast<double>(d.sites())));
}

// Streaming Politis-Romano estimator: overlapping block sums of length b,
// sigma^2 = b/(n-b+1) * sum_i (s_i/b - xibar)^2. Welford accumulation keeps
// the sum of squares stable at n = 1e9.
class BlockVarianceAccumulator {
public:
    explicit BlockVarianceAccumulator(std::size_t b) : b_(b), window_(b, 0) {
        if (b == 0) throw std::invalid_argument("block size must be >= 1");
    }

    void add(int xi) {
        total_ += xi;
        ++n_;
        block_sum_ += xi;
        if (n_ > static_cast<long long>(b_)) block_sum_ -= window_[pos_];
        window_[pos_] = xi;
        pos_ = (pos_ + 1) % b_;
        if (n_ >= static_cast<long long>(b_)) {
            const double y = static_cast<double>(block_sum_) / static_cast<double>(b_);
            ++blocks_;
            const double delta = y - block_mean_;
            block_mean_ += delta / static_cast<double>(blocks_);
            block_m2_ += delta * (y - block_mean_);
        }
    }

    long long count() const { return n_; }
    long long total() const { return total_; }
    double mean() const { return static_cast<double>(total_) / static_cast<double>(n_); }

    double variance() const {
        if (n_ < static_cast<long long>(b_)) throw std::invalid_argument("block size exceeds sample count");
        const double xibar = mean();
        const double shift = block_mean_ - xibar;
        return static_cast<double>(b_) *
               (block_m2_ / static_cast<double>(blocks_) + shift * shift);
    }

private:
    std::size_t b_;
    std::vector<int> window_;
    std::size_t pos_ = 0;
    long long n_ = 0;
    long long total_ = 0;
    long long block_sum_ = 0;
    long long blocks_ = 0;
    double block_mean_ = 0.0;
    double block_m2_ = 0.0;
};

// One-shot form for in-memory sequences.
inline double block_variance(const std::vector<int>& profits, std::size_t b) {
    if (b > profits.size()) throw std::invalid_argument("block size exceeds sample count");
    BlockVarianceAccumulator acc(b);
    for (int xi : profits) acc.add(xi);
    return acc.variance();
}

enum class InitialState { AllZeros, AllOnes };

struct SimConfig {
    long long n = 1000000;        // post-warm-up turns
    long long warmup = -1;        // -1: 10x the game-A mixing bound at eps = 1e-3
    double block_constant = -1;   // -1: lattice-size default
    std::uint64_t seed = 0;
    InitialState init = InitialState::AllZeros;
    std::optional<std::uint32_t> init_bits;  // explicit start, small lattices only
};

struct SimResult {
    double mean_hat = 0.0;
    double var_hat = 0.0;
    double std_error = 0.0;
    long long n = 0;
    long long warmup = 0;
    std::size_t block_size = 0;
    double block_constant = 0.0;
    SimState final_state{LatticeDims(3, 3)};
};

namespace detail {

inline const ParamVector& pattern_phase_params(const GameSpec& g, const ParamVector& effective,
                                               long long turn) {
    const long long phase = turn % (g.r + g.s);
    return phase < g.r ? kGameA : effective;
}

}  // namespace detail

// Plays the requested game; warm-up turns are excluded from the running sum
// and from the block estimator. Deterministic in (dims, spec, cfg). The
// optional trace callback sees (turn, cumulative profit) after each counted
// turn.
using TraceFn = std::function<void(long long, long long)>;

inline SimResult simulate_game(LatticeDims dims, const GameSpec& spec, const SimConfig& cfg,
                               const TraceFn& trace = {}) {
    if (cfg.n < 1) throw std::invalid_argument("turn count must be >= 1");
    if (spec.variant != GameVariant::Pattern &&
        classify_regime(spec.variant == GameVariant::Mixture
                            ? mixture_params(spec.params, spec.gamma)
                            : spec.params,
                        dims) == RegimeTag::MeanUndefined)
        throw MeanUndefinedError();

    const long long warmup =
        cfg.warmup >= 0 ? cfg.warmup : 10 * mixing_warmup(dims, 1e-3);
    const double c = cfg.block_constant > 0 ? cfg.block_constant : default_block_constant(dims);
    const auto b = static_cast<std::size_t>(std::max(
        1.0, std::floor(c * std::cbrt(static_cast<double>(cfg.n)))));
    if (b > static_cast<std::size_t>(cfg.n)) throw std::invalid_argument("block size exceeds n");

    SimState x = cfg.init_bits ? SimState::from_bits(dims, *cfg.init_bits)
                               : SimState(dims, cfg.init == InitialState::AllOnes);
    RngStreams streams(cfg.seed);
    const ParamVector effective = spec.variant == GameVariant::Mixture
                                      ? mixture_params(spec.params, spec.gamma)
                                      : spec.params;

    BlockVarianceAccumulator acc(b);
    if (spec.variant == GameVariant::Pattern) {
        for (long long t = 0; t < warmup; ++t)
            step(x, detail::pattern_phase_params(spec, effective, t), streams);
        for (long long t = 0; t < cfg.n; ++t) {
            acc.add(step(x, detail::pattern_phase_params(spec, effective, warmup + t), streams));
            if (trace) trace(t + 1, acc.total());
        }
    } else if (trace) {
        for (long long t = 0; t < warmup; ++t) step(x, effective, streams);
        for (long long t = 0; t < cfg.n; ++t) {
            acc.add(step(x, effective, streams));
            trace(t + 1, acc.total());
        }
    } else {
        for (long long t = 0; t < warmup; ++t) step(x, effective, streams);
        for (long long t = 0; t < cfg.n; ++t) acc.add(step(x, effective, streams));
    }

    SimResult r;
    r.mean_hat = acc.mean();
    r.var_hat = acc.variance();
    r.std_error = std::sqrt(r.var_hat / static_cast<double>(cfg.n));
    r.n = cfg.n;
    r.warmup = warmup;
    r.block_size = b;
    r.block_constant = c;
    r.final_state = x;
    return r;
}

struct CoupledPaths {
    std::vector<long long> s;        // cumulative profit, lower parameters
    std::vector<long long> s_prime;  // cumulative profit, upper parameters
    bool dominated = false;          // S_k <= S'_k for every k
};

// Two chains driven by identical row/column/uniform streams from the same
// start. If p is monotone and p <= p' componentwise, S_k <= S'_k pathwise.
inline CoupledPaths coupled_paths(LatticeDims dims, const ParamVector& p, const ParamVector& pp,
                                  long long n, std::uint64_t seed) {
    SimState x(dims), xp(dims);
    RngStreams streams(seed);
    CoupledPaths out;
    out.s.reserve(static_cast<std::size_t>(n));
    out.s_prime.reserve(static_cast<std::size_t>(n));
    out.dominated = true;
    long long s = 0, sp = 0;
    const auto M = static_cast<std::uint32_t>(dims.M);
    const auto N = static_cast<std::uint32_t>(dims.N);
    for (long long k = 0; k < n; ++k) {
        const int i = static_cast<int>(streams.rows.bounded(M));
        const int j = static_cast<int>(streams.cols.bounded(N));
        const double u = streams.uniforms.uniform01();
        const bool win = u <= p[x.neighbor_count(i, j)];
        const bool winp = u <= pp[xp.neighbor_count(i, j)];
        x.set(i * dims.N + j, win);
        xp.set(i * dims.N + j, winp);
        s += win ? 1 : -1;
        sp += winp ? 1 : -1;
        if (s > sp) out.dominated = false;
        out.s.push_back(s);
        out.s_prime.push_back(sp);
    }
    return out;
}

}  // namespace parrondo
