#pragma once

// Counter-based random streams (Philox 4x32-10). A seed plus a stream id
// determines the whole sequence, so independent sub-streams for site rows,
// site columns, and the win/loss uniforms come from one 64-bit seed.

#include <array>
#include <cstdint>

namespace parrondo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    const std::uint64_t r0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t r1 = static_cast<std::uint64_t>(M1) * ctr[2];
    const std::array<std::uint32_t, 4> out{
        static_cast<std::uint32_t>(r1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(r1),
        static_cast<std::uint32_t>(r0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(r0)};
    ctr = out;
    key[0] += W0;
    key[1] += W1;
}

}  // namespace detail

// One Philox stream: key = f(seed, stream id), counter increments per block.
class PhiloxStream {
public:
    PhiloxStream() : PhiloxStream(0, 0) {}
    PhiloxStream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed;
        const std::uint64_t k0 = detail::splitmix64(s);
        s = seed ^ (0xA5A5A5A5A5A5A5A5ull + stream_id);
        const std::uint64_t k1 = detail::splitmix64(s);
        key_[0] = static_cast<std::uint32_t>(k0);
        key_[1] = static_cast<std::uint32_t>(k1 ^ (k0 >> 32));
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return block_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    // Unbiased uniform in {0, .., n-1} (Lemire's method with rejection).
    std::uint32_t bounded(std::uint32_t n) {
        std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                m = static_cast<std::uint64_t>(next_u32()) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // Uniform on (0, 1]; the closed upper end makes "win iff U <= p" exact
    // at p = 1 and impossible at p = 0.
    double uniform01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

private:
    void refill() {
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter_),
                                         static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
        std::array<std::uint32_t, 2> k = key_;
        for (int i = 0; i < 10; ++i) detail::philox_round(ctr, k);
        block_ = ctr;
        ++counter_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
};

// The three independent driving sequences of the coupling construction:
// row index, column index, and win/loss uniform.
struct RngStreams {
    PhiloxStream rows;
    PhiloxStream cols;
    PhiloxStream uniforms;

    explicit RngStreams(std::uint64_t seed)
        : rows(seed, 1), cols(seed, 2), uniforms(seed, 3) {}
};

}  // namespace parrondo
