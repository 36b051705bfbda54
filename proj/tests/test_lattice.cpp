#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>

#include "parrondo/exact.hpp"
#include "parrondo/lattice.hpp"
#include "parrondo/rng.hpp"

using namespace parrondo;

namespace {

// The 3x3 state with rows (0,0,1),(0,1,0),(1,0,1), row-major bits.
constexpr std::uint32_t kExampleBits = (1u << 2) | (1u << 4) | (1u << 6) | (1u << 8);

std::uint32_t orbit_size(std::uint32_t bits, const SymmetryGroup& g) {
    std::set<std::uint32_t> seen;
    for (const auto& p : g.elements()) seen.insert(apply_perm_bits(bits, p));
    return static_cast<std::uint32_t>(seen.size());
}

std::uint32_t stabilizer_size(std::uint32_t bits, const SymmetryGroup& g) {
    std::uint32_t n = 0;
    for (const auto& p : g.elements()) n += apply_perm_bits(bits, p) == bits;
    return n;
}

}  // namespace

TEST_CASE("neighbor counts with periodic wrap") {
    const LatticeDims d(3, 3);
    const LatticeState zeros(0, d), ones((1u << 9) - 1, d);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            CHECK(neighbor_count(zeros, i, j) == 0);
            CHECK(neighbor_count(ones, i, j) == 4);
        }

    const LatticeState x(kExampleBits, d);
    CHECK(neighbor_count(x, 2, 2) == 0);
    CHECK(neighbor_count(x, 1, 3) == 1);

    CHECK_THROWS_AS(neighbor_count(x, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(neighbor_count(x, 1, 4), std::out_of_range);
}

TEST_CASE("dims validation") {
    CHECK_THROWS_AS(LatticeDims(2, 5), std::invalid_argument);
    CHECK_THROWS_AS(LatticeState(1u << 9, LatticeDims(3, 3)), std::invalid_argument);
}

TEST_CASE("permutations: identity, invariance, generator order") {
    const LatticeDims d(3, 4);
    const SymmetryGroup g(d, false);
    SitePerm id(d.sites());
    std::iota(id.begin(), id.end(), 0);
    const LatticeState x(0xACE, d);
    CHECK(apply_permutation(x, id) == x);
    CHECK(apply_permutation(LatticeState(0, d), g.elements()[5]) == LatticeState(0, d));

    const SitePerm& row_rot = g.generators()[0];
    LatticeState y = x;
    for (int k = 0; k < d.M; ++k) y = apply_permutation(y, row_rot);
    CHECK(y == x);

    CHECK_THROWS_AS(apply_permutation(LatticeState(0, LatticeDims(3, 3)), row_rot),
                    std::invalid_argument);
    CHECK_THROWS_AS(SymmetryGroup(d, true), std::invalid_argument);
}

TEST_CASE("neighbor-count equivariance m_{i,j}(x_sigma) = m_{sigma(i,j)}(x)") {
    const LatticeDims d(3, 3);
    const SymmetryGroup g(d, true);
    for (std::uint32_t bits = 0; bits < 512; ++bits) {
        for (const auto& perm : g.elements()) {
            const std::uint32_t xs = apply_perm_bits(bits, perm);
            for (int k = 0; k < 9; ++k) {
                const int kk = perm[k];
                REQUIRE(neighbor_count0(xs, d, k / 3, k % 3) ==
                        neighbor_count0(bits, d, kk / 3, kk % 3));
            }
        }
    }
}

TEST_CASE("canonicalize: idempotent and constant on orbits") {
    const LatticeDims d(3, 3);
    const SymmetryGroup g(d, true);
    for (std::uint32_t bits = 0; bits < 512; ++bits) {
        const LatticeState c = canonicalize(LatticeState(bits, d), g);
        CHECK(canonicalize(c, g) == c);
        CHECK(c.bits <= bits);
        for (const auto& perm : g.elements())
            REQUIRE(canonicalize(apply_permutation(LatticeState(bits, d), perm), g) == c);
    }
    CHECK(canonicalize(LatticeState(511, d), g).bits == 511);
}

TEST_CASE("group sizes divide 8MN") {
    CHECK(SymmetryGroup(LatticeDims(3, 3), false).size() == 36);
    CHECK(SymmetryGroup(LatticeDims(3, 3), true).size() == 72);
    CHECK(SymmetryGroup(LatticeDims(3, 4), false).size() == 48);
    CHECK(8 * 9 % SymmetryGroup(LatticeDims(3, 3), true).size() == 0);
}

TEST_CASE("orbit table structure on 3x3") {
    const LatticeDims d(3, 3);
    const OrbitTable t = enumerate_orbits(d, true);
    CHECK(t.num_classes() == 26);
    CHECK(std::accumulate(t.class_size.begin(), t.class_size.end(), 0u) == 512u);

    const SymmetryGroup g(d, true);
    for (std::uint32_t bits = 0; bits < 512; ++bits) {
        const std::uint32_t c = t.class_of[bits];
        REQUIRE(t.class_of[t.representative[c]] == c);
        REQUIRE(t.representative[c] <= bits);
        REQUIRE(t.class_size[c] == orbit_size(bits, g));
    }

    // orbit-stabilizer: |orbit| * |stabilizer| = |G| on sampled states
    PhiloxStream rng(99, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t bits = rng.bounded(512);
        CHECK(orbit_size(bits, g) * stabilizer_size(bits, g) == g.size());
    }
}

TEST_CASE("orbit counts reproduce the small reference rows") {
    CHECK(enumerate_orbits(LatticeDims(3, 3), false).num_classes() == 36);
    CHECK(enumerate_orbits(LatticeDims(3, 4), true).num_classes() == 158);
    CHECK(enumerate_orbits(LatticeDims(3, 5), true).num_classes() == 708);
    CHECK(enumerate_orbits(LatticeDims(4, 4), false).num_classes() == 1459);
    CHECK(enumerate_orbits(LatticeDims(4, 4), true).num_classes() == 805);
}

TEST_CASE("orbit CSV export") {
    std::ostringstream os;
    write_orbit_csv(os, enumerate_orbits(LatticeDims(3, 3), true));
    const std::string text = os.str();
    CHECK(text.rfind("class_index,representative_bits_hex,class_size\n", 0) == 0);
    CHECK(text.find("\n0,0,1\n") != std::string::npos);  // all-zeros singleton orbit
}

TEST_CASE("lumpability holds exhaustively on 3x3") {
    const SymmetryGroup g(LatticeDims(3, 3), true);
    CHECK(verify_lumpability(g, ParamVector(0.05, 0.15, 8.0 / 13, 0.75, 0.9)));
    CHECK(verify_lumpability(g, kGameA));
    PhiloxStream rng(7, 0);
    CHECK(verify_lumpability(g, ParamVector(rng.uniform01(), rng.uniform01(), rng.uniform01(),
                                            rng.uniform01(), rng.uniform01())));
}
