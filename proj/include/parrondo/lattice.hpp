#pragma once

// Lattice states, periodic-boundary neighbor counts, the row/column
// rotation-reflection (and transposition) symmetry group, and orbit
// enumeration of {0,1}^(M*N) under that group.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace parrondo {

inline constexpr int kMaxExactBits = 25;  // states must fit a 32-bit word

struct LatticeDims {
    int M = 3;
    int N = 3;

    LatticeDims() = default;
    LatticeDims(int m, int n) : M(m), N(n) {
        if (m < 3 || n < 3) throw std::invalid_argument("lattice dims must be >= 3x3");
    }
    int sites() const { return M * N; }
    bool square() const { return M == N; }
    bool operator==(const LatticeDims&) const = default;
};

// Bit-packed state: bit (i*N + j) holds the status of site (i,j), 0-based,
// row-major. 1 = winner, 0 = loser.
struct LatticeState {
    std::uint32_t bits = 0;
    LatticeDims dims;

    LatticeState() = default;
    LatticeState(std::uint32_t b, LatticeDims d) : bits(b), dims(d) {
        if (d.sites() > kMaxExactBits) throw std::invalid_argument("state exceeds 25 sites");
        if (d.sites() < 32 && (b >> d.sites()) != 0)
            throw std::invalid_argument("state has bits above M*N");
    }
    bool get(int i0, int j0) const { return (bits >> (i0 * dims.N + j0)) & 1u; }
    bool operator==(const LatticeState&) const = default;
};

// Winner count among the four nearest neighbors of (i,j), 1-based indices,
// with periodic wrap.
inline int neighbor_count(const LatticeState& x, int i, int j) {
    const int M = x.dims.M, N = x.dims.N;
    if (i < 1 || i > M || j < 1 || j > N) throw std::out_of_range("site index out of range");
    const int i0 = i - 1, j0 = j - 1;
    const int up = (i0 + 1) % M, dn = (i0 + M - 1) % M;
    const int rt = (j0 + 1) % N, lf = (j0 + N - 1) % N;
    return x.get(up, j0) + x.get(dn, j0) + x.get(i0, rt) + x.get(i0, lf);
}

// 0-based variant used by hot loops.
inline int neighbor_count0(std::uint32_t bits, const LatticeDims& d, int i0, int j0) {
    const int up = (i0 + 1) % d.M, dn = (i0 + d.M - 1) % d.M;
    const int rt = (j0 + 1) % d.N, lf = (j0 + d.N - 1) % d.N;
    return ((bits >> (up * d.N + j0)) & 1u) + ((bits >> (dn * d.N + j0)) & 1u) +
           ((bits >> (i0 * d.N + rt)) & 1u) + ((bits >> (i0 * d.N + lf)) & 1u);
}

// A site permutation sigma stored so that bit k of the permuted state is
// bit perm[k] of the original: (x_sigma)_{i,j} = x_{sigma(i,j)}.
using SitePerm = std::vector<std::uint8_t>;

inline std::uint32_t apply_perm_bits(std::uint32_t bits, const SitePerm& p) {
    std::uint32_t r = 0;
    for (std::size_t k = 0; k < p.size(); ++k) r |= ((bits >> p[k]) & 1u) << k;
    return r;
}

inline LatticeState apply_permutation(const LatticeState& x, const SitePerm& p) {
    if (static_cast<int>(p.size()) != x.dims.sites())
        throw std::invalid_argument("permutation size does not match dims");
    return LatticeState(apply_perm_bits(x.bits, p), x.dims);
}

class SymmetryGroup {
public:
    // Generators: row rotation, row reflection, column rotation, column
    // reflection, and transposition iff M == N and use_transpose.
    SymmetryGroup(LatticeDims d, bool use_transpose) : dims_(d) {
        if (use_transpose && !d.square())
            throw std::invalid_argument("transposition requires a square lattice");
        const int M = d.M, N = d.N, S = M * N;
        auto idx = [N](int i, int j) { return i * N + j; };
        std::vector<SitePerm> gens;
        SitePerm g(S);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) g[idx(i, j)] = idx((i + 1) % M, j);
        gens.push_back(g);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) g[idx(i, j)] = idx(M - 1 - i, j);
        gens.push_back(g);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) g[idx(i, j)] = idx(i, (j + 1) % N);
        gens.push_back(g);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < N; ++j) g[idx(i, j)] = idx(i, N - 1 - j);
        gens.push_back(g);
        if (use_transpose) {
            for (int i = 0; i < M; ++i)
                for (int j = 0; j < N; ++j) g[idx(i, j)] = idx(j, i);
            gens.push_back(g);
        }
        generators_ = gens;

        // Closure by breadth-first composition.
        std::set<SitePerm> seen;
        SitePerm id(S);
        for (int k = 0; k < S; ++k) id[k] = static_cast<std::uint8_t>(k);
        seen.insert(id);
        std::vector<SitePerm> frontier{id};
        while (!frontier.empty()) {
            std::vector<SitePerm> next;
            for (const auto& a : frontier) {
                for (const auto& b : gens) {
                    SitePerm c(S);
                    for (int k = 0; k < S; ++k) c[k] = b[a[k]];
                    if (seen.insert(c).second) next.push_back(c);
                }
            }
            frontier = std::move(next);
        }
        elements_.assign(seen.begin(), seen.end());
    }

    const std::vector<SitePerm>& elements() const { return elements_; }
    const std::vector<SitePerm>& generators() const { return generators_; }
    LatticeDims dims() const { return dims_; }
    std::size_t size() const { return elements_.size(); }

private:
    LatticeDims dims_;
    std::vector<SitePerm> generators_;
    std::vector<SitePerm> elements_;
};

// Minimum bits-value over the orbit of x.
inline LatticeState canonicalize(const LatticeState& x, const SymmetryGroup& g) {
    std::uint32_t best = x.bits;
    for (const auto& p : g.elements()) best = std::min(best, apply_perm_bits(x.bits, p));
    return LatticeState(best, x.dims);
}

struct OrbitTable {
    LatticeDims dims;
    bool used_transpose = false;
    std::vector<std::uint32_t> class_of;        // 2^(MN) entries
    std::vector<std::uint32_t> representative;  // minimum bits-value per class
    std::vector<std::uint32_t> class_size;
    std::size_t num_classes() const { return representative.size(); }
};

// Single increasing pass over all states; an unassigned state is the minimal
// member of a fresh orbit, whose members are all images under the group.
inline OrbitTable enumerate_orbits(LatticeDims d, bool use_transpose) {
    const int S = d.sites();
    if (S > kMaxExactBits) throw std::length_error("enumeration cap exceeded (M*N > 25)");
    SymmetryGroup group(d, use_transpose && d.square());
    OrbitTable t;
    t.dims = d;
    t.used_transpose = use_transpose && d.square();
    const std::uint32_t n_states = 1u << S;
    const std::uint32_t unassigned = 0xFFFFFFFFu;
    t.class_of.assign(n_states, unassigned);
    for (std::uint32_t s = 0; s < n_states; ++s) {
        if (t.class_of[s] != unassigned) continue;
        const auto c = static_cast<std::uint32_t>(t.representative.size());
        t.representative.push_back(s);
        std::uint32_t count = 0;
        for (const auto& p : group.elements()) {
            const std::uint32_t y = apply_perm_bits(s, p);
            if (t.class_of[y] == unassigned) {
                t.class_of[y] = c;
                ++count;
            }
        }
        t.class_size.push_back(count);
    }
    return t;
}

inline void write_orbit_csv(std::ostream& os, const OrbitTable& t) {
    os << "class_index,representative_bits_hex,class_size\n";
    char buf[16];
    for (std::size_t c = 0; c < t.num_classes(); ++c) {
        std::snprintf(buf, sizeof buf, "%x", t.representative[c]);
        os << c << ',' << buf << ',' << t.class_size[c] << '\n';
    }
}

}  // namespace parrondo
