#pragma once

// Full and reduced transition matrices for games A/B/C, stationary
// distributions, and the equilibrium mean/variance of per-turn collective
// profit computed on the lumped chain.

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "parrondo/lattice.hpp"
#include "parrondo/params.hpp"

namespace parrondo {

inline constexpr int kDefaultExactCap = 20;   // M*N cap for the exact path
inline constexpr int kMaxExactCap = 25;
inline constexpr int kDenseSolveMax = 2000;   // dense LU below, sparse LU above
inline constexpr int kSparseSolveMax = 50000; // iterative above
inline constexpr int kPatternDenseMax = 8192; // pattern formulas run dense

enum class SignVariant { Plain, Dot, Ddot };

// One sparse row of the full 2^(MN)-state transition matrix, diagonal
// included. Dot negates every q_m term; Ddot negates twice, i.e. is Plain.
inline std::vector<std::pair<std::uint32_t, double>> build_full_row(const LatticeState& x,
                                                                    const ParamVector& p,
                                                                    SignVariant v) {
    const int S = x.dims.sites();
    const double inv = 1.0 / S;
    const double qsign = (v == SignVariant::Dot) ? -1.0 : 1.0;
    std::vector<std::pair<std::uint32_t, double>> row;
    row.reserve(S + 1);
    double diag = 0.0;
    for (int k = 0; k < S; ++k) {
        const int m = neighbor_count0(x.bits, x.dims, k / x.dims.N, k % x.dims.N);
        const std::uint32_t y = x.bits ^ (1u << k);
        if ((x.bits >> k) & 1u) {
            row.emplace_back(y, inv * qsign * p.q(m));  // a loss, site 1 -> 0
            diag += inv * p[m];                         // stay put on a win
        } else {
            row.emplace_back(y, inv * p[m]);            // a win, site 0 -> 1
            diag += inv * qsign * p.q(m);               // stay put on a loss
        }
    }
    row.emplace_back(x.bits, diag);
    return row;
}

struct ReducedChain {
    LatticeDims dims;
    ParamVector params;
    std::shared_ptr<const OrbitTable> orbits;
    Eigen::SparseMatrix<double> plain;  // row-stochastic
    Eigen::SparseMatrix<double> dot;    // q_m -> -q_m before assembly
    Eigen::Index size() const { return plain.rows(); }
};

struct EquilibriumStats {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> stationary;  // over classes; zero off the recurrent set
    RegimeTag regime = RegimeTag::Ergodic;
    double residual = 0.0;           // max-norm of pi*P - pi
    std::size_t num_classes = 0;
    std::size_t recurrent_classes = 0;
};

inline ReducedChain build_reduced(std::shared_ptr<const OrbitTable> orbits, const ParamVector& p) {
    const LatticeDims d = orbits->dims;
    const int S = d.sites();
    const double inv = 1.0 / S;
    const auto K = static_cast<Eigen::Index>(orbits->num_classes());
    std::vector<Eigen::Triplet<double>> tp, td;
    tp.reserve(orbits->num_classes() * (S + 1));
    td.reserve(orbits->num_classes() * (S + 1));
    for (Eigen::Index c = 0; c < K; ++c) {
        const std::uint32_t x = orbits->representative[c];
        double diag_p = 0.0, diag_d = 0.0;
        for (int k = 0; k < S; ++k) {
            const int m = neighbor_count0(x, d, k / d.N, k % d.N);
            const auto cy = static_cast<Eigen::Index>(orbits->class_of[x ^ (1u << k)]);
            if ((x >> k) & 1u) {
                tp.emplace_back(c, cy, inv * p.q(m));
                td.emplace_back(c, cy, -inv * p.q(m));
                diag_p += inv * p[m];
                diag_d += inv * p[m];
            } else {
                tp.emplace_back(c, cy, inv * p[m]);
                td.emplace_back(c, cy, inv * p[m]);
                diag_p += inv * p.q(m);
                diag_d -= inv * p.q(m);
            }
        }
        tp.emplace_back(c, c, diag_p);
        td.emplace_back(c, c, diag_d);
    }
    ReducedChain rc;
    rc.dims = d;
    rc.params = p;
    rc.orbits = std::move(orbits);
    rc.plain.resize(K, K);
    rc.dot.resize(K, K);
    rc.plain.setFromTriplets(tp.begin(), tp.end());
    rc.dot.setFromTriplets(td.begin(), td.end());
    return rc;
}

namespace detail {

// Strongly connected components of the positive-entry digraph; returns the
// component index per node and, per component, whether it is closed (no
// edge leaves it). Iterative Tarjan.
struct SccResult {
    std::vector<int> comp;
    std::vector<bool> closed;
};

inline SccResult strongly_connected(const Eigen::SparseMatrix<double>& Pin) {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> P(Pin);
    const int n = static_cast<int>(P.rows());
    SccResult res;
    res.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0), stack_pos(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stk;
    int next_index = 0;

    using RowIt = Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator;
    struct Frame { int v; RowIt it; };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, RowIt(P, root)});
        index[root] = low[root] = next_index++;
        stk.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& fr = call.back();
            bool descended = false;
            for (; fr.it; ++fr.it) {
                if (fr.it.value() <= 0.0) continue;
                const int w = static_cast<int>(fr.it.col());
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stk.push_back(w);
                    on_stack[w] = true;
                    ++fr.it;
                    call.push_back({w, RowIt(P, w)});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[fr.v] = std::min(low[fr.v], index[w]);
            }
            if (descended) continue;
            const int v = fr.v;
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                const int c = static_cast<int>(res.closed.size());
                res.closed.push_back(true);
                while (true) {
                    const int w = stk.back();
                    stk.pop_back();
                    on_stack[w] = false;
                    res.comp[w] = c;
                    if (w == v) break;
                }
            }
        }
    }
    // Closed iff no positive edge leaves the component.
    for (int v = 0; v < n; ++v)
        for (RowIt it(P, v); it; ++it)
            if (it.value() > 0.0 && res.comp[v] != res.comp[it.col()]) res.closed[res.comp[v]] = false;
    return res;
}

inline Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& Ain,
                                             const std::vector<int>& keep,
                                             const std::vector<int>& local) {
    const Eigen::SparseMatrix<double, Eigen::RowMajor> A(Ain);
    std::vector<Eigen::Triplet<double>> t;
    for (int v : keep)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, v); it; ++it)
            if (local[it.col()] >= 0) t.emplace_back(local[v], local[it.col()], it.value());
    Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(keep.size()),
                                  static_cast<Eigen::Index>(keep.size()));
    B.setFromTriplets(t.begin(), t.end());
    return B;
}

// Solve the sparse system A_minor x = b_minor, where A = I - (transpose ?
// P^T : P) and row/column `drop` are deleted. Both singular systems below
// reduce to this; deleting a row/column keeps the matrix genuinely sparse
// (a dense normalization row would fill in badly under sparse LU).
inline Eigen::VectorXd solve_minor(const Eigen::SparseMatrix<double>& P, bool transpose,
                                   Eigen::Index drop, const Eigen::VectorXd& rhs_minor) {
    const Eigen::Index K = P.rows();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(P.nonZeros() + K);
    auto shift = [drop](Eigen::Index i) { return i > drop ? i - 1 : i; };
    for (Eigen::Index r = 0; r < P.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(P, r); it; ++it) {
            const Eigen::Index i = transpose ? it.col() : it.row();
            const Eigen::Index j = transpose ? it.row() : it.col();
            if (i == drop || j == drop) continue;
            t.emplace_back(shift(i), shift(j), -it.value());
        }
    }
    for (Eigen::Index i = 0; i < K; ++i)
        if (i != drop) t.emplace_back(shift(i), shift(i), 1.0);
    Eigen::SparseMatrix<double> A(K - 1, K - 1);
    A.setFromTriplets(t.begin(), t.end());

    if (K - 1 <= kSparseSolveMax) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw std::runtime_error("sparse LU factorization failed");
        return lu.solve(rhs_minor);
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> it;
    it.setTolerance(1e-13);
    it.setMaxIterations(20000);
    it.compute(A);
    Eigen::VectorXd x = it.solve(rhs_minor);
    if (it.info() != Eigen::Success && it.error() > 1e-9)
        throw std::runtime_error("iterative solve did not converge");
    return x;
}

// Stationary distribution: one balance equation swapped for sum(pi) = 1.
// Dense path replaces a row outright; sparse path pins pi_0 = 1 via the
// minor system and renormalizes.
inline Eigen::VectorXd stationary(const Eigen::SparseMatrix<double>& P) {
    const Eigen::Index K = P.rows();
    if (K == 1) return Eigen::VectorXd::Ones(1);
    Eigen::VectorXd pi(K);
    if (K <= kDenseSolveMax) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(K, K) - Eigen::MatrixXd(P).transpose();
        A.row(0).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
        rhs[0] = 1.0;
        pi = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(rhs);
    } else {
        // Power iteration: these chains mix in O(MN) steps, so the direct
        // iteration reaches machine precision in thousands of sparse
        // matvecs, far cheaper than the fill-in of a sparse factorization.
        const Eigen::SparseMatrix<double> Pt = P.transpose();
        pi.setConstant(1.0 / static_cast<double>(K));
        double resid = 1.0;
        for (long iter = 0; iter < 300000; ++iter) {
            Eigen::VectorXd next = Pt * pi;
            if ((iter & 63) == 0) {
                resid = (next - pi).cwiseAbs().maxCoeff();
                if (resid < 1e-15) {
                    pi = std::move(next);
                    break;
                }
            }
            pi = std::move(next);
        }
        if (resid >= 1e-13) {
            // Stalled (e.g. nearly periodic chain): fall back to the exact
            // sparse factorization with pi_0 pinned to 1.
            Eigen::VectorXd b = Eigen::VectorXd::Zero(K - 1);
            for (Eigen::Index r = 0; r < P.outerSize(); ++r)
                for (Eigen::SparseMatrix<double>::InnerIterator it(P, r); it; ++it)
                    if (it.row() == 0 && it.col() > 0) b[it.col() - 1] = it.value();
            const Eigen::VectorXd x = solve_minor(P, /*transpose=*/true, 0, b);
            pi[0] = 1.0;
            pi.tail(K - 1) = x;
        }
    }
    for (Eigen::Index i = 0; i < K; ++i)
        if (pi[i] < 0.0) pi[i] = 0.0;
    pi /= pi.sum();
    return pi;
}

// h = (Z - 1 pi) g without forming the fundamental matrix: solve
// (I - P) h = g - (pi.g) 1 with pi.h = 0. The balance row with the largest
// stationary weight is implied by the others, so it can carry the
// constraint (dense) or be dropped along with fixing h there to 0 and
// re-centering (sparse).
inline Eigen::VectorXd fundamental_action(const Eigen::SparseMatrix<double>& P,
                                          const Eigen::VectorXd& pi, const Eigen::VectorXd& g) {
    const Eigen::Index K = P.rows();
    if (K == 1) return Eigen::VectorXd::Zero(1);
    Eigen::Index istar;
    pi.maxCoeff(&istar);
    Eigen::VectorXd rhs = g.array() - pi.dot(g);
    if (K <= kDenseSolveMax) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(K, K) - Eigen::MatrixXd(P);
        A.row(istar) = pi.transpose();
        rhs[istar] = 0.0;
        return Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(rhs);
    }
    // Neumann series h = sum_m P^m rhs; each term is re-centered against pi
    // so the non-decaying component of P never accumulates. Converges at the
    // mixing rate, like the power iteration above.
    Eigen::VectorXd h = rhs;
    Eigen::VectorXd term = rhs;
    const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
    double tail = 1.0;
    for (long iter = 0; iter < 300000; ++iter) {
        term = P * term;
        term.array() -= pi.dot(term);
        h += term;
        if ((iter & 63) == 0) {
            tail = term.cwiseAbs().maxCoeff();
            if (tail < 1e-16 * scale) break;
        }
    }
    if (tail >= 1e-13 * scale) {
        // Stalled: exact sparse factorization of the minor system.
        Eigen::VectorXd rhs_minor(K - 1);
        for (Eigen::Index i = 0, j = 0; i < K; ++i)
            if (i != istar) rhs_minor[j++] = rhs[i];
        const Eigen::VectorXd x = solve_minor(P, /*transpose=*/false, istar, rhs_minor);
        for (Eigen::Index i = 0, j = 0; i < K; ++i) h[i] = (i == istar) ? 0.0 : x[j++];
    }
    h.array() -= pi.dot(h);  // shift along the null direction to pi.h = 0
    return h;
}

}  // namespace detail

// Exact-path engine for one lattice size: owns the orbit table and computes
// equilibrium statistics for games B, gamma*A+(1-gamma)*B, and A^r B^s.
class ExactEngine {
public:
    explicit ExactEngine(LatticeDims d, bool use_transpose = true, int cap = kDefaultExactCap)
        : dims_(d), transpose_(use_transpose && d.square()) {
        cap = std::min(cap, kMaxExactCap);
        if (d.sites() > cap)
            throw CapExceededError("M*N = " + std::to_string(d.sites()) +
                                   " exceeds the exact-path cap of " + std::to_string(cap));
        orbits_ = std::make_shared<OrbitTable>(enumerate_orbits(d, transpose_));
    }

    LatticeDims dims() const { return dims_; }
    const OrbitTable& orbits() const { return *orbits_; }
    std::shared_ptr<const OrbitTable> orbits_ptr() const { return orbits_; }

    ReducedChain reduced(const ParamVector& p) const { return build_reduced(orbits_, p); }

    EquilibriumStats stats_b(const ParamVector& p) const {
        const RegimeTag regime = classify_regime(p, dims_);
        if (regime == RegimeTag::MeanUndefined) throw MeanUndefinedError();
        const ReducedChain rc = reduced(p);
        const auto scc = detail::strongly_connected(rc.plain);
        std::vector<int> keep;
        int closed_count = 0, closed_id = -1;
        for (std::size_t c = 0; c < scc.closed.size(); ++c)
            if (scc.closed[c]) {
                ++closed_count;
                closed_id = static_cast<int>(c);
            }
        if (closed_count != 1)
            throw RegimeNotErgodicError("chain has " + std::to_string(closed_count) +
                                        " closed communicating classes; stationary law not unique");
        for (int v = 0; v < static_cast<int>(rc.size()); ++v)
            if (scc.comp[v] == closed_id) keep.push_back(v);

        std::vector<int> local(rc.size(), -1);
        for (std::size_t i = 0; i < keep.size(); ++i) local[keep[i]] = static_cast<int>(i);
        const auto Ps = detail::submatrix(rc.plain, keep, local);
        const auto Ds = detail::submatrix(rc.dot, keep, local);

        const Eigen::VectorXd pi = detail::stationary(Ps);
        const Eigen::VectorXd g = Ds * Eigen::VectorXd::Ones(Ps.cols());
        const double mu = pi.dot(g);
        const Eigen::VectorXd h = detail::fundamental_action(Ps, pi, g);
        const Eigen::VectorXd pi_dot = Ds.transpose() * pi;
        // pi * DdotP * 1 == pi * P * 1 == 1 because step profits are +-1.
        const double sigma2 = 1.0 - mu * mu + 2.0 * pi_dot.dot(h);

        EquilibriumStats st;
        st.mean = mu;
        st.variance = sigma2;
        st.regime = regime;
        st.num_classes = orbits_->num_classes();
        st.recurrent_classes = keep.size();
        st.stationary.assign(orbits_->num_classes(), 0.0);
        for (std::size_t i = 0; i < keep.size(); ++i) st.stationary[keep[i]] = pi[i];
        st.residual = (Eigen::RowVectorXd(pi.transpose()) * Ps - pi.transpose())
                          .cwiseAbs()
                          .maxCoeff();
        return st;
    }

    EquilibriumStats stats_mixture(const ParamVector& p, double gamma) const {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in (0,1)");
        return stats_b(mixture_params(p, gamma));
    }

    // Pattern game A^r B^s: the Markov-chain CLT for the cyclic product
    // chain, evaluated dense on the reduced matrices.
    EquilibriumStats stats_pattern(const ParamVector& p, int r, int s,
                                   bool want_variance = true) const {
        if (r < 1 || s < 1) throw std::invalid_argument("pattern r,s must be >= 1");
        const auto K = static_cast<Eigen::Index>(orbits_->num_classes());
        if (K > kPatternDenseMax)
            throw CapExceededError("pattern formulas need K <= " +
                                   std::to_string(kPatternDenseMax) + " classes, got " +
                                   std::to_string(K));
        const ReducedChain cb = reduced(p);
        const ReducedChain ca = reduced(kGameA);

        // T = A^r B^s, dense.
        Eigen::MatrixXd T = Eigen::MatrixXd(ca.plain);
        for (int u = 1; u < r; ++u) T = ca.plain * T;
        for (int v = 0; v < s; ++v) T = T * cb.plain;

        Eigen::MatrixXd At = Eigen::MatrixXd::Identity(K, K) - T.transpose();
        At.row(0).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
        rhs[0] = 1.0;
        Eigen::VectorXd pi = Eigen::PartialPivLU<Eigen::MatrixXd>(At).solve(rhs);
        for (Eigen::Index i = 0; i < K; ++i)
            if (pi[i] < 0.0) pi[i] = 0.0;
        pi /= pi.sum();

        const Eigen::VectorXd gB = cb.dot * Eigen::VectorXd::Ones(K);

        // a_v = pi A^r B^v, row vectors.
        std::vector<Eigen::RowVectorXd> piAu(r + 1);
        piAu[0] = pi.transpose();
        for (int u = 1; u <= r; ++u) piAu[u] = piAu[u - 1] * ca.plain;
        std::vector<Eigen::RowVectorXd> a(s);
        a[0] = piAu[r];
        for (int v = 1; v < s; ++v) a[v] = a[v - 1] * cb.plain;

        std::vector<double> mv(s);
        double mu = 0.0;
        for (int v = 0; v < s; ++v) {
            mv[v] = a[v].dot(gB);
            mu += mv[v];
        }
        mu /= (r + s);

        EquilibriumStats st;
        st.mean = mu;
        st.regime = classify_regime(p, dims_);
        st.num_classes = orbits_->num_classes();
        st.recurrent_classes = orbits_->num_classes();
        st.stationary.assign(pi.data(), pi.data() + K);
        st.residual = (pi.transpose() * T - pi.transpose()).cwiseAbs().maxCoeff();
        if (!want_variance) return st;

        const double mv_sum = std::accumulate(mv.begin(), mv.end(), 0.0);
        double mv_sq = 0.0;
        for (double m : mv) mv_sq += m * m;

        // c_u = pi A^u DotA ; f_u = pi A^r B^u DotB.
        std::vector<Eigen::RowVectorXd> c(r), f(s);
        for (int u = 0; u < r; ++u) c[u] = piAu[u] * ca.dot;
        for (int u = 0; u < s; ++u) f[u] = a[u] * cb.dot;

        // d_v = B^v gB.
        std::vector<Eigen::VectorXd> dv(s);
        dv[0] = gB;
        for (int v = 1; v < s; ++v) dv[v] = cb.plain * dv[v - 1];

        double block1 = 0.0;
        for (int v = 0; v < s; ++v) {
            Eigen::VectorXd e = dv[v];
            for (int t = 0; t < r; ++t) {
                block1 += c[r - 1 - t].dot(e);
                if (t + 1 < r) e = ca.plain * e;
            }
        }
        for (int u = 0; u < r; ++u) block1 -= c[u].sum() * mv_sum;

        double block2 = 0.0;
        for (int u = 0; u < s; ++u)
            for (int v = u + 1; v < s; ++v) block2 += f[u].dot(dv[v - u - 1]) - f[u].sum() * mv[v];

        // Both fundamental-matrix blocks share the right-hand side
        // sum_v A^r B^v gB, so one solve serves both.
        Eigen::VectorXd dsum = Eigen::VectorXd::Zero(K);
        for (int v = 0; v < s; ++v) dsum += dv[v];
        Eigen::VectorXd rho = dsum;
        for (int u = 0; u < r; ++u) rho = ca.plain * rho;

        Eigen::Index istar;
        pi.maxCoeff(&istar);
        Eigen::MatrixXd Ah = Eigen::MatrixXd::Identity(K, K) - T;
        Ah.row(istar) = pi.transpose();
        Eigen::VectorXd rh = rho.array() - pi.dot(rho);
        rh[istar] = 0.0;
        const Eigen::VectorXd H = Eigen::PartialPivLU<Eigen::MatrixXd>(Ah).solve(rh);

        Eigen::RowVectorXd alpha = c[0];
        for (int u = 1; u < r; ++u) alpha = alpha * ca.plain + c[u];
        for (int v = 0; v < s; ++v) alpha = alpha * cb.plain;
        Eigen::RowVectorXd beta = f[0];
        for (int u = 1; u < s; ++u) beta = beta * cb.plain + f[u];

        st.variance = 1.0 - mv_sq / (r + s) +
                      2.0 / (r + s) * (block1 + block2 + alpha.dot(H) + beta.dot(H));
        return st;
    }

    EquilibriumStats stats(const GameSpec& g, bool want_variance = true) const {
        switch (g.variant) {
            case GameVariant::B: return stats_b(g.params);
            case GameVariant::Mixture: return stats_mixture(g.params, g.gamma);
            case GameVariant::Pattern: return stats_pattern(g.params, g.r, g.s, want_variance);
        }
        throw std::logic_error("unreachable");
    }

    double mean(const GameSpec& g) const { return stats(g, false).mean; }

    // Equilibrium distribution of the neighbor-winner count at a reference
    // site; mu_B = sum_m lambda_m (2 p_m - 1).
    std::array<double, 5> lambda_weights(const ParamVector& p) const {
        const EquilibriumStats st = stats_b(p);
        const int S = dims_.sites();
        std::array<double, 5> lambda{0, 0, 0, 0, 0};
        const int ref_i = 1, ref_j = 1;  // site (2,2), 0-based
        const std::uint32_t n_states = 1u << S;
        for (std::uint32_t x = 0; x < n_states; ++x) {
            const double w = st.stationary[orbits_->class_of[x]];
            if (w == 0.0) continue;
            lambda[neighbor_count0(x, dims_, ref_i, ref_j)] +=
                w / orbits_->class_size[orbits_->class_of[x]];
        }
        return lambda;
    }

private:
    LatticeDims dims_;
    bool transpose_;
    std::shared_ptr<const OrbitTable> orbits_;
};

// Exhaustively (or by sampling) checks P(x_sigma, y_sigma) = P(x, y) for the
// group that backs the reduction.
inline bool verify_lumpability(const SymmetryGroup& g, const ParamVector& p,
                               std::size_t max_states = 1u << 12) {
    const LatticeDims d = g.dims();
    const std::uint32_t n_states = 1u << d.sites();
    const std::uint32_t stride = n_states <= max_states ? 1 : n_states / static_cast<std::uint32_t>(max_states);
    for (std::uint32_t xb = 0; xb < n_states; xb += stride) {
        const LatticeState x(xb, d);
        const auto row = build_full_row(x, p, SignVariant::Plain);
        for (const auto& sigma : g.elements()) {
            const std::uint32_t xs = apply_perm_bits(xb, sigma);
            const auto row_s = build_full_row(LatticeState(xs, d), p, SignVariant::Plain);
            // P(x_sigma, y_sigma) must equal P(x, y): match row entries
            // through the permutation.
            for (const auto& [y, prob] : row) {
                const std::uint32_t ys = apply_perm_bits(y, sigma);
                double found = 0.0;
                for (const auto& [z, q] : row_s)
                    if (z == ys) found += q;
                if (std::abs(found - prob) > 1e-14) return false;
            }
        }
    }
    return true;
}

// Closed-form CLT variance of the approximate voter model
// p = (eps, (1/2+eps)/2, 1/2, (3/2-eps)/2, 1-eps) on the 3x3 lattice.
inline double voter_variance_3x3(double eps) {
    if (!(eps > 0.0 && eps <= 0.5)) throw std::domain_error("eps must be in (0, 1/2]");
    const double num = 9.0 - 17.0 * eps + 12.0 * eps * eps + 4.0 * eps * eps * eps;
    const double den = eps * (1.0 + 16.0 * eps - 4.0 * eps * eps);
    return num / den;
}

inline ParamVector approximate_voter_params(double eps) {
    return ParamVector(eps, (0.5 + eps) / 2.0, 0.5, (1.5 - eps) / 2.0, 1.0 - eps);
}

}  // namespace parrondo
