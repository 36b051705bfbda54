#pragma once

// Parrondo / anti-Parrondo region mapping: exact grid scans over parameter
// cross-sections, Monte Carlo volume estimation, and the two finite
// sufficient conditions for ergodicity of the infinite-lattice limit.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "parrondo/exact.hpp"
#include "parrondo/params.hpp"
#include "parrondo/rng.hpp"
#include "parrondo/simulate.hpp"

namespace parrondo {

inline constexpr double kMeanZeroTol = 1e-12;

// max_m |p_{m+1} - p_m| < 1/4 (strict).
inline bool check_basic_estimate(const ParamVector& p) {
    double worst = 0.0;
    for (int m = 0; m < 4; ++m) worst = std::max(worst, std::abs(p[m + 1] - p[m]));
    return worst < 0.25;
}

// The five-absolute-value annihilating-duality inequality, strict.
inline bool check_annihilating(const ParamVector& p) {
    const double lhs =
        std::abs(p[0] + 4 * p[1] + 6 * p[2] + 4 * p[3] + p[4] - 8) +
        4 * std::abs(p[0] + 2 * p[1] - 2 * p[3] - p[4]) +
        6 * std::abs(p[0] - 2 * p[2] + p[4]) +
        4 * std::abs(p[0] - 2 * p[1] + 2 * p[3] - p[4]) +
        std::abs(p[0] - 4 * p[1] + 6 * p[2] - 4 * p[3] + p[4]);
    return lhs < 8.0;
}

enum class CellClass { Parrondo, AntiParrondo, Neither, Undefined };

inline const char* cell_class_name(CellClass c) {
    switch (c) {
        case CellClass::Parrondo: return "parrondo";
        case CellClass::AntiParrondo: return "anti_parrondo";
        case CellClass::Neither: return "neither";
        case CellClass::Undefined: return "undefined";
    }
    return "?";
}

// mu_B <= 0 and mu_C > 0 is Parrondo; mu_B >= 0 and mu_C < 0 is
// anti-Parrondo. mu_C within kMeanZeroTol of zero is Neither.
inline CellClass classify_cell(double mu_b, double mu_c) {
    if (mu_b <= 0.0 && mu_c > kMeanZeroTol) return CellClass::Parrondo;
    if (mu_b >= 0.0 && mu_c < -kMeanZeroTol) return CellClass::AntiParrondo;
    return CellClass::Neither;
}

struct CrossSectionSpec {
    LatticeDims dims{3, 3};
    std::array<std::optional<double>, 5> fixed;  // set entries are held constant
    std::array<int, 5> resolution{0, 0, 0, 0, 0};  // >= 2 on each free axis
    GameSpec game_for_c = GameSpec::mixture(ParamVector(), 0.5);
    int workers = 0;  // 0: hardware concurrency
};

struct RegionCell {
    ParamVector params;
    double mu_b = 0.0;
    double mu_c = 0.0;
    CellClass cls = CellClass::Neither;
};

struct RegionGrid {
    CrossSectionSpec spec;
    std::vector<int> free_axes;
    std::vector<RegionCell> cells;  // lexicographic over free axes
};

namespace detail {

inline int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 4;
}

inline void parallel_chunks(std::size_t count, int workers, const std::function<void(std::size_t, std::size_t)>& fn) {
    const int w = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (w == 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + w - 1) / w;
    for (int t = 0; t < w; ++t) {
        const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// mu_C evaluated at a parameter point; mixtures run through the blended
// game-B chain, patterns through the product-chain mean.
inline double mean_c(const ExactEngine& eng, const GameSpec& c, const ParamVector& p) {
    if (c.variant == GameVariant::Mixture) return eng.stats_b(mixture_params(p, c.gamma)).mean;
    if (c.variant == GameVariant::Pattern)
        return eng.stats_pattern(p, c.r, c.s, /*want_variance=*/false).mean;
    return eng.stats_b(p).mean;
}

}  // namespace detail

inline RegionGrid scan_cross_section(const CrossSectionSpec& spec, const ExactEngine& engine) {
    RegionGrid grid;
    grid.spec = spec;
    std::size_t total = 1;
    for (int m = 0; m < 5; ++m) {
        if (spec.fixed[m].has_value()) continue;
        if (spec.resolution[m] < 2) throw std::invalid_argument("free axis needs resolution >= 2");
        grid.free_axes.push_back(m);
        total *= static_cast<std::size_t>(spec.resolution[m]);
    }
    if (grid.free_axes.empty()) throw std::invalid_argument("cross-section has no free axis");
    grid.cells.resize(total);

    detail::parallel_chunks(total, detail::resolve_workers(spec.workers),
        [&](std::size_t lo, std::size_t hi) {
            for (std::size_t cell = lo; cell < hi; ++cell) {
                std::array<double, 5> v{};
                std::size_t rem = cell;
                for (auto it = grid.free_axes.rbegin(); it != grid.free_axes.rend(); ++it) {
                    const int res = spec.resolution[*it];
                    v[*it] = static_cast<double>(rem % res) / (res - 1);
                    rem /= res;
                }
                for (int m = 0; m < 5; ++m)
                    if (spec.fixed[m]) v[m] = *spec.fixed[m];
                RegionCell& out = grid.cells[cell];
                out.params = ParamVector(v[0], v[1], v[2], v[3], v[4]);
                try {
                    out.mu_b = engine.stats_b(out.params).mean;
                    out.mu_c = detail::mean_c(engine, spec.game_for_c, out.params);
                    out.cls = classify_cell(out.mu_b, out.mu_c);
                } catch (const MeanUndefinedError&) {
                    out.cls = CellClass::Undefined;
                } catch (const RegimeNotErgodicError&) {
                    out.cls = CellClass::Undefined;
                }
            }
        });
    return grid;
}

inline void write_region_csv(std::ostream& os, const RegionGrid& g) {
    os << "p0,p1,p2,p3,p4,mu_B,mu_C,class\n";
    for (const auto& c : g.cells) {
        os << c.params[0] << ',' << c.params[1] << ',' << c.params[2] << ',' << c.params[3]
           << ',' << c.params[4] << ',' << c.mu_b << ',' << c.mu_c << ','
           << cell_class_name(c.cls) << '\n';
    }
}

struct VolumeEstimate {
    double vol_parrondo = 0.0;
    double vol_anti = 0.0;
    double se_parrondo = 0.0;
    double se_anti = 0.0;
    long long samples = 0;
};

// Uniform samples of (p1, p3, p2) in the unit cube with p0, p4 fixed;
// binomial standard errors. Per-sample counter streams keep the result
// independent of the worker count.
inline VolumeEstimate estimate_region_volume(const ExactEngine& engine, double p0, double p4,
                                             const GameSpec& game_for_c, long long samples,
                                             std::uint64_t seed, int workers = 0) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::atomic<long long> n_par{0}, n_anti{0};
    detail::parallel_chunks(static_cast<std::size_t>(samples), detail::resolve_workers(workers),
        [&](std::size_t lo, std::size_t hi) {
            long long local_par = 0, local_anti = 0;
            for (std::size_t idx = lo; idx < hi; ++idx) {
                PhiloxStream rng(seed, 0x100000000ull + idx);
                const double p1 = rng.uniform01();
                const double p3 = rng.uniform01();
                const double p2 = rng.uniform01();
                const ParamVector p(p0, p1, p2, p3, p4);
                try {
                    const double mu_b = engine.stats_b(p).mean;
                    const double mu_c = detail::mean_c(engine, game_for_c, p);
                    const CellClass cls = classify_cell(mu_b, mu_c);
                    if (cls == CellClass::Parrondo) ++local_par;
                    if (cls == CellClass::AntiParrondo) ++local_anti;
                } catch (const std::runtime_error&) {
                    // absorbing corner of the cube: in neither region
                }
            }
            n_par += local_par;
            n_anti += local_anti;
        });
    VolumeEstimate v;
    v.samples = samples;
    v.vol_parrondo = static_cast<double>(n_par.load()) / static_cast<double>(samples);
    v.vol_anti = static_cast<double>(n_anti.load()) / static_cast<double>(samples);
    v.se_parrondo = std::sqrt(v.vol_parrondo * (1 - v.vol_parrondo) / static_cast<double>(samples));
    v.se_anti = std::sqrt(v.vol_anti * (1 - v.vol_anti) / static_cast<double>(samples));
    return v;
}

enum class ConditionSelector { Basic, Annihilating, Either };
enum class ConditionGame { B, HalfMixture };

struct FractionEstimate {
    double fraction = 0.0;
    double std_error = 0.0;
    long long samples = 0;
};

// Fraction of the [0,1]^5 parameter cube on which the chosen sufficient
// condition holds; for the half-mixture game the condition is evaluated at
// the blended parameters.
inline FractionEstimate estimate_condition_fraction(ConditionSelector sel, ConditionGame game,
                                                    long long samples, std::uint64_t seed,
                                                    int workers = 0) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    std::atomic<long long> hits{0};
    detail::parallel_chunks(static_cast<std::size_t>(samples), detail::resolve_workers(workers),
        [&](std::size_t lo, std::size_t hi) {
            long long local = 0;
            for (std::size_t idx = lo; idx < hi; ++idx) {
                PhiloxStream rng(seed, 0x200000000ull + idx);
                ParamVector p(rng.uniform01(), rng.uniform01(), rng.uniform01(), rng.uniform01(),
                              rng.uniform01());
                if (game == ConditionGame::HalfMixture) p = mixture_params(p, 0.5);
                bool ok = false;
                switch (sel) {
                    case ConditionSelector::Basic: ok = check_basic_estimate(p); break;
                    case ConditionSelector::Annihilating: ok = check_annihilating(p); break;
                    case ConditionSelector::Either:
                        ok = check_basic_estimate(p) || check_annihilating(p);
                        break;
                }
                if (ok) ++local;
            }
            hits += local;
        });
    FractionEstimate f;
    f.samples = samples;
    f.fraction = static_cast<double>(hits.load()) / static_cast<double>(samples);
    f.std_error = std::sqrt(f.fraction * (1 - f.fraction) / static_cast<double>(samples));
    return f;
}

struct ProbeRow {
    LatticeDims dims{3, 3};
    double mu = 0.0;
    double std_error = 0.0;  // zero for exact entries
    bool exact = true;
};

enum class ProbeMode { Exact, Simulate };

// mu versus lattice size for one game, to assess stabilization as M,N grow.
inline std::vector<ProbeRow> convergence_probe(const GameSpec& game,
                                               const std::vector<LatticeDims>& sizes,
                                               ProbeMode mode, const SimConfig& sim_cfg = {},
                                               int cap = kDefaultExactCap) {
    std::vector<ProbeRow> rows;
    rows.reserve(sizes.size());
    for (const auto& d : sizes) {
        ProbeRow row;
        row.dims = d;
        if (mode == ProbeMode::Exact) {
            ExactEngine eng(d, true, cap);
            row.mu = eng.mean(game);
            row.exact = true;
        } else {
            const SimResult r = simulate_game(d, game, sim_cfg);
            row.mu = r.mean_hat;
            row.std_error = r.std_error;
            row.exact = false;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace parrondo
