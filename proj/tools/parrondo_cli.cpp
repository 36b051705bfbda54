// Command-line front end: exact solves, simulations, region scans, volume
// estimates, orbit enumeration, condition checks, and size probes. Every
// run writes a config JSON next to its output that reproduces it exactly.
//
// Exit codes: 0 success, 2 usage error, 3 domain error (e.g. undefined
// mean), 4 capacity error (lattice too large for the exact path).

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parrondo/exact.hpp"
#include "parrondo/lattice.hpp"
#include "parrondo/params.hpp"
#include "parrondo/regions.hpp"
#include "parrondo/rng.hpp"
#include "parrondo/simulate.hpp"

using json = nlohmann::ordered_json;
using namespace parrondo;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Probabilities accepted as decimals or exact fractions like "8/13".
double parse_prob(const std::string& s) {
    std::size_t used = 0;
    double v;
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            const double num = std::stod(s.substr(0, slash));
            const double den = std::stod(s.substr(slash + 1), &used);
            if (used != s.size() - slash - 1 || den == 0.0) throw std::invalid_argument(s);
            v = num / den;
        } else {
            v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
        }
    } catch (const std::exception&) {
        throw UsageError("cannot parse probability '" + s + "'");
    }
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("probability '" + s + "' outside [0,1]");
    return v;
}

// Counts accepted in scientific notation ("1e9") as long as they are whole.
long long parse_count(const std::string& s) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("cannot parse count '" + s + "'");
    }
    if (used != s.size() || v < 0 || v > 9e18 || v != std::floor(v))
        throw UsageError("count '" + s + "' is not a nonnegative integer");
    return static_cast<long long>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

LatticeDims parse_dims(const std::string& s) {
    const auto parts = split(s, 'x');
    if (parts.size() != 2) throw UsageError("dims must look like 3x3, got '" + s + "'");
    try {
        return LatticeDims(std::stoi(parts[0]), std::stoi(parts[1]));
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad dims: ") + e.what());
    }
}

ParamVector parse_params(const std::string& s) {
    const auto parts = split(s, ',');
    if (parts.size() != 5) throw UsageError("--p needs 5 comma-separated probabilities");
    return ParamVector(parse_prob(parts[0]), parse_prob(parts[1]), parse_prob(parts[2]),
                       parse_prob(parts[3]), parse_prob(parts[4]));
}

// "B", "mix:0.5", or "pat:2,2".
GameSpec parse_game(const std::string& s, const ParamVector& p) {
    if (s == "B" || s == "b") return GameSpec::game_b(p);
    if (s.rfind("mix:", 0) == 0) {
        try {
            return GameSpec::mixture(p, parse_prob(s.substr(4)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (s.rfind("pat:", 0) == 0) {
        const auto rs = split(s.substr(4), ',');
        if (rs.size() != 2) throw UsageError("pattern game must look like pat:2,2");
        try {
            return GameSpec::pattern(p, std::stoi(rs[0]), std::stoi(rs[1]));
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad pattern: ") + e.what());
        }
    }
    throw UsageError("unknown game '" + s + "' (expected B, mix:<gamma>, or pat:<r>,<s>)");
}

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        throw UsageError(std::string(name) + " is not an integer");
    }
}

json game_json(const GameSpec& g) {
    json j;
    j["name"] = g.name();
    switch (g.variant) {
        case GameVariant::B: j["variant"] = "B"; break;
        case GameVariant::Mixture:
            j["variant"] = "mixture";
            j["gamma"] = g.gamma;
            break;
        case GameVariant::Pattern:
            j["variant"] = "pattern";
            j["r"] = g.r;
            j["s"] = g.s;
            break;
    }
    return j;
}

// The config is the literal argv, so re-running it is trivially faithful.
void emit(const json& result, const std::string& out_path,
          const std::vector<std::string>& argv) {
    const std::string text = result.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream of(out_path, std::ios::binary);
    if (!of) throw std::runtime_error("cannot write " + out_path);
    of << text;
    json cfg;
    cfg["schema"] = 1;
    cfg["argv"] = argv;
    std::ofstream cf(out_path + ".config.json", std::ios::binary);
    cf << cfg.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
}

struct Common {
    std::string dims_s = "3x3";
    std::string game_s = "B";
    std::string p_s;
    std::string out;
    int workers = 0;
    int cap = 0;
    bool no_transpose = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_p = true) {
    cmd->add_option("--dims", c.dims_s, "lattice size MxN")->capture_default_str();
    cmd->add_option("--game", c.game_s, "B, mix:<gamma>, or pat:<r>,<s>")->capture_default_str();
    auto* p = cmd->add_option("--p", c.p_s, "five coin probabilities (decimals or fractions)");
    if (needs_p) p->required();
    cmd->add_option("--out", c.out, "write JSON here (plus <out>.config.json)");
    cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
    cmd->add_option("--cap", c.cap, "exact-path cap on M*N (default 20, max 25)");
    cmd->add_flag("--no-transpose", c.no_transpose, "skip the transposition symmetry on squares");
}

int resolve_workers(int flag) { return flag > 0 ? flag : env_int("PARRONDO_WORKERS", 0); }
int resolve_cap(int flag) {
    return flag > 0 ? flag : env_int("PARRONDO_EXACT_CAP", kDefaultExactCap);
}

json stats_json(const EquilibriumStats& st) {
    json j;
    j["mu"] = st.mean;
    j["sigma2"] = st.variance;
    j["regime"] = regime_name(st.regime);
    j["num_classes"] = st.num_classes;
    j["recurrent_classes"] = st.recurrent_classes;
    j["residual"] = st.residual;
    return j;
}

int run(const std::vector<std::string>& argv);

int cmd_exact(const Common& c, const std::vector<std::string>& argv) {
    const LatticeDims dims = parse_dims(c.dims_s);
    const ParamVector p = parse_params(c.p_s);
    const GameSpec game = parse_game(c.game_s, p);
    ExactEngine eng(dims, !c.no_transpose, resolve_cap(c.cap));
    const EquilibriumStats st = eng.stats(game);
    json j;
    j["schema"] = 1;
    j["command"] = "exact";
    j["M"] = dims.M;
    j["N"] = dims.N;
    j["game"] = game_json(game);
    j["params"] = p.p;
    j.update(stats_json(st));
    emit(j, c.out, argv);
    return 0;
}

struct SimFlags {
    std::string n_s = "1000000";
    std::string warmup_s = "-1";
    double c = -1;
    std::uint64_t seed = 0;
    std::string init = "zeros";
    std::string trace;
    long long trace_every = 1;
};

void add_sim(CLI::App* cmd, SimFlags& f) {
    cmd->add_option("--n", f.n_s, "post-warm-up turns (accepts 1e9)")->capture_default_str();
    cmd->add_option("--warmup", f.warmup_s, "warm-up turns; -1 = 10x mixing bound");
    cmd->add_option("--c", f.c, "block-size constant for b = floor(c n^(1/3))");
    cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--init", f.init, "initial state: zeros or ones")->capture_default_str();
    cmd->add_option("--trace", f.trace, "write a (turn, S_n) CSV trace here");
    cmd->add_option("--trace-every", f.trace_every, "trace stride")->capture_default_str();
}

SimConfig make_sim_config(const SimFlags& f) {
    SimConfig cfg;
    cfg.n = parse_count(f.n_s);
    if (cfg.n < 1) throw UsageError("--n must be >= 1");
    cfg.warmup = f.warmup_s == "-1" ? -1 : parse_count(f.warmup_s);
    cfg.block_constant = f.c;
    cfg.seed = f.seed;
    if (f.init == "zeros")
        cfg.init = InitialState::AllZeros;
    else if (f.init == "ones")
        cfg.init = InitialState::AllOnes;
    else
        throw UsageError("--init must be zeros or ones");
    return cfg;
}

int cmd_simulate(const Common& c, const SimFlags& f, const std::vector<std::string>& argv) {
    const LatticeDims dims = parse_dims(c.dims_s);
    const ParamVector p = parse_params(c.p_s);
    const GameSpec game = parse_game(c.game_s, p);
    const SimConfig cfg = make_sim_config(f);

    std::ofstream trace_of;
    TraceFn trace;
    if (!f.trace.empty()) {
        if (f.trace_every < 1) throw UsageError("--trace-every must be >= 1");
        trace_of.open(f.trace, std::ios::binary);
        if (!trace_of) throw std::runtime_error("cannot write " + f.trace);
        trace_of << "turn,S_n\n";
        const long long every = f.trace_every;
        trace = [&trace_of, every](long long turn, long long s) {
            if (turn % every == 0) trace_of << turn << ',' << s << '\n';
        };
    }
    const SimResult r = simulate_game(dims, game, cfg, trace);

    json j;
    j["schema"] = 1;
    j["command"] = "simulate";
    j["M"] = dims.M;
    j["N"] = dims.N;
    j["game"] = game_json(game);
    j["params"] = p.p;
    j["n"] = r.n;
    j["l"] = r.warmup;
    j["b"] = r.block_size;
    j["c"] = r.block_constant;
    j["seed"] = cfg.seed;
    j["mean_hat"] = r.mean_hat;
    j["var_hat"] = r.var_hat;
    j["std_error"] = r.std_error;
    emit(j, c.out, argv);
    return 0;
}

struct ScanFlags {
    std::string res_s;
    std::string csv;
};

int cmd_scan(const Common& c, const ScanFlags& f, const std::vector<std::string>& argv) {
    CrossSectionSpec spec;
    spec.dims = parse_dims(c.dims_s);
    spec.workers = resolve_workers(c.workers);

    // --p uses 'x' for free axes: e.g. 0.1,x,x,0.5,0.9
    const auto parts = split(c.p_s, ',');
    if (parts.size() != 5) throw UsageError("--p needs 5 entries ('x' marks a free axis)");
    std::vector<int> free_axes;
    for (int m = 0; m < 5; ++m) {
        if (parts[m] == "x")
            free_axes.push_back(m);
        else
            spec.fixed[m] = parse_prob(parts[m]);
    }
    const auto res = split(f.res_s, ',');
    if (res.size() != free_axes.size())
        throw UsageError("--res needs one resolution per free axis");
    for (std::size_t i = 0; i < res.size(); ++i)
        spec.resolution[free_axes[i]] = static_cast<int>(parse_count(res[i]));
    spec.game_for_c = parse_game(c.game_s, ParamVector());

    ExactEngine eng(spec.dims, !c.no_transpose, resolve_cap(c.cap));
    const RegionGrid grid = scan_cross_section(spec, eng);

    if (f.csv.empty()) throw UsageError("scan requires --csv <file>");
    std::ofstream of(f.csv, std::ios::binary);
    if (!of) throw std::runtime_error("cannot write " + f.csv);
    write_region_csv(of, grid);

    std::size_t n_par = 0, n_anti = 0, n_undef = 0;
    for (const auto& cell : grid.cells) {
        n_par += cell.cls == CellClass::Parrondo;
        n_anti += cell.cls == CellClass::AntiParrondo;
        n_undef += cell.cls == CellClass::Undefined;
    }
    json j;
    j["schema"] = 1;
    j["command"] = "scan";
    j["M"] = spec.dims.M;
    j["N"] = spec.dims.N;
    j["game"] = game_json(spec.game_for_c);
    j["free_axes"] = grid.free_axes;
    json resj = json::array();
    for (int a : grid.free_axes) resj.push_back(spec.resolution[a]);
    j["resolution"] = resj;
    j["cells"] = grid.cells.size();
    j["parrondo"] = n_par;
    j["anti_parrondo"] = n_anti;
    j["undefined"] = n_undef;
    j["csv"] = f.csv;
    emit(j, c.out, argv);
    return 0;
}

struct VolumeFlags {
    std::string p0_s, p4_s;
    std::string samples_s = "100000";
    std::uint64_t seed = 0;
};

int cmd_volume(const Common& c, const VolumeFlags& f, const std::vector<std::string>& argv) {
    const LatticeDims dims = parse_dims(c.dims_s);
    const double p0 = parse_prob(f.p0_s), p4 = parse_prob(f.p4_s);
    const GameSpec game = parse_game(c.game_s, ParamVector());
    const long long samples = parse_count(f.samples_s);
    ExactEngine eng(dims, !c.no_transpose, resolve_cap(c.cap));
    const VolumeEstimate v = estimate_region_volume(eng, p0, p4, game, samples, f.seed,
                                                    resolve_workers(c.workers));
    json j;
    j["schema"] = 1;
    j["command"] = "volume";
    j["M"] = dims.M;
    j["N"] = dims.N;
    j["p0"] = p0;
    j["p4"] = p4;
    j["game"] = game_json(game);
    j["samples"] = v.samples;
    j["seed"] = f.seed;
    j["vol_parrondo"] = v.vol_parrondo;
    j["se_parrondo"] = v.se_parrondo;
    j["vol_anti"] = v.vol_anti;
    j["se_anti"] = v.se_anti;
    emit(j, c.out, argv);
    return 0;
}

int cmd_orbits(const Common& c, bool transpose, const std::string& csv,
               const std::vector<std::string>& argv) {
    const LatticeDims dims = parse_dims(c.dims_s);
    if (dims.sites() > kMaxExactBits)
        throw CapExceededError("M*N = " + std::to_string(dims.sites()) + " exceeds 25");
    const OrbitTable t = enumerate_orbits(dims, transpose);
    if (!csv.empty()) {
        std::ofstream of(csv, std::ios::binary);
        if (!of) throw std::runtime_error("cannot write " + csv);
        write_orbit_csv(of, t);
    }
    json j;
    j["schema"] = 1;
    j["command"] = "orbits";
    j["M"] = dims.M;
    j["N"] = dims.N;
    j["transpose"] = t.used_transpose;
    j["num_states"] = 1ll << dims.sites();
    j["num_classes"] = t.num_classes();
    if (!csv.empty()) j["csv"] = csv;
    emit(j, c.out, argv);
    return 0;
}

struct CheckFlags {
    std::string fraction;  // basic | annihilating | either
    std::string cond_game = "B";
    std::string samples_s = "1000000";
    std::uint64_t seed = 0;
};

int cmd_check(const Common& c, const CheckFlags& f, const std::vector<std::string>& argv) {
    json j;
    j["schema"] = 1;
    j["command"] = "check";
    if (!c.p_s.empty()) {
        const ParamVector p = parse_params(c.p_s);
        j["params"] = p.p;
        j["basic"] = check_basic_estimate(p);
        j["annihilating"] = check_annihilating(p);
        std::printf("basic=%s annihilating=%s\n", check_basic_estimate(p) ? "true" : "false",
                    check_annihilating(p) ? "true" : "false");
    }
    if (!f.fraction.empty()) {
        ConditionSelector sel;
        if (f.fraction == "basic")
            sel = ConditionSelector::Basic;
        else if (f.fraction == "annihilating")
            sel = ConditionSelector::Annihilating;
        else if (f.fraction == "either")
            sel = ConditionSelector::Either;
        else
            throw UsageError("--fraction must be basic, annihilating, or either");
        ConditionGame game;
        if (f.cond_game == "B" || f.cond_game == "b")
            game = ConditionGame::B;
        else if (f.cond_game == "halfmix")
            game = ConditionGame::HalfMixture;
        else
            throw UsageError("--cond-game must be B or halfmix");
        const FractionEstimate est = estimate_condition_fraction(
            sel, game, parse_count(f.samples_s), f.seed, resolve_workers(c.workers));
        j["fraction_condition"] = f.fraction;
        j["fraction_game"] = f.cond_game;
        j["samples"] = est.samples;
        j["seed"] = f.seed;
        j["fraction"] = est.fraction;
        j["std_error"] = est.std_error;
    }
    if (c.p_s.empty() && f.fraction.empty())
        throw UsageError("check needs --p and/or --fraction");
    emit(j, c.out, argv);
    return 0;
}

struct ProbeFlags {
    std::string sizes_s = "3x3,3x4,4x4";
    std::string mode = "exact";
    SimFlags sim;
};

int cmd_probe(const Common& c, const ProbeFlags& f, const std::vector<std::string>& argv) {
    const ParamVector p = parse_params(c.p_s);
    const GameSpec game = parse_game(c.game_s, p);
    std::vector<LatticeDims> sizes;
    for (const auto& s : split(f.sizes_s, ',')) sizes.push_back(parse_dims(s));
    ProbeMode mode;
    if (f.mode == "exact")
        mode = ProbeMode::Exact;
    else if (f.mode == "simulate")
        mode = ProbeMode::Simulate;
    else
        throw UsageError("--mode must be exact or simulate");
    const SimConfig cfg = mode == ProbeMode::Simulate ? make_sim_config(f.sim) : SimConfig{};
    const auto rows = convergence_probe(game, sizes, mode, cfg, resolve_cap(c.cap));
    json j;
    j["schema"] = 1;
    j["command"] = "probe";
    j["game"] = game_json(game);
    j["params"] = p.p;
    j["mode"] = f.mode;
    json rj = json::array();
    for (const auto& row : rows) {
        json one;
        one["M"] = row.dims.M;
        one["N"] = row.dims.N;
        one["mu"] = row.mu;
        one["exact"] = row.exact;
        if (!row.exact) one["std_error"] = row.std_error;
        rj.push_back(one);
    }
    j["rows"] = rj;
    emit(j, c.out, argv);
    return 0;
}

int run(const std::vector<std::string>& argv) {
    // --config re-runs the argv recorded next to a previous output.
    for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
        if (argv[i] == "--config") {
            std::ifstream cf(argv[i + 1]);
            if (!cf) throw std::runtime_error("cannot read " + argv[i + 1]);
            const json cfg = json::parse(cf);
            return run(cfg.at("argv").get<std::vector<std::string>>());
        }
    }

    CLI::App app{"Spatially dependent Parrondo games: exact equilibria, simulation, regions"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Common c_exact, c_sim, c_scan, c_vol, c_orb, c_chk, c_probe;
    SimFlags sim;
    ScanFlags scan;
    VolumeFlags vol;
    CheckFlags chk;
    ProbeFlags probe;
    bool orb_transpose = false;
    std::string orb_csv;

    auto* cmd_ex = app.add_subcommand("exact", "equilibrium mean/variance via the lumped chain");
    add_common(cmd_ex, c_exact);
    auto* cmd_si = app.add_subcommand("simulate", "Monte Carlo run with block-estimator SE");
    add_common(cmd_si, c_sim);
    add_sim(cmd_si, sim);
    auto* cmd_sc = app.add_subcommand("scan", "exact mu_B/mu_C over a parameter cross-section");
    add_common(cmd_sc, c_scan);
    cmd_sc->add_option("--res", scan.res_s, "grid resolution per free axis, e.g. 21,21,21");
    cmd_sc->add_option("--csv", scan.csv, "cell CSV output path");
    auto* cmd_vo = app.add_subcommand("volume", "Monte Carlo Parrondo-region volume");
    add_common(cmd_vo, c_vol, /*needs_p=*/false);
    cmd_vo->add_option("--p0", vol.p0_s, "fixed p0")->required();
    cmd_vo->add_option("--p4", vol.p4_s, "fixed p4")->required();
    cmd_vo->add_option("--samples", vol.samples_s, "sample count")->capture_default_str();
    cmd_vo->add_option("--seed", vol.seed, "RNG seed")->capture_default_str();
    auto* cmd_or = app.add_subcommand("orbits", "enumerate symmetry classes");
    add_common(cmd_or, c_orb, /*needs_p=*/false);
    cmd_or->add_flag("--transpose", orb_transpose, "include transposition (square lattices)");
    cmd_or->add_option("--csv", orb_csv, "orbit table CSV output path");
    auto* cmd_ch = app.add_subcommand("check", "sufficient-condition checks and fractions");
    add_common(cmd_ch, c_chk, /*needs_p=*/false);
    cmd_ch->add_option("--fraction", chk.fraction, "estimate: basic, annihilating, or either");
    cmd_ch->add_option("--cond-game", chk.cond_game, "B or halfmix")->capture_default_str();
    cmd_ch->add_option("--samples", chk.samples_s, "sample count")->capture_default_str();
    cmd_ch->add_option("--seed", chk.seed, "RNG seed")->capture_default_str();
    auto* cmd_pr = app.add_subcommand("probe", "mu versus lattice size");
    add_common(cmd_pr, c_probe);
    cmd_pr->add_option("--sizes", probe.sizes_s, "comma list of MxN")->capture_default_str();
    cmd_pr->add_option("--mode", probe.mode, "exact or simulate")->capture_default_str();
    add_sim(cmd_pr, probe.sim);

    std::vector<std::string> args(argv.begin() + 1, argv.end());
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (cmd_ex->parsed()) return cmd_exact(c_exact, argv);
    if (cmd_si->parsed()) return cmd_simulate(c_sim, sim, argv);
    if (cmd_sc->parsed()) return cmd_scan(c_scan, scan, argv);
    if (cmd_vo->parsed()) return cmd_volume(c_vol, vol, argv);
    if (cmd_or->parsed()) return cmd_orbits(c_orb, orb_transpose, orb_csv, argv);
    if (cmd_ch->parsed()) return cmd_check(c_chk, chk, argv);
    if (cmd_pr->parsed()) return cmd_probe(c_probe, probe, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    try {
        return run(args);
    } catch (const CLI::CallForHelp& e) {
        std::cout << e.what() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const MeanUndefinedError&) {
        std::cerr << "mean undefined\n";
        return 3;
    } catch (const RegimeNotErgodicError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const CapExceededError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const std::length_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
