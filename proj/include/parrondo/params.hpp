#pragma once

// Coin parameter vectors, game variants, and the parameter-level regime
// classification for boundary values of p0 and p4.

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "parrondo/lattice.hpp"

namespace parrondo {

// Heads probabilities of coins 0..4; coin m is tossed when the chosen
// player has m winning neighbors.
struct ParamVector {
    std::array<double, 5> p{0.5, 0.5, 0.5, 0.5, 0.5};

    ParamVector() = default;
    ParamVector(double p0, double p1, double p2, double p3, double p4) : p{p0, p1, p2, p3, p4} {
        for (double v : p)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("coin probability outside [0,1]");
    }
    double operator[](int m) const { return p[m]; }
    double q(int m) const { return 1.0 - p[m]; }
    bool operator==(const ParamVector&) const = default;

    bool monotone() const {
        return p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3] && p[3] <= p[4];
    }
    std::string to_string() const {
        std::ostringstream os;
        os << p[0] << ',' << p[1] << ',' << p[2] << ',' << p[3] << ',' << p[4];
        return os.str();
    }
};

inline const ParamVector kGameA{0.5, 0.5, 0.5, 0.5, 0.5};

// Affine blend toward 1/2: playing gamma*A + (1-gamma)*B is the same chain
// as game B at the blended parameters.
inline ParamVector mixture_params(const ParamVector& p, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma outside [0,1]");
    return ParamVector(gamma * 0.5 + (1 - gamma) * p[0], gamma * 0.5 + (1 - gamma) * p[1],
                       gamma * 0.5 + (1 - gamma) * p[2], gamma * 0.5 + (1 - gamma) * p[3],
                       gamma * 0.5 + (1 - gamma) * p[4]);
}

// (p0,..,p4) -> (1-p4,..,1-p0); negates all three mean functions.
inline ParamVector reflect_params(const ParamVector& p) {
    return ParamVector(1 - p[4], 1 - p[3], 1 - p[2], 1 - p[1], 1 - p[0]);
}

enum class GameVariant { B, Mixture, Pattern };

struct GameSpec {
    GameVariant variant = GameVariant::B;
    ParamVector params;
    double gamma = 0.5;  // Mixture
    int r = 1, s = 1;    // Pattern

    static GameSpec game_b(const ParamVector& p) { return {GameVariant::B, p, 0.5, 1, 1}; }
    static GameSpec mixture(const ParamVector& p, double gamma) {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("mixture gamma must be in (0,1)");
        return {GameVariant::Mixture, p, gamma, 1, 1};
    }
    static GameSpec pattern(const ParamVector& p, int r, int s) {
        if (r < 1 || s < 1) throw std::invalid_argument("pattern r,s must be >= 1");
        return {GameVariant::Pattern, p, 0.5, r, s};
    }
    std::string name() const {
        std::ostringstream os;
        switch (variant) {
            case GameVariant::B: os << "B"; break;
            case GameVariant::Mixture: os << "mix:" << gamma; break;
            case GameVariant::Pattern: os << "pat:" << r << "," << s; break;
        }
        return os.str();
    }
};

enum class RegimeTag {
    Ergodic,
    RestrictedErgodic_Drop0,   // p0=1, 0<p4<1: all-zeros unreachable
    AbsorbAllZeros_MeanMinus1, // p0=0, p4<1
    RestrictedErgodic_Drop1,   // p4=0, 0<p0<1
    AbsorbAllOnes_MeanPlus1,   // p4=1, p0>0
    Checkerboard_MeanZero,     // p0=1, p4=0, M and N even
    Case5_OddConjectured,      // p0=1, p4=0, M or N odd
    MeanUndefined,             // p0=0, p4=1
    BoundaryNumeric,           // p1, p2 or p3 in {0,1}: resolved by reachability
};

inline const char* regime_name(RegimeTag t) {
    switch (t) {
        case RegimeTag::Ergodic: return "ergodic";
        case RegimeTag::RestrictedErgodic_Drop0: return "restricted_ergodic_drop0";
        case RegimeTag::AbsorbAllZeros_MeanMinus1: return "absorb_all_zeros";
        case RegimeTag::RestrictedErgodic_Drop1: return "restricted_ergodic_drop1";
        case RegimeTag::AbsorbAllOnes_MeanPlus1: return "absorb_all_ones";
        case RegimeTag::Checkerboard_MeanZero: return "checkerboard_mean_zero";
        case RegimeTag::Case5_OddConjectured: return "case5_odd_conjectured";
        case RegimeTag::MeanUndefined: return "mean_undefined";
        case RegimeTag::BoundaryNumeric: return "boundary_numeric";
    }
    return "?";
}

struct MeanUndefinedError : std::runtime_error {
    MeanUndefinedError() : std::runtime_error("mean undefined: p0=0 and p4=1 make both constant states absorbing") {}
};
struct RegimeNotErgodicError : std::runtime_error {
    explicit RegimeNotErgodicError(const std::string& what) : std::runtime_error(what) {}
};
struct CapExceededError : std::length_error {
    explicit CapExceededError(const std::string& what) : std::length_error(what) {}
};

inline RegimeTag classify_regime(const ParamVector& p, const LatticeDims& dims) {
    const bool p0_zero = p[0] == 0.0, p0_one = p[0] == 1.0;
    const bool p4_zero = p[4] == 0.0, p4_one = p[4] == 1.0;
    if (p0_zero && p4_one) return RegimeTag::MeanUndefined;
    if (p0_zero) return RegimeTag::AbsorbAllZeros_MeanMinus1;
    if (p4_one) return RegimeTag::AbsorbAllOnes_MeanPlus1;
    if (p0_one && p4_zero) {
        if (dims.M % 2 == 0 && dims.N % 2 == 0) return RegimeTag::Checkerboard_MeanZero;
        return RegimeTag::Case5_OddConjectured;
    }
    const bool interior_middle = p[1] > 0.0 && p[1] < 1.0 && p[2] > 0.0 && p[2] < 1.0 &&
                                 p[3] > 0.0 && p[3] < 1.0;
    if (p0_one) return interior_middle ? RegimeTag::RestrictedErgodic_Drop0 : RegimeTag::BoundaryNumeric;
    if (p4_zero) return interior_middle ? RegimeTag::RestrictedErgodic_Drop1 : RegimeTag::BoundaryNumeric;
    return interior_middle ? RegimeTag::Ergodic : RegimeTag::BoundaryNumeric;
}

}  // namespace parrondo
