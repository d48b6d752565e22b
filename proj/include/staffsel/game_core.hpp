#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace staffsel {

/** Shortfall cost paid by a player who reaches the end without hiring. */
struct Cost {
    double c = 0.0;

    Cost() = default;
    explicit Cost(double cost) : c(cost) {
        if (!std::isfinite(c) || c < 0.0)
            throw std::invalid_argument("Cost: c must be finite and non-negative");
    }
};

// d = (1 - 2c)/4: per-player value of the final stage, where both players
// stop on the last candidate and a fair coin awards the hire.
inline double one_stage_value(Cost cost) { return (1.0 - 2.0 * cost.c) / 4.0; }

// b = max{0, d}: lower edge of the contested interval in the two-stage game.
inline double clamped_one_stage_value(Cost cost) {
    return std::max(0.0, one_stage_value(cost));
}

/** Optimal values u_0..u_N of a searcher who no longer has a competitor.
    u_0 = -c; afterwards u_n = E[max(xi, u_{n-1})] with xi ~ U[0,1]. */
struct LoneSearcherValues {
    Cost cost;
    std::vector<double> values;  // values[n] = u_n

    double at(std::size_t n) const {
        if (n >= values.size()) throw std::out_of_range("LoneSearcherValues::at: stage out of range");
        return values[n];
    }
    std::size_t max_stage() const { return values.size() - 1; }
};

// E[max(x, t)] over U[0,1] is (1 + t^2)/2 for t in [0,1] and 1/2 for t < 0.
inline LoneSearcherValues lone_searcher_values(Cost cost, int n_max) {
    if (n_max < 0) throw std::invalid_argument("lone_searcher_values: n_max must be >= 0");
    std::vector<double> u(static_cast<std::size_t>(n_max) + 1);
    u[0] = -cost.c;
    for (int n = 1; n <= n_max; ++n) {
        double t = u[static_cast<std::size_t>(n) - 1];
        u[static_cast<std::size_t>(n)] = t < 0.0 ? 0.5 : 0.5 * (1.0 + t * t);
    }
    return {cost, std::move(u)};
}

/** Inputs of one stage of the two-player game: the current draw x together
    with the continuation values carried in from the previous stage. u_prev is
    the lone-searcher value, v_prev/w_prev the players' values if both pass. */
struct StageParams {
    double x = 0.0;
    double u_prev = 0.0;
    double v_prev = 0.0;
    double w_prev = 0.0;

    StageParams(double x_, double u, double v, double w)
        : x(x_), u_prev(u), v_prev(v), w_prev(w) {
        if (!std::isfinite(x) || !std::isfinite(u) || !std::isfinite(v) || !std::isfinite(w))
            throw std::invalid_argument("StageParams: values must be finite");
        if (x < 0.0 || x > 1.0)
            throw std::invalid_argument("StageParams: x must lie in [0, 1]");
        if (u < std::max(v, w) - 1e-12)
            throw std::invalid_argument("StageParams: u_prev below max(v_prev, w_prev)");
    }
};

enum class Action { Stop = 0, Continue = 1 };

/** 2x2 bimatrix; a is the row player's payoff, b the column player's.
    Row/column index 0 is Stop, 1 is Continue. */
struct Bimatrix2x2 {
    double a[2][2] = {{0, 0}, {0, 0}};
    double b[2][2] = {{0, 0}, {0, 0}};

    double row_payoff(Action r, Action c) const { return a[static_cast<int>(r)][static_cast<int>(c)]; }
    double col_payoff(Action r, Action c) const { return b[static_cast<int>(r)][static_cast<int>(c)]; }
};

// A joint stop is resolved by a fair coin: the winner keeps x, the loser
// searches alone, so each expects (x + u_prev)/2.
inline Bimatrix2x2 stage_game(const StageParams& p) {
    Bimatrix2x2 g;
    double split = 0.5 * (p.x + p.u_prev);
    g.a[0][0] = split;
    g.b[0][0] = split;
    g.a[0][1] = p.x;
    g.b[0][1] = p.u_prev;
    g.a[1][0] = p.u_prev;
    g.b[1][0] = p.x;
    g.a[1][1] = p.v_prev;
    g.b[1][1] = p.w_prev;
    return g;
}

enum class RegionKind { DominantStop, DominantContinue, Contested };

/** Region of the current draw plus that region's interval clamped to [0,1]. */
struct RegionLabel {
    RegionKind kind;
    double lo;
    double hi;
};

// Stopping strictly dominates above u_prev, continuing strictly dominates
// below min(v_prev, w_prev); boundary draws count as contested.
inline RegionLabel classify_region(const StageParams& p) {
    auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    double lo = clamp01(std::min(p.v_prev, p.w_prev));
    double hi = clamp01(p.u_prev);
    if (p.x > p.u_prev) return {RegionKind::DominantStop, hi, 1.0};
    if (p.x < std::min(p.v_prev, p.w_prev)) return {RegionKind::DominantContinue, 0.0, lo};
    return {RegionKind::Contested, lo, hi};
}

}  // namespace staffsel
