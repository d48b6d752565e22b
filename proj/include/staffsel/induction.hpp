#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "criterion.hpp"
#include "game_core.hpp"
#include "polytope.hpp"
#include "quadrature.hpp"

namespace staffsel {

inline constexpr double kQuadratureTol = 1e-11;  // absolute tolerance of stage-value quadrature
inline constexpr double kPieceMinWidth = 1e-12;  // narrower pieces are merged away
inline constexpr double kParamMargin = 1e-9;     // distance kept from contested endpoints

/** How the stage device behaves on one x-interval. Point masses cover the
    dominance regions, a table vertex covers the contested interval when the
    criterion picks the same named vertex across the whole piece, and
    Enumerated falls back to per-x selection. */
struct PieceRule {
    enum class Kind { PointMassSS, PointMassFF, TableVertex, Enumerated };

    Kind kind = Kind::PointMassSS;
    VertexLabel label = VertexLabel::C;  // meaningful only for TableVertex

    static PieceRule ss() { return {Kind::PointMassSS, VertexLabel::C}; }
    static PieceRule ff() { return {Kind::PointMassFF, VertexLabel::C}; }
    static PieceRule vertex(VertexLabel l) { return {Kind::TableVertex, l}; }
    static PieceRule enumerated() { return {Kind::Enumerated, VertexLabel::C}; }

    bool operator==(const PieceRule& o) const {
        return kind == o.kind && (kind != Kind::TableVertex || label == o.label);
    }
};

inline const char* piece_rule_name(const PieceRule& r) {
    switch (r.kind) {
        case PieceRule::Kind::PointMassSS: return "ss";
        case PieceRule::Kind::PointMassFF: return "ff";
        case PieceRule::Kind::Enumerated: return "enumerated";
        case PieceRule::Kind::TableVertex: return vertex_label_name(r.label);
    }
    throw std::logic_error("piece_rule_name: unknown rule");
}

inline PieceRule parse_piece_rule(std::string_view name) {
    if (name == "ss") return PieceRule::ss();
    if (name == "ff") return PieceRule::ff();
    if (name == "enumerated") return PieceRule::enumerated();
    if (name == "C") return PieceRule::vertex(VertexLabel::C);
    if (name == "D") return PieceRule::vertex(VertexLabel::D);
    if (name == "E") return PieceRule::vertex(VertexLabel::E);
    if (name == "F") return PieceRule::vertex(VertexLabel::F);
    if (name == "G") return PieceRule::vertex(VertexLabel::G);
    if (name == "H") return PieceRule::vertex(VertexLabel::H);
    throw std::invalid_argument("unknown piece rule: " + std::string(name));
}

namespace detail {

// Device distribution of a piece rule at draw x. Parametric vertices are
// recomputed from the stage parameters; x is kept a small margin inside the
// contested interval so alpha/gamma stay finite.
inline JointDistribution rule_mu(const PieceRule& r, double x, double u_prev, double v_prev,
                                 double w_prev, const Criterion& crit) {
    switch (r.kind) {
        case PieceRule::Kind::PointMassSS: return {1.0, 0.0, 0.0, 0.0};
        case PieceRule::Kind::PointMassFF: return {0.0, 0.0, 0.0, 1.0};
        case PieceRule::Kind::Enumerated:
            return select_stage_equilibrium(stage_game({x, u_prev, v_prev, w_prev}), crit).chosen;
        case PieceRule::Kind::TableVertex: break;
    }
    switch (r.label) {
        case VertexLabel::C: return {0.0, 0.0, 1.0, 0.0};
        case VertexLabel::D: return {0.0, 1.0, 0.0, 0.0};
        case VertexLabel::H: return {0.0, 0.5, 0.5, 0.0};
        default: break;
    }
    double lo = std::max(v_prev + 2.0 * kParamMargin, 0.0);
    double hi = std::min(u_prev - 2.0 * kParamMargin, 1.0);
    if (!(lo < hi))
        throw std::logic_error("rule_mu: contested interval too narrow for a parametric vertex");
    double xc = std::clamp(x, lo, hi);
    return labeled_vertex(r.label, contest_params({xc, u_prev, v_prev, w_prev}));
}

}  // namespace detail

/** Device for one stage: breakpoints 0 = b_0 < ... < b_k = 1 and a rule per
    piece [b_i, b_{i+1}). u_prev/v_prev/w_prev are the continuation values the
    stage was built against; parametric pieces are evaluated from them. */
struct StagePolicy {
    int n = 1;
    double u_prev = 0.0;
    double v_prev = 0.0;
    double w_prev = 0.0;
    std::vector<double> breakpoints;
    std::vector<PieceRule> pieces;

    std::size_t piece_index(double x) const {
        if (breakpoints.size() < 2 || pieces.size() + 1 != breakpoints.size())
            throw std::logic_error("StagePolicy: malformed breakpoints");
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
        std::size_t idx = static_cast<std::size_t>(it - breakpoints.begin());
        if (idx == 0) return 0;
        return std::min(idx - 1, pieces.size() - 1);
    }

    JointDistribution evaluate(double x, const Criterion& crit) const {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("StagePolicy::evaluate: x outside [0, 1]");
        return detail::rule_mu(pieces[piece_index(x)], x, u_prev, v_prev, w_prev, crit);
    }
};

/** Full solution of an N-stage game: per-stage devices plus the value
    sequences u (lone searcher), v (player 1) and w (player 2). */
struct EquilibriumSolution {
    Criterion criterion;
    int num_stages = 1;
    Cost cost;
    LoneSearcherValues u;
    std::vector<double> v;  // v[n] for n = 0..N, v[0] = -c
    std::vector<double> w;
    std::vector<StagePolicy> stages;  // stages[k] is stage n = k + 1
};

namespace detail {

// Exact payoff integrals of the constant-device rules over [p, q]:
//   ss            ((x + u)/2, (x + u)/2)
//   ff            (v_cont, w_cont)
//   C (fs mass)   (u, x)
//   D (sf mass)   (x, u)
//   H             ((x + u)/2, (x + u)/2)
// E integrates to the same split as H on a symmetric stage. Parametric
// F/G and Enumerated pieces fall back to adaptive quadrature, as does E when
// the valuation parameters differ from the ones the device was built with.
inline std::pair<double, double> piece_value(const PieceRule& r, double p, double q,
                                             const StagePolicy& pol, const Criterion& crit,
                                             double u_val, double v_cont, double w_cont) {
    double len = q - p;
    double ix = 0.5 * (q * q - p * p);  // integral of x
    switch (r.kind) {
        case PieceRule::Kind::PointMassSS: {
            double t = 0.5 * (ix + u_val * len);
            return {t, t};
        }
        case PieceRule::Kind::PointMassFF: return {v_cont * len, w_cont * len};
        case PieceRule::Kind::TableVertex:
            if (r.label == VertexLabel::C) return {u_val * len, ix};
            if (r.label == VertexLabel::D) return {ix, u_val * len};
            if (r.label == VertexLabel::H) {
                double t = 0.5 * (ix + u_val * len);
                return {t, t};
            }
            if (r.label == VertexLabel::E && pol.u_prev == u_val && pol.v_prev == v_cont &&
                pol.w_prev == w_cont) {
                double t = 0.5 * (ix + u_val * len);
                return {t, t};
            }
            break;
        case PieceRule::Kind::Enumerated: break;
    }
    auto payoff = [&](double x, bool first) {
        JointDistribution mu = rule_mu(r, x, pol.u_prev, pol.v_prev, pol.w_prev, crit);
        Bimatrix2x2 g = stage_game({x, u_val, v_cont, w_cont});
        auto pr = expected_payoffs(g, mu);
        return first ? pr.first : pr.second;
    };
    double p1 = quad::adaptive([&](double x) { return payoff(x, true); }, p, q, kQuadratureTol);
    double p2 = quad::adaptive([&](double x) { return payoff(x, false); }, p, q, kQuadratureTol);
    return {p1, p2};
}

// The symbolic rule a criterion is expected to pick on the contested piece.
inline PieceRule contested_hypothesis(const Criterion& crit, bool symmetric) {
    switch (crit.kind) {
        case CriterionKind::Libertarian1: return PieceRule::vertex(VertexLabel::C);
        case CriterionKind::Libertarian2: return PieceRule::vertex(VertexLabel::D);
        case CriterionKind::Republican:
            return PieceRule::vertex(crit.tie_rule == TieRule::PreferLeader2 ? VertexLabel::D
                                                                             : VertexLabel::C);
        case CriterionKind::Egalitarian:
            return symmetric ? PieceRule::vertex(VertexLabel::H) : PieceRule::enumerated();
        case CriterionKind::Utilitarian:
            if (crit.tie_rule == TieRule::PreferLeader1) return PieceRule::vertex(VertexLabel::C);
            if (crit.tie_rule == TieRule::PreferLeader2) return PieceRule::vertex(VertexLabel::D);
            return symmetric ? PieceRule::vertex(VertexLabel::E) : PieceRule::enumerated();
    }
    return PieceRule::enumerated();
}

// Check a symbolic rule against per-x criterion selection at 64 Gauss nodes.
inline bool validate_rule(const PieceRule& r, double p, double q, const StagePolicy& pol,
                          const Criterion& crit) {
    for (const quad::Node& node : quad::gauss_legendre(64)) {
        double x = 0.5 * (p + q) + 0.5 * (q - p) * node.x;
        JointDistribution symbolic = rule_mu(r, x, pol.u_prev, pol.v_prev, pol.w_prev, crit);
        JointDistribution selected =
            select_stage_equilibrium(stage_game({x, pol.u_prev, pol.v_prev, pol.w_prev}), crit).chosen;
        if (!symbolic.near(selected, 1e-7)) return false;
    }
    return true;
}

inline void build_stage_policy(StagePolicy& pol, const Criterion& crit) {
    auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    double u = pol.u_prev;
    double v = pol.v_prev;
    double w = pol.w_prev;
    double lo = clamp01(std::min(v, w));
    double mid = clamp01(std::max(v, w));
    double hi = clamp01(std::max(u, mid));
    bool symmetric = std::abs(v - w) <= 1e-12;

    // between min and max continuation value only the follower wants the
    // candidate; the point mass on (f,s) or (s,f) is the unique equilibrium
    PieceRule semi = v > w ? PieceRule::vertex(VertexLabel::C) : PieceRule::vertex(VertexLabel::D);
    PieceRule contested = contested_hypothesis(crit, symmetric);

    const double cuts[5] = {0.0, lo, mid, hi, 1.0};
    PieceRule rules[4] = {PieceRule::ff(), semi, contested, PieceRule::ss()};
    bool needs_check[4] = {false, true, true, false};

    pol.breakpoints.clear();
    pol.pieces.clear();
    double cursor = 0.0;
    for (int i = 0; i < 4; ++i) {
        double end = std::max(cuts[i + 1], cursor);
        if (end - cursor <= kPieceMinWidth) continue;
        PieceRule rule = rules[i];
        if (needs_check[i] && rule.kind != PieceRule::Kind::Enumerated &&
            !validate_rule(rule, cursor, end, pol, crit))
            rule = PieceRule::enumerated();
        if (pol.breakpoints.empty()) pol.breakpoints.push_back(cursor);
        pol.breakpoints.push_back(end);
        pol.pieces.push_back(rule);
        cursor = end;
    }
    if (pol.pieces.empty()) {
        // degenerate: everything above u_prev, stop everywhere
        pol.breakpoints = {0.0, 1.0};
        pol.pieces = {PieceRule::ss()};
        return;
    }
    pol.breakpoints.front() = 0.0;
    pol.breakpoints.back() = 1.0;
}

}  // namespace detail

// Backward induction. Stage 1 has u_0 = v_0 = w_0 = -c, which collapses to a
// stop-everywhere stage worth d = (1 - 2c)/4 to each player; later stages use
// the criterion on each contested piece.
inline EquilibriumSolution solve(int n_stages, Cost cost, const Criterion& crit) {
    if (n_stages < 1) throw std::invalid_argument("solve: n_stages must be >= 1");
    EquilibriumSolution sol;
    sol.criterion = crit;
    sol.num_stages = n_stages;
    sol.cost = cost;
    sol.u = lone_searcher_values(cost, n_stages);
    sol.v.assign(static_cast<std::size_t>(n_stages) + 1, 0.0);
    sol.w.assign(static_cast<std::size_t>(n_stages) + 1, 0.0);
    sol.v[0] = -cost.c;
    sol.w[0] = -cost.c;
    sol.stages.reserve(static_cast<std::size_t>(n_stages));
    for (int n = 1; n <= n_stages; ++n) {
        StagePolicy pol;
        pol.n = n;
        pol.u_prev = sol.u.at(static_cast<std::size_t>(n) - 1);
        pol.v_prev = sol.v[static_cast<std::size_t>(n) - 1];
        pol.w_prev = sol.w[static_cast<std::size_t>(n) - 1];
        detail::build_stage_policy(pol, crit);
        double v_n = 0.0;
        double w_n = 0.0;
        for (std::size_t i = 0; i < pol.pieces.size(); ++i) {
            auto [dv, dw] = detail::piece_value(pol.pieces[i], pol.breakpoints[i],
                                                pol.breakpoints[i + 1], pol, crit, pol.u_prev,
                                                pol.v_prev, pol.w_prev);
            v_n += dv;
            w_n += dw;
        }
        sol.v[static_cast<std::size_t>(n)] = v_n;
        sol.w[static_cast<std::size_t>(n)] = w_n;
        sol.stages.push_back(std::move(pol));
    }
    return sol;
}

// Re-derive the value sequences implied by the recorded devices, rebuilding
// the continuation chain from scratch. For a solution produced by solve()
// this reproduces v and w exactly; for an edited solution it yields the
// values the recorded devices actually deliver.
inline std::pair<std::vector<double>, std::vector<double>> policy_values(const EquilibriumSolution& sol) {
    int n_stages = sol.num_stages;
    auto u_val = lone_searcher_values(sol.cost, n_stages);
    std::vector<double> v(static_cast<std::size_t>(n_stages) + 1, 0.0);
    std::vector<double> w(static_cast<std::size_t>(n_stages) + 1, 0.0);
    v[0] = -sol.cost.c;
    w[0] = -sol.cost.c;
    for (int n = 1; n <= n_stages; ++n) {
        const StagePolicy& pol = sol.stages[static_cast<std::size_t>(n) - 1];
        double v_n = 0.0;
        double w_n = 0.0;
        for (std::size_t i = 0; i < pol.pieces.size(); ++i) {
            auto [dv, dw] = detail::piece_value(
                pol.pieces[i], pol.breakpoints[i], pol.breakpoints[i + 1], pol, sol.criterion,
                u_val.at(static_cast<std::size_t>(n) - 1), v[static_cast<std::size_t>(n) - 1],
                w[static_cast<std::size_t>(n) - 1]);
            v_n += dv;
            w_n += dw;
        }
        v[static_cast<std::size_t>(n)] = v_n;
        w[static_cast<std::size_t>(n)] = w_n;
    }
    return {std::move(v), std::move(w)};
}

struct ValuePair {
    double v1 = 0.0;
    double v2 = 0.0;
};

/** Closed-form two-stage values at each named vertex of the contested
    interval, as (player 1, player 2) pairs. */
struct TwoStageValues {
    ValuePair at_C, at_D, at_E, at_F, at_G, at_H;
};

// Two-stage game: u_1 = 1/2, both continuation values d, contested interval
// (b, 1/2). C/D/E/H integrate in closed form; the mixed vertices F and G
// leave a smooth rational correction that is integrated numerically.
inline TwoStageValues closed_form_two_stage(Cost cost) {
    double d = one_stage_value(cost);
    double b = clamped_one_stage_value(cost);
    double v1C = b * b - 0.5 * b + 9.0 / 16.0;
    double v2C = 0.5 * b * b + 7.0 / 16.0;
    double vE = 0.75 * b * b - 0.25 * b + 0.5;
    double f_term = quad::adaptive(
        [d](double x) { return (x - 0.5) * (d - 0.5 * x - 0.25) / (4.0 * d - 3.0 * x - 0.5); }, b, 0.5,
        kQuadratureTol);
    double g_term = quad::adaptive(
        [d](double x) {
            double den = 2.0 * d - x - 0.5;
            return (x - 0.5) * (x - 0.5) * (d - 0.5 * (x + 0.5)) / (den * den);
        },
        b, 0.5, kQuadratureTol);
    TwoStageValues out;
    out.at_C = {v1C, v2C};
    out.at_D = {v2C, v1C};
    out.at_E = {vE, vE};
    out.at_F = {vE + f_term, vE + f_term};
    out.at_G = {vE + g_term, vE + g_term};
    out.at_H = {vE, vE};
    return out;
}

// Leader/follower value recursion when every contested piece is resolved in
// favour of player 1 (the follower keeps taking the mediocre candidate):
//   v_{n+1} = int_0^{w_n} v_n + int_{w_n}^{u_n} u_n + 1/2 int_{u_n}^1 (x + u_n)
//   w_{n+1} = int_0^{w_n} w_n + int_{w_n}^{u_n} x   + 1/2 int_{u_n}^1 (x + u_n)
// with integration limits clamped to [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> libertarian_recursion(Cost cost, int n_stages) {
    if (n_stages < 1) throw std::invalid_argument("libertarian_recursion: n_stages must be >= 1");
    auto useq = lone_searcher_values(cost, n_stages);
    double d = one_stage_value(cost);
    std::vector<double> v(static_cast<std::size_t>(n_stages) + 1, 0.0);
    std::vector<double> w(static_cast<std::size_t>(n_stages) + 1, 0.0);
    v[0] = w[0] = -cost.c;
    v[1] = w[1] = d;
    auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    for (int n = 1; n < n_stages; ++n) {
        double u = useq.at(static_cast<std::size_t>(n));
        double lo = clamp01(w[static_cast<std::size_t>(n)]);
        double hi = clamp01(u);
        double tail = 0.5 * (0.5 * (1.0 - hi * hi) + u * (1.0 - hi));
        v[static_cast<std::size_t>(n) + 1] = lo * v[static_cast<std::size_t>(n)] + u * (hi - lo) + tail;
        w[static_cast<std::size_t>(n) + 1] =
            lo * w[static_cast<std::size_t>(n)] + 0.5 * (hi * hi - lo * lo) + tail;
    }
    return {std::move(v), std::move(w)};
}

// Symmetric value recursion when both players split every contested and
// dominant-stop candidate evenly:
//   v_{n+1} = int_0^{v_n} v_n + 1/2 int_{v_n}^1 (x + u_n)
// with the lower limit clamped to [0, 1] and the first term dropped while
// v_n is negative.
inline std::vector<double> egalitarian_recursion(Cost cost, int n_stages) {
    if (n_stages < 1) throw std::invalid_argument("egalitarian_recursion: n_stages must be >= 1");
    auto useq = lone_searcher_values(cost, n_stages);
    std::vector<double> v(static_cast<std::size_t>(n_stages) + 1, 0.0);
    v[0] = -cost.c;
    v[1] = one_stage_value(cost);
    auto clamp01 = [](double t) { return std::clamp(t, 0.0, 1.0); };
    for (int n = 1; n < n_stages; ++n) {
        double u = useq.at(static_cast<std::size_t>(n));
        double vn = v[static_cast<std::size_t>(n)];
        double lo = clamp01(vn);
        v[static_cast<std::size_t>(n) + 1] =
            (vn > 0.0 ? lo * vn : 0.0) + 0.5 * (0.5 * (1.0 - lo * lo) + u * (1.0 - lo));
    }
    return v;
}

/** Comparison of the two utilitarian tie-breaks. The stage-wise utilitarian
    rule never fixes which of the tied optima to play; resolving every tie in
    the leader's favour beats the symmetric split from three stages on. */
struct UtilitarianCheck {
    std::vector<double> sum_leader;     // v_n + w_n under the leader tie-break
    std::vector<double> sum_symmetric;  // v_n + w_n under the symmetric tie-break
    double gap = 0.0;                   // sum_leader[N] - sum_symmetric[N]
    bool mu_ff_zero_contested = false;  // no mass on (f,f) inside contested pieces
};

inline UtilitarianCheck utilitarian_global_check(Cost cost, int n_stages) {
    Criterion leader{CriterionKind::Utilitarian, TieRule::PreferLeader1};
    Criterion symmetric{CriterionKind::Utilitarian, TieRule::PreferSymmetric};
    EquilibriumSolution a = solve(n_stages, cost, leader);
    EquilibriumSolution b = solve(n_stages, cost, symmetric);
    UtilitarianCheck out;
    out.sum_leader.resize(static_cast<std::size_t>(n_stages) + 1);
    out.sum_symmetric.resize(static_cast<std::size_t>(n_stages) + 1);
    for (std::size_t n = 0; n < out.sum_leader.size(); ++n) {
        out.sum_leader[n] = a.v[n] + a.w[n];
        out.sum_symmetric[n] = b.v[n] + b.w[n];
    }
    out.gap = out.sum_leader.back() - out.sum_symmetric.back();
    out.mu_ff_zero_contested = true;
    for (const EquilibriumSolution* sol : {&a, &b}) {
        for (const StagePolicy& pol : sol->stages) {
            double lo = std::clamp(std::min(pol.v_prev, pol.w_prev), 0.0, 1.0);
            double hi = std::clamp(pol.u_prev, 0.0, 1.0);
            for (std::size_t i = 0; i < pol.pieces.size(); ++i) {
                double p = pol.breakpoints[i];
                double q = pol.breakpoints[i + 1];
                double mid = 0.5 * (p + q);
                if (mid <= lo || mid >= hi) continue;  // outside the contested band
                for (const quad::Node& node : quad::gauss_legendre(16)) {
                    double x = 0.5 * (p + q) + 0.5 * (q - p) * node.x;
                    JointDistribution mu = pol.evaluate(x, sol->criterion);
                    if (mu.mu_ff > 1e-12) {
                        out.mu_ff_zero_contested = false;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace staffsel
