#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polytope.hpp"

namespace staffsel {

enum class CriterionKind { Utilitarian, Egalitarian, Republican, Libertarian1, Libertarian2 };

enum class TieRule { PreferSymmetric, PreferLeader1, PreferLeader2 };

inline TieRule default_tie_rule(CriterionKind kind) {
    switch (kind) {
        case CriterionKind::Utilitarian: return TieRule::PreferLeader1;
        case CriterionKind::Egalitarian: return TieRule::PreferSymmetric;
        case CriterionKind::Republican: return TieRule::PreferLeader1;
        case CriterionKind::Libertarian1: return TieRule::PreferLeader1;
        case CriterionKind::Libertarian2: return TieRule::PreferLeader2;
    }
    throw std::logic_error("default_tie_rule: unknown criterion");
}

/** A selection criterion plus the rule used to break ties among optima. */
struct Criterion {
    CriterionKind kind = CriterionKind::Utilitarian;
    TieRule tie_rule = TieRule::PreferLeader1;

    static Criterion with_default_tie(CriterionKind kind) { return {kind, default_tie_rule(kind)}; }
};

inline const char* criterion_name(CriterionKind kind) {
    switch (kind) {
        case CriterionKind::Utilitarian: return "utilitarian";
        case CriterionKind::Egalitarian: return "egalitarian";
        case CriterionKind::Republican: return "republican";
        case CriterionKind::Libertarian1: return "libertarian1";
        case CriterionKind::Libertarian2: return "libertarian2";
    }
    throw std::logic_error("criterion_name: unknown criterion");
}

inline CriterionKind parse_criterion_kind(std::string_view name) {
    if (name == "utilitarian") return CriterionKind::Utilitarian;
    if (name == "egalitarian") return CriterionKind::Egalitarian;
    if (name == "republican") return CriterionKind::Republican;
    if (name == "libertarian1") return CriterionKind::Libertarian1;
    if (name == "libertarian2") return CriterionKind::Libertarian2;
    throw std::invalid_argument("unknown criterion: " + std::string(name));
}

inline const char* tie_rule_name(TieRule rule) {
    switch (rule) {
        case TieRule::PreferSymmetric: return "symmetric";
        case TieRule::PreferLeader1: return "leader1";
        case TieRule::PreferLeader2: return "leader2";
    }
    throw std::logic_error("tie_rule_name: unknown tie rule");
}

inline TieRule parse_tie_rule(std::string_view name) {
    if (name == "symmetric") return TieRule::PreferSymmetric;
    if (name == "leader1") return TieRule::PreferLeader1;
    if (name == "leader2") return TieRule::PreferLeader2;
    throw std::invalid_argument("unknown tie rule: " + std::string(name));
}

/** Outcome of applying a criterion to one stage game. optimal_set holds every
    vertex of the (possibly constraint-augmented) polytope attaining the
    optimum; chosen is the tie-broken element actually played. */
struct SelectionResult {
    std::vector<JointDistribution> optimal_set;
    JointDistribution chosen;
    std::pair<double, double> values = {0.0, 0.0};
    double criterion_value = 0.0;
};

// Deterministic tie-breaking among optimal elements. PreferSymmetric keeps
// the elements with mu_sf == mu_fs and among those takes the one with the
// most off-diagonal mass (the pure coin toss over the two asymmetric
// equilibria, when available); PreferLeader picks that player's best.
// Lexicographic order on (ss, sf, fs, ff) settles residual ties.
inline JointDistribution tie_break(const Bimatrix2x2& g,
                                   const std::vector<JointDistribution>& optimal_set,
                                   TieRule rule) {
    if (optimal_set.empty()) throw std::invalid_argument("tie_break: empty optimal set");
    auto lex_pick = [](std::vector<JointDistribution> cand) {
        auto it = std::min_element(cand.begin(), cand.end(),
                                   [](const JointDistribution& a, const JointDistribution& b) {
                                       return detail::lex_less(a, b);
                                   });
        return *it;
    };
    if (rule == TieRule::PreferSymmetric) {
        std::vector<JointDistribution> sym;
        for (const auto& mu : optimal_set)
            if (std::abs(mu.mu_sf - mu.mu_fs) <= 1e-9) sym.push_back(mu);
        if (sym.empty()) return lex_pick(optimal_set);
        double best = sym[0].mu_sf + sym[0].mu_fs;
        for (const auto& mu : sym) best = std::max(best, mu.mu_sf + mu.mu_fs);
        std::vector<JointDistribution> top;
        for (const auto& mu : sym)
            if (mu.mu_sf + mu.mu_fs >= best - 1e-12) top.push_back(mu);
        return lex_pick(std::move(top));
    }
    const bool first = rule == TieRule::PreferLeader1;
    double best = -1e300;
    for (const auto& mu : optimal_set) {
        auto [p1, p2] = expected_payoffs(g, mu);
        best = std::max(best, first ? p1 : p2);
    }
    std::vector<JointDistribution> top;
    for (const auto& mu : optimal_set) {
        auto [p1, p2] = expected_payoffs(g, mu);
        if ((first ? p1 : p2) >= best - 1e-12) top.push_back(mu);
    }
    return lex_pick(std::move(top));
}

namespace detail {

inline std::array<double, 4> payoff_row(const Bimatrix2x2& g, int player) {
    if (player == 1) return {g.a[0][0], g.a[0][1], g.a[1][0], g.a[1][1]};
    return {g.b[0][0], g.b[0][1], g.b[1][0], g.b[1][1]};
}

inline std::array<double, 4> minus(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

inline std::array<double, 4> plus(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline void append_dedup(std::vector<JointDistribution>& out, const std::vector<JointDistribution>& in) {
    for (const auto& mu : in) {
        bool seen = false;
        for (const auto& v : out)
            if (mu.near(v, kVertexDedupeTol)) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(mu);
    }
}

}  // namespace detail

// Apply one selection criterion to a stage game.
//   utilitarian    max v1 + v2
//   egalitarian    max min(v1, v2), split into max v1 s.t. v1 <= v2 and its mirror
//   republican     max max(v1, v2), split into max v1 s.t. v1 >= v2 and its mirror
//   libertarian i  max vi
// The egalitarian/republican branches re-enumerate the polytope with the
// v1-vs-v2 ordering halfspace added, which is where the coin-toss vertex H
// can enter the optimal set. An infeasible branch is simply dropped.
inline SelectionResult select_stage_equilibrium(const Bimatrix2x2& g, const Criterion& crit) {
    CEPolytope poly = enumerate_vertices(g);
    const auto pay1 = detail::payoff_row(g, 1);
    const auto pay2 = detail::payoff_row(g, 2);

    std::vector<JointDistribution> optimal;
    switch (crit.kind) {
        case CriterionKind::Utilitarian: {
            auto r = maximize_linear(poly, detail::plus(pay1, pay2));
            optimal = std::move(r->argmax);
            break;
        }
        case CriterionKind::Libertarian1: {
            auto r = maximize_linear(poly, pay1);
            optimal = std::move(r->argmax);
            break;
        }
        case CriterionKind::Libertarian2: {
            auto r = maximize_linear(poly, pay2);
            optimal = std::move(r->argmax);
            break;
        }
        case CriterionKind::Egalitarian:
        case CriterionKind::Republican: {
            // egalitarian: own value is the minimum; republican: the maximum
            const bool own_is_min = crit.kind == CriterionKind::Egalitarian;
            HalfspaceConstraint h1{ConstraintKind::Custom,
                                   own_is_min ? detail::minus(pay2, pay1) : detail::minus(pay1, pay2)};
            HalfspaceConstraint h2{ConstraintKind::Custom,
                                   own_is_min ? detail::minus(pay1, pay2) : detail::minus(pay2, pay1)};
            auto b1 = maximize_linear(poly, pay1, h1);
            auto b2 = maximize_linear(poly, pay2, h2);
            if (!b1 && !b2) throw std::logic_error("select_stage_equilibrium: both ordering branches infeasible");
            double best = -1e300;
            if (b1) best = std::max(best, b1->value);
            if (b2) best = std::max(best, b2->value);
            if (b1 && b1->value >= best - kArgmaxTol) detail::append_dedup(optimal, b1->argmax);
            if (b2 && b2->value >= best - kArgmaxTol) detail::append_dedup(optimal, b2->argmax);
            break;
        }
    }

    SelectionResult out;
    out.optimal_set = std::move(optimal);
    out.chosen = tie_break(g, out.optimal_set, crit.tie_rule);
    out.values = expected_payoffs(g, out.chosen);
    switch (crit.kind) {
        case CriterionKind::Utilitarian: out.criterion_value = out.values.first + out.values.second; break;
        case CriterionKind::Egalitarian: out.criterion_value = std::min(out.values.first, out.values.second); break;
        case CriterionKind::Republican: out.criterion_value = std::max(out.values.first, out.values.second); break;
        case CriterionKind::Libertarian1: out.criterion_value = out.values.first; break;
        case CriterionKind::Libertarian2: out.criterion_value = out.values.second; break;
    }
    return out;
}

}  // namespace staffsel
