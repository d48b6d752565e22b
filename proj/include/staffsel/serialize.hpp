#pragma once

#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "criterion.hpp"
#include "game_core.hpp"
#include "induction.hpp"
#include "polytope.hpp"
#include "simulate.hpp"

namespace staffsel {

using json = nlohmann::json;

// %.17g: enough digits to reproduce any double exactly
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline json mu_to_json(const JointDistribution& mu) {
    json j;
    j["mu_ss"] = mu.mu_ss;
    j["mu_sf"] = mu.mu_sf;
    j["mu_fs"] = mu.mu_fs;
    j["mu_ff"] = mu.mu_ff;
    auto po = mu.paper_order();
    j["paper_order"] = {po[0], po[1], po[2], po[3]};  // (ss, ff, fs, sf)
    return j;
}

inline json solution_to_json(const EquilibriumSolution& sol) {
    json j;
    j["criterion"] = criterion_name(sol.criterion.kind);
    j["tie_rule"] = tie_rule_name(sol.criterion.tie_rule);
    j["num_stages"] = sol.num_stages;
    j["cost"] = sol.cost.c;
    j["u"] = sol.u.values;
    j["v"] = sol.v;
    j["w"] = sol.w;
    j["stages"] = json::array();
    for (const StagePolicy& pol : sol.stages) {
        json s;
        s["n"] = pol.n;
        s["u_prev"] = pol.u_prev;
        s["v_prev"] = pol.v_prev;
        s["w_prev"] = pol.w_prev;
        s["breakpoints"] = pol.breakpoints;
        json pieces = json::array();
        for (const PieceRule& r : pol.pieces) pieces.push_back(piece_rule_name(r));
        s["pieces"] = pieces;
        j["stages"].push_back(std::move(s));
    }
    return j;
}

// Structural validation only: a well-formed document with wrong numbers must
// load, so that verify can report the failure instead of the parser.
inline EquilibriumSolution solution_from_json(const json& j) {
    auto need = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw std::invalid_argument(std::string("solution document: missing ") + key);
        return j.at(key);
    };
    EquilibriumSolution sol;
    sol.criterion.kind = parse_criterion_kind(need("criterion").get<std::string>());
    sol.criterion.tie_rule = parse_tie_rule(need("tie_rule").get<std::string>());
    sol.num_stages = need("num_stages").get<int>();
    if (sol.num_stages < 1) throw std::invalid_argument("solution document: num_stages must be >= 1");
    sol.cost = Cost{need("cost").get<double>()};
    sol.u.cost = sol.cost;
    sol.u.values = need("u").get<std::vector<double>>();
    sol.v = need("v").get<std::vector<double>>();
    sol.w = need("w").get<std::vector<double>>();
    std::size_t want = static_cast<std::size_t>(sol.num_stages) + 1;
    if (sol.u.values.size() != want || sol.v.size() != want || sol.w.size() != want)
        throw std::invalid_argument("solution document: value sequences must have num_stages + 1 entries");
    const json& stages = need("stages");
    if (!stages.is_array() || stages.size() != static_cast<std::size_t>(sol.num_stages))
        throw std::invalid_argument("solution document: stages must list one device per stage");
    for (const json& s : stages) {
        StagePolicy pol;
        pol.n = s.at("n").get<int>();
        pol.u_prev = s.at("u_prev").get<double>();
        pol.v_prev = s.at("v_prev").get<double>();
        pol.w_prev = s.at("w_prev").get<double>();
        pol.breakpoints = s.at("breakpoints").get<std::vector<double>>();
        for (const json& r : s.at("pieces")) pol.pieces.push_back(parse_piece_rule(r.get<std::string>()));
        if (pol.breakpoints.size() != pol.pieces.size() + 1 || pol.pieces.empty())
            throw std::invalid_argument("solution document: breakpoints must bracket the pieces");
        if (pol.breakpoints.front() != 0.0 || pol.breakpoints.back() != 1.0)
            throw std::invalid_argument("solution document: breakpoints must span [0, 1]");
        for (std::size_t i = 0; i + 1 < pol.breakpoints.size(); ++i)
            if (!(pol.breakpoints[i] < pol.breakpoints[i + 1]))
                throw std::invalid_argument("solution document: breakpoints must be increasing");
        sol.stages.push_back(std::move(pol));
    }
    for (int n = 1; n <= sol.num_stages; ++n)
        if (sol.stages[static_cast<std::size_t>(n) - 1].n != n)
            throw std::invalid_argument("solution document: stage indices must be 1..num_stages");
    return sol;
}

inline const char* constraint_kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::IncentiveP1Stop: return "incentive_p1_stop";
        case ConstraintKind::IncentiveP1Continue: return "incentive_p1_continue";
        case ConstraintKind::IncentiveP2Stop: return "incentive_p2_stop";
        case ConstraintKind::IncentiveP2Continue: return "incentive_p2_continue";
        case ConstraintKind::NonNegativity: return "nonnegativity";
        case ConstraintKind::Custom: return "custom";
    }
    return "custom";
}

/** Report for one stage game: region, constraints, enumerated vertices with
    payoffs, and (on a symmetric contested stage) alpha/gamma plus the names
    of the vertices that match the closed forms. */
inline json polytope_report_to_json(const StageParams& p) {
    json j;
    j["x"] = p.x;
    j["u_prev"] = p.u_prev;
    j["v_prev"] = p.v_prev;
    j["w_prev"] = p.w_prev;
    RegionLabel region = classify_region(p);
    switch (region.kind) {
        case RegionKind::DominantStop: j["region"] = "dominant_stop"; break;
        case RegionKind::DominantContinue: j["region"] = "dominant_continue"; break;
        case RegionKind::Contested: j["region"] = "contested"; break;
    }
    CEPolytope poly = enumerate_vertices(stage_game(p));
    std::optional<ContestParams> cp;
    if (region.kind == RegionKind::Contested && std::abs(p.v_prev - p.w_prev) <= 1e-9 &&
        p.x > p.v_prev + 1e-9 && p.x < p.u_prev - 1e-9) {
        cp = contest_params(p);
        j["alpha"] = cp->alpha;
        j["gamma"] = cp->gamma;
    }
    j["constraints"] = json::array();
    for (const HalfspaceConstraint& hc : poly.constraints) {
        json c;
        c["kind"] = constraint_kind_name(hc.kind);
        c["coeffs"] = {hc.coeffs[0], hc.coeffs[1], hc.coeffs[2], hc.coeffs[3]};
        j["constraints"].push_back(std::move(c));
    }
    j["vertices"] = json::array();
    for (const JointDistribution& mu : poly.vertices) {
        json v = mu_to_json(mu);
        auto [p1, p2] = expected_payoffs(poly.game, mu);
        v["payoff_1"] = p1;
        v["payoff_2"] = p2;
        if (cp) {
            if (auto label = match_labeled_vertex(mu, *cp)) v["label"] = vertex_label_name(*label);
        }
        j["vertices"].push_back(std::move(v));
    }
    return j;
}

inline json estimate_to_json(const MCEstimate& est, const EquilibriumSolution& sol) {
    json j;
    j["criterion"] = criterion_name(sol.criterion.kind);
    j["tie_rule"] = tie_rule_name(sol.criterion.tie_rule);
    j["num_stages"] = sol.num_stages;
    j["cost"] = sol.cost.c;
    j["runs"] = est.runs;
    j["seed"] = est.seed;
    j["mean_1"] = est.mean_1;
    j["mean_2"] = est.mean_2;
    j["se_1"] = est.se_1;
    j["se_2"] = est.se_2;
    auto [v, w] = policy_values(sol);
    j["dp_v"] = v.back();
    j["dp_w"] = w.back();
    j["z_1"] = est.se_1 > 0.0 ? (est.mean_1 - v.back()) / est.se_1 : 0.0;
    j["z_2"] = est.se_2 > 0.0 ? (est.mean_2 - w.back()) / est.se_2 : 0.0;
    return j;
}

inline json verification_to_json(const VerificationReport& rep, const EquilibriumSolution& sol) {
    json j;
    j["criterion"] = criterion_name(sol.criterion.kind);
    j["tie_rule"] = tie_rule_name(sol.criterion.tie_rule);
    j["num_stages"] = sol.num_stages;
    j["cost"] = sol.cost.c;
    j["passed"] = rep.passed;
    j["tol"] = rep.tol;
    j["values_consistent"] = rep.values_consistent;
    j["min_ce_slack"] = rep.min_ce_slack;
    j["max_gain"] = rep.max_gain;
    j["players"] = json::array();
    for (const PlayerCheck* pc : {&rep.p1, &rep.p2}) {
        json p;
        p["player"] = pc->player;
        p["value"] = pc->value;
        p["best_dev"] = pc->best_dev;
        p["gain"] = pc->gain;
        j["players"].push_back(std::move(p));
    }
    return j;
}

struct SweepRow {
    std::string criterion;
    int n = 0;
    double c = 0.0;
    double v = 0.0;
    double w = 0.0;
    double u = 0.0;
};

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "criterion,n,c,v,w,v_plus_w,u\n";
    for (const SweepRow& r : rows) {
        out += r.criterion;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += format_double(r.c);
        out += ',';
        out += format_double(r.v);
        out += ',';
        out += format_double(r.w);
        out += ',';
        out += format_double(r.v + r.w);
        out += ',';
        out += format_double(r.u);
        out += '\n';
    }
    return out;
}

}  // namespace staffsel
