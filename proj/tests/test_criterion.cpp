#include <algorithm>
#include <cmath>

#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "staffsel/criterion.hpp"

using namespace staffsel;
using Catch::Matchers::WithinAbs;

namespace {

bool contains(const std::vector<JointDistribution>& set, const JointDistribution& mu,
              double tol = 1e-9) {
    return std::any_of(set.begin(), set.end(),
                       [&](const JointDistribution& v) { return v.near(mu, tol); });
}

const StageParams kStage{1.0 / 3.0, 0.5, 0.25, 0.25};

SelectionResult select(CriterionKind kind) {
    return select_stage_equilibrium(stage_game(kStage), Criterion::with_default_tie(kind));
}

}  // namespace

TEST_CASE("names and parsing round-trip", "[criterion]") {
    for (CriterionKind k : {CriterionKind::Utilitarian, CriterionKind::Egalitarian,
                            CriterionKind::Republican, CriterionKind::Libertarian1,
                            CriterionKind::Libertarian2})
        CHECK(parse_criterion_kind(criterion_name(k)) == k);
    for (TieRule t : {TieRule::PreferSymmetric, TieRule::PreferLeader1, TieRule::PreferLeader2})
        CHECK(parse_tie_rule(tie_rule_name(t)) == t);
    CHECK_THROWS_AS(parse_criterion_kind("maximin"), std::invalid_argument);
    CHECK_THROWS_AS(parse_tie_rule("coin"), std::invalid_argument);
}

TEST_CASE("default tie rules", "[criterion]") {
    CHECK(default_tie_rule(CriterionKind::Utilitarian) == TieRule::PreferLeader1);
    CHECK(default_tie_rule(CriterionKind::Egalitarian) == TieRule::PreferSymmetric);
    CHECK(default_tie_rule(CriterionKind::Republican) == TieRule::PreferLeader1);
    CHECK(default_tie_rule(CriterionKind::Libertarian1) == TieRule::PreferLeader1);
    CHECK(default_tie_rule(CriterionKind::Libertarian2) == TieRule::PreferLeader2);
}

TEST_CASE("libertarian selections take the pure asymmetric vertices", "[criterion]") {
    SelectionResult lib1 = select(CriterionKind::Libertarian1);
    CHECK(lib1.chosen.near({0, 0, 1, 0}, 1e-9));
    CHECK_THAT(lib1.values.first, WithinAbs(0.5, 1e-12));
    CHECK_THAT(lib1.values.second, WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(lib1.criterion_value, WithinAbs(0.5, 1e-12));

    SelectionResult lib2 = select(CriterionKind::Libertarian2);
    CHECK(lib2.chosen.near({0, 1, 0, 0}, 1e-9));
    CHECK_THAT(lib2.values.first, WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(lib2.values.second, WithinAbs(0.5, 1e-12));
}

TEST_CASE("republican optimal set is the two pure asymmetric vertices", "[criterion]") {
    SelectionResult rep = select(CriterionKind::Republican);
    REQUIRE(rep.optimal_set.size() == 2);
    CHECK(contains(rep.optimal_set, {0, 0, 1, 0}));
    CHECK(contains(rep.optimal_set, {0, 1, 0, 0}));
    // default tie: player 1 leads
    CHECK(rep.chosen.near({0, 0, 1, 0}, 1e-9));
    CHECK_THAT(rep.criterion_value, WithinAbs(0.5, 1e-12));

    SelectionResult rep2 = select_stage_equilibrium(
        stage_game(kStage), Criterion{CriterionKind::Republican, TieRule::PreferLeader2});
    CHECK(rep2.chosen.near({0, 1, 0, 0}, 1e-9));
}

TEST_CASE("egalitarian optimum is the even split, chosen as the coin toss", "[criterion]") {
    SelectionResult egal = select(CriterionKind::Egalitarian);
    ContestParams cp = contest_params(kStage);
    CHECK(contains(egal.optimal_set, labeled_vertex(VertexLabel::E, cp)));
    CHECK(contains(egal.optimal_set, labeled_vertex(VertexLabel::H, cp)));
    for (const auto& mu : egal.optimal_set) {
        auto [p1, p2] = expected_payoffs(stage_game(kStage), mu);
        CHECK_THAT(p1, WithinAbs(5.0 / 12.0, 1e-9));
        CHECK_THAT(p2, WithinAbs(5.0 / 12.0, 1e-9));
    }
    CHECK(egal.chosen.near({0, 0.5, 0.5, 0}, 1e-9));
    CHECK_THAT(egal.criterion_value, WithinAbs(5.0 / 12.0, 1e-12));
}

TEST_CASE("utilitarian optimal set and tie rules", "[criterion]") {
    SelectionResult util = select(CriterionKind::Utilitarian);
    ContestParams cp = contest_params(kStage);
    REQUIRE(util.optimal_set.size() == 3);
    CHECK(contains(util.optimal_set, {0, 0, 1, 0}));
    CHECK(contains(util.optimal_set, {0, 1, 0, 0}));
    CHECK(contains(util.optimal_set, labeled_vertex(VertexLabel::E, cp)));
    CHECK_THAT(util.criterion_value, WithinAbs(1.0 / 3.0 + 0.5, 1e-12));
    CHECK(util.chosen.near({0, 0, 1, 0}, 1e-9));

    SelectionResult lead2 = select_stage_equilibrium(
        stage_game(kStage), Criterion{CriterionKind::Utilitarian, TieRule::PreferLeader2});
    CHECK(lead2.chosen.near({0, 1, 0, 0}, 1e-9));

    SelectionResult symm = select_stage_equilibrium(
        stage_game(kStage), Criterion{CriterionKind::Utilitarian, TieRule::PreferSymmetric});
    CHECK(symm.chosen.near(labeled_vertex(VertexLabel::E, cp), 1e-9));
}

TEST_CASE("mirrored parameters swap the libertarian selections", "[criterion]") {
    StageParams pa{0.38, 0.55, 0.3, 0.2};
    StageParams pb{0.38, 0.55, 0.2, 0.3};
    SelectionResult a = select_stage_equilibrium(stage_game(pa),
                                                 Criterion::with_default_tie(CriterionKind::Libertarian1));
    SelectionResult b = select_stage_equilibrium(stage_game(pb),
                                                 Criterion::with_default_tie(CriterionKind::Libertarian2));
    CHECK_THAT(a.values.first, WithinAbs(b.values.second, 1e-12));
    CHECK_THAT(a.values.second, WithinAbs(b.values.first, 1e-12));
    CHECK_THAT(a.chosen.mu_fs, WithinAbs(b.chosen.mu_sf, 1e-12));
}

TEST_CASE("dominant draws leave no choice", "[criterion]") {
    for (CriterionKind k : {CriterionKind::Utilitarian, CriterionKind::Egalitarian,
                            CriterionKind::Republican, CriterionKind::Libertarian1,
                            CriterionKind::Libertarian2}) {
        SelectionResult stop = select_stage_equilibrium(stage_game({0.9, 0.5, 0.25, 0.25}),
                                                        Criterion::with_default_tie(k));
        CHECK(stop.chosen.near({1, 0, 0, 0}, 1e-9));
        CHECK_THAT(stop.values.first, WithinAbs(0.7, 1e-12));
    }
}

TEST_CASE("selections are optimal among all vertices", "[criterion]") {
    for (double x = 0.26; x < 0.5; x += 0.03) {
        StageParams p{x, 0.5, 0.25, 0.25};
        Bimatrix2x2 g = stage_game(p);
        CEPolytope poly = enumerate_vertices(g);
        for (CriterionKind k : {CriterionKind::Utilitarian, CriterionKind::Egalitarian,
                                CriterionKind::Republican, CriterionKind::Libertarian1,
                                CriterionKind::Libertarian2}) {
            SelectionResult sel = select_stage_equilibrium(g, Criterion::with_default_tie(k));
            CHECK(oracle::is_correlated_equilibrium(g, sel.chosen));
            for (const auto& mu : poly.vertices) {
                auto [p1, p2] = expected_payoffs(g, mu);
                double score = 0.0;
                switch (k) {
                    case CriterionKind::Utilitarian: score = p1 + p2; break;
                    case CriterionKind::Egalitarian: score = std::min(p1, p2); break;
                    case CriterionKind::Republican: score = std::max(p1, p2); break;
                    case CriterionKind::Libertarian1: score = p1; break;
                    case CriterionKind::Libertarian2: score = p2; break;
                }
                CHECK(sel.criterion_value >= score - 1e-9);
            }
        }
    }
}

TEST_CASE("tie_break validation", "[criterion]") {
    Bimatrix2x2 g = stage_game(kStage);
    CHECK_THROWS_AS(tie_break(g, {}, TieRule::PreferLeader1), std::invalid_argument);
}
