#include <algorithm>
#include <cmath>

#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "staffsel/polytope.hpp"

using namespace staffsel;
using Catch::Matchers::WithinAbs;

namespace {

bool contains(const std::vector<JointDistribution>& set, const JointDistribution& mu,
              double tol = 1e-9) {
    return std::any_of(set.begin(), set.end(),
                       [&](const JointDistribution& v) { return v.near(mu, tol); });
}

const StageParams kTwoStageThird{1.0 / 3.0, 0.5, 0.25, 0.25};

}  // namespace

TEST_CASE("joint distribution plumbing", "[polytope]") {
    JointDistribution mu{0.1, 0.2, 0.3, 0.4};
    CHECK(mu.sum() == 1.0);
    CHECK(mu.as_array() == std::array<double, 4>{0.1, 0.2, 0.3, 0.4});
    CHECK(JointDistribution::from_array(mu.as_array()).near(mu, 0.0));
    // reporting order puts the diagonal first: (ss, ff, fs, sf)
    CHECK(mu.paper_order() == std::array<double, 4>{0.1, 0.4, 0.3, 0.2});
    CHECK(mu.near({0.1, 0.2, 0.3, 0.4 + 5e-10}, 1e-9));
    CHECK_FALSE(mu.near({0.1, 0.2, 0.3, 0.41}, 1e-9));
}

TEST_CASE("incentive constraints match the obedience oracle", "[polytope]") {
    Bimatrix2x2 g = stage_game(kTwoStageThird);
    auto cons = incentive_constraints(g);
    REQUIRE(cons.size() == 4);

    JointDistribution ss{1.0, 0.0, 0.0, 0.0};
    JointDistribution fs{0.0, 0.0, 1.0, 0.0};

    // stopping on a contested candidate is disobeyed: the split (x+u)/2 is
    // worth less than waiting for u
    CHECK_FALSE(oracle::is_correlated_equilibrium(g, ss));
    double worst_ss = 0.0;
    for (const auto& c : cons) worst_ss = std::min(worst_ss, c.eval(ss));
    CHECK(worst_ss < -1e-3);

    CHECK(oracle::is_correlated_equilibrium(g, fs));
    for (const auto& c : cons) CHECK(c.eval(fs) >= -1e-12);
}

TEST_CASE("vertex enumeration reproduces the five closed forms", "[polytope]") {
    CEPolytope poly = enumerate_vertices(stage_game(kTwoStageThird));
    REQUIRE(poly.vertices.size() == 5);

    ContestParams cp = contest_params(kTwoStageThird);
    CHECK_THAT(cp.alpha, WithinAbs(1.0, 1e-12));
    CHECK_THAT(cp.gamma, WithinAbs(1.0, 1e-12));

    for (VertexLabel l :
         {VertexLabel::C, VertexLabel::D, VertexLabel::E, VertexLabel::F, VertexLabel::G})
        CHECK(contains(poly.vertices, labeled_vertex(l, cp)));

    for (const auto& mu : poly.vertices) {
        CHECK(oracle::is_correlated_equilibrium(poly.game, mu));
        CHECK_THAT(mu.sum(), WithinAbs(1.0, 1e-9));
        auto label = match_labeled_vertex(mu, cp);
        REQUIRE(label.has_value());
    }

    // the coin-toss blend H is not a vertex of the full polytope
    CHECK_FALSE(contains(poly.vertices, labeled_vertex(VertexLabel::H, cp)));
}

TEST_CASE("enumeration across the contested interval stays consistent", "[polytope]") {
    for (double x = 0.26; x < 0.5; x += 0.02) {
        StageParams p{x, 0.5, 0.25, 0.25};
        CEPolytope poly = enumerate_vertices(stage_game(p));
        CHECK(poly.vertices.size() == 5);
        ContestParams cp = contest_params(p);
        CHECK_THAT(cp.alpha * cp.gamma, WithinAbs(1.0, 1e-12));
        for (const auto& mu : poly.vertices) {
            CHECK(oracle::is_correlated_equilibrium(poly.game, mu));
            CHECK(match_labeled_vertex(mu, cp).has_value());
        }
    }
}

TEST_CASE("dominant regions collapse to a single vertex", "[polytope]") {
    CEPolytope stop = enumerate_vertices(stage_game({0.9, 0.5, 0.25, 0.25}));
    REQUIRE(stop.vertices.size() == 1);
    CHECK(stop.vertices[0].near({1.0, 0.0, 0.0, 0.0}, 1e-9));

    CEPolytope cont = enumerate_vertices(stage_game({0.05, 0.5, 0.25, 0.25}));
    REQUIRE(cont.vertices.size() == 1);
    CHECK(cont.vertices[0].near({0.0, 0.0, 0.0, 1.0}, 1e-9));
}

TEST_CASE("between the two continuation values only the follower stops", "[polytope]") {
    // v_prev > w_prev: draws in (w_prev, v_prev) are worth taking for player 2 only
    CEPolytope poly = enumerate_vertices(stage_game({0.4, 0.6, 0.45, 0.3}));
    REQUIRE(poly.vertices.size() == 1);
    CHECK(poly.vertices[0].near({0.0, 0.0, 1.0, 0.0}, 1e-9));

    CEPolytope mirror = enumerate_vertices(stage_game({0.4, 0.6, 0.3, 0.45}));
    REQUIRE(mirror.vertices.size() == 1);
    CHECK(mirror.vertices[0].near({0.0, 1.0, 0.0, 0.0}, 1e-9));
}

TEST_CASE("contest parameter validation", "[polytope]") {
    CHECK_THROWS_AS(contest_params({0.4, 0.6, 0.45, 0.3}), std::invalid_argument);
    CHECK_THROWS_AS(contest_params({0.25, 0.5, 0.25, 0.25}), std::invalid_argument);
    CHECK_THROWS_AS(contest_params({0.5, 0.5, 0.25, 0.25}), std::invalid_argument);
    CHECK_THROWS_AS(contest_params({0.7, 0.5, 0.25, 0.25}), std::invalid_argument);
}

TEST_CASE("labeled vertices at alpha = gamma = 1", "[polytope]") {
    ContestParams cp{1.0, 1.0};
    CHECK(labeled_vertex(VertexLabel::C, cp).near({0, 0, 1, 0}, 0.0));
    CHECK(labeled_vertex(VertexLabel::D, cp).near({0, 1, 0, 0}, 0.0));
    CHECK(labeled_vertex(VertexLabel::E, cp).near({1.0 / 3, 1.0 / 3, 1.0 / 3, 0}, 1e-15));
    CHECK(labeled_vertex(VertexLabel::F, cp).near({0, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 1e-15));
    CHECK(labeled_vertex(VertexLabel::G, cp).near({0.25, 0.25, 0.25, 0.25}, 1e-15));
    CHECK(labeled_vertex(VertexLabel::H, cp).near({0, 0.5, 0.5, 0}, 0.0));
    CHECK_THROWS_AS(labeled_vertex(VertexLabel::E, ContestParams{-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("vertex G is the mixed Nash point", "[polytope]") {
    for (double x : {0.27, 1.0 / 3.0, 0.4, 0.49}) {
        ContestParams cp = contest_params({x, 0.5, 0.25, 0.25});
        JointDistribution g = labeled_vertex(VertexLabel::G, cp);
        double p1_stop = g.mu_ss + g.mu_sf;
        double p2_stop = g.mu_ss + g.mu_fs;
        CHECK_THAT(g.mu_ss, WithinAbs(p1_stop * p2_stop, 1e-12));
        CHECK_THAT(g.mu_sf, WithinAbs(p1_stop * (1 - p2_stop), 1e-12));
        CHECK_THAT(g.mu_fs, WithinAbs((1 - p1_stop) * p2_stop, 1e-12));
        CHECK_THAT(g.mu_ff, WithinAbs((1 - p1_stop) * (1 - p2_stop), 1e-12));
    }
}

TEST_CASE("match_labeled_vertex rejects blends", "[polytope]") {
    ContestParams cp = contest_params(kTwoStageThird);
    for (VertexLabel l :
         {VertexLabel::C, VertexLabel::D, VertexLabel::E, VertexLabel::F, VertexLabel::G})
        CHECK(match_labeled_vertex(labeled_vertex(l, cp), cp) == l);

    // H is the midpoint of the C-D edge, not a vertex, so it never matches
    CHECK_FALSE(match_labeled_vertex(labeled_vertex(VertexLabel::H, cp), cp).has_value());

    JointDistribution c = labeled_vertex(VertexLabel::C, cp);
    JointDistribution e = labeled_vertex(VertexLabel::E, cp);
    JointDistribution blend = JointDistribution::from_array(
        {0.5 * (c.mu_ss + e.mu_ss), 0.5 * (c.mu_sf + e.mu_sf), 0.5 * (c.mu_fs + e.mu_fs),
         0.5 * (c.mu_ff + e.mu_ff)});
    CHECK_FALSE(match_labeled_vertex(blend, cp).has_value());
}

TEST_CASE("payoffs at the labeled vertices", "[polytope]") {
    for (double x : {0.26, 1.0 / 3.0, 0.42, 0.49}) {
        StageParams p{x, 0.5, 0.25, 0.25};
        Bimatrix2x2 g = stage_game(p);
        ContestParams cp = contest_params(p);
        double split = 0.5 * (x + 0.5);

        auto [c1, c2] = expected_payoffs(g, labeled_vertex(VertexLabel::C, cp));
        CHECK_THAT(c1, WithinAbs(0.5, 1e-12));
        CHECK_THAT(c2, WithinAbs(x, 1e-12));

        for (VertexLabel l : {VertexLabel::E, VertexLabel::H}) {
            auto [p1, p2] = expected_payoffs(g, labeled_vertex(l, cp));
            CHECK_THAT(p1, WithinAbs(split, 1e-12));
            CHECK_THAT(p2, WithinAbs(split, 1e-12));
        }

        // the two fully mixed vertices are symmetric and strictly worse than E
        for (VertexLabel l : {VertexLabel::F, VertexLabel::G}) {
            auto [p1, p2] = expected_payoffs(g, labeled_vertex(l, cp));
            CHECK_THAT(p1 - p2, WithinAbs(0.0, 1e-12));
            CHECK(p1 < split - 1e-6);
        }
    }
}

TEST_CASE("expected_payoffs validates its input", "[polytope]") {
    Bimatrix2x2 g = stage_game(kTwoStageThird);
    CHECK_THROWS_AS(expected_payoffs(g, JointDistribution{0.5, 0.5, 0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(expected_payoffs(g, JointDistribution{1.5, -0.5, 0.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("linear objectives over the polytope", "[polytope]") {
    CEPolytope poly = enumerate_vertices(stage_game(kTwoStageThird));
    std::array<double, 4> pay1 = {5.0 / 12.0, 1.0 / 3.0, 0.5, 0.25};

    auto best = maximize_linear(poly, pay1);
    REQUIRE(best.has_value());
    CHECK_THAT(best->value, WithinAbs(0.5, 1e-12));
    REQUIRE(best->argmax.size() == 1);
    CHECK(best->argmax[0].near({0, 0, 1, 0}, 1e-9));

    // restricted to the face where player 1 is not ahead, the optimum is the
    // even split and both the symmetric vertex and the coin toss attain it
    std::array<double, 4> pay2 = {5.0 / 12.0, 0.5, 1.0 / 3.0, 0.25};
    HalfspaceConstraint order{ConstraintKind::Custom,
                              {pay2[0] - pay1[0], pay2[1] - pay1[1], pay2[2] - pay1[2],
                               pay2[3] - pay1[3]}};
    auto even = maximize_linear(poly, pay1, order);
    REQUIRE(even.has_value());
    CHECK_THAT(even->value, WithinAbs(5.0 / 12.0, 1e-12));
    ContestParams cp = contest_params(kTwoStageThird);
    CHECK(contains(even->argmax, labeled_vertex(VertexLabel::E, cp)));
    CHECK(contains(even->argmax, labeled_vertex(VertexLabel::H, cp)));

    HalfspaceConstraint impossible{ConstraintKind::Custom, {-1.0, -1.0, -1.0, -1.0}};
    CHECK_FALSE(maximize_linear(poly, pay1, impossible).has_value());
}

TEST_CASE("enumeration rejects non-finite games", "[polytope]") {
    Bimatrix2x2 g = stage_game(kTwoStageThird);
    g.a[0][0] = std::nan("");
    CHECK_THROWS_AS(enumerate_vertices(g), std::invalid_argument);
}
