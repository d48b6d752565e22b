// Walkthrough of the two-stage game at zero shortfall cost: enumerate the
// stage polytope at one contested draw, then solve under each criterion.

#include <cstdio>

#include "staffsel/staffsel.hpp"

int main() {
    using namespace staffsel;

    Cost cost{0.0};
    double d = one_stage_value(cost);
    StageParams params{1.0 / 3.0, 0.5, d, d};

    std::printf("stage game at x = 1/3 (u = 1/2, v = w = %g)\n", d);
    CEPolytope poly = enumerate_vertices(stage_game(params));
    ContestParams cp = contest_params(params);
    std::printf("alpha = %g, gamma = %g\n", cp.alpha, cp.gamma);
    for (const JointDistribution& mu : poly.vertices) {
        auto label = match_labeled_vertex(mu, cp);
        auto [p1, p2] = expected_payoffs(poly.game, mu);
        std::printf("  %s  mu = (%.6f, %.6f, %.6f, %.6f)  payoffs = (%.6f, %.6f)\n",
                    label ? vertex_label_name(*label) : "?", mu.mu_ss, mu.mu_sf, mu.mu_fs, mu.mu_ff,
                    p1, p2);
    }

    std::printf("\ntwo-stage values by criterion\n");
    for (CriterionKind kind :
         {CriterionKind::Utilitarian, CriterionKind::Egalitarian, CriterionKind::Republican,
          CriterionKind::Libertarian1, CriterionKind::Libertarian2}) {
        EquilibriumSolution sol = solve(2, cost, Criterion::with_default_tie(kind));
        std::printf("  %-13s v2 = %.10f  w2 = %.10f\n", criterion_name(kind), sol.v[2], sol.w[2]);
    }

    EquilibriumSolution sol = solve(2, cost, Criterion::with_default_tie(CriterionKind::Egalitarian));
    MCEstimate est = estimate_values(sol, 200000, 42);
    std::printf("\negalitarian Monte Carlo: mean = (%.6f, %.6f), dp = (%.6f, %.6f)\n", est.mean_1,
                est.mean_2, sol.v[2], sol.w[2]);
    VerificationReport rep = verify_equilibrium(sol);
    std::printf("verification: %s (max gain %.3g)\n", rep.passed ? "pass" : "FAIL", rep.max_gain);
    return rep.passed ? 0 : 1;
}
