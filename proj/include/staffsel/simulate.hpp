#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "game_core.hpp"
#include "induction.hpp"
#include "polytope.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace staffsel {

/** Map one arbitrator uniform to the pair of private recommendations. */
inline std::pair<Action, Action> device_signal(const JointDistribution& mu, double a) {
    double q1 = mu.mu_ss;
    double q2 = q1 + mu.mu_sf;
    double q3 = q2 + mu.mu_fs;
    if (a <= q1) return {Action::Stop, Action::Stop};
    if (a <= q2) return {Action::Stop, Action::Continue};
    if (a <= q3) return {Action::Continue, Action::Stop};
    return {Action::Continue, Action::Continue};
}

struct EpisodeOutcome {
    std::optional<int> hire_stage_1;  // stage n (candidates remaining) at which each player hired
    std::optional<int> hire_stage_2;
    double payoff_1 = 0.0;
    double payoff_2 = 0.0;
};

/** One play-through with explicit randomness: candidates[k], arbitrators[k]
    and coins[k] are consumed at the k-th interview (stage n = N - k). A
    player left alone after the rival hires switches to the lone-searcher
    threshold; an unhired player ends at -c. */
inline EpisodeOutcome run_episode_with_streams(const EquilibriumSolution& sol,
                                               const std::vector<double>& candidates,
                                               const std::vector<double>& arbitrators,
                                               const std::vector<double>& coins) {
    std::size_t n_stages = static_cast<std::size_t>(sol.num_stages);
    if (candidates.size() < n_stages || arbitrators.size() < n_stages || coins.size() < n_stages)
        throw std::invalid_argument("run_episode_with_streams: streams shorter than the horizon");
    EpisodeOutcome out;
    out.payoff_1 = -sol.cost.c;
    out.payoff_2 = -sol.cost.c;
    bool active1 = true;
    bool active2 = true;
    for (int n = sol.num_stages; n >= 1 && (active1 || active2); --n) {
        std::size_t k = static_cast<std::size_t>(sol.num_stages - n);
        double x = candidates[k];
        auto hire = [&](int player) {
            if (player == 1) {
                active1 = false;
                out.hire_stage_1 = n;
                out.payoff_1 = x;
            } else {
                active2 = false;
                out.hire_stage_2 = n;
                out.payoff_2 = x;
            }
        };
        if (active1 && active2) {
            const StagePolicy& pol = sol.stages[static_cast<std::size_t>(n) - 1];
            JointDistribution mu = pol.evaluate(x, sol.criterion);
            auto [r1, r2] = device_signal(mu, arbitrators[k]);
            bool s1 = r1 == Action::Stop;
            bool s2 = r2 == Action::Stop;
            if (s1 && s2) {
                hire(coins[k] < 0.5 ? 1 : 2);
            } else if (s1) {
                hire(1);
            } else if (s2) {
                hire(2);
            }
        } else if (x > sol.u.at(static_cast<std::size_t>(n) - 1)) {
            hire(active1 ? 1 : 2);
        }
    }
    return out;
}

inline EpisodeOutcome run_episode(const EquilibriumSolution& sol, SplitMix64& rng) {
    std::size_t n_stages = static_cast<std::size_t>(sol.num_stages);
    std::vector<double> candidates(n_stages);
    std::vector<double> arbitrators(n_stages);
    std::vector<double> coins(n_stages);
    for (double& t : candidates) t = rng.next_double();
    for (double& t : arbitrators) t = rng.next_double();
    for (double& t : coins) t = rng.next_double();
    return run_episode_with_streams(sol, candidates, arbitrators, coins);
}

struct MCEstimate {
    double mean_1 = 0.0;
    double mean_2 = 0.0;
    double se_1 = 0.0;
    double se_2 = 0.0;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
};

/** Monte Carlo estimate of both players' values. Episode i uses the
    decorrelated substream (seed, i), so results do not depend on batching. */
inline MCEstimate estimate_values(const EquilibriumSolution& sol, std::uint64_t runs,
                                  std::uint64_t seed) {
    if (runs == 0) throw std::invalid_argument("estimate_values: runs must be positive");
    double s1 = 0.0, s2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::uint64_t ep = 0; ep < runs; ++ep) {
        SplitMix64 rng = SplitMix64::substream(seed, ep);
        EpisodeOutcome o = run_episode(sol, rng);
        s1 += o.payoff_1;
        s2 += o.payoff_2;
        q1 += o.payoff_1 * o.payoff_1;
        q2 += o.payoff_2 * o.payoff_2;
    }
    MCEstimate est;
    est.runs = runs;
    est.seed = seed;
    double n = static_cast<double>(runs);
    est.mean_1 = s1 / n;
    est.mean_2 = s2 / n;
    if (runs > 1) {
        double var1 = std::max(0.0, (q1 - n * est.mean_1 * est.mean_1) / (n - 1.0));
        double var2 = std::max(0.0, (q2 - n * est.mean_2 * est.mean_2) / (n - 1.0));
        est.se_1 = std::sqrt(var1 / n);
        est.se_2 = std::sqrt(var2 / n);
    }
    return est;
}

namespace detail {

// stop marginal of the player who keeps following the device
inline double opponent_stop_marginal(const JointDistribution& mu, int deviator) {
    return deviator == 1 ? mu.mu_ss + mu.mu_fs : mu.mu_ss + mu.mu_sf;
}

// One stage of the deviation DP with the opponent's stop marginal m constant
// on [p, q]. Stopping pays m (x + u)/2 + (1 - m) x, continuing pays
// m u + (1 - m) V; the crossing is unique because stopping is increasing.
inline double dev_integral_constant_m(double m, double p, double q, double u, double v_dev) {
    double slope = 1.0 - 0.5 * m;
    double icept = 0.5 * m * u;
    double g_cont = m * u + (1.0 - m) * v_dev;
    double x_star = (g_cont - icept) / slope;
    auto stop_part = [&](double a, double b) {
        return slope * 0.5 * (b * b - a * a) + icept * (b - a);
    };
    if (x_star <= p) return stop_part(p, q);
    if (x_star >= q) return g_cont * (q - p);
    return g_cont * (x_star - p) + stop_part(x_star, q);
}

}  // namespace detail

/** Value of the best stage-measurable deviation for one player: the deviator
    observes the candidate but ignores the private recommendation, while the
    opponent keeps obeying the device. A correlated device can strictly beat
    this (the recommendation carries information about the opponent), so the
    equilibrium property is best_deviation <= value, not equality. */
inline double best_deviation(const EquilibriumSolution& sol, int player) {
    if (player != 1 && player != 2) throw std::invalid_argument("best_deviation: player must be 1 or 2");
    auto useq = lone_searcher_values(sol.cost, sol.num_stages);
    double v_dev = -sol.cost.c;
    for (int n = 1; n <= sol.num_stages; ++n) {
        const StagePolicy& pol = sol.stages[static_cast<std::size_t>(n) - 1];
        double u = useq.at(static_cast<std::size_t>(n) - 1);
        double total = 0.0;
        for (std::size_t i = 0; i < pol.pieces.size(); ++i) {
            double p = pol.breakpoints[i];
            double q = pol.breakpoints[i + 1];
            const PieceRule& r = pol.pieces[i];
            std::optional<double> const_m;
            switch (r.kind) {
                case PieceRule::Kind::PointMassSS: const_m = 1.0; break;
                case PieceRule::Kind::PointMassFF: const_m = 0.0; break;
                case PieceRule::Kind::TableVertex:
                    if (r.label == VertexLabel::C) const_m = player == 1 ? 1.0 : 0.0;
                    if (r.label == VertexLabel::D) const_m = player == 1 ? 0.0 : 1.0;
                    if (r.label == VertexLabel::H) const_m = 0.5;
                    break;
                case PieceRule::Kind::Enumerated: break;
            }
            if (const_m) {
                total += detail::dev_integral_constant_m(*const_m, p, q, u, v_dev);
                continue;
            }
            auto m_of = [&](double x) {
                return detail::opponent_stop_marginal(
                    detail::rule_mu(r, x, pol.u_prev, pol.v_prev, pol.w_prev, sol.criterion), player);
            };
            auto g_stop = [&](double x) {
                double m = m_of(x);
                return 0.5 * m * (x + u) + (1.0 - m) * x;
            };
            auto g_cont = [&](double x) {
                double m = m_of(x);
                return m * u + (1.0 - m) * v_dev;
            };
            auto gap = [&](double x) { return g_stop(x) - g_cont(x); };

            std::vector<double> cuts{p};
            const int scan = 64;
            double prev_x = p;
            double prev_h = gap(p);
            for (int j = 1; j <= scan; ++j) {
                double xj = p + (q - p) * static_cast<double>(j) / scan;
                double hj = gap(xj);
                if ((prev_h < 0.0) != (hj < 0.0))
                    cuts.push_back(quad::bisect_root(gap, prev_x, xj, 1e-14));
                prev_x = xj;
                prev_h = hj;
            }
            cuts.push_back(q);
            for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
                double a = cuts[s];
                double b = cuts[s + 1];
                if (b - a <= 0.0) continue;
                bool stop_side = gap(0.5 * (a + b)) >= 0.0;
                total += stop_side ? quad::adaptive(g_stop, a, b, 1e-12)
                                   : quad::adaptive(g_cont, a, b, 1e-12);
            }
        }
        v_dev = total;
    }
    return v_dev;
}

struct PlayerCheck {
    int player = 1;
    double value = 0.0;      // value delivered by the recorded devices
    double best_dev = 0.0;   // best stage-measurable deviation
    double gain = 0.0;       // best_dev - value
};

struct VerificationReport {
    PlayerCheck p1, p2;
    double max_gain = 0.0;
    double min_ce_slack = 0.0;  // most violated obedience constraint across stages
    bool values_consistent = false;
    double tol = 0.0;
    bool passed = false;
};

/** Equilibrium audit: recomputes the value chain from the recorded devices,
    checks the stored sequences against it, checks obedience constraints on a
    sample grid of every piece, and bounds the deviation gain of each player. */
inline VerificationReport verify_equilibrium(const EquilibriumSolution& sol, double tol = 1e-9) {
    VerificationReport rep;
    rep.tol = tol;
    auto [v_act, w_act] = policy_values(sol);
    rep.values_consistent = sol.v.size() == v_act.size() && sol.w.size() == w_act.size();
    if (rep.values_consistent) {
        for (std::size_t i = 0; i < v_act.size(); ++i) {
            if (std::abs(sol.v[i] - v_act[i]) > 1e-9 || std::abs(sol.w[i] - w_act[i]) > 1e-9) {
                rep.values_consistent = false;
                break;
            }
        }
    }

    rep.min_ce_slack = 0.0;
    auto useq = lone_searcher_values(sol.cost, sol.num_stages);
    for (int n = 1; n <= sol.num_stages; ++n) {
        const StagePolicy& pol = sol.stages[static_cast<std::size_t>(n) - 1];
        double u = useq.at(static_cast<std::size_t>(n) - 1);
        for (std::size_t i = 0; i < pol.pieces.size(); ++i) {
            double p = pol.breakpoints[i];
            double q = pol.breakpoints[i + 1];
            for (const quad::Node& node : quad::gauss_legendre(16)) {
                double x = 0.5 * (p + q) + 0.5 * (q - p) * node.x;
                JointDistribution mu = pol.evaluate(x, sol.criterion);
                Bimatrix2x2 g = stage_game({x, u, v_act[static_cast<std::size_t>(n) - 1],
                                            w_act[static_cast<std::size_t>(n) - 1]});
                for (const HalfspaceConstraint& hc : incentive_constraints(g))
                    rep.min_ce_slack = std::min(rep.min_ce_slack, hc.eval(mu));
            }
        }
    }

    rep.p1 = {1, v_act.back(), best_deviation(sol, 1), 0.0};
    rep.p2 = {2, w_act.back(), best_deviation(sol, 2), 0.0};
    rep.p1.gain = rep.p1.best_dev - rep.p1.value;
    rep.p2.gain = rep.p2.best_dev - rep.p2.value;
    rep.max_gain = std::max(rep.p1.gain, rep.p2.gain);
    rep.passed = rep.values_consistent && rep.max_gain <= tol && rep.min_ce_slack >= -tol;
    return rep;
}

}  // namespace staffsel
