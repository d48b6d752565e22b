#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "game_core.hpp"

namespace staffsel {

inline constexpr double kFeasibilityTol = 1e-9;   // constraint slack allowed at a vertex
inline constexpr double kVertexDedupeTol = 1e-8;  // max-norm distance treated as the same vertex
inline constexpr double kMassSumTol = 1e-12;      // allowed deviation of total mass from 1
inline constexpr double kArgmaxTol = 1e-9;        // objective gap treated as a tie

/** Probability mass over the four joint actions, stored as named fields in
    the fixed component order (ss, sf, fs, ff). */
struct JointDistribution {
    double mu_ss = 0.0;
    double mu_sf = 0.0;
    double mu_fs = 0.0;
    double mu_ff = 0.0;

    double sum() const { return mu_ss + mu_sf + mu_fs + mu_ff; }

    std::array<double, 4> as_array() const { return {mu_ss, mu_sf, mu_fs, mu_ff}; }

    static JointDistribution from_array(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }

    // Alternate fixed ordering (ss, ff, fs, sf) kept for consumers that
    // expect that column convention; the named fields are authoritative.
    std::array<double, 4> paper_order() const { return {mu_ss, mu_ff, mu_fs, mu_sf}; }

    bool near(const JointDistribution& o, double tol) const {
        return std::abs(mu_ss - o.mu_ss) <= tol && std::abs(mu_sf - o.mu_sf) <= tol &&
               std::abs(mu_fs - o.mu_fs) <= tol && std::abs(mu_ff - o.mu_ff) <= tol;
    }
};

enum class ConstraintKind {
    IncentiveP1Stop,
    IncentiveP1Continue,
    IncentiveP2Stop,
    IncentiveP2Continue,
    NonNegativity,
    Custom,
};

/** Halfspace coeffs . mu >= 0 with coefficients over (ss, sf, fs, ff). */
struct HalfspaceConstraint {
    ConstraintKind kind = ConstraintKind::Custom;
    std::array<double, 4> coeffs = {0, 0, 0, 0};

    double eval(const JointDistribution& mu) const {
        auto m = mu.as_array();
        return coeffs[0] * m[0] + coeffs[1] * m[1] + coeffs[2] * m[2] + coeffs[3] * m[3];
    }
};

// Obedience constraints: a player told an action must not gain by switching,
// conditionally on having received that recommendation.
//   P1 told s:  mu_ss (a_ss - a_fs) + mu_sf (a_sf - a_ff) >= 0
//   P1 told f:  mu_fs (a_fs - a_ss) + mu_ff (a_ff - a_sf) >= 0
// and the column-player pair over (ss, fs) and (sf, ff) with b payoffs.
inline std::vector<HalfspaceConstraint> incentive_constraints(const Bimatrix2x2& g) {
    const auto& a = g.a;
    const auto& b = g.b;
    return {
        {ConstraintKind::IncentiveP1Stop, {a[0][0] - a[1][0], a[0][1] - a[1][1], 0.0, 0.0}},
        {ConstraintKind::IncentiveP1Continue, {0.0, 0.0, a[1][0] - a[0][0], a[1][1] - a[0][1]}},
        {ConstraintKind::IncentiveP2Stop, {b[0][0] - b[0][1], 0.0, b[1][0] - b[1][1], 0.0}},
        {ConstraintKind::IncentiveP2Continue, {0.0, b[0][1] - b[0][0], 0.0, b[1][1] - b[1][0]}},
    };
}

/** The polytope of correlated equilibria of a 2x2 bimatrix game. constraints
    lists the four non-negativity rows followed by the four incentive rows. */
struct CEPolytope {
    Bimatrix2x2 game;
    std::vector<HalfspaceConstraint> constraints;
    std::vector<JointDistribution> vertices;
};

namespace detail {

// Gaussian elimination with partial pivoting on a 4x5 augmented system.
inline bool solve4(double m[4][5]) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (std::abs(m[pivot][col]) < 1e-12) return false;
        if (pivot != col)
            for (int k = col; k < 5; ++k) std::swap(m[pivot][k], m[col][k]);
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            double f = m[r][col] / m[col][col];
            if (f == 0.0) continue;
            for (int k = col; k < 5; ++k) m[r][k] -= f * m[col][k];
        }
    }
    for (int r = 0; r < 4; ++r) m[r][4] /= m[r][r];
    return true;
}

inline bool lex_less(const JointDistribution& a, const JointDistribution& b, double tol = 1e-12) {
    auto xa = a.as_array();
    auto xb = b.as_array();
    for (int i = 0; i < 4; ++i) {
        if (xa[i] < xb[i] - tol) return true;
        if (xa[i] > xb[i] + tol) return false;
    }
    return false;
}

// Exhaustive active-set enumeration: every choice of three inequalities held
// with equality, solved together with the total-mass row. Singular choices
// are skipped; solutions violating any remaining inequality are discarded.
inline std::vector<JointDistribution> enumerate_impl(const std::vector<HalfspaceConstraint>& ineqs) {
    const int m = static_cast<int>(ineqs.size());
    std::vector<JointDistribution> verts;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (int k = j + 1; k < m; ++k) {
                double sys[4][5] = {};
                const std::array<double, 4>* rows[3] = {&ineqs[static_cast<std::size_t>(i)].coeffs,
                                                        &ineqs[static_cast<std::size_t>(j)].coeffs,
                                                        &ineqs[static_cast<std::size_t>(k)].coeffs};
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 4; ++c) sys[r][c] = (*rows[r])[static_cast<std::size_t>(c)];
                for (int c = 0; c < 4; ++c) sys[3][c] = 1.0;
                sys[3][4] = 1.0;
                if (!solve4(sys)) continue;
                JointDistribution mu{sys[0][4], sys[1][4], sys[2][4], sys[3][4]};
                bool feasible = true;
                for (const auto& c : ineqs) {
                    if (c.eval(mu) < -kFeasibilityTol) {
                        feasible = false;
                        break;
                    }
                }
                if (!feasible) continue;
                bool duplicate = false;
                for (const auto& v : verts) {
                    if (mu.near(v, kVertexDedupeTol)) {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate) verts.push_back(mu);
            }
        }
    }
    std::sort(verts.begin(), verts.end(),
              [](const JointDistribution& a, const JointDistribution& b) { return lex_less(a, b); });
    return verts;
}

inline std::vector<HalfspaceConstraint> full_constraints(const Bimatrix2x2& g) {
    std::vector<HalfspaceConstraint> cons;
    for (int i = 0; i < 4; ++i) {
        HalfspaceConstraint nn{ConstraintKind::NonNegativity, {0, 0, 0, 0}};
        nn.coeffs[static_cast<std::size_t>(i)] = 1.0;
        cons.push_back(nn);
    }
    for (auto& c : incentive_constraints(g)) cons.push_back(c);
    return cons;
}

}  // namespace detail

inline CEPolytope enumerate_vertices(const Bimatrix2x2& g) {
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            if (!std::isfinite(g.a[r][c]) || !std::isfinite(g.b[r][c]))
                throw std::invalid_argument("enumerate_vertices: payoffs must be finite");
    auto cons = detail::full_constraints(g);
    auto verts = detail::enumerate_impl(cons);
    if (verts.empty())
        throw std::logic_error("enumerate_vertices: no vertex found; a 2x2 game always has one");
    return {g, std::move(cons), std::move(verts)};
}

/** Shape parameters of the contested-stage polytope of a symmetric stage:
    alpha = (u - x) / (2 (x - v)),  gamma = 2 (x - v) / (u - x).
    alpha * gamma = 1 identically for this family of games. */
struct ContestParams {
    double alpha = 1.0;
    double gamma = 1.0;
};

inline ContestParams contest_params(const StageParams& p) {
    if (std::abs(p.v_prev - p.w_prev) > 1e-9)
        throw std::invalid_argument("contest_params: stage must be symmetric (v_prev == w_prev)");
    if (!(p.x > p.v_prev + 1e-9 && p.x < p.u_prev - 1e-9))
        throw std::invalid_argument("contest_params: x must lie strictly inside (v_prev, u_prev)");
    double alpha = (p.u_prev - p.x) / (2.0 * (p.x - p.v_prev));
    double gamma = 2.0 * (p.x - p.v_prev) / (p.u_prev - p.x);
    return {alpha, gamma};
}

/** Names of the recurring vertices of a symmetric contested stage. C and D
    are the pure asymmetric equilibria (point masses on fs and sf), E/F/G the
    parametric mixed vertices, and H the fifty-fifty coin toss over C and D
    (a vertex only of the symmetric-face subpolytope, not of the full one). */
enum class VertexLabel { C, D, E, F, G, H };

inline JointDistribution labeled_vertex(VertexLabel label, const ContestParams& cp) {
    double al = cp.alpha;
    double ga = cp.gamma;
    if (!(std::isfinite(al) && std::isfinite(ga)) || al <= 0.0 || ga <= 0.0)
        throw std::invalid_argument("labeled_vertex: alpha and gamma must be positive and finite");
    switch (label) {
        case VertexLabel::C: return {0.0, 0.0, 1.0, 0.0};
        case VertexLabel::D: return {0.0, 1.0, 0.0, 0.0};
        case VertexLabel::E: {
            double z = 1.0 + ga + al * ga;
            return {ga / z, al * ga / z, 1.0 / z, 0.0};
        }
        case VertexLabel::F: {
            double z = 1.0 + al + al * ga;
            return {0.0, al * ga / z, 1.0 / z, al / z};
        }
        case VertexLabel::G: {
            double z = (1.0 + al) * (1.0 + ga);
            return {ga / z, al * ga / z, 1.0 / z, al / z};
        }
        case VertexLabel::H: return {0.0, 0.5, 0.5, 0.0};
    }
    throw std::logic_error("labeled_vertex: unknown label");
}

inline const char* vertex_label_name(VertexLabel label) {
    switch (label) {
        case VertexLabel::C: return "C";
        case VertexLabel::D: return "D";
        case VertexLabel::E: return "E";
        case VertexLabel::F: return "F";
        case VertexLabel::G: return "G";
        case VertexLabel::H: return "H";
    }
    throw std::logic_error("vertex_label_name: unknown label");
}

// The five vertices of the full contested polytope, in label order C..G.
inline std::array<JointDistribution, 5> closed_form_vertices(const ContestParams& cp) {
    return {labeled_vertex(VertexLabel::C, cp), labeled_vertex(VertexLabel::D, cp),
            labeled_vertex(VertexLabel::E, cp), labeled_vertex(VertexLabel::F, cp),
            labeled_vertex(VertexLabel::G, cp)};
}

// Match an enumerated vertex against the closed forms C..G at the given
// shape parameters; H is not a vertex of the full polytope.
inline std::optional<VertexLabel> match_labeled_vertex(const JointDistribution& mu,
                                                       const ContestParams& cp,
                                                       double tol = 1e-9) {
    static constexpr VertexLabel kLabels[5] = {VertexLabel::C, VertexLabel::D, VertexLabel::E,
                                               VertexLabel::F, VertexLabel::G};
    for (VertexLabel l : kLabels)
        if (mu.near(labeled_vertex(l, cp), tol)) return l;
    return std::nullopt;
}

inline std::pair<double, double> expected_payoffs(const Bimatrix2x2& g, const JointDistribution& mu) {
    if (std::abs(mu.sum() - 1.0) > 1e-9 || mu.mu_ss < -kFeasibilityTol || mu.mu_sf < -kFeasibilityTol ||
        mu.mu_fs < -kFeasibilityTol || mu.mu_ff < -kFeasibilityTol)
        throw std::invalid_argument("expected_payoffs: mu is not a probability distribution");
    double p1 = mu.mu_ss * g.a[0][0] + mu.mu_sf * g.a[0][1] + mu.mu_fs * g.a[1][0] + mu.mu_ff * g.a[1][1];
    double p2 = mu.mu_ss * g.b[0][0] + mu.mu_sf * g.b[0][1] + mu.mu_fs * g.b[1][0] + mu.mu_ff * g.b[1][1];
    return {p1, p2};
}

struct LinearOptimum {
    double value = 0.0;
    std::vector<JointDistribution> argmax;
};

// Maximize objective . mu over the polytope, optionally intersected with one
// extra halfspace. The optimum of a linear functional over a polytope is
// attained at a vertex, so only (re-)enumerated vertices are scanned.
// Returns nullopt when the extra halfspace empties the feasible set.
inline std::optional<LinearOptimum> maximize_linear(const CEPolytope& p,
                                                    const std::array<double, 4>& objective,
                                                    const std::optional<HalfspaceConstraint>& extra = std::nullopt) {
    std::vector<JointDistribution> augmented;
    const std::vector<JointDistribution>* verts = &p.vertices;
    if (extra) {
        auto cons = p.constraints;
        cons.push_back(*extra);
        augmented = detail::enumerate_impl(cons);
        if (augmented.empty()) return std::nullopt;
        verts = &augmented;
    }
    auto value_of = [&objective](const JointDistribution& mu) {
        auto m = mu.as_array();
        return objective[0] * m[0] + objective[1] * m[1] + objective[2] * m[2] + objective[3] * m[3];
    };
    double best = value_of((*verts)[0]);
    for (const auto& v : *verts) best = std::max(best, value_of(v));
    LinearOptimum out;
    out.value = best;
    for (const auto& v : *verts)
        if (value_of(v) >= best - kArgmaxTol) out.argmax.push_back(v);
    return out;
}

}  // namespace staffsel
