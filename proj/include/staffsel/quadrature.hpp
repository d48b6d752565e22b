#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace staffsel::quad {

struct Node {
    double x;  // abscissa in (-1, 1)
    double w;  // weight
};

// Gauss-Legendre rule of order n, found by Newton iteration on P_n starting
// from the Chebyshev approximation of its roots.
inline std::vector<Node> make_gauss_legendre(int n) {
    if (n < 2) throw std::invalid_argument("make_gauss_legendre: order must be >= 2");
    std::vector<Node> nodes(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = {x, w};
        nodes[static_cast<std::size_t>(n - 1 - i)] = {-x, w};
    }
    return nodes;
}

inline const std::vector<Node>& gauss_legendre(int n) {
    static const std::vector<Node> order16 = make_gauss_legendre(16);
    static const std::vector<Node> order64 = make_gauss_legendre(64);
    if (n == 16) return order16;
    if (n == 64) return order64;
    throw std::invalid_argument("gauss_legendre: only orders 16 and 64 are cached");
}

template <class F>
double fixed(F&& f, double a, double b, int order = 16) {
    const auto& nodes = gauss_legendre(order);
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    double acc = 0.0;
    for (const Node& n : nodes) acc += n.w * f(mid + half * n.x);
    return acc * half;
}

namespace detail {

template <class F>
double adaptive_impl(F& f, double a, double b, double whole, double tol, int depth) {
    double mid = 0.5 * (a + b);
    double left = fixed(f, a, mid);
    double right = fixed(f, mid, b);
    double refined = left + right;
    if (std::abs(refined - whole) <= tol || depth >= 48) return refined;
    return adaptive_impl(f, a, mid, left, 0.5 * tol, depth + 1) +
           adaptive_impl(f, mid, b, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Adaptive bisection around a 16-point base rule; abs_tol is an absolute
// target for the whole interval.
template <class F>
double adaptive(F&& f, double a, double b, double abs_tol = 1e-11) {
    if (!(a <= b)) throw std::invalid_argument("adaptive: interval is reversed");
    if (a == b) return 0.0;
    return detail::adaptive_impl(f, a, b, fixed(f, a, b), abs_tol, 0);
}

// Bisection on a bracketing interval; callers ensure f(lo) and f(hi) have
// opposite signs (a zero endpoint is returned as-is).
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol = 1e-14) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect_root: endpoints do not bracket a root");
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace staffsel::quad
