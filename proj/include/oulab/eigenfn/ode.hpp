#pragma once

// Adaptive Dormand-Prince 5(4) for complex second-order scalar ODEs
// w'' = F(x, w, w'), recording every accepted node with (w, w', w'').

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "oulab/errors.hpp"

namespace oulab::ode {

using cplx = std::complex<double>;

struct Options {
    double rtol = 1e-11;
    double atol = 1e-14;
    double h_init = 1e-3;
    double h_max = 0.1;
    double h_min = 1e-12;
    long max_steps = 2'000'000;
};

/// Samples of a solution; x may run in either direction.
struct Nodes {
    std::vector<double> x;
    std::vector<cplx> w, dw, d2w;

    std::size_t size() const { return x.size(); }
    void push(double xi, cplx wi, cplx dwi, cplx d2wi) {
        x.push_back(xi);
        w.push_back(wi);
        dw.push_back(dwi);
        d2w.push_back(d2wi);
    }
};

/// Continues the solution stored in `nodes` (last entry is the current state) to `x_end`.
template <class F>
void advance(F&& rhs, Nodes& nodes, double x_end, const Options& opt) {
    if (nodes.size() == 0) throw NumericError("ode::advance: no initial state");
    double x = nodes.x.back();
    if (x == x_end) return;
    const double dir = x_end > x ? 1.0 : -1.0;
    cplx y0 = nodes.w.back(), y1 = nodes.dw.back();

    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double h = dir * std::min(opt.h_init, opt.h_max);
    cplx k1a = y1, k1b = rhs(x, y0, y1);
    long steps = 0;
    while (dir * (x_end - x) > 0.0) {
        if (++steps > opt.max_steps) throw NumericError("ode::advance: step budget exhausted");
        if (dir * (x + h - x_end) > 0.0) h = x_end - x;
        auto stage = [&](double cx, cplx ya, cplx yb) { return std::pair{yb, rhs(x + cx * h, ya, yb)}; };
        const auto [k2a, k2b] = stage(c2, y0 + h * a21 * k1a, y1 + h * a21 * k1b);
        const auto [k3a, k3b] = stage(c3, y0 + h * (a31 * k1a + a32 * k2a), y1 + h * (a31 * k1b + a32 * k2b));
        const auto [k4a, k4b] = stage(c4, y0 + h * (a41 * k1a + a42 * k2a + a43 * k3a),
                                      y1 + h * (a41 * k1b + a42 * k2b + a43 * k3b));
        const auto [k5a, k5b] = stage(c5, y0 + h * (a51 * k1a + a52 * k2a + a53 * k3a + a54 * k4a),
                                      y1 + h * (a51 * k1b + a52 * k2b + a53 * k3b + a54 * k4b));
        const auto [k6a, k6b] = stage(1.0, y0 + h * (a61 * k1a + a62 * k2a + a63 * k3a + a64 * k4a + a65 * k5a),
                                      y1 + h * (a61 * k1b + a62 * k2b + a63 * k3b + a64 * k4b + a65 * k5b));
        const cplx n0 = y0 + h * (b1 * k1a + b3 * k3a + b4 * k4a + b5 * k5a + b6 * k6a);
        const cplx n1 = y1 + h * (b1 * k1b + b3 * k3b + b4 * k4b + b5 * k5b + b6 * k6b);
        const cplx k7a = n1, k7b = rhs(x + h, n0, n1);
        const cplx err0 = h * (e1 * k1a + e3 * k3a + e4 * k4a + e5 * k5a + e6 * k6a + e7 * k7a);
        const cplx err1 = h * (e1 * k1b + e3 * k3b + e4 * k4b + e5 * k5b + e6 * k6b + e7 * k7b);
        const double sc0 = opt.atol + opt.rtol * std::max(std::abs(y0), std::abs(n0));
        const double sc1 = opt.atol + opt.rtol * std::max(std::abs(y1), std::abs(n1));
        const double err = std::max(std::abs(err0) / sc0, std::abs(err1) / sc1);
        if (!std::isfinite(err)) throw NumericError("ode::advance: non-finite state");
        if (err <= 1.0) {
            x += h;
            y0 = n0;
            y1 = n1;
            k1a = k7a;
            k1b = k7b;
            nodes.push(x, y0, y1, k1b);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = dir * std::min(std::abs(h) * factor, opt.h_max);
        if (std::abs(h) < opt.h_min) throw NumericError("ode::advance: step size underflow");
    }
}

/// Quintic Hermite interpolation on [x0, x1] from values and two derivatives at
/// both ends; returns the interpolant and its first two derivatives at x.
inline std::array<cplx, 3> quintic_hermite(double x0, double x1, cplx w0, cplx d0, cplx s0, cplx w1, cplx d1,
                                           cplx s1, double x) {
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    // basis, first and second derivatives in s
    const double H[6] = {1 - 10 * s3 + 15 * s4 - 6 * s5, s - 6 * s3 + 8 * s4 - 3 * s5,
                         0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5, 10 * s3 - 15 * s4 + 6 * s5,
                         -4 * s3 + 7 * s4 - 3 * s5, 0.5 * s3 - s4 + 0.5 * s5};
    const double D[6] = {-30 * s2 + 60 * s3 - 30 * s4, 1 - 18 * s2 + 32 * s3 - 15 * s4,
                         s - 4.5 * s2 + 6 * s3 - 2.5 * s4, 30 * s2 - 60 * s3 + 30 * s4,
                         -12 * s2 + 28 * s3 - 15 * s4, 1.5 * s2 - 4 * s3 + 2.5 * s4};
    const double S[6] = {-60 * s + 180 * s2 - 120 * s3, -36 * s + 96 * s2 - 60 * s3,
                         1 - 9 * s + 18 * s2 - 10 * s3, 60 * s - 180 * s2 + 120 * s3,
                         -24 * s + 84 * s2 - 60 * s3, 3 * s - 12 * s2 + 10 * s3};
    const cplx c[6] = {w0, h * d0, h * h * s0, w1, h * d1, h * h * s1};
    cplx v = 0.0, dv = 0.0, sv = 0.0;
    for (int i = 0; i < 6; ++i) {
        v += c[i] * H[i];
        dv += c[i] * D[i];
        sv += c[i] * S[i];
    }
    return {v, dv / h, sv / (h * h)};
}

/// Dense evaluation of ascending-x nodes; x must lie in [x.front(), x.back()].
inline std::array<cplx, 3> interpolate(const Nodes& n, double x) {
    const auto it = std::upper_bound(n.x.begin(), n.x.end(), x);
    std::size_t i = it == n.x.begin() ? 0 : static_cast<std::size_t>(it - n.x.begin()) - 1;
    if (i + 1 >= n.size()) i = n.size() - 2;
    return quintic_hermite(n.x[i], n.x[i + 1], n.w[i], n.dw[i], n.d2w[i], n.w[i + 1], n.dw[i + 1], n.d2w[i + 1], x);
}

}  // namespace oulab::ode
