#pragma once

// Eigenfunctions of L1 = 1/2 q d^2/dt^2 + gamma t d/dt for every Re lambda < 0.
//
// Everything is carried in the weighted variable w = exp(-kappa t^2) phi,
// kappa = |gamma| / q, which solves
//     1/2 q w'' + |gamma| t w' + (|gamma| - lambda) w = 0
// and stays bounded where phi itself grows like the inverse Gaussian density.
// In this variable |phi| d(nu_inf) = |w| dt / sqrt(pi / kappa).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oulab/eigenfn/ode.hpp"
#include "oulab/eigenfn/tail.hpp"
#include "oulab/ou_model.hpp"
#include "oulab/quadrature.hpp"

namespace oulab::eigenfn {

struct Solve1DOptions {
    cplx init_value = 1.0;
    cplx init_slope = 0.0;
    /// Route lattice points lambda = n gamma (n <= 20) to the polynomial solution.
    bool use_polynomial = true;
    double rtol = 1e-11;
    double atol = 1e-14;
    // Lengths below are in units of 1 / sqrt(kappa).
    double h_max = 0.1;
    double start_width = 6.0;
    double width_step = 1.0;
    double max_width = 30.0;
    /// Stop widening once successive tail-corrected L1 norms agree to this relative level.
    double norm_tol = 1e-6;
};

class Eigenfunction1D {
public:
    cplx lambda;
    double gamma = -1.0;
    double q = 1.0;
    cplx init_value = 1.0;
    cplx init_slope = 0.0;
    /// Half-width T of the integration domain [-T, T].
    double half_width = 0.0;
    /// s in |phi(t)| * density ~ |t|^s.
    double tail_exponent = 0.0;
    /// Tail-corrected L1(nu_inf) norm.
    double l1_norm = 0.0;
    /// Relative change of l1_norm over the last widening step.
    double l1_increment = 0.0;
    /// Degree of the polynomial solution, or -1 for an integrated one.
    int degree = -1;
    std::vector<double> poly;  // ascending coefficients in t
    ode::Nodes nodes;          // ascending in t
    PowerTail tail;
    cplx amp_left = 0.0, amp_right = 0.0;

    double kappa() const { return std::abs(gamma) / q; }
    double unit() const { return 1.0 / std::sqrt(kappa()); }
    bool polynomial() const { return degree >= 0; }
    const std::vector<double>& grid() const { return nodes.x; }

    /// w, w', w'' at t.
    std::array<cplx, 3> weighted(double t) const {
        const double k = kappa();
        if (polynomial()) {
            double p = 0.0, dp = 0.0, d2p = 0.0;
            for (int j = degree; j >= 0; --j) {
                d2p = d2p * t + 2.0 * dp;
                dp = dp * t + p;
                p = p * t + poly[j];
            }
            const double e = std::exp(-k * t * t);
            return {e * p, e * (dp - 2.0 * k * t * p), e * (d2p - 4.0 * k * t * dp + (4.0 * k * k * t * t - 2.0 * k) * p)};
        }
        if (t > half_width) {
            auto f = tail.eval(t);
            for (auto& v : f) v *= amp_right;
            return f;
        }
        if (t < -half_width) {
            auto f = tail.eval(t);
            for (auto& v : f) v *= amp_left;
            return f;
        }
        return ode::interpolate(nodes, t);
    }

    /// phi, phi', phi''.
    std::array<cplx, 3> derivs(double t) const {
        const double k = kappa();
        const auto [w, dw, d2w] = weighted(t);
        const double e = std::exp(k * t * t);
        return {e * w, e * (dw + 2.0 * k * t * w), e * (d2w + 4.0 * k * t * dw + (2.0 * k + 4.0 * k * k * t * t) * w)};
    }

    cplx operator()(double t) const { return derivs(t)[0]; }

    /// Quadrature breakpoints covering [-T, T].
    std::vector<double> breakpoints() const {
        if (!polynomial()) return nodes.x;
        std::vector<double> b;
        const int panels = static_cast<int>(std::ceil(2.0 * half_width / (0.25 * unit())));
        for (int i = 0; i <= panels; ++i) b.push_back(-half_width + 2.0 * half_width * i / panels);
        return b;
    }
};

namespace detail {

inline void require_spec(const Spec1D& spec) {
    if (!(spec.gamma < 0.0) || !(spec.q > 0.0) || !std::isfinite(spec.gamma) || !std::isfinite(spec.q))
        throw DomainError("Spec1D requires gamma < 0 and q > 0");
}

/// Sum over consecutive breakpoint intervals of an 8-point Gauss-Legendre rule.
template <class F>
double integrate_breaks(const std::vector<double>& b, F&& f) {
    const GaussRule& gl = gauss_legendre(8);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        const double mid = 0.5 * (b[i] + b[i + 1]), half = 0.5 * (b[i + 1] - b[i]);
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) acc += half * gl.weights[j] * f(mid + half * gl.nodes[j]);
    }
    return acc;
}

inline double nu_norm(double kappa) { return std::sqrt(std::numbers::pi / kappa); }

}  // namespace detail

/// Monic degree-n Hermite polynomial in t * sqrt(kappa) (rescaled to be monic in t);
/// eigenvalue n gamma.
inline Eigenfunction1D hermite_case(const Spec1D& spec, int n) {
    detail::require_spec(spec);
    if (n < 0 || n > 20) throw DomainError("hermite_case: degree must lie in [0, 20]");
    Eigenfunction1D ef;
    ef.gamma = spec.gamma;
    ef.q = spec.q;
    ef.lambda = n * spec.gamma;
    ef.degree = n;
    const double k = ef.kappa();
    // H_{j+1}(y) = 2y H_j - 2j H_{j-1}, in y = sqrt(kappa) t.
    std::vector<double> prev(1, 1.0), cur(1, 1.0);
    if (n >= 1) cur = {0.0, 2.0};
    for (int j = 1; j < n; ++j) {
        std::vector<double> next(j + 2, 0.0);
        for (int i = 0; i <= j; ++i) next[i + 1] += 2.0 * cur[i];
        for (int i = 0; i < j; ++i) next[i] -= 2.0 * j * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    if (n == 0) cur = {1.0};
    ef.poly.resize(n + 1);
    for (int i = 0; i <= n; ++i) ef.poly[i] = cur[i] * std::pow(k, 0.5 * i) / (cur[n] * std::pow(k, 0.5 * n));
    ef.init_value = ef.poly[0];
    ef.init_slope = n >= 1 ? ef.poly[1] : 0.0;
    ef.half_width = (12.0 + std::sqrt(double(n))) * ef.unit();
    ef.tail_exponent = -std::numeric_limits<double>::infinity();
    ef.l1_norm = detail::integrate_breaks(ef.breakpoints(), [&](double t) { return std::abs(ef.weighted(t)[0]); }) /
                 detail::nu_norm(k);
    return ef;
}

/// Lattice index n with lambda = n gamma, or -1.
inline int lattice_index(double gamma, cplx lambda, int max_n = 20) {
    const double n = lambda.real() / gamma;
    const int ni = static_cast<int>(std::lround(n));
    if (ni < 0 || ni > max_n) return -1;
    return std::abs(lambda - double(ni) * gamma) <= 1e-12 * std::abs(gamma) * std::max(1, ni) ? ni : -1;
}

inline Eigenfunction1D solve_1d(const Spec1D& spec, cplx lambda, const Solve1DOptions& opts = {}) {
    detail::require_spec(spec);
    if (!(lambda.real() < 0.0) || !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw DomainError("solve_1d: eigenvalue must satisfy Re(lambda) < 0");
    if (opts.use_polynomial) {
        const int n = lattice_index(spec.gamma, lambda);
        if (n >= 1) return hermite_case(spec, n);
    }

    Eigenfunction1D ef;
    ef.gamma = spec.gamma;
    ef.q = spec.q;
    ef.lambda = lambda;
    ef.init_value = opts.init_value;
    ef.init_slope = opts.init_slope;
    const double g = std::abs(spec.gamma), q = spec.q, k = ef.kappa(), u = ef.unit();
    ef.tail_exponent = lambda.real() / g - 1.0;
    // w ~ K z^(a - 1/2) S(z), a = -lambda / (2 gamma).
    const cplx a = lambda / (2.0 * g);
    ef.tail = PowerTail{k, a - 0.5, 0.5 - a, 1.0 - a};

    auto rhs = [&](double t, cplx w, cplx dw) { return -(2.0 / q) * (g * t * dw + (g - lambda) * w); };
    ode::Options oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    oo.h_max = opts.h_max * u;
    oo.h_init = 1e-3 * u;
    const cplx w0 = opts.init_value, dw0 = opts.init_slope;
    if (w0 == 0.0 && dw0 == 0.0) throw DomainError("solve_1d: initial data must be nonzero");
    ode::Nodes right, left;
    right.push(0.0, w0, dw0, rhs(0.0, w0, dw0));
    left.push(0.0, w0, dw0, rhs(0.0, w0, dw0));

    // Running integral of |w| over each side; tails are refit at every width.
    const GaussRule& gl = gauss_legendre(8);
    auto side_integral = [&](const ode::Nodes& n, std::size_t from) {
        double acc = 0.0;
        for (std::size_t i = from; i + 1 < n.size(); ++i) {
            const double lo = std::min(n.x[i], n.x[i + 1]), hi = std::max(n.x[i], n.x[i + 1]);
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                const double t = mid + half * gl.nodes[j];
                const auto v = ode::quintic_hermite(n.x[i], n.x[i + 1], n.w[i], n.dw[i], n.d2w[i], n.w[i + 1],
                                                    n.dw[i + 1], n.d2w[i + 1], t);
                acc += half * gl.weights[j] * std::abs(v[0]);
            }
        }
        return acc;
    };
    double int_r = 0.0, int_l = 0.0;
    std::size_t done_r = 0, done_l = 0;
    double prev = -1.0;
    bool converged = false;
    double width = opts.start_width;
    for (; width <= opts.max_width + 1e-12; width += opts.width_step) {
        const double t_end = width * u;
        ode::advance(rhs, right, t_end, oo);
        ode::advance(rhs, left, -t_end, oo);
        int_r += side_integral(right, done_r);
        int_l += side_integral(left, done_l);
        done_r = right.size() - 1;
        done_l = left.size() - 1;
        const cplx fr = ef.tail.eval(t_end)[0], fl = ef.tail.eval(-t_end)[0];
        ef.amp_right = right.w.back() / fr;
        ef.amp_left = left.w.back() / fl;
        const double tails = (std::abs(ef.amp_right) + std::abs(ef.amp_left)) * ef.tail.abs_integral(t_end, 1);
        const double norm = (int_r + int_l + tails) / detail::nu_norm(k);
        if (!std::isfinite(norm)) throw NumericError("solve_1d: non-finite L1 norm");
        ef.half_width = t_end;
        ef.l1_norm = norm;
        if (prev >= 0.0) ef.l1_increment = std::abs(norm - prev) / norm;
        if (prev >= 0.0 && std::abs(norm - prev) <= opts.norm_tol * norm) {
            converged = true;
            break;
        }
        prev = norm;
    }
    if (!converged)
        throw NumericError("solve_1d: L1 norm did not converge within half-width " + std::to_string(opts.max_width) +
                           " / sqrt(kappa)");

    for (std::size_t i = left.size(); i-- > 1;) ef.nodes.push(left.x[i], left.w[i], left.dw[i], left.d2w[i]);
    for (std::size_t i = 0; i < right.size(); ++i) ef.nodes.push(right.x[i], right.w[i], right.dw[i], right.d2w[i]);
    return ef;
}

/// Weighted generator residual 1/2 q w'' + |gamma| t w' + (|gamma| - lambda) w written
/// through phi's derivatives, so a perturbed jet is judged by the operator itself.
template <class WeightedJet>
double generator_residual_ratio(const Spec1D& spec, cplx lambda, const std::vector<double>& breaks, WeightedJet&& jet) {
    const double k = std::abs(spec.gamma) / spec.q;
    double num = 0.0, den = 0.0;
    num = detail::integrate_breaks(breaks, [&](double t) {
        const auto [w, dw, d2w] = jet(t);
        // phi-derivatives divided by exp(kappa t^2)
        const cplx p1 = dw + 2.0 * k * t * w;
        const cplx p2 = d2w + 4.0 * k * t * dw + (2.0 * k + 4.0 * k * k * t * t) * w;
        return std::abs(0.5 * spec.q * p2 + spec.gamma * t * p1 - lambda * w);
    });
    den = detail::integrate_breaks(breaks, [&](double t) { return std::abs(jet(t)[0]); });
    return num / den;
}

/// ||L1 phi - lambda phi|| / ||phi|| in truncated L1(nu_inf), derivatives from the integrator state.
inline double residual_generator_1d(const Spec1D& spec, const Eigenfunction1D& ef) {
    return generator_residual_ratio(spec, ef.lambda, ef.breakpoints(), [&](double t) { return ef.weighted(t); });
}

/// Largest certified semigroup time ln 5 / (2 |gamma|).
inline double semigroup_t_max(const Spec1D& spec) { return std::log(5.0) / (2.0 * std::abs(spec.gamma)); }

/// ||P(t) phi - exp(lambda t) phi|| / ||phi|| in truncated L1(nu_inf).
///
/// In the weighted variable the Mehler integral becomes
///   exp(-kappa x^2) P(t)phi(x) = exp(g t) / sqrt(pi) * sum_i W_i w(x exp(g t) + z_i / sqrt(alpha)),
/// alpha = kappa exp(-2 g t) / (1 - exp(-2 g t)), with Gauss-Hermite nodes z_i.
inline double residual_semigroup_1d(const Spec1D& spec, const Eigenfunction1D& ef, double t, const QuadSpec& quad = {}) {
    detail::require_spec(spec);
    if (t < 0.0) throw DomainError("residual_semigroup_1d: time must be non-negative");
    if (t == 0.0) return 0.0;
    if (t > semigroup_t_max(spec) * (1.0 + 1e-12))
        throw DomainError("residual_semigroup_1d: t exceeds ln 5 / (2|gamma|); the Mehler integrand is not dominated");
    const double g = std::abs(spec.gamma), k = ef.kappa();
    const double e2 = std::exp(-2.0 * g * t);
    const double alpha = k * e2 / (1.0 - e2);
    const double grow = std::exp(g * t);
    const cplx decay = std::exp(ef.lambda * t);
    std::vector<double> breaks;
    const int panels = static_cast<int>(std::ceil(2.0 * ef.half_width / (0.1 * ef.unit())));
    for (int i = 0; i <= panels; ++i) breaks.push_back(-ef.half_width + 2.0 * ef.half_width * i / panels);
    const double den = detail::integrate_breaks(breaks, [&](double x) { return std::abs(ef.weighted(x)[0]); });

    auto numerator = [&](int order) {
        const GaussRule& gh = gauss_hermite(order);
        return detail::integrate_breaks(breaks, [&](double x) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < gh.nodes.size(); ++i)
                s += gh.weights[i] * ef.weighted(x * grow + gh.nodes[i] / std::sqrt(alpha))[0];
            return std::abs(grow / std::sqrt(std::numbers::pi) * s - decay * ef.weighted(x)[0]);
        });
    };
    int order = quad.min_order;
    double prev = numerator(order);
    while (order * 2 <= quad.max_order) {
        order *= 2;
        const double next = numerator(order);
        if (std::abs(next - prev) <= quad.tol * den + 1e-2 * next) return next / den;
        prev = next;
    }
    throw AccuracyError("residual_semigroup_1d: Gauss-Hermite order doubling did not settle");
}

/// int_{-T}^{T} |phi|^p d(nu_inf) for each T; beyond the integration domain the
/// tail asymptotics take over.
inline std::vector<double> lp_truncated_norms(const Spec1D& spec, const Eigenfunction1D& ef, double p,
                                              const std::vector<double>& t_list) {
    detail::require_spec(spec);
    if (!(p >= 1.0)) throw DomainError("lp_truncated_norms: p must be >= 1");
    const double k = ef.kappa(), u = ef.unit();
    std::vector<double> out;
    double acc = 0.0, reached = 0.0;
    for (double T : t_list) {
        if (!(T > reached) && !(T == 0.0 && out.empty()))
            throw DomainError("lp_truncated_norms: T values must be positive and increasing");
        const int panels = std::max(1, static_cast<int>(std::ceil((T - reached) / (0.05 * u))));
        auto dens = [&](double t) {
            return std::pow(std::abs(ef.weighted(t)[0]), p) * std::exp((p - 1.0) * k * t * t);
        };
        acc += integrate_panels(dens, reached, T, panels, 8) + integrate_panels(dens, -T, -reached, panels, 8);
        reached = T;
        if (!std::isfinite(acc)) throw NumericError("lp_truncated_norms: overflow");
        out.push_back(acc / detail::nu_norm(k));
    }
    return out;
}

struct ResidualReport {
    cplx lambda;
    double gen_residual = 0.0;
    std::map<double, double> semigroup_residual;
    double l1_norm = 0.0;
    std::map<std::pair<double, double>, double> lp_truncated_norms;
    bool passed = false;
};

inline ResidualReport report_1d(const Spec1D& spec, const Eigenfunction1D& ef, const std::vector<double>& times,
                                double gen_tol = 1e-8, double semi_tol = 1e-3, const QuadSpec& quad = {}) {
    ResidualReport r;
    r.lambda = ef.lambda;
    r.gen_residual = residual_generator_1d(spec, ef);
    r.l1_norm = ef.l1_norm;
    bool ok = r.gen_residual <= gen_tol;
    for (double t : times) {
        const double s = residual_semigroup_1d(spec, ef, t, quad);
        r.semigroup_residual[t] = s;
        ok = ok && s <= semi_tol;
    }
    const double sigma = std::sqrt(spec.q / (2.0 * std::abs(spec.gamma)));
    for (double p : {1.0, 2.0}) {
        const auto v = lp_truncated_norms(spec, ef, p, {6.0 * sigma, 12.0 * sigma});
        r.lp_truncated_norms[{p, 6.0 * sigma}] = v[0];
        r.lp_truncated_norms[{p, 12.0 * sigma}] = v[1];
    }
    r.passed = ok;
    return r;
}

}  // namespace oulab::eigenfn
