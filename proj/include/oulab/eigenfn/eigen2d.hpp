#pragma once

// Eigenfunctions of L2 = 1/2 Tr(R D^2) + <Ct, D> in two variables.
//
// Profiles are carried as psi = exp(-1/2 t^T P t) phi with P = R_inf^{-1}, for which
//     (L2 - lambda) phi = exp(1/2 t^T P t) [1/2 Tr(R D^2 psi) + <(RP + C) t, D psi> - (Tr C + lambda) psi]
// and |phi| d(nu_inf) = |psi| dt / (2 pi sqrt(det R_inf)).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "oulab/eigenfn/eigen1d.hpp"

namespace oulab::eigenfn {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using CVec2 = Eigen::Vector2cd;
using CMat2 = Eigen::Matrix2cd;

struct PsiJet {
    cplx value = 0.0;
    CVec2 grad = CVec2::Zero();
    CMat2 hess = CMat2::Zero();
};

/// Stationary covariance R_inf and its inverse for a 2D reduction.
struct Frame2D {
    Mat2 r, c, rinf, p;
    explicit Frame2D(const Spec2D& spec) {
        if (spec.r.rows() != 2 || spec.r.cols() != 2) throw DimensionError("Spec2D: R must be 2x2");
        if (!(spec.a < 0.0)) throw DomainError("Spec2D: a must be negative");
        r = spec.r;
        c = rotation_scaling(spec.a, spec.b);
        rinf = lyapunov_qinf(c, r);
        Eigen::SelfAdjointEigenSolver<Mat2> es(rinf);
        if (es.eigenvalues().minCoeff() <= 1e-12 * rinf.trace())
            throw DegeneracyError("Spec2D: R_inf is degenerate");
        p = rinf.inverse();
        p = 0.5 * (p + p.transpose());
    }
    double density_norm() const { return 2.0 * std::numbers::pi * std::sqrt(rinf.determinant()); }
};

/// exp(1/2 t^T P t) [1/2 Tr(R H) + <(RP + C) t, g> - (Tr C + lambda) psi].
inline cplx psi_residual(const Frame2D& f, cplx lambda, const Vec2& t, const PsiJet& j) {
    const Vec2 drift = (f.r * f.p + f.c) * t;
    const cplx second = 0.5 * (f.r.cast<cplx>().cwiseProduct(j.hess)).sum();
    return second + drift(0) * j.grad(0) + drift(1) * j.grad(1) - (f.c.trace() + lambda) * j.value;
}

/// Converts a psi jet into the jet of phi = exp(1/2 t^T P t) psi.
inline Jet phi_jet(const Mat2& p, const Vec2& t, const PsiJet& j) {
    const double e = std::exp(0.5 * t.dot(p * t));
    const CVec2 pt = (p * t).cast<cplx>();
    Jet out;
    out.value = e * j.value;
    out.grad = e * (j.grad + pt * j.value);
    const CMat2 h = j.hess + pt * j.grad.transpose() + j.grad * pt.transpose() +
                    (p.cast<cplx>() + pt * pt.transpose()) * j.value;
    out.hess = e * h;
    return out;
}

/// Cartesian jet of v(rho) exp(i m theta) from radial data (v, v', v'').
inline PsiJet polar_jet(int m, const Vec2& t, const std::array<cplx, 3>& rad) {
    const double rho = std::max(t.norm(), 1e-300);
    const double c = t(0) / rho, s = t(1) / rho;
    const cplx im(0.0, double(m));
    const cplx e = std::exp(im * std::atan2(t(1), t(0)));
    const auto [v, dv, d2v] = rad;
    const cplx fr = dv * e, frr = d2v * e, ft = im * v * e, ftt = -double(m * m) * v * e, frt = im * dv * e;
    PsiJet j;
    j.value = v * e;
    j.grad(0) = c * fr - s / rho * ft;
    j.grad(1) = s * fr + c / rho * ft;
    const double r2 = rho * rho;
    j.hess(0, 0) = c * c * frr + s * s / rho * fr + s * s / r2 * ftt - 2 * c * s / rho * frt + 2 * c * s / r2 * ft;
    j.hess(1, 1) = s * s * frr + c * c / rho * fr + c * c / r2 * ftt + 2 * c * s / rho * frt - 2 * c * s / r2 * ft;
    j.hess(0, 1) = j.hess(1, 0) =
        c * s * frr - c * s / rho * fr - c * s / r2 * ftt + (c * c - s * s) / rho * frt - (c * c - s * s) / r2 * ft;
    return j;
}

/// Regular radial solution v of
///   1/2 r (v'' + v'/rho - m^2 v / rho^2) + |a| rho v' + (2|a| + i m b - lambda) v = 0,
/// v ~ (sqrt(kappa) rho)^|m| at the origin, kappa = |a| / r.
class RadialSolution {
public:
    double a = -1.0, b = 0.0, r = 1.0;
    cplx lambda;
    int m = 0;
    double rho0 = 0.0;        // series below, integrated nodes above
    double half_width = 0.0;  // tail asymptotics beyond
    std::vector<cplx> series;  // coefficients of rho^(|m| + 2k)
    std::vector<cplx> poly;    // lattice case: exact f = v exp(kappa rho^2), same powers
    ode::Nodes nodes;
    PowerTail tail;
    cplx amp = 0.0;
    /// 2 kappa int_0^inf |v| rho d rho, the L1(nu_inf) norm of v exp(i m theta) exp(kappa rho^2).
    double l1_norm = 0.0;

    double kappa() const { return std::abs(a) / r; }
    double unit() const { return 1.0 / std::sqrt(kappa()); }
    bool polynomial() const { return !poly.empty(); }

    std::array<cplx, 3> operator()(double rho) const {
        if (polynomial()) {
            const auto [f, df, d2f] = power_sum(poly, rho);
            const double k = kappa(), e = std::exp(-k * rho * rho);
            return {e * f, e * (df - 2.0 * k * rho * f), e * (d2f - 4.0 * k * rho * df + (4.0 * k * k * rho * rho - 2.0 * k) * f)};
        }
        if (rho > half_width) {
            auto f = tail.eval(rho);
            for (auto& v : f) v *= amp;
            return f;
        }
        if (rho >= rho0) return ode::interpolate(nodes, rho);
        return power_sum(series, rho);
    }

private:
    /// sum c_k rho^(|m| + 2k) and two derivatives
    std::array<cplx, 3> power_sum(const std::vector<cplx>& c, double rho) const {
        const int mu = std::abs(m);
        cplx v = 0.0, dv = 0.0, d2v = 0.0;
        if (rho == 0.0) {
            if (mu == 0) return {c[0], 0.0, c.size() > 1 ? 2.0 * c[1] : cplx(0.0)};
            if (mu == 1) return {0.0, c[0], 0.0};
            return {0.0, 0.0, mu == 2 ? 2.0 * c[0] : cplx(0.0)};
        }
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double n = mu + 2.0 * k;
            const double pw = std::pow(rho, n - 2.0);
            v += c[k] * pw * rho * rho;
            dv += n * c[k] * pw * rho;
            d2v += n * (n - 1.0) * c[k] * pw;
        }
        return {v, dv, d2v};
    }
};

struct Solve2DOptions {
    double rtol = 1e-11;
    double atol = 1e-14;
    // lengths in units of 1 / sqrt(kappa)
    double h_max = 0.1;
    double rho0 = 0.05;
    double start_width = 6.0;
    double width_step = 1.0;
    double max_width = 30.0;
    double norm_tol = 1e-6;
    int max_mode = 40;
};

inline RadialSolution solve_radial(double a, double b, double r, cplx lambda, int m, const Solve2DOptions& opts = {}) {
    if (!(a < 0.0) || !(r > 0.0)) throw DomainError("solve_radial: requires a < 0 and r > 0");
    if (!(lambda.real() < 0.0)) throw DomainError("solve_radial: eigenvalue must satisfy Re(lambda) < 0");
    if (std::abs(m) > opts.max_mode) throw ScopeError("solve_radial: angular mode |m| = " + std::to_string(std::abs(m)) + " is out of range");
    RadialSolution sol;
    sol.a = a;
    sol.b = b;
    sol.r = r;
    sol.lambda = lambda;
    sol.m = m;
    const double g = std::abs(a), k = sol.kappa(), u = sol.unit();
    const int mu = std::abs(m);
    const cplx shift = lambda - cplx(0.0, m * b);  // lambda - i m b
    const cplx big_a = 0.5 * (double(mu) + shift / g);
    sol.tail = PowerTail{k, shift / (2.0 * g) - 1.0, double(mu + 1) - big_a, 1.0 - big_a};

    // shift = -|a| (|m| + 2n): the radial factor of phi is a polynomial of degree |m| + 2n
    const double nd = 0.5 * (-shift.real() / g - mu);
    if (std::abs(shift.imag()) <= 1e-12 * g && nd >= -1e-9 && std::abs(nd - std::nearbyint(nd)) <= 1e-9 &&
        std::nearbyint(nd) <= 20) {
        const int n = static_cast<int>(std::nearbyint(nd));
        sol.poly.push_back(std::pow(k, 0.5 * mu));
        for (int j = 0; j < n; ++j)
            sol.poly.push_back(-(a * (mu + 2.0 * j) - shift) * sol.poly.back() / (2.0 * r * (j + 1.0) * (mu + j + 1.0)));
        sol.half_width = (12.0 + std::sqrt(double(mu + 2 * n))) * u;
        const GaussRule& gl = gauss_legendre(8);
        const int panels = static_cast<int>(std::ceil(sol.half_width / (0.25 * u)));
        const double h = sol.half_width / panels;
        double acc = 0.0;
        for (int i = 0; i < panels; ++i)
            for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                const double rho = h * (i + 0.5 * (gl.nodes[j] + 1.0));
                acc += 0.5 * h * gl.weights[j] * std::abs(sol(rho)[0]) * rho;
            }
        sol.l1_norm = 2.0 * k * acc;
        return sol;
    }

    // Frobenius series around 0.
    sol.rho0 = opts.rho0 * u;
    sol.series.push_back(std::pow(k, 0.5 * mu));
    for (int j = 0; j < 40; ++j) {
        const cplx next = -(g * (mu + 2.0 * j + 2.0) + cplx(0.0, m * b) - lambda) * sol.series.back() /
                          (2.0 * r * (j + 1.0) * (mu + j + 1.0));
        sol.series.push_back(next);
        if (std::abs(next) * std::pow(sol.rho0, 2.0 * (j + 1)) < 1e-18 * std::abs(sol.series[0])) break;
    }
    auto rhs = [&](double rho, cplx v, cplx dv) {
        return -dv / rho + double(mu * mu) * v / (rho * rho) - (2.0 / r) * (g * rho * dv + (2.0 * g - shift) * v);
    };
    {
        // value and slope at rho0 from the series
        cplx v = 0.0, dv = 0.0;
        for (std::size_t j = sol.series.size(); j-- > 0;) {
            v = v * sol.rho0 * sol.rho0 + sol.series[j];
            dv = dv * sol.rho0 * sol.rho0 + (mu + 2.0 * j) * sol.series[j];
        }
        const double pm = std::pow(sol.rho0, mu);
        v *= pm;
        dv *= pm / sol.rho0;
        sol.nodes.push(sol.rho0, v, dv, rhs(sol.rho0, v, dv));
    }
    ode::Options oo;
    oo.rtol = opts.rtol;
    oo.atol = opts.atol;
    oo.h_max = opts.h_max * u;
    oo.h_init = 1e-3 * u;

    const GaussRule& gl = gauss_legendre(8);
    // |v| rho over [0, rho0] from the series
    double inner = 0.0;
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        const double rho = 0.5 * sol.rho0 * (gl.nodes[j] + 1.0);
        inner += 0.5 * sol.rho0 * gl.weights[j] * std::abs(sol(rho)[0]) * rho;
    }
    double acc = inner;
    std::size_t done = 0;
    double prev = -1.0;
    bool converged = false;
    for (double width = opts.start_width; width <= opts.max_width + 1e-12; width += opts.width_step) {
        const double end = width * u;
        ode::advance(rhs, sol.nodes, end, oo);
        const auto& n = sol.nodes;
        for (std::size_t i = done; i + 1 < n.size(); ++i) {
            const double mid = 0.5 * (n.x[i] + n.x[i + 1]), half = 0.5 * (n.x[i + 1] - n.x[i]);
            for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
                const double rho = mid + half * gl.nodes[j];
                const auto v = ode::quintic_hermite(n.x[i], n.x[i + 1], n.w[i], n.dw[i], n.d2w[i], n.w[i + 1],
                                                    n.dw[i + 1], n.d2w[i + 1], rho);
                acc += half * gl.weights[j] * std::abs(v[0]) * rho;
            }
        }
        done = n.size() - 1;
        sol.amp = n.w.back() / sol.tail.eval(end)[0];
        const double norm = 2.0 * k * (acc + std::abs(sol.amp) * sol.tail.abs_integral(end, 2));
        if (!std::isfinite(norm)) throw NumericError("solve_radial: non-finite L1 norm");
        sol.half_width = end;
        sol.l1_norm = norm;
        if (prev >= 0.0 && std::abs(norm - prev) <= opts.norm_tol * norm) {
            converged = true;
            break;
        }
        prev = norm;
    }
    if (!converged) throw NumericError("solve_radial: L1 norm did not converge");
    return sol;
}

/// m = round(Im lambda / b), ties toward even m.
inline int default_mode(cplx lambda, double b) {
    if (b == 0.0) return 0;
    const double x = lambda.imag() / b;
    if (!(std::abs(x) < 1e9)) throw ScopeError("default_mode: angular index out of range");
    return static_cast<int>(std::nearbyint(x));  // default rounding mode is to-nearest-even
}

class Eigenfunction2D {
public:
    cplx lambda;
    int m = 0;
    Spec2D spec;
    double r = 1.0;  // R = r I
    RadialSolution radial;

    double kappa() const { return radial.kappa(); }
    double half_width() const { return radial.half_width; }
    double l1_norm() const { return radial.l1_norm; }

    PsiJet psi(const Vec2& t) const { return polar_jet(m, t, radial(t.norm())); }

    Jet jet(const Vec2& t) const {
        const Mat2 p = (2.0 * kappa()) * Mat2::Identity();
        return phi_jet(p, t, psi(t));
    }
    cplx operator()(const Vec2& t) const {
        return std::exp(kappa() * t.squaredNorm()) * psi(t).value;
    }
};

inline double isotropic_scale(const Spec2D& spec) {
    const double r = 0.5 * spec.r.trace();
    if ((spec.r - r * Mat::Identity(2, 2)).norm() > 1e-10 * spec.r.norm())
        throw ScopeError("solve_2d_isotropic: R is not isotropic; use weyl_residual_minimize");
    return r;
}

/// Eigenfunction g(rho) e^{i m theta} for isotropic R = r I; m defaults to round(Im lambda / b).
inline Eigenfunction2D solve_2d_isotropic(const Spec2D& spec, cplx lambda, std::optional<int> mode = std::nullopt,
                                          const Solve2DOptions& opts = {}) {
    const double r = isotropic_scale(spec);
    if (!(lambda.real() < 0.0)) throw DomainError("solve_2d_isotropic: eigenvalue must satisfy Re(lambda) < 0");
    Eigenfunction2D ef;
    ef.lambda = lambda;
    ef.spec = spec;
    ef.r = r;
    ef.m = mode ? *mode : default_mode(lambda, spec.b);
    ef.radial = solve_radial(spec.a, spec.b, r, lambda, ef.m, opts);
    return ef;
}

namespace detail {

/// Polar quadrature nodes (t, weight * rho) covering the disc of radius `radius`;
/// radial panels of `panel` width with 8-point Gauss-Legendre, uniform angles offset by `phase`.
struct PolarPoint {
    Vec2 t;
    double w;
};

inline std::vector<PolarPoint> polar_grid(double radius, double panel, int n_theta, double phase = 0.37) {
    const GaussRule& gl = gauss_legendre(8);
    const int panels = std::max(1, static_cast<int>(std::ceil(radius / panel)));
    const double h = radius / panels;
    std::vector<PolarPoint> pts;
    pts.reserve(panels * gl.nodes.size() * n_theta);
    for (int p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double rho = (p + 0.5) * h + 0.5 * h * gl.nodes[i];
            const double wr = 0.5 * h * gl.weights[i] * rho * 2.0 * std::numbers::pi / n_theta;
            for (int j = 0; j < n_theta; ++j) {
                const double th = phase + 2.0 * std::numbers::pi * j / n_theta;
                pts.push_back({Vec2(rho * std::cos(th), rho * std::sin(th)), wr});
            }
        }
    return pts;
}

}  // namespace detail

/// ||(L2 - lambda) phi|| / ||phi|| in L1(nu_inf) over the disc |t| <= radius, for a
/// profile given by its psi jet.
template <class PsiFn>
double generator_residual_2d(const Frame2D& frame, cplx lambda, double radius, double panel, int n_theta, PsiFn&& psi) {
    double num = 0.0, den = 0.0;
    for (const auto& pt : detail::polar_grid(radius, panel, n_theta)) {
        const PsiJet j = psi(pt.t);
        num += pt.w * std::abs(psi_residual(frame, lambda, pt.t, j));
        den += pt.w * std::abs(j.value);
    }
    return num / den;
}

inline double residual_generator_2d(const Spec2D& spec, const Eigenfunction2D& ef) {
    const Frame2D frame(spec);
    const double u = ef.radial.unit();
    return generator_residual_2d(frame, ef.lambda, ef.half_width(), 0.1 * u, 8,
                                 [&](const Vec2& t) { return ef.psi(t); });
}

/// Semigroup residual for the isotropic case through the scaled Mehler formula
///   exp(-kappa |x|^2) P(t)phi(x) = exp(2|a|t) / pi * sum W_i W_j psi(exp(|a|t) Rot(bt) x + z_ij / sqrt(alpha)).
/// |P(t)phi - e^{lambda t} phi| is rotation invariant here, so one ray of angles suffices.
inline double residual_semigroup_2d(const Spec2D& spec, const Eigenfunction2D& ef, double t, const QuadSpec& quad = {},
                                    int n_theta = 2) {
    isotropic_scale(spec);
    if (t < 0.0) throw DomainError("residual_semigroup_2d: time must be non-negative");
    if (t == 0.0) return 0.0;
    const double g = std::abs(spec.a);
    if (t > std::log(5.0) / (2.0 * g) * (1.0 + 1e-12))
        throw DomainError("residual_semigroup_2d: t exceeds ln 5 / (2|a|); the Mehler integrand is not dominated");
    const double k = ef.kappa(), u = ef.radial.unit();
    const double e2 = std::exp(-2.0 * g * t);
    const double alpha = k * e2 / (1.0 - e2);
    const double grow = std::exp(g * t);
    Mat2 rot;
    rot << std::cos(spec.b * t), -std::sin(spec.b * t), std::sin(spec.b * t), std::cos(spec.b * t);
    const Mat2 map = grow * rot;
    const cplx decay = std::exp(ef.lambda * t);
    const auto pts = detail::polar_grid(ef.half_width(), 0.25 * u, n_theta);
    double den = 0.0;
    for (const auto& p : pts) den += p.w * std::abs(ef.psi(p.t).value);

    auto numerator = [&](int order) {
        const GaussRule& gh = gauss_hermite(order);
        const double sa = 1.0 / std::sqrt(alpha);
        double acc = 0.0;
        for (const auto& p : pts) {
            const Vec2 y = map * p.t;
            cplx s = 0.0;
            for (std::size_t i = 0; i < gh.nodes.size(); ++i)
                for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
                    const Vec2 z = y + sa * Vec2(gh.nodes[i], gh.nodes[j]);
                    const double rho = z.norm();
                    s += gh.weights[i] * gh.weights[j] * ef.radial(rho)[0] *
                         std::pow(cplx(z(0), z(1)) / rho, ef.m);
                }
            acc += p.w * std::abs(grow * grow / std::numbers::pi * s - decay * ef.psi(p.t).value);
        }
        return acc;
    };
    int order = quad.min_order;
    double prev = numerator(order);
    while (order * 2 <= std::min(quad.max_order, 128)) {
        order *= 2;
        const double next = numerator(order);
        if (std::abs(next - prev) <= quad.tol * den + 1e-2 * next) return next / den;
        prev = next;
    }
    throw AccuracyError("residual_semigroup_2d: Gauss-Hermite order doubling did not settle");
}

/// Truncated integrals of |phi|^p over the disc |t| <= T against nu_inf, one per T (increasing).
inline std::vector<double> lp_truncated_norms_2d(const Eigenfunction2D& ef, double p, const std::vector<double>& t_list) {
    if (!(p >= 1.0)) throw DomainError("lp_truncated_norms_2d: p must be >= 1");
    const double k = ef.kappa(), u = ef.radial.unit();
    std::vector<double> out;
    double acc = 0.0, reached = 0.0;
    for (double T : t_list) {
        if (!(T > reached)) throw DomainError("lp_truncated_norms_2d: T values must be positive and increasing");
        const int panels = std::max(1, static_cast<int>(std::ceil((T - reached) / (0.05 * u))));
        auto dens = [&](double rho) {
            return 2.0 * k * rho * std::pow(std::abs(ef.radial(rho)[0]), p) * std::exp((p - 1.0) * k * rho * rho);
        };
        acc += integrate_panels(dens, reached, T, panels, 8);
        reached = T;
        if (!std::isfinite(acc)) throw NumericError("lp_truncated_norms_2d: overflow");
        out.push_back(acc);
    }
    return out;
}

inline ResidualReport report_2d(const Spec2D& spec, const Eigenfunction2D& ef, const std::vector<double>& times,
                                double gen_tol = 1e-6, double semi_tol = 1e-3, const QuadSpec& quad = {}) {
    ResidualReport r;
    r.lambda = ef.lambda;
    r.gen_residual = residual_generator_2d(spec, ef);
    r.l1_norm = ef.l1_norm();
    bool ok = r.gen_residual <= gen_tol;
    for (double t : times) {
        const double s = residual_semigroup_2d(spec, ef, t, quad);
        r.semigroup_residual[t] = s;
        ok = ok && s <= semi_tol;
    }
    const double sigma = 1.0 / std::sqrt(2.0 * ef.kappa());
    for (double p : {1.0, 2.0}) {
        const auto v = lp_truncated_norms_2d(ef, p, {6.0 * sigma, 12.0 * sigma});
        r.lp_truncated_norms[{p, 6.0 * sigma}] = v[0];
        r.lp_truncated_norms[{p, 12.0 * sigma}] = v[1];
    }
    r.passed = ok;
    return r;
}

}  // namespace oulab::eigenfn
