#pragma once

// Approximate eigenfunctions of L2 for general (anisotropic) R by residual minimization.
//
// Work in s = M t with M = c R_inf^{-1}, tr(M R M^T) / 2 = 1. There the psi-equation
// (psi = exp(-1/2 t^T R_inf^{-1} t) phi) reads
//   1/2 Tr((I + E) D^2 psi) + <(|a| I + b J) s, D psi> + (2|a| - lambda) psi = 0,
// E = [[e1, e2], [e2, -e1]] traceless; in z = s1 + i s2 the anisotropy is
// (e1 + i e2) d_z^2 + (e1 - i e2) d_zbar^2, which shifts the angular index by -+2.
//
// Family (8 real parameters): a 2x2 frame perturbation D and two complex amplitudes,
//   psi(t) = v_m(|s|) e^{i m arg s} + eps_- u_-(|s|) e^{i(m-2) arg s} + eps_+ u_+(|s|) e^{i(m+2) arg s},
//   s = M (I + D) t,
// where v_m is the isotropic radial solution (a, b, r = 1) and u_-+ are the first-order
// corrections driven by the anisotropy. D = 0, eps = 1 is first-order exact.

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "oulab/eigenfn/poly2d.hpp"

namespace oulab::eigenfn {

struct WeylOptions {
    int max_iter = 400;
    int stall_iter = 200;
    double initial_step = 0.1;
    double size_tol = 1e-7;
    /// quadrature during the search and for the reported value
    int search_theta = 24;
    double search_panel = 0.5;
    int final_theta = 32;
    double final_panel = 0.25;
    double radius = 8.0;
    std::optional<int> mode;
};

struct WeylReport : ResidualReport {
    std::vector<double> history;  // best-so-far residual after each iteration
    int iterations = 0;
    bool stalled = false;
    bool used_polynomial = false;
    int mode = 0;
    std::array<double, 8> params{};
};

/// Mode-k response u of the isotropic radial operator (r = 1) to a forcing f:
///   1/2 (u'' + u'/rho - k^2 u / rho^2) + |a| rho u' + (2|a| + i k b - lambda) u = -f(rho),
/// started from rest at a small radius.
class ForcedRadial {
public:
    int k = 0;
    double rho0 = 0.0;
    ode::Nodes nodes;

    std::array<cplx, 3> operator()(double rho) const {
        if (rho < rho0 || rho > nodes.x.back()) return {0.0, 0.0, 0.0};
        return ode::interpolate(nodes, rho);
    }
};

template <class Forcing>
ForcedRadial solve_forced(double a, double b, cplx lambda, int k, double rho0, double rho_end, Forcing&& f) {
    ForcedRadial out;
    out.k = k;
    out.rho0 = rho0;
    const double g = std::abs(a);
    const cplx shift = 2.0 * g + cplx(0.0, k * b) - lambda;
    auto rhs = [&](double rho, cplx u, cplx du) {
        return -du / rho + double(k * k) * u / (rho * rho) - 2.0 * (g * rho * du + shift * u + f(rho));
    };
    out.nodes.push(rho0, 0.0, 0.0, rhs(rho0, 0.0, 0.0));
    ode::Options oo;
    oo.rtol = 1e-10;
    oo.atol = 1e-14;
    oo.h_max = 0.1 / std::sqrt(g);
    oo.h_init = 1e-3 / std::sqrt(g);
    ode::advance(rhs, out.nodes, rho_end, oo);
    return out;
}

class WeylFamily {
public:
    WeylFamily(const Spec2D& spec, cplx lambda, int m) : frame_(spec), lambda_(lambda), m_(m) {
        const Mat2 prp = frame_.p * frame_.r * frame_.p;
        m0_ = frame_.p / std::sqrt(0.5 * prp.trace());
        const Mat2 e = m0_ * frame_.r * m0_.transpose() - Mat2::Identity();
        const cplx eps0(e(0, 0), e(0, 1));

        base_ = solve_radial(spec.a, spec.b, 1.0, lambda, m);
        const double u = base_.unit();
        const auto& v = base_;
        const double dm = m;
        // d_z^2 (v e^{i m theta}) = 1/4 (g' + (m-1) g / rho) e^{i(m-2) theta}, g = v' + m v / rho
        auto minus = [&v, dm, eps0](double rho) {
            const auto [f, df, d2f] = v(rho);
            const cplx g = df + dm * f / rho;
            const cplx dg = d2f + dm * df / rho - dm * f / (rho * rho);
            return eps0 * 0.25 * (dg + (dm - 1.0) * g / rho);
        };
        // d_zbar^2 (v e^{i m theta}) = 1/4 (h' - (m+1) h / rho) e^{i(m+2) theta}, h = v' - m v / rho
        auto plus = [&v, dm, eps0](double rho) {
            const auto [f, df, d2f] = v(rho);
            const cplx h = df - dm * f / rho;
            const cplx dh = d2f - dm * df / rho + dm * f / (rho * rho);
            return std::conj(eps0) * 0.25 * (dh - (dm + 1.0) * h / rho);
        };
        corr_[0] = solve_forced(spec.a, spec.b, lambda, m - 2, 0.02 * u, 16.0 * u, minus);
        corr_[1] = solve_forced(spec.a, spec.b, lambda, m + 2, 0.02 * u, 16.0 * u, plus);
    }

    const Frame2D& frame() const { return frame_; }

    PsiJet psi(const std::array<double, 8>& x, const Vec2& t) const {
        Mat2 d;
        d << x[0], x[1], x[2], x[3];
        const Mat2 mm = m0_ * (Mat2::Identity() + d);
        const CMat2 mc = mm.cast<cplx>();
        const Vec2 s = mm * t;
        const double rho = s.norm();
        const cplx amp[2] = {cplx(1.0 + x[4], x[5]), cplx(1.0 + x[6], x[7])};
        PsiJet sum = polar_jet(m_, s, base_(rho));
        for (int i = 0; i < 2; ++i) {
            const PsiJet j = polar_jet(corr_[i].k, s, corr_[i](rho));
            sum.value += amp[i] * j.value;
            sum.grad += amp[i] * j.grad;
            sum.hess += amp[i] * j.hess;
        }
        PsiJet out;
        out.value = sum.value;
        out.grad = mc.transpose() * sum.grad;
        out.hess = mc.transpose() * sum.hess * mc;
        return out;
    }

    double residual(const std::array<double, 8>& x, double radius, double panel, int n_theta) const {
        return whitened_residual_ratio(frame_, lambda_, [&](const Vec2& t) { return psi(x, t); }, radius, panel, n_theta);
    }

private:
    Frame2D frame_;
    cplx lambda_;
    int m_;
    Mat2 m0_;
    RadialSolution base_;
    std::array<ForcedRadial, 2> corr_;
};

/// Lattice indices (n1, n2) with lambda = n1 gamma + n2 conj(gamma), n1 + n2 <= 10.
inline std::optional<std::pair<int, int>> lattice_pair(const Spec2D& spec, cplx lambda) {
    const cplx gamma(spec.a, spec.b);
    for (int n = 1; n <= 10; ++n)
        for (int n1 = 0; n1 <= n; ++n1) {
            const cplx l = double(n1) * gamma + double(n - n1) * std::conj(gamma);
            if (std::abs(l - lambda) <= 1e-12 * std::abs(gamma) * n) return std::pair{n1, n - n1};
        }
    return std::nullopt;
}

inline WeylReport weyl_residual_minimize(const Spec2D& spec, cplx lambda, const WeylOptions& opts = {}) {
    if (!(lambda.real() < 0.0)) throw DomainError("weyl_residual_minimize: eigenvalue must satisfy Re(lambda) < 0");
    WeylReport rep;
    rep.lambda = lambda;
    rep.mode = opts.mode ? *opts.mode : default_mode(lambda, spec.b);
    const WeylFamily family(spec, lambda, rep.mode);

    struct Ctx {
        const WeylFamily* fam;
        const WeylOptions* opts;
    } ctx{&family, &opts};
    gsl_multimin_function fn;
    fn.n = 8;
    fn.params = &ctx;
    fn.f = [](const gsl_vector* v, void* p) {
        const auto* c = static_cast<const Ctx*>(p);
        std::array<double, 8> x;
        for (int i = 0; i < 8; ++i) x[i] = gsl_vector_get(v, i);
        const double r = c->fam->residual(x, c->opts->radius, c->opts->search_panel, c->opts->search_theta);
        return std::isfinite(r) ? r : std::numeric_limits<double>::max();
    };

    gsl_vector* x0 = gsl_vector_calloc(8);
    gsl_vector* step = gsl_vector_alloc(8);
    gsl_vector_set_all(step, opts.initial_step);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 8);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_multimin_fminimizer_set(s, &fn, x0, step);

    // nmsimplex2's set() leaves fval unassigned
    double best = fn.f(x0, &ctx);
    rep.history.push_back(best);
    int since = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        ++rep.iterations;
        if (s->fval < best * (1.0 - 1e-12)) {
            best = s->fval;
            since = 0;
        } else if (++since >= opts.stall_iter) {
            rep.stalled = true;
            rep.history.push_back(best);
            break;
        }
        rep.history.push_back(best);
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opts.size_tol) == GSL_SUCCESS) break;
    }
    for (int i = 0; i < 8; ++i) rep.params[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x0);
    gsl_vector_free(step);
    gsl_set_error_handler(old);

    rep.gen_residual = family.residual(rep.params, opts.radius, opts.final_panel, opts.final_theta);
    const double start = family.residual({}, opts.radius, opts.final_panel, opts.final_theta);
    if (start < rep.gen_residual) {
        rep.gen_residual = start;
        rep.params = {};
    }
    if (const auto lp = lattice_pair(spec, lambda)) {
        const double pr = residual_poly_2d(spec, poly_eigen_2d(spec, lp->first, lp->second));
        if (pr < rep.gen_residual) {
            rep.gen_residual = pr;
            rep.used_polynomial = true;
        }
    }
    rep.passed = rep.gen_residual <= 0.1;
    return rep;
}

}  // namespace oulab::eigenfn
