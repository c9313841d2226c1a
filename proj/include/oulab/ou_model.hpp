#pragma once

// Ornstein-Uhlenbeck model dU = A U dt + B dW on R^n, cylinder functions,
// the generator and transition semigroup acting on them, and the reductions
// to one- and two-dimensional OU operators along eigenvectors of A^T.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "oulab/gauss_core.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

class OUModel {
public:
    OUModel(Mat drift, Mat diffusion) : a_(std::move(drift)), b_(std::move(diffusion)) {
        detail::require_square(a_, "OUModel drift");
        if (b_.rows() != a_.rows() || b_.cols() == 0)
            throw DimensionError("OUModel: diffusion must be n x m with n = " + std::to_string(a_.rows()));
        detail::require_finite(a_, "OUModel drift");
        detail::require_finite(b_, "OUModel diffusion");
        q_ = b_ * b_.transpose();
        q_ = 0.5 * (q_ + q_.transpose());
    }

    const Mat& drift() const { return a_; }
    const Mat& diffusion() const { return b_; }
    /// Q = B B^T.
    const Mat& noise_cov() const { return q_; }
    Eigen::Index dim() const { return a_.rows(); }
    Eigen::Index noise_dim() const { return b_.cols(); }

private:
    Mat a_, b_, q_;
};

/// Covariance Q_inf of the invariant measure. Fails if A is unstable or the
/// measure is degenerate (smallest eigenvalue <= 1e-10 * trace).
inline Mat stationary_cov(const OUModel& model) {
    Mat qinf = lyapunov_qinf(model.drift(), model.noise_cov());
    Eigen::SelfAdjointEigenSolver<Mat> es(qinf, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-10 * qinf.trace())
        throw DegeneracyError("invariant measure is degenerate; the model requires a nondegenerate mu_inf");
    return qinf;
}

inline GaussianMeasure invariant_measure(const OUModel& model) { return GaussianMeasure(stationary_cov(model)); }

/// Value, gradient and Hessian of a k-variable profile at one point.
struct Jet {
    cplx value;
    CVec grad;
    CMat hess;
};

/// How fast |profile| may grow at infinity.
enum class Growth { bounded, polynomial, unknown };

/// Scalar field on R^k with derivative oracles.
class Profile {
public:
    virtual ~Profile() = default;
    virtual int arity() const = 0;
    virtual Jet jet(const Vec& u) const = 0;
    virtual cplx value(const Vec& u) const { return jet(u).value; }
    /// Radius outside of which the profile vanishes; infinity if unbounded support.
    virtual double support_radius() const { return std::numeric_limits<double>::infinity(); }
    virtual Growth growth() const { return std::isfinite(support_radius()) ? Growth::bounded : Growth::unknown; }
    /// True when |profile| is bounded on R^k.
    bool bounded() const { return growth() == Growth::bounded; }
};

using ProfilePtr = std::shared_ptr<const Profile>;

/// Profile built from a callable returning a Jet.
class LambdaProfile final : public Profile {
public:
    using Fn = std::function<Jet(const Vec&)>;
    LambdaProfile(int k, Fn fn, double support = std::numeric_limits<double>::infinity(),
                  Growth growth = Growth::unknown)
        : k_(k), fn_(std::move(fn)), support_(support), growth_(std::isfinite(support) ? Growth::bounded : growth) {}
    int arity() const override { return k_; }
    Jet jet(const Vec& u) const override { return fn_(u); }
    double support_radius() const override { return support_; }
    Growth growth() const override { return growth_; }

private:
    int k_;
    Fn fn_;
    double support_;
    Growth growth_;
};

/// x -> phi(<x, x_1*>, ..., <x, x_k*>). Columns of `functionals` are the x_j*.
struct CylinderFunction {
    Mat functionals;  // n x k
    ProfilePtr profile;

    CylinderFunction(Mat fs, ProfilePtr p) : functionals(std::move(fs)), profile(std::move(p)) {
        if (!profile) throw ValidationError("CylinderFunction: missing profile");
        if (functionals.cols() < 1) throw ValidationError("CylinderFunction: needs at least one functional");
        if (profile->arity() != functionals.cols())
            throw DimensionError("CylinderFunction: profile arity " + std::to_string(profile->arity()) +
                                 " != number of functionals " + std::to_string(functionals.cols()));
    }

    Eigen::Index dim() const { return functionals.rows(); }
    Eigen::Index arity() const { return functionals.cols(); }

    Vec coords(const Vec& x) const {
        if (x.size() != dim()) throw DimensionError("CylinderFunction: point has wrong dimension");
        return functionals.transpose() * x;
    }
    cplx operator()(const Vec& x) const { return profile->value(coords(x)); }

    /// Jet in x: gradient X grad(phi), Hessian X Hess(phi) X^T.
    Jet jet(const Vec& x) const {
        const Jet j = profile->jet(coords(x));
        const CMat xs = functionals.cast<cplx>();
        return {j.value, xs * j.grad, xs * j.hess * xs.transpose()};
    }
};

inline void require_model_fits(const OUModel& model, const CylinderFunction& f) {
    if (f.dim() != model.dim())
        throw DimensionError("cylinder function lives on R^" + std::to_string(f.dim()) + ", model on R^" +
                             std::to_string(model.dim()));
}

/// Lf(x) = 1/2 Tr(Q_cyl Hess phi(u)) + sum_j d_j phi(u) <Ax, x_j*>, with
/// Q_cyl = (<Q x_i*, x_j*>) and u = (<x, x_j*>).
inline cplx generator_apply(const OUModel& model, const CylinderFunction& f, const Vec& x) {
    require_model_fits(model, f);
    if (x.size() != model.dim()) throw DimensionError("generator_apply: point has wrong dimension");
    const Mat& xs = f.functionals;
    const Jet j = f.profile->jet(xs.transpose() * x);
    const Mat qcyl = xs.transpose() * model.noise_cov() * xs;
    const Vec drift = xs.transpose() * (model.drift() * x);
    cplx second = 0.0;
    for (Eigen::Index i = 0; i < qcyl.rows(); ++i)
        for (Eigen::Index k = 0; k < qcyl.cols(); ++k) second += qcyl(i, k) * j.hess(k, i);
    cplx first = 0.0;
    for (Eigen::Index i = 0; i < drift.size(); ++i) first += j.grad(i) * drift(i);
    return 0.5 * second + first;
}

/// exp(tA) and Q_t for one horizon; reusable across many mehler_apply calls.
struct TransitionLaw {
    double t = 0.0;
    Mat flow;  // exp(tA)
    Mat cov;   // Q_t
};

inline TransitionLaw transition_law(const OUModel& model, double t) {
    if (!(t >= 0.0)) throw DomainError("transition_law: t must be non-negative");
    return {t, mat_exp(model.drift(), t), gramian_qt(model.drift(), model.noise_cov(), t)};
}

namespace detail {

// E phi(mean + L Z), Z ~ N(0, I_k), by tensor Gauss-Hermite of the given order.
inline cplx gauss_hermite_expectation(const Profile& phi, const Vec& mean, const Mat& factor, int order) {
    const GaussRule& gh = gauss_hermite(order);
    const auto k = mean.size();
    std::vector<int> idx(k, 0);
    const double norm = std::pow(std::numbers::pi, -0.5 * static_cast<double>(k));
    cplx sum = 0.0;
    Vec z(k);
    while (true) {
        double w = norm;
        for (Eigen::Index d = 0; d < k; ++d) {
            z(d) = std::sqrt(2.0) * gh.nodes[idx[d]];
            w *= gh.weights[idx[d]];
        }
        if (w > 0.0) sum += w * phi.value(mean + factor * z);
        Eigen::Index d = 0;
        while (d < k && ++idx[d] == order) idx[d++] = 0;
        if (d == k) break;
    }
    return sum;
}

}  // namespace detail

/// (P(t)f)(x) = E f(exp(tA)x + Y), Y ~ N(0, Q_t), reduced exactly to the
/// k-dimensional Gaussian of (<Y, x_j*>) and integrated by Gauss-Hermite with
/// order doubling.
inline cplx mehler_apply(const TransitionLaw& law, const CylinderFunction& f, const Vec& x, const QuadSpec& quad = {}) {
    if (x.size() != f.dim() || law.flow.rows() != f.dim())
        throw DimensionError("mehler_apply: dimension mismatch");
    if (law.t == 0.0) return f(x);
    const Mat& xs = f.functionals;
    const Vec mean = xs.transpose() * (law.flow * x);
    const Mat cov = xs.transpose() * law.cov * xs;
    const Mat factor = psd_factor(cov);
    const auto k = xs.cols();
    const double budget = 1 << 22;  // max tensor-grid size
    cplx prev = detail::gauss_hermite_expectation(*f.profile, mean, factor, quad.min_order);
    for (int order = 2 * quad.min_order; order <= quad.max_order; order *= 2) {
        if (std::pow(static_cast<double>(order), static_cast<double>(k)) > budget) break;
        const cplx next = detail::gauss_hermite_expectation(*f.profile, mean, factor, order);
        if (std::abs(next - prev) <= quad.tol * std::max(std::abs(next), 1.0)) return next;
        prev = next;
    }
    throw AccuracyError("mehler_apply: Gauss-Hermite quadrature did not converge within order " +
                        std::to_string(quad.max_order));
}

inline cplx mehler_apply(const OUModel& model, const CylinderFunction& f, double t, const Vec& x,
                         const QuadSpec& quad = {}) {
    require_model_fits(model, f);
    return mehler_apply(transition_law(model, t), f, x, quad);
}

/// One-dimensional reduction L1 phi = 1/2 q phi'' + gamma t phi'.
struct Spec1D {
    double gamma;
    double q;
    Vec x0star;
};

/// Two-dimensional reduction L2 phi = 1/2 Tr(R D^2 phi) + <Ct, D phi>.
struct Spec2D {
    double a;
    double b;
    Mat r;  // 2x2, (<Q h_i*, h_j*>)
    Mat c;  // [[a, -b], [b, a]]
    Vec h1star;
    Vec h2star;
};

inline Mat rotation_scaling(double a, double b) {
    Mat c(2, 2);
    c << a, -b, b, a;
    return c;
}

inline Spec1D reduce_1d(const OUModel& model, const Vec& x0star, double gamma) {
    if (x0star.size() != model.dim()) throw DimensionError("reduce_1d: eigenvector has wrong dimension");
    if (!(gamma < 0.0)) throw DomainError("reduce_1d: eigenvalue must be negative");
    const double xnorm = x0star.norm();
    if (xnorm == 0.0) throw ValidationError("reduce_1d: zero vector is not an eigenvector");
    if ((model.drift().transpose() * x0star - gamma * x0star).norm() > 1e-8 * xnorm)
        throw ValidationError("reduce_1d: x0* is not an eigenvector of A^T for gamma");
    const double q = x0star.dot(model.noise_cov() * x0star);
    if (q <= 1e-10 * model.noise_cov().norm() * xnorm * xnorm)
        throw DegeneracyError(
            "reduce_1d: <Q x0*, x0*> = 0 forces <Q_inf x0*, x0*> = 0, contradicting nondegeneracy of mu_inf");
    return {gamma, q, x0star};
}

inline Spec2D reduce_2d(const OUModel& model, const CVec& x0star, cplx gamma) {
    if (x0star.size() != model.dim()) throw DimensionError("reduce_2d: eigenvector has wrong dimension");
    if (!(gamma.real() < 0.0)) throw DomainError("reduce_2d: eigenvalue must have negative real part");
    const double xnorm = x0star.norm();
    if (std::abs(gamma.imag()) <= 1e-12 * std::abs(gamma) || xnorm == 0.0)
        throw DomainError("reduce_2d: eigenvalue is real; use reduce_1d");
    const CVec res = model.drift().transpose().cast<cplx>() * x0star - gamma * x0star;
    if (res.norm() > 1e-8 * xnorm) throw ValidationError("reduce_2d: x0* is not an eigenvector of A^T for gamma");
    Spec2D s;
    s.a = gamma.real();
    s.b = gamma.imag();
    s.h1star = x0star.real();
    s.h2star = x0star.imag();
    const Mat& q = model.noise_cov();
    s.r.resize(2, 2);
    s.r(0, 0) = s.h1star.dot(q * s.h1star);
    s.r(0, 1) = s.r(1, 0) = s.h1star.dot(q * s.h2star);
    s.r(1, 1) = s.h2star.dot(q * s.h2star);
    s.c = rotation_scaling(s.a, s.b);
    // C has no real eigenvector (b != 0), so ker R contains no invariant subspace of
    // C^T unless R = 0.
    if (s.r.norm() <= 1e-10 * q.norm() * xnorm * xnorm)
        throw DegeneracyError(
            "reduce_2d: R = 0, so ker R is C^T-invariant and R_inf degenerates, contradicting nondegeneracy of mu_inf");
    return s;
}

struct IdentityReport {
    double lhs = 0.0;       // first route (scalar checks) or max deviation
    double rhs = 0.0;
    double deviation = 0.0;  // relative for scalar checks, absolute entrywise for matrix checks
    bool passed = false;
};

/// <Q_inf x0*, x0*> against -q / (2 gamma).
inline IdentityReport variance_identity_check(const Spec1D& spec, const OUModel& model) {
    const Mat qinf = stationary_cov(model);
    IdentityReport r;
    r.lhs = spec.x0star.dot(qinf * spec.x0star);
    r.rhs = -spec.q / (2.0 * spec.gamma);
    r.deviation = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
    r.passed = r.deviation <= 1e-8;
    return r;
}

inline Mat gram(const Mat& m, const Vec& h1, const Vec& h2) {
    Mat g(2, 2);
    g(0, 0) = h1.dot(m * h1);
    g(0, 1) = h1.dot(m * h2);
    g(1, 0) = h2.dot(m * h1);
    g(1, 1) = h2.dot(m * h2);
    return g;
}

struct RinfReport {
    double finite_s_deviation = 0.0;  // max over s of entrywise |exp(sC) R exp(sC^T) - Gram(S(s) Q S*(s))|
    double rinf_deviation = 0.0;      // entrywise |lyap(C, R) - Gram(Q_inf)|
    Mat rinf;                         // lyapunov_qinf(C, R)
    bool passed = false;
};

inline RinfReport rinf_identity_check(const Spec2D& spec, const OUModel& model, const std::vector<double>& s_grid) {
    RinfReport rep;
    for (double s : s_grid) {
        const Mat ec = mat_exp(spec.c, s);
        const Mat lhs = ec * spec.r * ec.transpose();
        const Mat ea = mat_exp(model.drift(), s);
        const Mat rhs = gram(ea * model.noise_cov() * ea.transpose(), spec.h1star, spec.h2star);
        rep.finite_s_deviation = std::max(rep.finite_s_deviation, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    rep.rinf = lyapunov_qinf(spec.c, spec.r);
    const Mat via_model = gram(stationary_cov(model), spec.h1star, spec.h2star);
    rep.rinf_deviation = (rep.rinf - via_model).cwiseAbs().maxCoeff();
    rep.passed = rep.finite_s_deviation <= 1e-8 && rep.rinf_deviation <= 1e-8;
    return rep;
}

/// Law of (<x, x_1*>, ..., <x, x_k*>) under mu_inf.
inline GaussianMeasure pushforward_law(const OUModel& model, const Mat& functionals) {
    if (functionals.rows() != model.dim()) throw DimensionError("pushforward_law: functionals have wrong dimension");
    const Mat c = functionals.transpose() * stationary_cov(model) * functionals;
    return GaussianMeasure(Mat(0.5 * (c + c.transpose())));
}

}  // namespace oulab
