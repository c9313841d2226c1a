#pragma once

// Lifting reduced profiles to cylinder functions on R^n, and Monte Carlo
// validation of the semigroup: exact and Euler-Maruyama samplers, invariance,
// pushforward equivalence, contraction, truncated eigenrelation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

#include "oulab/eigenfn/eigen1d.hpp"
#include "oulab/eigenfn/eigen2d.hpp"
#include "oulab/ou_model.hpp"

namespace oulab {

enum class SimMethod { exact, euler };

struct SimConfig {
    double horizon = 1.0;
    int steps = 100;
    int n_paths = 100000;
    std::uint64_t seed = 1;
    SimMethod method = SimMethod::exact;
    /// paths per batch; batch b draws from mix_seed(seed ^ b)
    int batch_size = 8192;
    int jobs = 1;

    void validate() const {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("SimConfig: horizon must be positive");
        if (steps < 1) throw ConfigError("SimConfig: steps must be positive");
        if (n_paths < 100) throw ConfigError("SimConfig: n_paths must be at least 100");
        if (batch_size < 1) throw ConfigError("SimConfig: batch_size must be positive");
        if (jobs < 1) throw ConfigError("SimConfig: jobs must be positive");
    }
};

struct MCEstimate {
    cplx value;
    double std_err = 0.0;
    long n_paths = 0;
};

/// Sample mean and its standard error sqrt(E|f - mean|^2 / (N - 1) / N).
inline MCEstimate mc_mean(const std::vector<cplx>& values) {
    MCEstimate e;
    e.n_paths = static_cast<long>(values.size());
    if (values.empty()) return e;
    cplx sum = 0.0;
    for (const cplx& v : values) sum += v;
    e.value = sum / double(values.size());
    if (values.size() < 2) return e;
    double ss = 0.0;
    for (const cplx& v : values) ss += std::norm(v - e.value);
    e.std_err = std::sqrt(ss / double(values.size() - 1) / double(values.size()));
    return e;
}

// ---- lifting -------------------------------------------------------------

inline CylinderFunction lift(ProfilePtr profile, const std::vector<Vec>& functionals) {
    if (!profile) throw ValidationError("lift: missing profile");
    if (functionals.empty()) throw ValidationError("lift: needs at least one functional");
    if (static_cast<int>(functionals.size()) != profile->arity())
        throw DimensionError("lift: " + std::to_string(functionals.size()) + " functionals for a profile of arity " +
                             std::to_string(profile->arity()));
    Mat fs(functionals.front().size(), functionals.size());
    for (std::size_t j = 0; j < functionals.size(); ++j) {
        if (functionals[j].size() != fs.rows()) throw DimensionError("lift: functionals differ in dimension");
        fs.col(j) = functionals[j];
    }
    return CylinderFunction(fs, std::move(profile));
}

inline ProfilePtr profile_of(const eigenfn::Eigenfunction1D& ef) {
    auto self = std::make_shared<eigenfn::Eigenfunction1D>(ef);
    return std::make_shared<LambdaProfile>(
        1,
        [self](const Vec& u) {
            const auto [f, df, d2f] = self->derivs(u(0));
            return Jet{f, CVec::Constant(1, df), CMat::Constant(1, 1, d2f)};
        },
        std::numeric_limits<double>::infinity(), ef.polynomial() ? Growth::polynomial : Growth::unknown);
}

inline ProfilePtr profile_of(const eigenfn::Eigenfunction2D& ef) {
    auto self = std::make_shared<eigenfn::Eigenfunction2D>(ef);
    return std::make_shared<LambdaProfile>(2, [self](const Vec& u) { return self->jet(eigenfn::Vec2(u(0), u(1))); });
}

inline CylinderFunction lift(const eigenfn::Eigenfunction1D& ef, const Spec1D& spec) {
    return lift(profile_of(ef), {spec.x0star});
}

inline CylinderFunction lift(const eigenfn::Eigenfunction2D& ef, const Spec2D& spec) {
    return lift(profile_of(ef), {spec.h1star, spec.h2star});
}

/// (L1 phi)(u) = 1/2 q phi'' + gamma u phi'.
inline cplx reduced_generator_1d(const Spec1D& spec, const Profile& phi, double u) {
    const Jet j = phi.jet(Vec::Constant(1, u));
    return 0.5 * spec.q * j.hess(0, 0) + spec.gamma * u * j.grad(0);
}

/// (L2 phi)(u) = 1/2 Tr(R D^2 phi) + <C u, D phi>.
inline cplx reduced_generator_2d(const Spec2D& spec, const Profile& phi, const Vec& u) {
    const Jet j = phi.jet(u);
    const Vec cu = spec.c * u;
    cplx out = 0.0;
    for (int i = 0; i < 2; ++i) {
        out += cu(i) * j.grad(i);
        for (int k = 0; k < 2; ++k) out += 0.5 * spec.r(i, k) * j.hess(k, i);
    }
    return out;
}

// ---- cutoff --------------------------------------------------------------

/// chi(r) = 1 for r <= R - 1, 0 for r >= R, quintic smoothstep between; returns chi, chi', chi''.
inline std::array<double, 3> smooth_cutoff(double r, double radius) {
    const double s = r - (radius - 1.0);
    if (s <= 0.0) return {1.0, 0.0, 0.0};
    if (s >= 1.0) return {0.0, 0.0, 0.0};
    const double s2 = s * s;
    return {1.0 - s2 * s * (10.0 - 15.0 * s + 6.0 * s2), -30.0 * s2 * (1.0 - s) * (1.0 - s),
            -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)};
}

/// chi_R(|L^{-1} u|) phi(u): the cutoff radius is measured in the metric of the
/// Gaussian with covariance L L^T (R standard deviations).
inline ProfilePtr truncate(ProfilePtr phi, const Mat& cov, double radius) {
    if (!(radius > 1.0)) throw DomainError("truncate: cutoff radius must exceed 1");
    const Mat l = psd_factor(cov);
    const Mat w = l.fullPivLu().inverse();
    const Mat g = w.transpose() * w;
    const int k = phi->arity();
    const double reach = radius * Eigen::JacobiSVD<Mat>(l).singularValues()(0);
    return std::make_shared<LambdaProfile>(
        k,
        [phi, g, radius, k](const Vec& u) {
            const double r = std::sqrt(u.dot(g * u));
            const auto [c, c1, c2] = smooth_cutoff(r, radius);
            if (c == 0.0) return Jet{0.0, CVec::Zero(k), CMat::Zero(k, k)};
            const Jet j = phi->jet(u);
            if (c1 == 0.0 && c2 == 0.0) return j;
            const Vec dr = g * u / r;
            const Mat hr = (g - dr * dr.transpose()) / r;
            const CVec dc = (c1 * dr).cast<cplx>();
            const CMat hc = (c2 * dr * dr.transpose() + c1 * hr).cast<cplx>();
            return Jet{c * j.value, c * j.grad + j.value * dc,
                       c * j.hess + dc * j.grad.transpose() + j.grad * dc.transpose() + j.value * hc};
        },
        reach);
}

// ---- samplers ------------------------------------------------------------

namespace detail {

// Runs fill(batch, first_row, rows) over the fixed batch partition, possibly in parallel.
template <class Fill>
void for_batches(const SimConfig& cfg, Fill&& fill) {
    const int batches = (cfg.n_paths + cfg.batch_size - 1) / cfg.batch_size;
    auto run = [&](int worker) {
        for (int b = worker; b < batches; b += cfg.jobs) {
            const int first = b * cfg.batch_size;
            fill(b, first, std::min(cfg.batch_size, cfg.n_paths - first));
        }
    };
    if (cfg.jobs == 1 || batches == 1) return run(0);
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(cfg.jobs, batches); ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
}

inline std::mt19937_64 batch_rng(std::uint64_t seed, int batch) {
    return std::mt19937_64(mix_seed(seed ^ static_cast<std::uint64_t>(batch)));
}

// n_paths draws of (mean + L Z)^T P, one per row; P = identity when empty. Each batch is
// projected as soon as it is drawn, so memory stays at n_paths x cols(P).
inline Mat sample_gaussian(const Vec& mean, const Mat& factor, const SimConfig& cfg, std::uint64_t seed,
                           const Mat& proj = Mat()) {
    const bool project = proj.size() > 0;
    Mat out(cfg.n_paths, project ? proj.cols() : mean.size());
    SimConfig c = cfg;
    c.seed = seed;
    for_batches(c, [&](int b, int first, int rows) {
        auto rng = batch_rng(seed, b);
        std::normal_distribution<double> normal;
        Mat z(rows, factor.cols());
        for (int i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < factor.cols(); ++j) z(i, j) = normal(rng);
        Mat x = (z * factor.transpose()).rowwise() + mean.transpose();
        out.middleRows(first, rows) = project ? Mat(x * proj) : x;
    });
    return out;
}

}  // namespace detail

/// n_paths i.i.d. draws of U_t(x) = exp(tA) x + N(0, Q_t), one per row.
inline Mat simulate_exact(const OUModel& model, const Vec& x, double t, const SimConfig& cfg) {
    cfg.validate();
    if (!(t >= 0.0)) throw DomainError("simulate_exact: t must be non-negative");
    if (x.size() != model.dim()) throw DimensionError("simulate_exact: start point has wrong dimension");
    const TransitionLaw law = transition_law(model, t);
    return detail::sample_gaussian(law.flow * x, psd_factor(law.cov), cfg, cfg.seed);
}

/// Euler-Maruyama with cfg.steps steps of size t / steps (at most 0.1).
inline Mat simulate_euler(const OUModel& model, const Vec& x, double t, const SimConfig& cfg) {
    cfg.validate();
    if (!(t >= 0.0)) throw DomainError("simulate_euler: t must be non-negative");
    if (x.size() != model.dim()) throw DimensionError("simulate_euler: start point has wrong dimension");
    const double h = t / cfg.steps;
    if (h > 0.1) throw ConfigError("simulate_euler: step t / steps = " + std::to_string(h) + " exceeds 0.1");
    const Mat step_map = Mat::Identity(model.dim(), model.dim()) + h * model.drift();
    const Mat noise = std::sqrt(h) * model.diffusion();
    Mat out(cfg.n_paths, model.dim());
    detail::for_batches(cfg, [&](int b, int first, int rows) {
        auto rng = detail::batch_rng(cfg.seed, b);
        std::normal_distribution<double> normal;
        Mat u = x.transpose().replicate(rows, 1);
        Mat z(rows, noise.cols());
        for (int s = 0; s < cfg.steps; ++s) {
            for (int i = 0; i < rows; ++i)
                for (Eigen::Index j = 0; j < noise.cols(); ++j) z(i, j) = normal(rng);
            u = u * step_map.transpose() + z * noise.transpose();
        }
        out.middleRows(first, rows) = u;
    });
    return out;
}

inline Mat simulate(const OUModel& model, const Vec& x, double t, const SimConfig& cfg) {
    return cfg.method == SimMethod::exact ? simulate_exact(model, x, t, cfg) : simulate_euler(model, x, t, cfg);
}

/// Mean of phi over rows of already-projected coordinates u = (<x, x_j*>).
inline MCEstimate mc_profile(const Profile& phi, const Mat& coords, bool absolute = false) {
    std::vector<cplx> vals(coords.rows());
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        const cplx v = phi.value(coords.row(i).transpose());
        vals[i] = absolute ? cplx(std::abs(v)) : v;
    }
    return mc_mean(vals);
}

inline MCEstimate mc_expectation(const CylinderFunction& f, const Mat& samples) {
    return mc_profile(*f.profile, samples * f.functionals);
}

inline void require_mc_safe(const CylinderFunction& f, const char* who) {
    if (f.profile->growth() == Growth::unknown)
        throw ValidationError(std::string(who) +
                              ": profile may grow faster than polynomially; Monte Carlo needs a bounded or polynomial "
                              "profile (truncate eigenfunctions first)");
}

/// E f(U_t(x)) from the configured sampler.
inline MCEstimate mc_semigroup(const OUModel& model, const CylinderFunction& f, double t, const Vec& x,
                               const SimConfig& cfg) {
    require_model_fits(model, f);
    require_mc_safe(f, "mc_semigroup");
    if (t == 0.0) return {f(x), 0.0, cfg.n_paths};
    return mc_expectation(f, simulate(model, x, t, cfg));
}

// ---- invariance / pushforward / contraction -------------------------------

struct MCComparison {
    MCEstimate lhs;  // integral of P(t)f (or the lifted integral)
    MCEstimate rhs;  // integral of f (or the reduced quadrature)
    double difference = 0.0;
    double band = 0.0;  // 3 * combined standard error (+ quadrature tolerance)
    bool passed = false;
};

/// Compares E f(Y) with Y = exp(tA) X + N(0, Q_t), X ~ N(0, cov_scale Q_inf), against
/// E f(X') for an independent X' ~ N(0, Q_inf). cov_scale != 1 is a negative control.
inline MCComparison invariance_test(const OUModel& model, const CylinderFunction& f, double t, const SimConfig& cfg,
                                    double cov_scale = 1.0) {
    require_model_fits(model, f);
    require_mc_safe(f, "invariance_test");
    cfg.validate();
    if (!(t >= 0.0)) throw DomainError("invariance_test: t must be non-negative");
    const Mat qinf = stationary_cov(model);
    const Vec zero = Vec::Zero(model.dim());
    const Mat& fs = f.functionals;
    const TransitionLaw law = transition_law(model, t);
    // <exp(tA) X + N, x_j*> = <X, exp(tA^T) x_j*> + <N, x_j*>
    const Mat evolved =
        detail::sample_gaussian(zero, psd_factor(cov_scale * qinf), cfg, mix_seed(cfg.seed) ^ 0x1,
                                Mat(law.flow.transpose() * fs)) +
        detail::sample_gaussian(zero, psd_factor(law.cov), cfg, mix_seed(cfg.seed) ^ 0x2, fs);
    const Mat ref = detail::sample_gaussian(zero, psd_factor(qinf), cfg, mix_seed(cfg.seed) ^ 0x3, fs);
    MCComparison c;
    c.lhs = mc_profile(*f.profile, evolved);
    c.rhs = mc_profile(*f.profile, ref);
    c.difference = std::abs(c.lhs.value - c.rhs.value);
    c.band = 3.0 * std::hypot(c.lhs.std_err, c.rhs.std_err);
    c.passed = c.difference <= c.band;
    return c;
}

namespace detail {

// E g(mean + L Z), Z ~ N(0, I_k), k <= 2: composite Gauss-Legendre on |Z_i| <= 10,
// panel count doubled until two estimates agree. Suits profiles that are merely
// smooth or compactly supported, where Gauss-Hermite converges slowly.
template <class G>
auto gaussian_expectation(G&& g, const Vec& mean, const Mat& factor, double tol, int start_panels = 20,
                          double abs_floor = 1e-300, int max_panels = 640) {
    using R = std::invoke_result_t<G&, Vec>;
    const auto k = factor.rows();
    if (k > 2) throw ScopeError("gaussian_expectation: at most two variables");
    const GaussRule& gl = gauss_legendre(8);
    auto eval = [&](int panels) {
        std::vector<double> z, w;
        const double h = 20.0 / panels;
        for (int p = 0; p < panels; ++p)
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double zi = -10.0 + h * (p + 0.5 * (gl.nodes[i] + 1.0));
                z.push_back(zi);
                w.push_back(0.5 * h * gl.weights[i] * std::exp(-0.5 * zi * zi) / std::sqrt(2.0 * std::numbers::pi));
            }
        R sum{};
        Vec v(k);
        if (k == 1) {
            for (std::size_t i = 0; i < z.size(); ++i) sum += w[i] * g(Vec(mean + factor * Vec::Constant(1, z[i])));
        } else {
            for (std::size_t i = 0; i < z.size(); ++i)
                for (std::size_t j = 0; j < z.size(); ++j) {
                    v << z[i], z[j];
                    sum += w[i] * w[j] * g(Vec(mean + factor * v));
                }
        }
        return sum;
    };
    R prev = eval(start_panels);
    for (int panels = 2 * start_panels; panels <= max_panels; panels *= 2) {
        const R next = eval(panels);
        if (std::abs(next - prev) <= tol * std::max(std::abs(next), abs_floor)) return next;
        prev = next;
    }
    throw AccuracyError("quadrature against the pushforward law did not converge (profile not integrable?)");
}

}  // namespace detail

/// Reduced integral of |phi| against the pushforward law (quadrature) against the
/// lifted integral of |f| against mu_inf (Monte Carlo in R^n).
inline MCComparison pushforward_equivalence_check(const OUModel& model, const CylinderFunction& f,
                                                  const SimConfig& cfg, double quad_tol = 1e-5) {
    require_model_fits(model, f);
    require_mc_safe(f, "pushforward_equivalence_check");
    cfg.validate();
    const GaussianMeasure law = pushforward_law(model, f.functionals);
    const double reduced = detail::gaussian_expectation([&](const Vec& u) { return std::abs(f.profile->value(u)); },
                                                         Vec::Zero(f.arity()), psd_factor(law.cov), quad_tol);
    const Mat us = detail::sample_gaussian(Vec::Zero(model.dim()), psd_factor(stationary_cov(model)), cfg, cfg.seed,
                                           f.functionals);
    MCComparison c;
    c.lhs = mc_profile(*f.profile, us, true);
    c.rhs = {reduced, 0.0, 0};
    c.difference = std::abs(c.lhs.value - c.rhs.value);
    c.band = 3.0 * c.lhs.std_err + quad_tol * reduced;
    c.passed = c.difference <= c.band;
    return c;
}

/// ||P(t) f||_1 (outer Monte Carlo over mu_inf, inner Mehler quadrature) against
/// ||f||_1 (Monte Carlo on an independent sample). Passes iff
/// ||P(t) f||_1 <= ||f||_1 + 3 * combined standard error. The inner quadrature error
/// is absolute (quad_tol) for values below 1.
inline MCComparison contraction_check(const OUModel& model, const CylinderFunction& f, double t,
                                      const SimConfig& cfg, double quad_tol = 1e-5) {
    require_model_fits(model, f);
    require_mc_safe(f, "contraction_check");
    cfg.validate();
    const Mat factor = psd_factor(stationary_cov(model));
    const Vec zero = Vec::Zero(model.dim());
    const TransitionLaw law = transition_law(model, t);
    const Mat& fs = f.functionals;
    // outer points enter only through the means <exp(tA) X, x_j*>
    const Mat means = detail::sample_gaussian(zero, factor, cfg, mix_seed(cfg.seed) ^ 0x11, Mat(law.flow.transpose() * fs));
    const Mat ys = detail::sample_gaussian(zero, factor, cfg, mix_seed(cfg.seed) ^ 0x12, fs);
    const Mat inner = psd_factor(Mat(fs.transpose() * law.cov * fs));
    auto phi = [&](const Vec& u) { return f.profile->value(u); };
    std::vector<cplx> pf(means.rows());
    for (Eigen::Index i = 0; i < means.rows(); ++i)
        pf[i] = std::abs(detail::gaussian_expectation(phi, Vec(means.row(i).transpose()), inner, quad_tol, 6, 1.0));
    MCComparison c;
    c.lhs = mc_mean(pf);
    c.rhs = mc_profile(*f.profile, ys, true);
    c.difference = c.lhs.value.real() - c.rhs.value.real();
    c.band = 3.0 * std::hypot(c.lhs.std_err, c.rhs.std_err);
    c.passed = c.difference <= c.band;
    return c;
}

// ---- truncated eigenrelation ---------------------------------------------

struct TruncationRow {
    double radius = 0.0;        // cutoff in standard deviations of nu_inf
    cplx quadrature;            // P(t) f_R (x) by quadrature over the transition law of <U_t, x0*>
    MCEstimate monte_carlo;     // P(t) f_R (x) by exact sampling
    double discrepancy = 0.0;   // |quadrature - e^{lambda t} f(x)|
    bool mc_consistent = false; // |monte_carlo - quadrature| <= 3 stderr
};

/// For f_R = chi_R f_lambda (1D eigenfunction lifted along x0*), compares P(t) f_R (x)
/// with e^{lambda t} f_lambda(x) for each cutoff radius.
inline std::vector<TruncationRow> truncated_eigenrelation(const OUModel& model, const Spec1D& spec,
                                                          const eigenfn::Eigenfunction1D& ef, const Vec& x, double t,
                                                          const std::vector<double>& radii, const SimConfig& cfg) {
    const double sigma = std::sqrt(-spec.q / (2.0 * spec.gamma));
    const TransitionLaw law = transition_law(model, t);
    const double mean = spec.x0star.dot(law.flow * x);
    const double sd = std::sqrt(spec.x0star.dot(law.cov * spec.x0star));
    const cplx target = std::exp(ef.lambda * t) * ef(spec.x0star.dot(x));
    const Mat samples = simulate_exact(model, x, t, cfg);
    std::vector<TruncationRow> rows;
    for (double r : radii) {
        TruncationRow row;
        row.radius = r;
        const ProfilePtr fr = truncate(profile_of(ef), Mat::Constant(1, 1, sigma * sigma), r);
        // the truncated profile has kinks in its third derivative at R - 1 and R; split there
        const double lo = (-r * sigma - mean) / sd, hi = (r * sigma - mean) / sd;
        auto g = [&](double z) {
            return fr->value(Vec::Constant(1, mean + sd * z)) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
        };
        std::vector<double> br{lo, (-(r - 1.0) * sigma - mean) / sd, ((r - 1.0) * sigma - mean) / sd, hi};
        cplx q = 0.0;
        for (int i = 0; i + 1 < 4; ++i)
            q += integrate_panels(g, br[i], br[i + 1], std::max(8, int(std::ceil(8.0 * (br[i + 1] - br[i])))), 16);
        row.quadrature = q;
        row.monte_carlo = mc_expectation(lift(fr, {spec.x0star}), samples);
        row.discrepancy = std::abs(q - target);
        row.mc_consistent = std::abs(row.monte_carlo.value - q) <= 3.0 * row.monte_carlo.std_err + 1e-12;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace oulab
