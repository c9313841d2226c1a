#pragma once

// Acceptance criteria 1-9, shared by `oulab check` and the acceptance test binary.
// Criterion 10 (byte-identical reports from two CLI runs) needs the executable and
// lives with the callers.

#include <chrono>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "oulab/builtins.hpp"
#include "oulab/eigenfn/weyl.hpp"
#include "oulab/lift_mc.hpp"
#include "oulab/profiles.hpp"
#include "oulab/survey.hpp"

namespace oulab::acceptance {

using json = nlohmann::ordered_json;
using eigenfn::Vec2;

struct Options {
    std::uint64_t seed = 42;
    int jobs = 1;
    /// Builtins whose criteria run; empty means all four.
    std::vector<std::string> builtins;
    /// Paths per Monte Carlo estimate (criterion 7) and outer samples (criterion 8).
    int mc_paths = 100000;
    int contraction_paths = 2000;
    int contraction_paths_2d = 500;

    bool covers(const std::string& name) const {
        return builtins.empty() || std::find(builtins.begin(), builtins.end(), name) != builtins.end();
    }
};

struct Result {
    int id = 0;
    std::string name;
    bool passed = false;
    double runtime_s = 0.0;
    double budget_s = std::numeric_limits<double>::infinity();
    json metrics = json::object();

    bool within_budget() const { return runtime_s <= budget_s; }
    bool ok() const { return passed && within_budget(); }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::mt19937_64 rng_for(const Options& o, std::uint64_t salt) { return std::mt19937_64(mix_seed(o.seed ^ salt)); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec normal_vec(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal;
    Vec v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

}  // namespace detail

/// 1. Variance identity for 20 random stable models with a real eigenpair.
inline Result variance_identity(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{1, "variance identity"};
    r.budget_s = 5.0;
    auto rng = detail::rng_for(o, 1);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 1 + int(rng() % 16);
        const double gamma = detail::uniform(rng, -2.0, -0.2);
        const ModelSource src = random_real_model(n, gamma, rng());
        const Spec1D spec = reduce_1d(src.model, src.x0star.real(), gamma);
        worst = std::max(worst, variance_identity_check(spec, src.model).deviation);
    }
    r.passed = worst <= 1e-8;
    r.metrics = {{"models", 20}, {"max_relative_deviation", worst}, {"tolerance", 1e-8}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 2. R_inf covariance identity for 20 random models with complex eigenpairs.
inline Result covariance_identity(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{2, "covariance identity"};
    r.budget_s = 10.0;
    auto rng = detail::rng_for(o, 2);
    double finite_s = 0.0, rinf = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int n = 2 + int(rng() % 15);
        const double a = detail::uniform(rng, -2.0, -0.2), b = detail::uniform(rng, 0.3, 3.0);
        const ModelSource src = random_complex_model(n, a, b, rng());
        const Spec2D spec = reduce_2d(src.model, src.x0star, src.gamma);
        const RinfReport rep = rinf_identity_check(spec, src.model, {0.1, 0.5, 1.0, 2.0});
        finite_s = std::max(finite_s, rep.finite_s_deviation);
        rinf = std::max(rinf, rep.rinf_deviation);
    }
    r.passed = finite_s <= 1e-8 && rinf <= 1e-8;
    r.metrics = {{"models", 20}, {"max_finite_s_deviation", finite_s}, {"max_rinf_deviation", rinf}, {"tolerance", 1e-8}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 3. Lifted generator equals reduced generator at 100 probes, 10 profiles, n in dims.
inline Result lifting_identities(const Options& o, const std::vector<int>& dims = {2, 8, 64}) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{3, "lifting identities"};
    r.budget_s = 30.0;
    auto rng = detail::rng_for(o, 3);
    double worst = 0.0;
    int profiles_checked = 0;
    json per_dim = json::array();
    for (int n : dims) {
        const ModelSource real = random_real_model(n, detail::uniform(rng, -1.5, -0.5), rng());
        const ModelSource cplxm = random_complex_model(n, detail::uniform(rng, -1.5, -0.5), detail::uniform(rng, 0.5, 2.0), rng());
        const Spec1D s1 = reduce_1d(real.model, real.x0star.real(), real.gamma.real());
        const Spec2D s2 = reduce_2d(cplxm.model, cplxm.x0star, cplxm.gamma);
        const double sig1 = std::sqrt(-s1.q / (2.0 * s1.gamma));
        const Mat rinf = lyapunov_qinf(s2.c, s2.r);
        const double sig2 = std::sqrt(0.5 * rinf.trace());

        std::vector<ProfilePtr> p1{
            profile_of(eigenfn::solve_1d(s1, {detail::uniform(rng, -2.5, -0.3), detail::uniform(rng, -2.0, 2.0)})),
            profile_of(eigenfn::solve_1d(s1, {detail::uniform(rng, -2.5, -0.3), 0.0})),
            profile_of(eigenfn::solve_1d(s1, 2.0 * s1.gamma)),
            profiles::gaussian(Vec::Constant(1, 0.3 * sig1), sig1, {0.5, -1.0}),
            profiles::bump(Vec::Zero(1), 2.5 * sig1)};
        Vec2 c2(0.2 * sig2, -0.1 * sig2);
        CMat h = CMat::Zero(2, 2);
        h << cplx(1, 0.5), cplx(-0.3, 0), cplx(-0.3, 0), cplx(0.7, -1);
        std::vector<ProfilePtr> p2{eigenfn::poly_eigen_2d(s2, 1, 1).profile(), eigenfn::poly_eigen_2d(s2, 2, 1).profile(),
                                   profiles::gaussian(c2, sig2), profiles::bump(Vec::Zero(2), 2.5 * sig2),
                                   profiles::quadratic(cplx(0.1, 0.2), CVec::Ones(2), h)};

        const Mat probes = gauss_sample(GaussianMeasure(stationary_cov(real.model)), 100, rng());
        const Mat probes2 = gauss_sample(GaussianMeasure(stationary_cov(cplxm.model)), 100, rng());
        double dim_worst = 0.0;
        for (const auto& p : p1) {
            const CylinderFunction f = lift(p, {s1.x0star});
            for (Eigen::Index i = 0; i < probes.rows(); ++i) {
                const Vec x = probes.row(i).transpose();
                const cplx lhs = generator_apply(real.model, f, x);
                const cplx rhs = reduced_generator_1d(s1, *p, s1.x0star.dot(x));
                dim_worst = std::max(dim_worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
            ++profiles_checked;
        }
        for (const auto& p : p2) {
            const CylinderFunction f = lift(p, {s2.h1star, s2.h2star});
            for (Eigen::Index i = 0; i < probes2.rows(); ++i) {
                const Vec x = probes2.row(i).transpose();
                const cplx lhs = generator_apply(cplxm.model, f, x);
                const cplx rhs = reduced_generator_2d(s2, *p, Vec2(s2.h1star.dot(x), s2.h2star.dot(x)));
                dim_worst = std::max(dim_worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
            ++profiles_checked;
        }
        worst = std::max(worst, dim_worst);
        per_dim.push_back({{"n", n}, {"max_deviation", dim_worst}});
    }
    r.passed = worst <= 1e-8;
    r.metrics = {{"profiles", profiles_checked}, {"probes_per_profile", 100}, {"per_dim", per_dim},
                 {"max_deviation", worst}, {"tolerance", 1e-8}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

inline SurveyConfig acceptance_grid(const std::string& builtin_name, double gen_tol, const Options& o) {
    SurveyConfig c;
    c.builtin = builtin_name;
    c.re_min = -3.0;
    c.re_max = -0.25;
    c.im_min = -3.0;
    c.im_max = 3.0;
    c.step = 0.25;
    c.times = {0.1, 0.2};
    c.gen_tol = gen_tol;
    c.semi_tol = 1e-3;
    c.seed = o.seed;
    c.jobs = o.jobs;
    return c;
}

/// 4. Residual survey over the half-plane grid, 1D (demo1d) and isotropic 2D (demo2d_iso).
inline Result half_plane_survey(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{4, "half-plane eigenvalue survey"};
    r.budget_s = 600.0;
    r.passed = true;
    json parts = json::array();
    for (const auto& [name, tol] : std::vector<std::pair<std::string, double>>{{"demo1d", 1e-8}, {"demo2d_iso", 1e-6}}) {
        if (!o.covers(name)) continue;
        const SurveyReport rep = run_survey(acceptance_grid(name, tol, o));
        double max_semi = 0.0;
        for (const auto& row : rep.rows)
            for (double s : row.semi_residual) max_semi = std::isfinite(s) ? std::max(max_semi, s) : max_semi;
        const bool ok = rep.summary.n_rows > 0 && rep.summary.n_pass == rep.summary.n_rows;
        r.passed = r.passed && ok;
        parts.push_back({{"builtin", name},
                         {"points", rep.summary.n_rows},
                         {"passing", rep.summary.n_pass},
                         {"max_gen_residual", oulab::detail::finite_or_null(rep.summary.max_residual)},
                         {"max_semi_residual", max_semi},
                         {"gen_tol", tol},
                         {"semi_tol", 1e-3}});
    }
    r.metrics = {{"surveys", parts}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 5. L1 converges, L2 does not (off lattice); everything converges on the lattice n gamma.
inline Result lp_dichotomy(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{5, "L1 vs Lp dichotomy"};
    const ModelSource src = demo1d();
    const Spec1D spec = reduce_1d(src.model, src.x0star.real(), src.gamma.real());
    const double sigma = std::sqrt(-spec.q / (2.0 * spec.gamma));
    auto rng = detail::rng_for(o, 5);
    double worst_increment = 0.0, min_growth = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10; ++i) {
        cplx lambda;
        do lambda = {detail::uniform(rng, -3.0, -0.25), i % 3 == 0 ? 0.0 : detail::uniform(rng, -3.0, 3.0)};
        while (eigenfn::lattice_index(spec.gamma, lambda) >= 1);
        const auto ef = eigenfn::solve_1d(spec, lambda);
        worst_increment = std::max(worst_increment, ef.l1_increment);
        const auto l2 = eigenfn::lp_truncated_norms(spec, ef, 2.0, {4.0 * sigma, 8.0 * sigma, 16.0 * sigma});
        min_growth = std::min(min_growth, std::sqrt(l2[2] / l2[0]));
    }
    double lattice_change = 0.0, lattice_gap = 0.0, lattice_residual = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const auto ef = eigenfn::solve_1d(spec, double(n) * spec.gamma);
        lattice_gap = std::max(lattice_gap, std::abs(ef.lambda - double(n) * spec.gamma));
        lattice_residual = std::max(lattice_residual, eigenfn::residual_generator_1d(spec, ef));
        for (double p : {1.0, 2.0}) {
            const auto v = eigenfn::lp_truncated_norms(spec, ef, p, {8.0 * sigma, 16.0 * sigma});
            lattice_change = std::max(lattice_change, std::abs(v[1] - v[0]) / v[1]);
        }
    }
    r.passed = worst_increment < 1e-6 && min_growth >= 10.0 && lattice_change < 1e-6 && lattice_gap == 0.0 &&
               lattice_residual <= 1e-8;
    r.metrics = {{"off_lattice_points", 10},
                 {"max_l1_final_increment", worst_increment},
                 {"min_l2_growth_over_two_doublings", min_growth},
                 {"lattice_points", 5},
                 {"max_lattice_norm_change", lattice_change},
                 {"max_lattice_eigenvalue_gap", lattice_gap},
                 {"max_lattice_gen_residual", lattice_residual}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 6. rank2_trace against the dense trace of x1 y1^T + x2 y2^T.
inline Result trace_lemma(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{6, "trace lemma"};
    r.budget_s = 2.0;
    auto rng = detail::rng_for(o, 6);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + int(rng() % 64);
        const Vec x1 = detail::normal_vec(rng, n), y1 = detail::normal_vec(rng, n);
        const Vec x2 = detail::normal_vec(rng, n), y2 = detail::normal_vec(rng, n);
        const Mat dense = x1 * y1.transpose() + x2 * y2.transpose();
        const double scale = x1.norm() * y1.norm() + x2.norm() * y2.norm();
        worst = std::max(worst, std::abs(rank2_trace(x1, y1, x2, y2) - dense.trace()) / scale);
    }
    r.passed = worst <= 1e-12;
    r.metrics = {{"instances", 1000}, {"max_relative_deviation", worst}, {"tolerance", 1e-12}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// A bounded cylinder function on a builtin model, used by criteria 7 and 8.
struct TestFunction {
    std::string label;
    std::shared_ptr<const OUModel> model;
    CylinderFunction f;
};

inline std::vector<TestFunction> bounded_test_functions(const Options& o) {
    std::vector<TestFunction> out;
    if (o.covers("demo1d") || o.covers("bigmodel")) {
        for (const std::string name : {"demo1d", "bigmodel"}) {
            if (!o.covers(name)) continue;
            const ModelSource src = builtin(name);
            auto model = std::make_shared<const OUModel>(src.model);
            const Spec1D s = reduce_1d(src.model, src.x0star.real(), src.gamma.real());
            const double sig = std::sqrt(-s.q / (2.0 * s.gamma));
            const Mat var = Mat::Constant(1, 1, sig * sig);
            auto add = [&](const std::string& label, ProfilePtr p) { out.push_back({name + ":" + label, model, lift(p, {s.x0star})}); };
            add("bump", profiles::bump(Vec::Zero(1), 1.5 * sig));
            add("offset_bump", profiles::bump(Vec::Constant(1, sig), 1.5 * sig, {0.0, 2.0}));
            add("gaussian", profiles::gaussian(Vec::Zero(1), sig));
            add("plane_wave", profiles::plane_wave(Vec::Constant(1, 1.0 / sig)));
            add("truncated_eigenfunction", truncate(profile_of(eigenfn::solve_1d(s, {-0.7, 0.8})), var, 4.0));
        }
    }
    if (o.covers("demo2d_iso")) {
        const ModelSource src = demo2d_iso();
        auto model = std::make_shared<const OUModel>(src.model);
        const Spec2D s = reduce_2d(src.model, src.x0star, src.gamma);
        const Mat rinf = lyapunov_qinf(s.c, s.r);
        const double sig = std::sqrt(rinf(0, 0));
        auto add = [&](const std::string& label, ProfilePtr p) {
            out.push_back({"demo2d_iso:" + label, model, lift(p, {s.h1star, s.h2star})});
        };
        add("bump", profiles::bump(Vec::Zero(2), 2.0 * sig));
        add("offset_bump", profiles::bump(Vec2(0.5 * sig, -0.5 * sig), 1.5 * sig));
        add("gaussian", profiles::gaussian(Vec2(0.2 * sig, 0.0), sig, {1.0, -1.0}));
        add("plane_wave", profiles::plane_wave(Vec2(0.6 / sig, -0.4 / sig)));
        add("truncated_eigenfunction", truncate(profile_of(eigenfn::solve_2d_isotropic(s, {-0.6, 1.3})), rinf, 4.0));
    }
    return out;
}

/// 7. Invariance of mu_inf under P(t) by Monte Carlo, with a perturbed-covariance negative control.
inline Result invariance_mc(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{7, "invariance and semigroup Monte Carlo"};
    r.budget_s = 120.0;
    SimConfig cfg;
    cfg.n_paths = o.mc_paths;
    cfg.jobs = o.jobs;
    const auto fns = bounded_test_functions(o);
    bool all = !fns.empty();
    json rows = json::array();
    std::uint64_t k = 0;
    for (const auto& tf : fns)
        for (double t : {0.5, 1.0}) {
            cfg.seed = mix_seed(o.seed ^ (0x700 + k++));
            const MCComparison c = invariance_test(*tf.model, tf.f, t, cfg);
            all = all && c.passed;
            rows.push_back({{"function", tf.label}, {"t", t}, {"difference", c.difference}, {"band", c.band}, {"passed", c.passed}});
        }
    // the negative control must be rejected
    bool control_rejected = true;
    json controls = json::array();
    for (const auto& tf : fns) {
        if (tf.label.find(":bump") == std::string::npos) continue;
        cfg.seed = mix_seed(o.seed ^ (0x7ff + k++));
        const MCComparison c = invariance_test(*tf.model, tf.f, 1.0, cfg, 1.5);
        control_rejected = control_rejected && !c.passed;
        controls.push_back({{"function", tf.label}, {"cov_scale", 1.5}, {"difference", c.difference}, {"band", c.band},
                            {"rejected", !c.passed}});
    }
    // pushforward: lifted Monte Carlo in R^n against reduced quadrature
    bool push_ok = true;
    json pushes = json::array();
    for (const auto& tf : fns) {
        if (tf.label.find("bump") == std::string::npos) continue;
        cfg.seed = mix_seed(o.seed ^ (0x780 + k++));
        const MCComparison c = pushforward_equivalence_check(*tf.model, tf.f, cfg);
        push_ok = push_ok && c.passed;
        pushes.push_back({{"function", tf.label}, {"n", tf.model->dim()}, {"lifted", c.lhs.value.real()},
                          {"reduced", c.rhs.value.real()}, {"band", c.band}, {"passed", c.passed}});
    }
    r.passed = all && control_rejected && push_ok;
    r.metrics = {{"n_paths", o.mc_paths}, {"invariance", rows}, {"negative_controls", controls}, {"pushforward", pushes}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 8. ||P(t) f||_1 <= ||f||_1 + 3 stderr.
inline Result contraction(const Options& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{8, "contraction"};
    SimConfig cfg;
    cfg.n_paths = o.contraction_paths;
    cfg.jobs = o.jobs;
    const auto fns = bounded_test_functions(o);
    bool all = !fns.empty();
    json rows = json::array();
    std::uint64_t k = 0;
    for (const auto& tf : fns)
        for (double t : {0.5, 1.0}) {
            cfg.seed = mix_seed(o.seed ^ (0x800 + k++));
            cfg.n_paths = tf.f.arity() == 2 ? o.contraction_paths_2d : o.contraction_paths;
            const MCComparison c = contraction_check(*tf.model, tf.f, t, cfg);
            all = all && c.passed;
            rows.push_back({{"function", tf.label}, {"t", t}, {"outer_samples", cfg.n_paths}, {"norm_Ptf", c.lhs.value.real()}, {"norm_f", c.rhs.value.real()},
                            {"band", c.band}, {"passed", c.passed}});
        }
    r.passed = all;
    r.metrics = {{"checks", rows}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// 9. Weyl residuals for demo2d_general on the demo grid, and at lattice points.
inline Result general_r_evidence(const Options&) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r{9, "general-R 2D evidence"};
    const ModelSource src = demo2d_general();
    const Spec2D spec = reduce_2d(src.model, src.x0star, src.gamma);
    double worst_grid = 0.0;
    json grid = json::array();
    for (double re : {-1.5, -1.0, -0.5})
        for (double im : {-1.0, 0.0, 1.0}) {
            const auto w = eigenfn::weyl_residual_minimize(spec, {re, im});
            worst_grid = std::max(worst_grid, w.gen_residual);
            grid.push_back({{"lambda_re", re}, {"lambda_im", im}, {"residual", w.gen_residual},
                            {"polynomial", w.used_polynomial}, {"iterations", w.iterations}});
        }
    double worst_lattice = 0.0;
    json lattice = json::array();
    for (int n = 1; n <= 3; ++n)
        for (int n1 = 0; n1 <= n; ++n1) {
            const cplx gamma(spec.a, spec.b);
            const cplx lambda = double(n1) * gamma + double(n - n1) * std::conj(gamma);
            const auto w = eigenfn::weyl_residual_minimize(spec, lambda);
            worst_lattice = std::max(worst_lattice, w.gen_residual);
            lattice.push_back({{"n1", n1}, {"n2", n - n1}, {"residual", w.gen_residual}});
        }
    r.passed = worst_grid <= 0.1 && worst_lattice <= 1e-6;
    r.metrics = {{"R", {spec.r(0, 0), spec.r(0, 1), spec.r(1, 1)}},
                 {"max_grid_residual", worst_grid},
                 {"max_lattice_residual", worst_lattice},
                 {"grid", grid},
                 {"lattice", lattice}};
    r.runtime_s = detail::seconds_since(t0);
    return r;
}

/// Criteria that concern the selected builtins (all of 1-9 when none is selected).
inline std::vector<int> criteria_for(const Options& o) {
    if (o.builtins.empty()) return {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<int> ids;
    auto want = [&](std::initializer_list<int> l) {
        for (int i : l)
            if (std::find(ids.begin(), ids.end(), i) == ids.end()) ids.push_back(i);
    };
    for (const auto& b : o.builtins) {
        if (b == "demo1d") want({1, 3, 4, 5, 6, 7, 8});
        else if (b == "demo2d_iso") want({2, 3, 4, 6, 7, 8});
        else if (b == "demo2d_general") want({2, 3, 6, 9});
        else if (b == "bigmodel") want({1, 3, 6, 7});
        else builtin(b);  // throws ConfigError for unknown names
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

inline Result run_criterion(int id, const Options& o) {
    switch (id) {
        case 1: return variance_identity(o);
        case 2: return covariance_identity(o);
        case 3: return lifting_identities(o);
        case 4: return half_plane_survey(o);
        case 5: return lp_dichotomy(o);
        case 6: return trace_lemma(o);
        case 7: return invariance_mc(o);
        case 8: return contraction(o);
        case 9: return general_r_evidence(o);
        default: throw ConfigError("unknown acceptance criterion " + std::to_string(id));
    }
}

/// Deterministic report: no timings (those go to the console).
inline json report_json(const Options& o, const std::vector<Result>& results) {
    json j;
    j["seed"] = o.seed;
    j["builtins"] = o.builtins;
    j["criteria"] = json::array();
    int passed = 0;
    for (const auto& r : results) {
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"metrics", r.metrics}});
        passed += r.passed;
    }
    j["summary"] = {{"total", results.size()}, {"passed", passed}, {"all_passed", passed == int(results.size())}};
    return j;
}

inline std::string result_line(const Result& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "[%s] criterion %d: %s (%.2f s%s)", r.ok() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.runtime_s,
                  std::isfinite(r.budget_s) ? (std::string(", budget ") + format_g12(r.budget_s) + " s").c_str() : "");
    return buf;
}

}  // namespace oulab::acceptance
