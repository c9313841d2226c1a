#include <gtest/gtest.h>

#include <cmath>

#include "oulab/builtins.hpp"
#include "oulab/eigenfn/poly2d.hpp"
#include "oulab/lift_mc.hpp"
#include "oulab/profiles.hpp"
#include "test_util.hpp"

using namespace oulab;

namespace {

OUModel scalar_model(double gamma, double b) { return OUModel(Mat::Constant(1, 1, gamma), Mat::Constant(1, 1, b)); }

SimConfig cfg_with(int paths, std::uint64_t seed = 7) {
    SimConfig c;
    c.n_paths = paths;
    c.seed = seed;
    return c;
}

struct Moments {
    double mean, mean_se, var, var_se;
};

Moments moments(const Vec& x) {
    const double n = double(x.size());
    const double m = x.mean();
    const Vec c = x.array() - m;
    const double v = c.squaredNorm() / (n - 1.0);
    const double m4 = c.array().pow(4).mean();
    return {m, std::sqrt(v / n), v, std::sqrt(std::max(m4 - v * v, 0.0) / n)};
}

Spec1D demo1d_spec() {
    const auto src = demo1d();
    return reduce_1d(src.model, src.x0star.real(), src.gamma.real());
}

}  // namespace

TEST(Lift, LinearProfileAlongFirstAxis) {
    const CylinderFunction f = lift(profiles::linear(Vec::Ones(1)), {Vec::Unit(4, 0)});
    const Vec x = Vec::LinSpaced(4, 0.5, 2.0);
    const Jet j = f.jet(x);
    EXPECT_EQ(j.value, cplx(0.5));
    EXPECT_EQ(j.grad, CVec(Vec::Unit(4, 0).cast<cplx>()));
    EXPECT_EQ(j.hess, CMat::Zero(4, 4));
}

TEST(Lift, ArityMismatch) {
    EXPECT_THROW(lift(profiles::linear(Vec::Ones(1)), {Vec::Unit(3, 0), Vec::Unit(3, 1)}), DimensionError);
    EXPECT_THROW(lift(profiles::bump(Vec::Zero(2), 1.0), {Vec::Unit(3, 0)}), DimensionError);
}

TEST(Lift, OneDimensionalGeneratorIdentityAtRandomProbes) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const auto ef = eigenfn::solve_1d(spec, -1.2);
    const CylinderFunction f = lift(ef, spec);
    const auto phi = profile_of(ef);
    const Mat probe_cov = stationary_cov(src.model);
    const Mat probes = gauss_sample(GaussianMeasure(probe_cov), 100, 22);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        const Vec x = probes.row(i).transpose();
        const cplx rhs = reduced_generator_1d(spec, *phi, spec.x0star.dot(x));
        worst = std::max(worst, std::abs(generator_apply(src.model, f, x) - rhs) / std::max(1.0, std::abs(rhs)));
        // and the eigenrelation itself
        EXPECT_LE(std::abs(rhs - ef.lambda * ef(spec.x0star.dot(x))), 1e-6 * std::max(1.0, std::abs(rhs)));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Lift, TwoDimensionalGeneratorIdentityAtRandomProbes) {
    for (const auto& src : {demo2d_iso(), demo2d_general()}) {
        const Spec2D spec = reduce_2d(src.model, src.x0star, src.gamma);
        const std::vector<ProfilePtr> profs{eigenfn::poly_eigen_2d(spec, 2, 1).profile(),
                                            profiles::bump(Vec::Constant(2, 0.2), 1.5)};
        const Mat probes = gauss_sample(GaussianMeasure(stationary_cov(src.model)), 100, 23);
        for (const auto& p : profs) {
            const CylinderFunction f = lift(p, {spec.h1star, spec.h2star});
            double worst = 0.0;
            for (Eigen::Index i = 0; i < probes.rows(); ++i) {
                const Vec x = probes.row(i).transpose();
                const cplx rhs = reduced_generator_2d(spec, *p, Vec(f.coords(x)));
                worst = std::max(worst, std::abs(generator_apply(src.model, f, x) - rhs) / std::max(1.0, std::abs(rhs)));
            }
            EXPECT_LE(worst, 1e-8) << src.name;
        }
    }
}

TEST(SimulateExact, ZeroTimeReturnsStart) {
    const auto src = demo1d();
    const Vec x = Vec::LinSpaced(8, -1.0, 1.0);
    const Mat s = simulate_exact(src.model, x, 0.0, cfg_with(200));
    for (Eigen::Index i = 0; i < s.rows(); ++i) EXPECT_EQ(Vec(s.row(i).transpose()), x);
}

TEST(SimulateExact, ScalarMomentsMatchClosedForm) {
    const Mat s = simulate_exact(scalar_model(-1.0, 1.0), Vec::Constant(1, 2.0), 1.0, cfg_with(100000));
    const Moments m = moments(s.col(0));
    EXPECT_NEAR(m.mean, 2.0 * std::exp(-1.0), 3.0 * m.mean_se);
    EXPECT_NEAR(m.var, (1.0 - std::exp(-2.0)) / 2.0, 3.0 * m.var_se);
}

TEST(SimulateExact, LargeTimeCovarianceApproachesStationary) {
    Mat a(2, 2), b(2, 2);
    a << -1.0, 0.5, -0.3, -0.8;
    b << 1.0, 0.0, 0.4, 0.7;
    const OUModel model(a, b);
    const Mat s = simulate_exact(model, Vec::Constant(2, 3.0), 30.0, cfg_with(100000, 3));
    const Mat qinf = stationary_cov(model);
    const double n = double(s.rows());
    const Vec mean = s.colwise().mean().transpose();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const Vec prod = (s.col(i).array() - mean(i)) * (s.col(j).array() - mean(j));
            const double cov = prod.sum() / (n - 1.0);
            const double se = std::sqrt((prod.array() - prod.mean()).square().sum() / (n - 1.0) / n);
            EXPECT_NEAR(cov, qinf(i, j), 3.0 * se) << i << j;
        }
}

TEST(SimulateEuler, NoiselessMatchesFlow) {
    Mat a(2, 2);
    a << -1.0, 2.0, -2.0, -1.0;
    const OUModel model(a, Mat::Zero(2, 1));
    SimConfig c = cfg_with(100);
    c.steps = 10000;
    const Vec x(Eigen::Vector2d(1.0, -0.5));
    const Mat s = simulate_euler(model, x, 1.0, c);
    const Vec expect = mat_exp(a, 1.0) * x;
    for (Eigen::Index i = 0; i < s.rows(); i += 17) EXPECT_LE((Vec(s.row(i).transpose()) - expect).norm(), 1e-3);
}

// For gamma = -1, q = 1 the Euler chain has mean (1 - h)^N x and variance
// (1 - (1 - h)^{2N}) / (2 - h); the band is 3 stderr plus that bias.
TEST(SimulateEuler, MomentsAgreeWithExactSamplerWithinBiasBand) {
    const OUModel model = scalar_model(-1.0, 1.0);
    const Vec x = Vec::Constant(1, 1.5);
    for (double t : {0.1, 1.0}) {
        SimConfig c = cfg_with(100000, 9);
        c.steps = int(std::ceil(t / 0.05));
        const double h = t / c.steps;
        const double decay = std::pow(1.0 - h, c.steps);
        const double mean_bias = std::abs(decay - std::exp(-t)) * x(0);
        const double var_bias = std::abs((1.0 - decay * decay) / (2.0 - h) - (1.0 - std::exp(-2.0 * t)) / 2.0);
        const Moments e = moments(simulate_euler(model, x, t, c).col(0));
        const Moments ex = moments(simulate_exact(model, x, t, c).col(0));
        EXPECT_NEAR(e.mean, ex.mean, 3.0 * std::hypot(e.mean_se, ex.mean_se) + mean_bias) << t;
        EXPECT_NEAR(e.var, ex.var, 3.0 * std::hypot(e.var_se, ex.var_se) + var_bias) << t;
    }
}

TEST(SimulateEuler, MeanBiasIsFirstOrder) {
    const OUModel model = scalar_model(-1.0, 0.0);
    const Vec x = Vec::Ones(1);
    double prev = 0.0;
    for (int steps : {10, 20, 40, 80}) {
        SimConfig c = cfg_with(100);
        c.steps = steps;
        const double bias = std::abs(simulate_euler(model, x, 1.0, c)(0, 0) - std::exp(-1.0));
        if (prev > 0.0) {
            EXPECT_GE(prev / bias, 1.5) << steps;
            EXPECT_LE(prev / bias, 3.0) << steps;
        }
        prev = bias;
    }
}

TEST(SimulateEuler, StepGuard) {
    SimConfig c = cfg_with(100);
    c.steps = 5;
    EXPECT_THROW(simulate_euler(scalar_model(-1.0, 1.0), Vec::Ones(1), 1.0, c), ConfigError);
    c.n_paths = 10;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(McSemigroup, ConstantHasZeroError) {
    const auto src = demo1d();
    const auto est = mc_semigroup(src.model, lift(profiles::constant(1, 1.0), {Vec::Unit(8, 0)}), 0.5,
                                  Vec::Ones(8), cfg_with(1000));
    EXPECT_EQ(est.value, cplx(1.0));
    EXPECT_EQ(est.std_err, 0.0);
}

TEST(McSemigroup, GaussianProfileMatchesMehler) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const CylinderFunction f = lift(profiles::gaussian(Vec::Constant(1, 0.2), 0.8, {1.0, 0.5}), {spec.x0star});
    const Vec x = 0.3 * Vec::Ones(8);
    const auto est = mc_semigroup(src.model, f, 0.5, x, cfg_with(100000));
    EXPECT_LE(std::abs(est.value - mehler_apply(src.model, f, 0.5, x)), 3.0 * est.std_err);
}

TEST(McSemigroup, BumpMatchesQuadrature) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const ProfilePtr bump = profiles::bump(Vec::Zero(1), 1.2);
    const CylinderFunction f = lift(bump, {spec.x0star});
    const Vec x = 0.2 * Vec::Ones(8);
    const TransitionLaw law = transition_law(src.model, 0.5);
    const Vec mean = f.functionals.transpose() * law.flow * x;
    const Mat factor = psd_factor(Mat(f.functionals.transpose() * law.cov * f.functionals));
    const cplx quad = detail::gaussian_expectation([&](const Vec& u) { return bump->value(u); }, mean, factor, 1e-10);
    const auto est = mc_semigroup(src.model, f, 0.5, x, cfg_with(100000));
    EXPECT_LE(std::abs(est.value - quad), 3.0 * est.std_err);
}

TEST(McSemigroup, LinearProfileHasExactMean) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const Vec x = Vec::LinSpaced(8, -1.0, 2.0);
    const auto est = mc_semigroup(src.model, lift(profiles::linear(Vec::Ones(1)), {spec.x0star}), 0.7, x,
                                  cfg_with(100000));
    EXPECT_NEAR(est.value.real(), std::exp(-0.7) * spec.x0star.dot(x), 3.0 * est.std_err);
}

TEST(McSemigroup, RejectsSuperGaussianProfiles) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const CylinderFunction f = lift(eigenfn::solve_1d(spec, -1.2), spec);
    EXPECT_THROW(mc_semigroup(src.model, f, 0.5, Vec::Zero(8), cfg_with(1000)), ValidationError);
    EXPECT_THROW(require_mc_safe(f, "test"), ValidationError);
    // the polynomial lattice case is admissible
    EXPECT_NO_THROW(require_mc_safe(lift(eigenfn::hermite_case(spec, 2), spec), "test"));
}

TEST(McSemigroup, StdErrScalesAsInverseRootPaths) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const CylinderFunction f = lift(profiles::bump(Vec::Zero(1), 1.0), {spec.x0star});
    double prev = 0.0;
    for (int n : {5000, 10000, 20000, 40000}) {
        const double scaled = mc_semigroup(src.model, f, 0.5, Vec::Zero(8), cfg_with(n)).std_err * std::sqrt(double(n));
        if (prev > 0.0) {
            EXPECT_GE(scaled / prev, 0.5);
            EXPECT_LE(scaled / prev, 2.0);
        }
        prev = scaled;
    }
}

TEST(McSemigroup, DeterministicInSeedAndJobs) {
    const auto src = demo2d_iso();
    const Vec x = Vec::Ones(8);
    SimConfig a = cfg_with(20000, 99), b = a, c = a;
    b.jobs = 3;
    c.seed = 100;
    const Mat sa = simulate_exact(src.model, x, 0.4, a);
    EXPECT_EQ(sa, simulate_exact(src.model, x, 0.4, a));
    EXPECT_EQ(sa, simulate_exact(src.model, x, 0.4, b));
    EXPECT_NE(sa, simulate_exact(src.model, x, 0.4, c));
    a.method = b.method = SimMethod::euler;
    a.steps = b.steps = 8;
    EXPECT_EQ(simulate(src.model, x, 0.4, a), simulate(src.model, x, 0.4, b));
}

TEST(Invariance, ConstantIsExact) {
    const auto src = demo1d();
    const auto c = invariance_test(src.model, lift(profiles::constant(1, 2.0), {Vec::Unit(8, 3)}), 1.0, cfg_with(1000));
    EXPECT_EQ(c.difference, 0.0);
    EXPECT_TRUE(c.passed);
}

TEST(Invariance, BumpPassesAndPerturbedCovarianceFails) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const double sig = std::sqrt(-spec.q / (2.0 * spec.gamma));
    const CylinderFunction f = lift(profiles::bump(Vec::Zero(1), 1.5 * sig), {spec.x0star});
    EXPECT_TRUE(invariance_test(src.model, f, 1.0, cfg_with(100000)).passed);
    const auto bad = invariance_test(src.model, f, 1.0, cfg_with(100000), 1.5);
    EXPECT_FALSE(bad.passed);
    EXPECT_GT(bad.difference, bad.band);
}

TEST(Pushforward, BumpConstantAndLargeModel) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    EXPECT_TRUE(pushforward_equivalence_check(src.model, lift(profiles::bump(Vec::Zero(1), 1.0), {spec.x0star}),
                                              cfg_with(100000))
                    .passed);
    const auto one = pushforward_equivalence_check(src.model, lift(profiles::constant(1, 1.0), {spec.x0star}),
                                                   cfg_with(1000));
    EXPECT_NEAR(one.lhs.value.real(), 1.0, 1e-15);
    EXPECT_NEAR(one.rhs.value.real(), 1.0, 1e-12);
    const auto big = bigmodel();
    std::mt19937_64 rng(64);
    const Vec h = testutil::random_vector(64, rng).normalized();
    EXPECT_TRUE(pushforward_equivalence_check(big.model, lift(profiles::gaussian(Vec::Zero(1), 0.7), {h}),
                                              cfg_with(50000))
                    .passed);
}

TEST(Contraction, BoundedFunctionsAcrossTimes) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const CylinderFunction f = lift(profiles::bump(Vec::Constant(1, 0.3), 1.2, {0.0, 1.0}), {spec.x0star});
    for (double t : {0.1, 1.0, 5.0}) {
        const auto c = contraction_check(src.model, f, t, cfg_with(2000));
        EXPECT_TRUE(c.passed) << t;
        EXPECT_LE(c.lhs.value.real(), c.rhs.value.real() + c.band) << t;
    }
}

TEST(Truncation, DiscrepancyDecreasesWithCutoff) {
    const auto src = demo1d();
    const Spec1D spec = demo1d_spec();
    const auto ef = eigenfn::solve_1d(spec, -1.2);
    const Vec x = 0.3 * spec.x0star;
    const auto rows = truncated_eigenrelation(src.model, spec, ef, x, 0.5, {2.0, 4.0, 8.0, 16.0}, cfg_with(20000));
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].discrepancy, rows[i - 1].discrepancy) << i;
    for (const auto& r : rows) EXPECT_TRUE(r.mc_consistent) << r.radius;
    EXPECT_LT(rows.back().discrepancy, 1e-6 * std::abs(ef(spec.x0star.dot(x))));
}
