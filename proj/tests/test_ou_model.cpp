#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oulab/ou_model.hpp"
#include "oulab/profiles.hpp"
#include "test_util.hpp"

using namespace oulab;
using testutil::random_matrix;
using testutil::random_stable;
using testutil::random_vector;

namespace {

OUModel diag_model(double a1, double a2, const Mat& b) {
    return OUModel(Vec(Eigen::Vector2d(a1, a2)).asDiagonal(), b);
}

OUModel scalar_model(double gamma, double sigma) {
    return OUModel(Mat::Constant(1, 1, gamma), Mat::Constant(1, 1, sigma));
}

CylinderFunction cyl(const std::vector<Vec>& fs, ProfilePtr p) {
    Mat m(fs.front().size(), fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) m.col(j) = fs[j];
    return CylinderFunction(m, std::move(p));
}

// 1/2 Tr(Q D^2 f) + <Ax, Df> with D f, D^2 f by central differences of f alone.
cplx generator_fd(const OUModel& m, const CylinderFunction& f, const Vec& x, double h) {
    const auto n = x.size();
    CVec grad(n);
    CMat hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec ei = h * Vec::Unit(n, i);
        grad(i) = (f(x + ei) - f(x - ei)) / (2 * h);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Vec ej = h * Vec::Unit(n, j);
            hess(i, j) = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4 * h * h);
        }
    }
    const Vec ax = m.drift() * x;
    return 0.5 * (m.noise_cov().cast<cplx>().cwiseProduct(hess)).sum() + (ax.cast<cplx>().array() * grad.array()).sum();
}

}  // namespace

TEST(OUModel, ValidatesShapes) {
    EXPECT_THROW(OUModel(Mat::Zero(2, 3), Mat::Zero(2, 1)), DimensionError);
    EXPECT_THROW(OUModel(-Mat::Identity(2, 2), Mat::Zero(3, 1)), DimensionError);
    const OUModel m(-Mat::Identity(2, 2), Mat::Identity(2, 2));
    EXPECT_EQ(m.noise_cov(), Mat::Identity(2, 2));
}

TEST(CylinderFunction, ArityMustMatchFunctionals) {
    EXPECT_THROW(CylinderFunction(Mat::Identity(3, 2), profiles::linear(Vec::Ones(1))), DimensionError);
}

TEST(CylinderFunction, JetConsistentWithFiniteDifferences) {
    std::mt19937_64 rng(10);
    const Mat fs = random_matrix(4, 2, rng);
    const std::vector<ProfilePtr> ps{profiles::bump(Vec::Zero(2), 3.0), profiles::gaussian(Vec::Ones(2), 1.3, {0.5, 1.0}),
                                     profiles::plane_wave(Vec(Eigen::Vector2d(0.7, -0.3)))};
    for (const auto& p : ps) {
        const CylinderFunction f(fs, p);
        for (int k = 0; k < 10; ++k) {
            const Vec x = 0.4 * random_vector(4, rng);
            const Jet j = f.jet(x);
            const double h = 1e-5;
            const double scale = std::abs(j.value) + j.grad.norm() + j.hess.norm();
            for (Eigen::Index i = 0; i < 4; ++i) {
                const Vec e = h * Vec::Unit(4, i);
                EXPECT_LE(std::abs((f(x + e) - f(x - e)) / (2 * h) - j.grad(i)), 1e-6 * scale);
                const CVec dg = (f.jet(x + e).grad - f.jet(x - e).grad) / (2 * h);
                EXPECT_LE((dg - j.hess.col(i)).norm(), 1e-6 * scale);
            }
        }
    }
}

TEST(Generator, LinearProfileAlongEigenvector) {
    // A^T x0 = gamma x0 with x0 = e1 for an upper-triangular A^T
    Mat a(3, 3);
    a << -1.3, 0, 0, 0.4, -2, 0, 0.1, 0.2, -0.5;
    const OUModel m(a, Mat::Identity(3, 3));
    const Vec x0 = Vec::Unit(3, 0);
    ASSERT_LT((a.transpose() * x0 + 1.3 * x0).norm(), 1e-15);
    const auto f = cyl({x0}, profiles::linear(Vec::Ones(1)));
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
        const Vec x = random_vector(3, rng);
        EXPECT_NEAR(std::abs(generator_apply(m, f, x) - cplx(-1.3 * x(0))), 0.0, 1e-14);
    }
}

TEST(Generator, QuadraticProfileScalarModel) {
    const OUModel m = scalar_model(-1.0, 1.0);
    const auto f = cyl({Vec::Ones(1)}, profiles::quadratic(0.0, CVec::Zero(1), CMat::Constant(1, 1, 2.0)));
    for (double x : {-2.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(generator_apply(m, f, Vec::Constant(1, x)).real(), 1.0 - 2.0 * x * x, 1e-13);
}

TEST(Generator, ProductProfileMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    const OUModel m(random_stable(4, rng), random_matrix(4, 3, rng));
    Eigen::HouseholderQR<Mat> qr(random_matrix(4, 2, rng));
    const Mat q = qr.householderQ() * Mat::Identity(4, 2);
    CMat h(2, 2);
    h << 0, 1, 1, 0;  // u1 u2
    const auto f = cyl({q.col(0), q.col(1)}, profiles::quadratic(0.0, CVec::Zero(2), h));
    for (int k = 0; k < 10; ++k) {
        const Vec x = random_vector(4, rng);
        const cplx g = generator_apply(m, f, x);
        EXPECT_LE(std::abs(g - generator_fd(m, f, x, 1e-2)), 1e-6 * (1.0 + std::abs(g)));
    }
}

TEST(Mehler, TimeZeroIsIdentity) {
    std::mt19937_64 rng(13);
    const OUModel m(random_stable(3, rng), random_matrix(3, 3, rng));
    const auto f = cyl({random_vector(3, rng)}, profiles::gaussian(Vec::Zero(1), 0.8));
    const Vec x = random_vector(3, rng);
    EXPECT_EQ(mehler_apply(m, f, 0.0, x), f(x));
}

TEST(Mehler, LinearProfileDecaysExponentially) {
    const OUModel m = scalar_model(-1.0, 1.0);
    const auto f = cyl({Vec::Ones(1)}, profiles::linear(Vec::Ones(1)));
    for (double t : {0.1, 1.0, 2.5}) EXPECT_NEAR(mehler_apply(m, f, t, Vec::Constant(1, 1.7)).real(), std::exp(-t) * 1.7, 1e-13);
}

TEST(Mehler, CharacteristicFunctionClosedForm) {
    const OUModel m = scalar_model(-1.0, 1.0);
    const auto f = cyl({Vec::Ones(1)}, profiles::plane_wave(Vec::Ones(1)));
    for (double x : {-1.0, 0.0, 2.0}) {
        // mean x/2, variance 3/8 at t = ln 2
        const cplx expect = std::exp(cplx(0.0, x / 2)) * std::exp(-3.0 / 16.0);
        EXPECT_LT(std::abs(mehler_apply(m, f, std::log(2.0), Vec::Constant(1, x)) - expect), 1e-12);
    }
}

TEST(Mehler, FirstOrderConvergenceToGenerator) {
    std::mt19937_64 rng(14);
    const OUModel m(random_stable(3, rng, 1.0), random_matrix(3, 3, rng));
    const auto f = cyl({random_vector(3, rng)}, profiles::gaussian(Vec::Constant(1, 0.3), 1.1));
    for (int k = 0; k < 3; ++k) {
        const Vec x = 0.5 * random_vector(3, rng);
        const cplx lf = generator_apply(m, f, x);
        auto err = [&](double t) { return std::abs((mehler_apply(m, f, t, x) - f(x)) / t - lf); };
        const double e1 = err(1e-2), e2 = err(5e-3);
        EXPECT_LT(e1, 0.1 * (1.0 + std::abs(lf)));
        EXPECT_GT(e1 / e2, 1.6);
        EXPECT_LT(e1 / e2, 2.4);
    }
}

TEST(Reduce1D, DiagonalExample) {
    const OUModel m = diag_model(-1, -2, Mat::Identity(2, 2));
    const Spec1D s = reduce_1d(m, Vec::Unit(2, 0), -1.0);
    EXPECT_EQ(s.gamma, -1.0);
    EXPECT_EQ(s.q, 1.0);
}

TEST(Reduce1D, DegenerateNoiseDirection) {
    const OUModel m = diag_model(-1, -2, Vec::Unit(2, 0));
    EXPECT_THROW(reduce_1d(m, Vec::Unit(2, 1), -2.0), DegeneracyError);
}

TEST(Reduce1D, RejectsNonEigenvector) {
    const OUModel m = diag_model(-1, -2, Mat::Identity(2, 2));
    EXPECT_THROW(reduce_1d(m, Vec::Ones(2), -1.0), ValidationError);
    EXPECT_THROW(reduce_1d(m, Vec::Unit(2, 0), 1.0), DomainError);
}

TEST(Reduce1D, QMatchesDirectInnerProduct) {
    std::mt19937_64 rng(15);
    // A^T = S diag(gamma, ...) S^{-1}: x0 = S e1
    const Mat s = Mat::Identity(5, 5) + 0.3 * random_matrix(5, 5, rng);
    Mat d = Mat::Zero(5, 5);
    d.diagonal() << -0.8, -1, -1.5, -2, -3;
    const Mat at = s * d * s.inverse();
    const Mat b = random_matrix(5, 5, rng);
    const OUModel m(at.transpose(), b);
    const Vec x0 = s.col(0);
    const Spec1D sp = reduce_1d(m, x0, -0.8);
    const Vec bt = b.transpose() * x0;
    EXPECT_NEAR(sp.q, bt.squaredNorm(), 1e-12 * bt.squaredNorm());
}

TEST(Reduce2D, RotationExample) {
    Mat a(2, 2);
    a << -1, -2, 2, -1;
    const OUModel m(a, Mat::Identity(2, 2));
    CVec x0(2);
    x0 << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
    const Spec2D s = reduce_2d(m, x0, {-1.0, 2.0});
    EXPECT_EQ(s.a, -1.0);
    EXPECT_EQ(s.b, 2.0);
    EXPECT_LT((s.r - 0.5 * Mat::Identity(2, 2)).norm(), 1e-15);
    Mat c(2, 2);
    c << s.a, -s.b, s.b, s.a;
    EXPECT_EQ(s.c, c);
    EXPECT_THROW(reduce_2d(m, x0, {-1.0, 0.0}), DomainError);
}

TEST(VarianceIdentity, Examples) {
    const OUModel m1 = diag_model(-1, -2, Mat::Identity(2, 2));
    const IdentityReport r1 = variance_identity_check(reduce_1d(m1, Vec::Unit(2, 0), -1.0), m1);
    EXPECT_NEAR(r1.lhs, 0.5, 1e-15);
    EXPECT_NEAR(r1.rhs, 0.5, 1e-15);
    EXPECT_TRUE(r1.passed);
    const OUModel m2 = diag_model(-2, -3, Vec(Eigen::Vector2d(2, 1)).asDiagonal());
    const IdentityReport r2 = variance_identity_check(reduce_1d(m2, Vec::Unit(2, 0), -2.0), m2);
    EXPECT_NEAR(r2.lhs, 1.0, 1e-15);
    EXPECT_NEAR(r2.rhs, 1.0, 1e-15);
}

TEST(RinfIdentity, RotationModel) {
    std::mt19937_64 rng(16);
    Mat a(2, 2);
    a << -1, -2, 2, -1;
    const OUModel m(a, Mat::Identity(2, 2) + 0.3 * random_matrix(2, 2, rng));
    CVec x0(2);
    x0 << 1.0, cplx(0.0, 1.0);
    const Spec2D s = reduce_2d(m, x0, {-1.0, 2.0});
    const RinfReport z = rinf_identity_check(s, m, {0.0});
    EXPECT_EQ(z.finite_s_deviation, 0.0);
    const RinfReport r = rinf_identity_check(s, m, {0.1, 0.5, 1.0, 2.0});
    EXPECT_LE(r.finite_s_deviation, 1e-8);
    EXPECT_LE(r.rinf_deviation, 1e-8);
    EXPECT_TRUE(r.passed);
}

TEST(Pushforward, CovarianceOfProjections) {
    const OUModel m1 = diag_model(-1, -2, Mat::Identity(2, 2));
    EXPECT_NEAR(pushforward_law(m1, Vec::Unit(2, 0)).cov(0, 0), 0.5, 1e-15);

    std::mt19937_64 rng(17);
    Mat a(2, 2);
    a << -1, -2, 2, -1;
    const OUModel m2(a, Mat::Identity(2, 2) + 0.3 * random_matrix(2, 2, rng));
    CVec x0(2);
    x0 << 1.0, cplx(0.0, 1.0);
    const Spec2D s = reduce_2d(m2, x0, {-1.0, 2.0});
    Mat fs(2, 2);
    fs << s.h1star, s.h2star;
    EXPECT_LT((pushforward_law(m2, fs).cov - lyapunov_qinf(s.c, s.r)).norm(), 1e-12);

    const OUModel m3(random_stable(4, rng), random_matrix(4, 4, rng));
    EXPECT_LT((pushforward_law(m3, Mat::Identity(4, 4)).cov - stationary_cov(m3)).norm(), 1e-14 * stationary_cov(m3).norm());
}

TEST(Reductions, ScaleEquivariant) {
    const OUModel m1 = diag_model(-1, -2, Mat::Identity(2, 2) + Mat::Constant(2, 2, 0.2));
    const Spec1D s = reduce_1d(m1, Vec::Unit(2, 0), -1.0);
    for (double c : {-3.0, 0.5, 7.0}) {
        const Spec1D sc = reduce_1d(m1, c * Vec::Unit(2, 0), -1.0);
        EXPECT_EQ(sc.gamma, s.gamma);
        EXPECT_NEAR(sc.q, c * c * s.q, 1e-14 * c * c);
        EXPECT_TRUE(variance_identity_check(sc, m1).passed);
    }
    Mat a(2, 2);
    a << -1, -2, 2, -1;
    const OUModel m2(a, Mat::Identity(2, 2));
    CVec x0(2);
    x0 << 1.0, cplx(0.0, 1.0);
    const Spec2D t = reduce_2d(m2, x0, {-1.0, 2.0});
    for (double c : {-2.0, 0.3}) {
        const Spec2D tc = reduce_2d(m2, cplx(c) * x0, {-1.0, 2.0});
        EXPECT_EQ(tc.a, t.a);
        EXPECT_EQ(tc.b, t.b);
        EXPECT_LT((tc.r - c * c * t.r).norm(), 1e-14);
        EXPECT_TRUE(rinf_identity_check(tc, m2, {0.5, 1.0}).passed);
    }
}

TEST(OUModel, InvariantMeasureRequiresStableDrift) {
    const OUModel m = diag_model(-1, 0.5, Mat::Identity(2, 2));
    EXPECT_THROW(stationary_cov(m), StabilityError);
    const OUModel deg = diag_model(-1, -2, Vec::Unit(2, 0));
    EXPECT_THROW(stationary_cov(deg), DegeneracyError);
}
