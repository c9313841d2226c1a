#include <gtest/gtest.h>

#include <cmath>

#include "oulab/builtins.hpp"
#include "oulab/eigenfn/weyl.hpp"
#include "oulab/lift_mc.hpp"

using namespace oulab;
using namespace oulab::eigenfn;

namespace {

Spec2D make_spec(double a, double b, const Mat& r) {
    return Spec2D{a, b, r, rotation_scaling(a, b), Vec::Unit(2, 0), Vec::Unit(2, 1)};
}

Spec2D iso(double a = -1.0, double b = 2.0, double r = 1.0) { return make_spec(a, b, r * Mat::Identity(2, 2)); }

Spec2D general() {
    const auto src = demo2d_general();
    return reduce_2d(src.model, src.x0star, src.gamma);
}

}  // namespace

TEST(Isotropic2D, LambdaGammaIsLinearInZ) {
    const Spec2D s = iso();
    const auto ef = solve_2d_isotropic(s, cplx(-1.0, 2.0));
    EXPECT_EQ(ef.m, 1);
    EXPECT_LE(residual_generator_2d(s, ef), 1e-12);
    // proportional to t1 + i t2
    const Vec2 p(0.7, -0.4), q(-1.3, 0.2);
    const cplx ratio = ef(p) / cplx(p(0), p(1));
    EXPECT_LT(std::abs(ef(q) - ratio * cplx(q(0), q(1))), 1e-10 * std::abs(ef(q)));
}

TEST(Isotropic2D, RadialModeAtTwiceA) {
    const Spec2D s = iso();
    const auto ef = solve_2d_isotropic(s, cplx(-2.0, 0.0));
    EXPECT_EQ(ef.m, 0);
    EXPECT_LE(residual_generator_2d(s, ef), 1e-10);
}

TEST(Isotropic2D, OffLatticeResidual) {
    const Spec2D s = iso();
    const auto ef = solve_2d_isotropic(s, cplx(-0.9, 0.7));
    EXPECT_LE(residual_generator_2d(s, ef), 1e-6);
    EXPECT_TRUE(std::isfinite(ef.l1_norm()));
    EXPECT_LE(residual_semigroup_2d(s, ef, 0.2), 1e-3);
}

TEST(Isotropic2D, Errors) {
    EXPECT_THROW(solve_2d_isotropic(general(), cplx(-1.0, 0.5)), ScopeError);
    EXPECT_THROW(solve_2d_isotropic(iso(), cplx(0.0, 1.0)), DomainError);
    EXPECT_THROW(solve_2d_isotropic(iso(), cplx(0.2, 0.0)), DomainError);
}

TEST(Isotropic2D, DefaultModeRounding) {
    EXPECT_EQ(default_mode(cplx(-1.0, 2.0), 2.0), 1);
    EXPECT_EQ(default_mode(cplx(-1.0, 1.0), 2.0), 0);  // ties to even
    EXPECT_EQ(default_mode(cplx(-1.0, 3.0), 2.0), 2);
    EXPECT_EQ(default_mode(cplx(-1.0, -4.1), 2.0), -2);
    EXPECT_EQ(default_mode(cplx(-1.0, 5.0), 0.0), 0);
}

TEST(Poly2D, FirstOrderAreZAndZbar) {
    const Spec2D s = general();
    const Vec2 t(0.3, -1.1);
    const auto z = poly_eigen_2d(s, 1, 0), zb = poly_eigen_2d(s, 0, 1);
    EXPECT_EQ(z.jet(t).value, cplx(0.3, -1.1));
    EXPECT_EQ(zb.jet(t).value, cplx(0.3, 1.1));
    EXPECT_EQ(z.lambda, cplx(s.a, s.b));
    EXPECT_EQ(zb.lambda, cplx(s.a, -s.b));
}

TEST(Poly2D, LatticeResidualsGeneralR) {
    const Spec2D s = general();
    EXPECT_LE(residual_poly_2d(s, poly_eigen_2d(s, 1, 1)), 1e-10);
    for (auto [n1, n2] : {std::pair{2, 0}, {0, 3}, {2, 2}, {4, 1}})
        EXPECT_LE(residual_poly_2d(s, poly_eigen_2d(s, n1, n2)), 1e-10) << n1 << " " << n2;
    EXPECT_THROW(poly_eigen_2d(s, 6, 5), DomainError);
}

// Pointwise generator identity against the shared reduced generator.
TEST(Poly2D, MatchesReducedGenerator) {
    const Spec2D s = general();
    const auto pe = poly_eigen_2d(s, 2, 1);
    const auto prof = pe.profile();
    for (const Vec2 t : {Vec2(0.1, 0.2), Vec2(-1.5, 0.8), Vec2(2.0, -2.5)}) {
        const cplx lhs = reduced_generator_2d(s, *prof, t), rhs = pe.lambda * pe.jet(t).value;
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Weyl, LatticePointUsesPolynomial) {
    const Spec2D s = general();
    const auto rep = weyl_residual_minimize(s, cplx(s.a, s.b) + cplx(s.a, -s.b));
    EXPECT_LE(rep.gen_residual, 1e-6);
    EXPECT_TRUE(rep.used_polynomial);
    EXPECT_TRUE(rep.passed);
}

TEST(Weyl, GridPointBelowThresholdWithMonotoneHistory) {
    const Spec2D s = general();
    const auto rep = weyl_residual_minimize(s, cplx(-0.9, 0.7));
    EXPECT_LE(rep.gen_residual, 0.1);
    ASSERT_FALSE(rep.history.empty());
    for (std::size_t i = 1; i < rep.history.size(); ++i) EXPECT_LE(rep.history[i], rep.history[i - 1]);
}

TEST(Weyl, IsotropicNoWorseThanConstructive) {
    const Spec2D s = iso();
    const cplx lambda(-1.3, 1.6);
    const auto ef = solve_2d_isotropic(s, lambda);
    const double constructive = residual_generator_2d(s, ef);
    const auto rep = weyl_residual_minimize(s, lambda);
    EXPECT_LE(rep.gen_residual, 1.1 * constructive + 1e-12);
}

TEST(Weyl, NearBoundaryIsFinite) {
    const auto rep = weyl_residual_minimize(general(), cplx(-0.05, 0.3));
    EXPECT_TRUE(std::isfinite(rep.gen_residual));
    EXPECT_THROW(weyl_residual_minimize(general(), cplx(0.0, 0.3)), DomainError);
}

// A 1D eigenfunction of (a, r) lifted along t1 misses the 2D generator by exactly
// -b t2 phi'(t1), so the defect is linear in b as the rotation switches off.
TEST(Degeneracy, OneDimensionalLimitAsRotationVanishes) {
    const double a = -1.0, r = 1.0;
    const cplx lambda(-1.4, 0.0);
    const auto ef = solve_1d(Spec1D{a, r, Vec::Ones(1)}, lambda);
    const auto prof1 = std::make_shared<LambdaProfile>(2, [&ef](const Vec& u) {
        const auto [f, df, d2f] = ef.derivs(u(0));
        Jet j{f, CVec::Zero(2), CMat::Zero(2, 2)};
        j.grad(0) = df;
        j.hess(0, 0) = d2f;
        return j;
    });
    const std::vector<Vec2> probes{Vec2(0.3, 0.5), Vec2(-1.2, 1.0), Vec2(0.8, -2.0), Vec2(1.7, 0.1)};
    double prev = 0.0;
    for (double b : {1e-2, 1e-3, 1e-4}) {
        const Spec2D s = iso(a, b, r);
        double worst = 0.0, worst_scaled = 0.0;
        for (const auto& t : probes) {
            const cplx defect = reduced_generator_2d(s, *prof1, t) - lambda * ef(t(0));
            worst = std::max(worst, std::abs(defect) / std::max(1.0, std::abs(ef(t(0)))));
            worst_scaled = std::max(worst_scaled, std::abs(defect + b * t(1) * ef.derivs(t(0))[1]));
        }
        EXPECT_LE(worst, 10.0 * b) << b;
        EXPECT_LE(worst_scaled, 1e-7) << b;  // only the rotation term remains
        if (prev > 0.0) EXPECT_NEAR(prev / worst, 10.0, 0.5);
        prev = worst;
    }
    // the radial 2D solution stays well-defined in the same limit
    const auto ef2 = solve_2d_isotropic(iso(a, 1e-3, r), cplx(-2.0, 0.0));
    EXPECT_EQ(ef2.m, 0);
    EXPECT_LE(residual_generator_2d(iso(a, 1e-3, r), ef2), 1e-8);
}

// The m = 0 radial factor of phi is Kummer's M(lambda / 2|a|, 1, kappa rho^2) whatever b is.
TEST(Degeneracy, RadialModeZeroIsKummerAndIndependentOfRotation) {
    const cplx lambda(-0.7, 0.4);
    const cplx big_a = lambda / 2.0;  // |a| = 1
    auto kummer = [&](double z) {
        cplx term = 1.0, sum = 1.0;
        for (int j = 0; j < 400 && std::abs(term) > 1e-18 * std::abs(sum); ++j) {
            term *= (big_a + double(j)) / double((j + 1) * (j + 1)) * z;
            sum += term;
        }
        return sum;
    };
    const auto slow = solve_2d_isotropic(iso(-1.0, 1e-3, 1.0), lambda, 0);
    const auto fast = solve_2d_isotropic(iso(-1.0, 2.0, 1.0), lambda, 0);
    const Vec2 origin = Vec2::Zero();
    for (double rho : {0.02, 0.5, 1.3, 2.2, 3.0}) {
        const Vec2 t(rho * std::cos(0.4), rho * std::sin(0.4));
        const cplx ratio = slow(t) / slow(origin);
        EXPECT_LE(std::abs(ratio - kummer(rho * rho)), 1e-7 * std::abs(ratio)) << rho;
        EXPECT_LE(std::abs(fast(t) - slow(t)), 1e-9 * std::abs(slow(t))) << rho;
    }
}

TEST(LpNorms2D, DichotomyOffLattice) {
    const Spec2D s = iso();
    const auto ef = solve_2d_isotropic(s, cplx(-1.5, 0.0));
    const double sigma = 1.0 / std::sqrt(2.0 * ef.kappa());
    const auto l2 = lp_truncated_norms_2d(ef, 2.0, {4.0 * sigma, 8.0 * sigma, 12.0 * sigma});
    EXPECT_GT(l2[2] / l2[1], 10.0);
    const auto l1 = lp_truncated_norms_2d(ef, 1.0, {4.0 * sigma, 8.0 * sigma, 12.0 * sigma});
    EXPECT_LT(l1[2] - l1[1], l1[1] - l1[0]);
    EXPECT_LT(l1[2], 2.0 * l1[1]);
    EXPECT_TRUE(std::isfinite(ef.l1_norm()));
}

TEST(Report2D, PassFlag) {
    const Spec2D s = iso();
    const auto ef = solve_2d_isotropic(s, cplx(-1.0, 2.0));
    const auto rep = report_2d(s, ef, {0.1});
    EXPECT_TRUE(rep.passed);
    EXPECT_EQ(rep.lp_truncated_norms.size(), 4u);
    EXPECT_FALSE(report_2d(s, ef, {0.1}, 1e-30).passed);
}
