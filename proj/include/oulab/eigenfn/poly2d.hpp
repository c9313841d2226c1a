#pragma once

// Polynomial eigenfunctions of L2 for general R: the lattice n1 gamma + n2 conj(gamma).
//
// In z = t1 + i t2,
//   L2 = 1/2 eta d_z^2 + tau d_z d_zbar + 1/2 conj(eta) d_zbar^2 + gamma z d_z + conj(gamma) zbar d_zbar
// with eta = R11 - R22 + 2i R12, tau = R11 + R22, so z^j zbar^k only feeds lower degrees.

#include <memory>
#include <vector>

#include "oulab/eigenfn/eigen2d.hpp"

namespace oulab::eigenfn {

struct PolyEigen2D {
    cplx lambda;
    int n1 = 0, n2 = 0;
    std::vector<std::vector<cplx>> coef;  // coef[j][k] multiplies z^j zbar^k

    Jet jet(const Vec2& t) const {
        const cplx z(t(0), t(1)), zb = std::conj(z);
        const int n = n1 + n2;
        // powers with the convention z^-1 = z^-2 = 0 via index guards
        std::vector<cplx> zp(n + 1, 1.0), zbp(n + 1, 1.0);
        for (int i = 1; i <= n; ++i) {
            zp[i] = zp[i - 1] * z;
            zbp[i] = zbp[i - 1] * zb;
        }
        cplx p = 0.0, pz = 0.0, pzb = 0.0, pzz = 0.0, pzzb = 0.0, pzbzb = 0.0;
        for (int j = 0; j <= n; ++j)
            for (int k = 0; j + k <= n; ++k) {
                const cplx c = coef[j][k];
                if (c == 0.0) continue;
                p += c * zp[j] * zbp[k];
                if (j >= 1) pz += c * double(j) * zp[j - 1] * zbp[k];
                if (k >= 1) pzb += c * double(k) * zp[j] * zbp[k - 1];
                if (j >= 2) pzz += c * double(j * (j - 1)) * zp[j - 2] * zbp[k];
                if (j >= 1 && k >= 1) pzzb += c * double(j * k) * zp[j - 1] * zbp[k - 1];
                if (k >= 2) pzbzb += c * double(k * (k - 1)) * zp[j] * zbp[k - 2];
            }
        const cplx i(0.0, 1.0);
        Jet out;
        out.value = p;
        out.grad = CVec(2);
        out.grad << pz + pzb, i * (pz - pzb);
        out.hess = CMat(2, 2);
        out.hess(0, 0) = pzz + 2.0 * pzzb + pzbzb;
        out.hess(1, 1) = -(pzz - 2.0 * pzzb + pzbzb);
        out.hess(0, 1) = out.hess(1, 0) = i * (pzz - pzbzb);
        return out;
    }

    ProfilePtr profile() const {
        auto self = std::make_shared<PolyEigen2D>(*this);
        return std::make_shared<LambdaProfile>(
            2, [self](const Vec& u) { return self->jet(Vec2(u(0), u(1))); }, std::numeric_limits<double>::infinity(),
            Growth::polynomial);
    }
};

inline PolyEigen2D poly_eigen_2d(const Spec2D& spec, int n1, int n2) {
    if (n1 < 0 || n2 < 0 || n1 + n2 > 10) throw DomainError("poly_eigen_2d: requires n1, n2 >= 0 and n1 + n2 <= 10");
    if (spec.r.rows() != 2 || spec.r.cols() != 2) throw DimensionError("poly_eigen_2d: R must be 2x2");
    const cplx gamma(spec.a, spec.b);
    const cplx eta(spec.r(0, 0) - spec.r(1, 1), 2.0 * spec.r(0, 1));
    const double tau = spec.r(0, 0) + spec.r(1, 1);
    PolyEigen2D pe;
    pe.n1 = n1;
    pe.n2 = n2;
    pe.lambda = double(n1) * gamma + double(n2) * std::conj(gamma);
    const int n = n1 + n2;
    pe.coef.assign(n + 3, std::vector<cplx>(n + 3, 0.0));
    auto& c = pe.coef;
    c[n1][n2] = 1.0;
    // Degrees n - 2, n - 4, ...; the same-degree coefficients other than (n1, n2) vanish.
    for (int d = n - 2; d >= 0; d -= 2)
        for (int j = 0; j <= d; ++j) {
            const int k = d - j;
            const cplx rhs = 0.5 * eta * double((j + 2) * (j + 1)) * c[j + 2][k] +
                             tau * double((j + 1) * (k + 1)) * c[j + 1][k + 1] +
                             0.5 * std::conj(eta) * double((k + 2) * (k + 1)) * c[j][k + 2];
            c[j][k] = rhs / (pe.lambda - double(j) * gamma - double(k) * std::conj(gamma));
        }
    pe.coef.resize(n + 1);
    for (auto& row : pe.coef) row.resize(n + 1);
    return pe;
}

/// psi jet of exp(-1/2 t^T P t) phi from the jet of phi.
inline PsiJet psi_from_phi(const Mat2& p, const Vec2& t, const Jet& j) {
    const double e = std::exp(-0.5 * t.dot(p * t));
    const CVec2 pt = (p * t).cast<cplx>();
    const CVec2 g = j.grad;
    const CMat2 h = j.hess;
    PsiJet out;
    out.value = e * j.value;
    out.grad = e * (g - pt * j.value);
    out.hess = e * (h - pt * g.transpose() - g * pt.transpose() + (pt * pt.transpose() - p.cast<cplx>()) * j.value);
    return out;
}

/// ||(L2 - lambda) phi|| / ||phi|| in L1(nu_inf) over the ellipse |L^{-1} t| <= radius,
/// R_inf = L L^T; the quadrature runs in whitened polar coordinates.
template <class PsiFn>
double whitened_residual_ratio(const Frame2D& frame, cplx lambda, PsiFn&& psi, double radius = 8.0,
                               double panel = 0.25, int n_theta = 32) {
    const Mat2 l = Eigen::LLT<Mat2>(frame.rinf).matrixL();
    double num = 0.0, den = 0.0;
    for (const auto& pt : detail::polar_grid(radius, panel, n_theta)) {
        const Vec2 t = l * pt.t;
        const PsiJet j = psi(t);
        num += pt.w * std::abs(psi_residual(frame, lambda, t, j));
        den += pt.w * std::abs(j.value);
    }
    return num / den;
}

inline double residual_poly_2d(const Spec2D& spec, const PolyEigen2D& pe) {
    const Frame2D frame(spec);
    return whitened_residual_ratio(frame, pe.lambda, [&](const Vec2& t) { return psi_from_phi(frame.p, t, pe.jet(t)); });
}

}  // namespace oulab::eigenfn
