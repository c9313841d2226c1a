#pragma once

// Stock profiles for cylinder functions.

#include <cmath>
#include <limits>
#include <memory>

#include "oulab/ou_model.hpp"

namespace oulab::profiles {

/// c0 + g.u + 1/2 u^T H u (H symmetrized).
inline ProfilePtr quadratic(cplx c0, CVec g, CMat h) {
    const int k = static_cast<int>(g.size());
    CMat hs = 0.5 * (h + h.transpose());
    return std::make_shared<LambdaProfile>(k, [c0, g = std::move(g), hs = std::move(hs)](const Vec& u) {
        const CVec uc = u.cast<cplx>();
        const CVec hu = hs * uc;
        return Jet{c0 + (g.array() * uc.array()).sum() + 0.5 * (uc.array() * hu.array()).sum(), g + hu, hs};
    }, std::numeric_limits<double>::infinity(), Growth::polynomial);
}

inline ProfilePtr linear(const Vec& coeffs) {
    const auto k = coeffs.size();
    return quadratic(0.0, coeffs.cast<cplx>(), CMat::Zero(k, k));
}

inline ProfilePtr constant(int k, cplx c) { return std::make_shared<LambdaProfile>(k, [k, c](const Vec&) {
        return Jet{c, CVec::Zero(k), CMat::Zero(k, k)};
    }, std::numeric_limits<double>::infinity(), Growth::bounded);
}

/// exp(i xi.u).
inline ProfilePtr plane_wave(const Vec& xi) {
    const int k = static_cast<int>(xi.size());
    return std::make_shared<LambdaProfile>(
        k,
        [xi](const Vec& u) {
            const cplx v = std::exp(cplx(0.0, xi.dot(u)));
            const CVec ixi = cplx(0.0, 1.0) * xi.cast<cplx>();
            return Jet{v, v * ixi, v * (ixi * ixi.transpose())};
        },
        std::numeric_limits<double>::infinity(), Growth::bounded);
}

/// amp * exp(-|u - c|^2 / (2 s^2)).
inline ProfilePtr gaussian(const Vec& center, double width, cplx amp = 1.0) {
    const int k = static_cast<int>(center.size());
    return std::make_shared<LambdaProfile>(
        k,
        [center, width, amp, k](const Vec& u) {
            const Vec d = (u - center) / (width * width);
            const cplx v = amp * std::exp(-0.5 * (u - center).squaredNorm() / (width * width));
            const CMat h = (d * d.transpose() - Mat::Identity(k, k) / (width * width)).cast<cplx>();
            return Jet{v, v * d.cast<cplx>() * -1.0, v * h};
        },
        std::numeric_limits<double>::infinity(), Growth::bounded);
}

/// Smooth compactly supported bump amp * exp(-1 / (1 - |u - c|^2 / R^2)) on the ball of radius R.
inline ProfilePtr bump(const Vec& center, double radius, cplx amp = 1.0) {
    const int k = static_cast<int>(center.size());
    return std::make_shared<LambdaProfile>(
        k,
        [center, radius, amp, k](const Vec& u) {
            const Vec d = u - center;
            const double s = d.squaredNorm() / (radius * radius);
            if (s >= 1.0) return Jet{0.0, CVec::Zero(k), CMat::Zero(k, k)};
            const double om = 1.0 - s;
            const double f = std::exp(-1.0 / om);
            const double f1 = -f / (om * om);                  // df/ds
            const double f2 = f * (2.0 * s - 1.0) / std::pow(om, 4);  // d2f/ds2
            const Vec ds = 2.0 * d / (radius * radius);
            const Mat h = f2 * ds * ds.transpose() + f1 * 2.0 / (radius * radius) * Mat::Identity(k, k);
            return Jet{amp * f, amp * (f1 * ds).cast<cplx>(), amp * h.cast<cplx>()};
        },
        radius + center.norm());
}

}  // namespace oulab::profiles
