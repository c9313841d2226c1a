#pragma once

// Large-argument behavior of the weighted confluent solutions:
//   f(x) = z^p * S(z),  z = kappa * x^2,  S(z) = sum_k (s1)_k (s2)_k / (k! z^k).

#include <array>
#include <cmath>
#include <complex>

#include "oulab/errors.hpp"
#include "oulab/quadrature.hpp"

namespace oulab::eigenfn {

using cplx = std::complex<double>;

struct PowerTail {
    double kappa = 1.0;
    cplx p = 0.0;
    cplx s1 = 0.0;
    cplx s2 = 0.0;

    /// S, z S'(z), z^2 S''(z).
    std::array<cplx, 3> series(double z) const {
        cplx term = 1.0, s = 1.0, zs1 = 0.0, zs2 = 0.0;
        double last = 1.0;
        for (int k = 0; k < 60; ++k) {
            const cplx next = term * (s1 + double(k)) * (s2 + double(k)) / (double(k + 1) * z);
            const double mag = std::abs(next);
            if (mag > last) break;  // asymptotic series starts diverging
            term = next;
            last = mag;
            const double kk = k + 1;
            s += term;
            zs1 += -kk * term;
            zs2 += kk * (kk + 1) * term;
            if (mag < 1e-17 * std::abs(s)) break;
        }
        return {s, zs1, zs2};
    }

    /// f and its first two x-derivatives; x != 0.
    std::array<cplx, 3> eval(double x) const {
        const double z = kappa * x * x;
        const auto [s, zs1, zs2] = series(z);
        const cplx zp = std::exp(p * std::log(z));
        const cplx f = zp * s;
        const cplx fz = zp / z * (p * s + zs1);                                  // df/dz
        const cplx fzz = zp / (z * z) * (p * (p - 1.0) * s + 2.0 * p * zs1 + zs2);  // d2f/dz2
        const double dz = 2.0 * kappa * x;
        return {f, fz * dz, fzz * dz * dz + fz * 2.0 * kappa};
    }

    /// int_X^inf |f(x)| x^(d-1) dx for X > 0; needs 2 Re p + d < 0.
    double abs_integral(double x_lo, int d) const {
        const double sigma = -(2.0 * p.real() + d);
        if (!(sigma > 0.0)) throw DomainError("PowerTail: tail is not integrable");
        const double z0 = kappa * x_lo * x_lo;
        // x = X v^(-1/sigma) turns the power law into a constant; only |S| varies.
        const GaussRule& gl = gauss_legendre(64);
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double v = 0.5 * (gl.nodes[i] + 1.0);
            const double z = z0 * std::pow(v, -2.0 / sigma);
            acc += 0.5 * gl.weights[i] * std::abs(std::isfinite(z) ? series(z)[0] : cplx(1.0));
        }
        return std::pow(kappa, p.real()) * std::pow(x_lo, 2.0 * p.real() + d) / sigma * acc;
    }
};

}  // namespace oulab::eigenfn
