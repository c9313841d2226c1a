#pragma once

// Gauss-Legendre and Gauss-Hermite rules, computed once per order and cached.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "oulab/errors.hpp"

namespace oulab {

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Order doubling policy for Gauss-Hermite expectations.
struct QuadSpec {
    int min_order = 16;
    int max_order = 512;
    double tol = 1e-10;
};

namespace detail {

// Newton on the Legendre recurrence; nodes on [-1, 1].
inline GaussRule make_gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int its = 0; its < 100; ++its) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

// Physicists' Hermite rule (weight exp(-x^2)) via Newton on the orthonormal
// recurrence, seeded with the usual asymptotic guesses.
inline GaussRule make_gauss_hermite(int n) {
    const double pim4 = 0.7511255444649425;  // pi^(-1/4)
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * r.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * r.nodes[1];
        } else {
            z = 2.0 * z - r.nodes[i - 2];
        }
        double pp = 0.0;
        int its = 0;
        for (; its < 200; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
        }
        if (its >= 200) throw NumericError("gauss_hermite: Newton iteration did not converge");
        r.nodes[i] = z;
        r.nodes[n - 1 - i] = -z;
        r.weights[i] = 2.0 / (pp * pp);
        r.weights[n - 1 - i] = r.weights[i];
    }
    return r;
}

template <class Make>
const GaussRule& cached_rule(std::map<int, GaussRule>& cache, std::mutex& mu, int n, Make make) {
    if (n < 1) throw DomainError("quadrature order must be positive");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

}  // namespace detail

inline const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    return detail::cached_rule(cache, mu, n, detail::make_gauss_legendre);
}

/// Nodes/weights for int exp(-x^2) f(x) dx.
inline const GaussRule& gauss_hermite(int n) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    return detail::cached_rule(cache, mu, n, detail::make_gauss_hermite);
}

/// Integrates f over [lo, hi] with `panels` equal panels of `order`-point Gauss-Legendre.
template <class F>
auto integrate_panels(F&& f, double lo, double hi, int panels, int order = 16) {
    const GaussRule& gl = gauss_legendre(order);
    const double h = (hi - lo) / panels;
    decltype(f(lo)) sum{};
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) sum += (0.5 * h * gl.weights[i]) * f(mid + 0.5 * h * gl.nodes[i]);
    }
    return sum;
}

}  // namespace oulab
