#pragma once

// Dense linear algebra and centered Gaussian measure primitives.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "oulab/errors.hpp"
#include "oulab/quadrature.hpp"

namespace oulab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

namespace detail {

inline void require_square(const Mat& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError(std::string(what) + ": matrix must be square and non-empty, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

inline void require_finite(const Mat& a, const char* what) {
    if (!a.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

inline double scale_of(const Mat& a) { return std::max(a.norm(), 1e-300); }

inline void require_symmetric(const Mat& a, const char* what, double rel = 1e-12) {
    if ((a - a.transpose()).norm() > rel * scale_of(a))
        throw ValidationError(std::string(what) + ": matrix is not symmetric");
}

}  // namespace detail

/// exp(tA) by scaling-and-squaring with a Pade core.
inline Mat mat_exp(const Mat& a, double t) {
    detail::require_square(a, "mat_exp");
    if (t == 0.0) return Mat::Identity(a.rows(), a.cols());
    return Mat(a * t).exp();
}

/// Max real part over the eigenvalues of A.
inline double spectral_abscissa(const Mat& a) {
    detail::require_square(a, "spectral_abscissa");
    detail::require_finite(a, "spectral_abscissa");
    Eigen::EigenSolver<Mat> es(a, false);
    if (es.info() != Eigen::Success) throw NumericError("spectral_abscissa: eigenvalue iteration did not converge");
    return es.eigenvalues().real().maxCoeff();
}

/// Finite-horizon controllability Gramian Q_t = int_0^t exp(sA) Q exp(sA^T) ds.
///
/// Composite 16-point Gauss-Legendre on [0, t]; the panel count doubles until two
/// successive estimates differ by less than `tol` relative to the estimate.
inline Mat gramian_qt(const Mat& a, const Mat& q, double t, double tol = 1e-12) {
    detail::require_square(a, "gramian_qt");
    detail::require_square(q, "gramian_qt");
    if (a.rows() != q.rows()) throw DimensionError("gramian_qt: A and Q differ in size");
    if (!(t >= 0.0)) throw DomainError("gramian_qt: horizon must be non-negative");
    detail::require_symmetric(q, "gramian_qt");
    const auto n = a.rows();
    if (t == 0.0) return Mat::Zero(n, n);

    const GaussRule& gl = gauss_legendre(16);
    auto estimate = [&](int panels) {
        Mat sum = Mat::Zero(n, n);
        const double h = t / panels;
        const Mat step = mat_exp(a, h);
        std::vector<Mat> offsets;
        for (double x : gl.nodes) offsets.push_back(mat_exp(a, 0.5 * h * (x + 1.0)));
        Mat left = Mat::Identity(n, n);  // exp(A * panel start)
        for (int p = 0; p < panels; ++p) {
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const Mat e = left * offsets[i];
                sum += (0.5 * h * gl.weights[i]) * (e * q * e.transpose());
            }
            left = left * step;
        }
        return Mat(0.5 * (sum + sum.transpose()));
    };

    int panels = std::max(1, static_cast<int>(std::ceil(t * std::max(1.0, a.norm()) / 4.0)));
    Mat prev = estimate(panels);
    for (int iter = 0; iter < 16; ++iter) {
        panels *= 2;
        Mat next = estimate(panels);
        const double diff = (next - prev).norm();
        if (diff <= tol * std::max(next.norm(), 1e-300) || diff == 0.0) return next;
        prev = std::move(next);
    }
    throw AccuracyError("gramian_qt: quadrature did not converge");
}

/// Solves A S + S A^T + Q = 0 for stable A.
///
/// Kronecker (vectorized) system for n <= 16, complex Schur (Bartels-Stewart) above.
inline Mat lyapunov_qinf(const Mat& a, const Mat& q) {
    detail::require_square(a, "lyapunov_qinf");
    detail::require_square(q, "lyapunov_qinf");
    if (a.rows() != q.rows()) throw DimensionError("lyapunov_qinf: A and Q differ in size");
    detail::require_symmetric(q, "lyapunov_qinf");
    const double abscissa = spectral_abscissa(a);
    if (!(abscissa < 0.0))
        throw StabilityError("lyapunov_qinf: drift is not stable (spectral abscissa " + std::to_string(abscissa) +
                             "), no invariant measure exists");
    const auto n = a.rows();
    Mat sigma;
    if (n <= 16) {
        const Mat id = Mat::Identity(n, n);
        const Mat k = Eigen::kroneckerProduct(id, a) + Eigen::kroneckerProduct(a, id);
        const Vec rhs = -Eigen::Map<const Vec>(q.data(), n * n);
        const Vec x = k.fullPivLu().solve(rhs);
        sigma = Eigen::Map<const Mat>(x.data(), n, n);
    } else {
        Eigen::ComplexSchur<Mat> schur(a);
        if (schur.info() != Eigen::Success) throw NumericError("lyapunov_qinf: Schur decomposition failed");
        const CMat& u = schur.matrixU();
        const CMat& tri = schur.matrixT();
        const CMat f = u.adjoint() * q.cast<cplx>() * u;
        // T Y + Y T^* = -F; column j of Y couples only to columns k > j.
        CMat y = CMat::Zero(n, n);
        for (Eigen::Index j = n - 1; j >= 0; --j) {
            CVec rhs = -f.col(j);
            for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(tri(j, k)) * y.col(k);
            CMat lhs = tri;
            lhs.diagonal().array() += std::conj(tri(j, j));
            y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
        }
        sigma = (u * y * u.adjoint()).real();
    }
    return 0.5 * (sigma + sigma.transpose());
}

/// Trace of v -> <v,y1> x1 + <v,y2> x2.
inline double rank2_trace(const Vec& x1, const Vec& y1, const Vec& x2, const Vec& y2) {
    const auto n = x1.size();
    if (y1.size() != n || x2.size() != n || y2.size() != n)
        throw DimensionError("rank2_trace: vectors must share one dimension");
    return x1.dot(y1) + x2.dot(y2);
}

/// Centered Gaussian law on R^dim.
struct GaussianMeasure {
    Mat cov;

    GaussianMeasure() = default;
    explicit GaussianMeasure(Mat c) : cov(std::move(c)) { validate(); }

    Eigen::Index dim() const { return cov.rows(); }

    void validate() const {
        detail::require_square(cov, "GaussianMeasure");
        detail::require_finite(cov, "GaussianMeasure");
        const double scale = cov.norm();
        if ((cov - cov.transpose()).norm() > 1e-12 * scale)
            throw ValidationError("GaussianMeasure: covariance is not symmetric");
        if (scale == 0.0) return;
        Eigen::SelfAdjointEigenSolver<Mat> es(cov, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * scale)
            throw ValidationError("GaussianMeasure: covariance is not positive semidefinite");
    }
};

/// Symmetric square root factor L with L L^T = cov. Eigenvalues down to
/// -1e-10 * trace are clipped to zero; anything more negative is degenerate input.
inline Mat psd_factor(const Mat& cov) {
    detail::require_square(cov, "psd_factor");
    const double tr = std::abs(cov.trace());
    if (tr == 0.0 && cov.norm() == 0.0) return Mat::Zero(cov.rows(), cov.cols());
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (cov + cov.transpose()));
    if (es.info() != Eigen::Success) throw NumericError("psd_factor: eigen decomposition failed");
    Vec ev = es.eigenvalues();
    if (ev.minCoeff() < -1e-10 * tr)
        throw DegeneracyError("psd_factor: covariance has a negative eigenvalue beyond round-off");
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

/// splitmix64 finalizer; turns structured seeds (seed ^ batch) into decorrelated streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// `count` i.i.d. draws of N(0, cov), one per row. Deterministic in `seed`.
inline Mat gauss_sample(const GaussianMeasure& m, Eigen::Index count, std::uint64_t seed) {
    if (count < 1) throw DomainError("gauss_sample: count must be positive");
    const Mat l = psd_factor(m.cov);
    const auto d = m.dim();
    std::mt19937_64 rng(mix_seed(seed));
    std::normal_distribution<double> normal;
    Mat z(count, d);
    for (Eigen::Index i = 0; i < count; ++i)
        for (Eigen::Index j = 0; j < d; ++j) z(i, j) = normal(rng);
    return z * l.transpose();
}

}  // namespace oulab
