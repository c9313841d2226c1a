#pragma once

// Builtin demonstration models and random generators with a prescribed eigenpair of A^T.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oulab/ou_model.hpp"

namespace oulab {

/// A model with the eigenpair of A^T used for its reduction.
struct ModelSource {
    std::string name;
    OUModel model;
    cplx gamma;
    CVec x0star;

    bool complex_pair() const { return gamma.imag() != 0.0; }
};

namespace detail {

inline Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    return m;
}

inline Mat random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Mat> qr(gaussian_matrix(n, n, rng));
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
}

/// Stable k x k block with spectral abscissa <= -0.5.
inline Mat random_stable_block(Eigen::Index k, std::mt19937_64& rng) {
    if (k == 0) return Mat(0, 0);
    const Mat g = gaussian_matrix(k, k, rng);
    const Mat sym = g * g.transpose() / double(k);
    const Mat skew = gaussian_matrix(k, k, rng);
    return -(0.5 * Mat::Identity(k, k) + 0.5 * sym) + 0.5 * (skew - skew.transpose()) / std::sqrt(double(k));
}

inline Mat block_diag(const Mat& a, const Mat& b) {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

}  // namespace detail

/// A = S T S^{-1} with T block lower triangular, first row (gamma, 0, ..., 0);
/// then A^T x0* = gamma x0* for x0* = S^{-T} e1. B is a random n x n map.
inline ModelSource random_real_model(Eigen::Index n, double gamma, std::uint64_t seed) {
    if (n < 1) throw DimensionError("random_real_model: n must be positive");
    if (!(gamma < 0.0)) throw DomainError("random_real_model: gamma must be negative");
    std::mt19937_64 rng(mix_seed(seed));
    Mat t = Mat::Zero(n, n);
    t(0, 0) = gamma;
    if (n > 1) {
        t.bottomRightCorner(n - 1, n - 1) = detail::random_stable_block(n - 1, rng);
        t.block(1, 0, n - 1, 1) = 0.5 * detail::gaussian_matrix(n - 1, 1, rng);
    }
    const Mat s = Mat::Identity(n, n) + 0.3 * detail::gaussian_matrix(n, n, rng) / std::sqrt(double(n));
    const Mat a = s * t * s.inverse();
    const Mat b = detail::gaussian_matrix(n, n, rng) / std::sqrt(double(n)) + 0.5 * Mat::Identity(n, n);
    const Vec x0 = s.transpose().fullPivLu().solve(Vec::Unit(n, 0));
    return {"random_real", OUModel(a, b), cplx(gamma, 0.0), x0.cast<cplx>()};
}

/// Same construction with a leading 2x2 block [[a, -b], [b, a]]; gamma = a + i b and
/// x0* = S^{-T} (e1 + i e2).
inline ModelSource random_complex_model(Eigen::Index n, double a, double b, std::uint64_t seed) {
    if (n < 2) throw DimensionError("random_complex_model: n must be at least 2");
    if (!(a < 0.0) || b == 0.0) throw DomainError("random_complex_model: requires a < 0 and b != 0");
    std::mt19937_64 rng(mix_seed(seed));
    Mat t = Mat::Zero(n, n);
    t.topLeftCorner(2, 2) = rotation_scaling(a, b);
    if (n > 2) {
        t.bottomRightCorner(n - 2, n - 2) = detail::random_stable_block(n - 2, rng);
        t.block(2, 0, n - 2, 2) = 0.5 * detail::gaussian_matrix(n - 2, 2, rng);
    }
    const Mat s = Mat::Identity(n, n) + 0.3 * detail::gaussian_matrix(n, n, rng) / std::sqrt(double(n));
    const Mat am = s * t * s.inverse();
    const Mat bm = detail::gaussian_matrix(n, n, rng) / std::sqrt(double(n)) + 0.5 * Mat::Identity(n, n);
    const auto lu = s.transpose().fullPivLu();
    CVec x0(n);
    x0.real() = lu.solve(Vec::Unit(n, 0));
    x0.imag() = lu.solve(Vec::Unit(n, 1));
    return {"random_complex", OUModel(am, bm), cplx(a, b), x0};
}

/// gamma = -1, q = 1 embedded orthogonally in R^8.
inline ModelSource demo1d() {
    std::mt19937_64 rng(mix_seed(101));
    const Mat u = detail::random_orthogonal(8, rng);
    const Mat t = detail::block_diag(Mat::Constant(1, 1, -1.0), detail::random_stable_block(7, rng));
    const Mat b = detail::block_diag(Mat::Identity(1, 1), 0.7 * Mat::Identity(7, 7) + 0.2 * detail::gaussian_matrix(7, 7, rng));
    return {"demo1d", OUModel(u * t * u.transpose(), u * b), cplx(-1.0, 0.0), u.col(0).cast<cplx>()};
}

namespace detail {

inline ModelSource demo2d_with(const std::string& name, double a, double b, const Mat& r, std::uint64_t seed) {
    std::mt19937_64 rng(mix_seed(seed));
    const Mat u = random_orthogonal(8, rng);
    const Mat t = block_diag(rotation_scaling(a, b), random_stable_block(6, rng));
    // h_i* = U e_i / sqrt(2), so R = B_top B_top^T / 2.
    const Mat top = Eigen::LLT<Mat>(2.0 * r).matrixL();
    const Mat bm = block_diag(top, 0.7 * Mat::Identity(6, 6) + 0.2 * gaussian_matrix(6, 6, rng));
    CVec x0(8);
    x0.real() = u.col(0) / std::sqrt(2.0);
    x0.imag() = u.col(1) / std::sqrt(2.0);
    return {name, OUModel(u * t * u.transpose(), u * bm), cplx(a, b), x0};
}

}  // namespace detail

/// a = -1, b = 2, R = I embedded in R^8.
inline ModelSource demo2d_iso() { return detail::demo2d_with("demo2d_iso", -1.0, 2.0, Mat::Identity(2, 2), 202); }

/// a = -1, b = 1 with a random anisotropic R (eigenvalue ratio 1.12 / 0.88, random
/// orientation and scale, fixed seed).
inline ModelSource demo2d_general() {
    std::mt19937_64 rng(mix_seed(303));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double angle = 2.0 * std::numbers::pi * unif(rng);
    const double scale = 0.8 + 0.45 * unif(rng);
    Mat rot(2, 2);
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Mat r = scale * rot * Vec(Eigen::Vector2d(1.12, 0.88)).asDiagonal() * rot.transpose();
    return detail::demo2d_with("demo2d_general", -1.0, 1.0, r, 304);
}

/// n = 64 with a real eigenpair gamma = -0.7.
inline ModelSource bigmodel() {
    ModelSource s = random_real_model(64, -0.7, 404);
    s.name = "bigmodel";
    return s;
}

inline std::vector<std::string> builtin_names() { return {"demo1d", "demo2d_iso", "demo2d_general", "bigmodel"}; }

inline ModelSource builtin(const std::string& name) {
    if (name == "demo1d") return demo1d();
    if (name == "demo2d_iso") return demo2d_iso();
    if (name == "demo2d_general") return demo2d_general();
    if (name == "bigmodel") return bigmodel();
    throw ConfigError("unknown builtin model '" + name + "' (expected demo1d, demo2d_iso, demo2d_general, bigmodel)");
}

}  // namespace oulab
