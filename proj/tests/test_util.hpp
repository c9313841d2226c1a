#pragma once

#include <random>

#include "oulab/gauss_core.hpp"

namespace testutil {

using oulab::Mat;
using oulab::Vec;

inline Mat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
    return m;
}

inline Vec random_vector(Eigen::Index n, std::mt19937_64& rng) { return random_matrix(n, 1, rng); }

/// G / sqrt(n) - shift * I: spectrum roughly in the disc of radius 1 around -shift.
inline Mat random_stable(Eigen::Index n, std::mt19937_64& rng, double shift = 2.0) {
    return random_matrix(n, n, rng) / std::sqrt(double(n)) - shift * Mat::Identity(n, n);
}

}  // namespace testutil
