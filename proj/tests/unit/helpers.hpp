#pragma once

#include "ecim/problem.hpp"
#include "ecim/rng.hpp"

#include <initializer_list>

namespace ecim::test {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline CouplingProblem problem(std::initializer_list<std::initializer_list<double>> J,
                               std::initializer_list<double> h) {
    return CouplingProblem(mat(J), vec(h));
}

// Hand-rolled generators for the property tests.
inline Matrix random_matrix(Philox& rng, std::size_t n, double scale = 1.0) {
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
    return m;
}

inline Vector random_vector(Philox& rng, std::size_t n, double scale = 1.0) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = scale * rng.normal();
    return v;
}

inline Vector random_box_point(Philox& rng, std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = rng.uniform(-0.5, 0.5);
    return v;
}

inline CouplingProblem random_problem(Philox& rng, std::size_t n, bool symmetric = false) {
    Matrix J = random_matrix(rng, n);
    if (symmetric) J = (0.5 * (J + J.transpose())).eval();
    return CouplingProblem(J, random_vector(rng, n));
}

}  // namespace ecim::test
