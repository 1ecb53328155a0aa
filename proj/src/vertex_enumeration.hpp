#pragma once

#include "ecim/problem.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace ecim::detail {

/// Visits every vertex a * sigma, sigma in {-1, +1}^n, in Gray-code order.
///
/// The visitor receives (sigma, s, Qs) where s = a * sigma. Qs is updated
/// with one column per flip and recomputed from scratch every 4096 vertices to
/// keep the rounding drift bounded.
template <class Visitor>
void for_each_vertex(const Matrix& Q, double amplitude, Visitor&& visit) {
    const auto n = static_cast<std::size_t>(Q.rows());
    std::vector<int> sigma(n, -1);
    Vector s = Vector::Constant(static_cast<Eigen::Index>(n), -amplitude);
    Vector qs = Q * s;
    visit(sigma, s, qs);

    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t index = 1; index < count; ++index) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(index));
        const auto col = static_cast<Eigen::Index>(bit);
        sigma[bit] = -sigma[bit];
        const double delta = 2.0 * amplitude * sigma[bit];
        s[col] = amplitude * sigma[bit];
        if ((index & 0xFFFu) == 0) {
            qs.noalias() = Q * s;
        } else {
            qs.noalias() += delta * Q.col(col);
        }
        visit(sigma, s, qs);
    }
}

}  // namespace ecim::detail
