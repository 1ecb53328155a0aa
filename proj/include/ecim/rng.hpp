#pragma once

#include <array>
#include <cstdint>

namespace ecim {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A stream is identified by a 64-bit key; successive blocks are produced by
/// incrementing a 128-bit counter, so any stream can be reproduced from its key
/// alone. Gaussian variates use the Wichura AS241 inverse normal CDF, which makes
/// the sequence identical across compilers and standard libraries.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox(std::uint64_t seed = 0) noexcept;

    /// Raw bijection: ten rounds of Philox on one counter block.
    static Block generate(Block counter, Key key) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Uniform on [lo, hi].
    double uniform(double lo, double hi) noexcept;

    /// Standard normal variate.
    double normal() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    Key key_;
    Block counter_{};
    Block buffer_{};
    int used_ = 4;
};

/// Inverse of the standard normal CDF for p in (0, 1).
double inverse_normal_cdf(double p) noexcept;

/// Seed of the i-th substream of an ensemble.
constexpr std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return base_seed ^ index;
}

}  // namespace ecim
