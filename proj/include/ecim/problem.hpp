#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecim {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Half-width of the relaxed spin box [-1/2, 1/2]^n.
inline constexpr double kBoxHalfWidth = 0.5;

/// An Ising instance: couplings J (not necessarily symmetric) and field h.
///
/// Immutable after construction. The symmetrized coupling Q = (J + J^T) / 2 is
/// cached since it is the Hessian of the relaxed objective and every
/// gradient evaluation needs it.
class CouplingProblem {
public:
    CouplingProblem(Matrix couplings, Vector field, std::optional<std::string> label = std::nullopt);

    std::size_t n() const noexcept { return static_cast<std::size_t>(field_.size()); }
    const Matrix& J() const noexcept { return couplings_; }
    const Vector& h() const noexcept { return field_; }
    const Matrix& Q() const noexcept { return symmetric_; }
    const std::optional<std::string>& label() const noexcept { return label_; }

    bool operator==(const CouplingProblem& other) const;

private:
    Matrix couplings_;
    Vector field_;
    Matrix symmetric_;
    std::optional<std::string> label_;
};

/// A relaxed spin vector confined to [-1/2, 1/2]^n.
class SpinState {
public:
    /// Throws InstanceError if any coordinate is non-finite or outside the box.
    explicit SpinState(Vector values);

    static SpinState zeros(std::size_t n);

    /// Coordinatewise projection onto the box. Sets `clamped` when any coordinate moved.
    static SpinState clamped(Vector values, bool* clamped = nullptr);

    const Vector& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    bool operator==(const SpinState& other) const { return values_ == other.values_; }

private:
    Vector values_;
};

/// Ising spins, each exactly -1 or +1.
class DiscreteSpins {
public:
    explicit DiscreteSpins(std::vector<int> spins);

    const std::vector<int>& values() const noexcept { return spins_; }
    std::size_t size() const noexcept { return spins_.size(); }
    int operator[](std::size_t i) const { return spins_[i]; }

    Vector as_vector() const;

    bool operator==(const DiscreteSpins& other) const { return spins_ == other.spins_; }
    /// Lexicographic order with -1 < +1.
    bool operator<(const DiscreteSpins& other) const { return spins_ < other.spins_; }

private:
    std::vector<int> spins_;
};

enum class Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    NegativeDefinite,
    NegativeSemidefinite,
    Indefinite,
    Zero,
};

std::string_view to_string(Definiteness d) noexcept;

struct SpectralSummary {
    Matrix Q;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    Definiteness definiteness = Definiteness::Zero;
    /// Upper bound on ||grad E(s)||^2 over the box.
    double c_squared = 0.0;
    /// True when c_squared came from vertex enumeration rather than the norm bound.
    bool c_squared_exact = false;
};

/// E(s) = 1/2 s^T J s + h^T s. Defined for any real vector of matching size.
double relaxed_energy(const CouplingProblem& p, const Eigen::Ref<const Vector>& s);
double relaxed_energy(const CouplingProblem& p, const SpinState& s);

/// H(sigma) = 1/2 sum_ij J_ij sigma_i sigma_j + sum_i h_i sigma_i.
double discrete_energy(const CouplingProblem& p, const DiscreteSpins& sigma);

/// grad E(s) = Q s + h.
Vector gradient(const CouplingProblem& p, const Eigen::Ref<const Vector>& s);
Vector gradient(const CouplingProblem& p, const SpinState& s);

/// Largest n for which c^2 is computed by enumerating box vertices.
inline constexpr std::size_t kExactGradientBoundMaxN = 20;
/// Largest n accepted by the dense eigensolver.
inline constexpr std::size_t kSpectralMaxN = 512;

SpectralSummary spectral_summary(const CouplingProblem& p);

/// Tolerance under which an eigenvalue counts as zero.
double zero_eigenvalue_tolerance(double lambda_min, double lambda_max) noexcept;

Definiteness definiteness_from_spectrum(double lambda_min, double lambda_max) noexcept;

/// sgn(s) with sgn(0) = +1.
DiscreteSpins round_to_spins(const SpinState& s);

/// Embed discrete spins as the box vertex sigma / 2.
SpinState vertex_of(const DiscreteSpins& sigma);

}  // namespace ecim
