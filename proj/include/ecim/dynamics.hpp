#pragma once

#include "ecim/problem.hpp"
#include "ecim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace ecim {

/// Step-size sequence beta_k: either constant or beta0 / (k + 1)^r.
class StepSchedule {
public:
    enum class Kind { Constant, PolyDecay };

    static StepSchedule constant(double beta);
    /// Requires beta0 > 0 and r in (0.5, 1], so that sum beta_k diverges and sum beta_k^2 converges.
    static StepSchedule poly_decay(double beta0, double r);

    Kind kind() const noexcept { return kind_; }
    /// beta for Constant, beta0 for PolyDecay.
    double beta() const noexcept { return beta_; }
    double exponent() const noexcept { return exponent_; }

    bool operator==(const StepSchedule&) const = default;

private:
    StepSchedule(Kind kind, double beta, double exponent) : kind_(kind), beta_(beta), exponent_(exponent) {}

    Kind kind_;
    double beta_;
    double exponent_;
};

double schedule_value(const StepSchedule& sched, std::uint64_t k);

struct NoiseModel {
    double sigma_squared = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const NoiseModel&) const = default;
};

enum class ModeKind {
    /// f = alpha s - beta J s; s' = T(f + zeta). Field ignored.
    TransferOriginal,
    /// f = alpha s - beta (Q s + h); s' = T(f + zeta).
    TransferExtended,
    /// s' = clamp(s - beta grad E(s) + zeta).
    Linearized,
    /// f = alpha s - beta (grad E(s) - zeta); s' = T(f).
    TransferNoiseScaled,
    /// s' = clamp(s - beta (grad E(s) - zeta)).
    LinearizedNoiseScaled,
};

std::string_view to_string(ModeKind kind) noexcept;
ModeKind mode_kind_from_string(std::string_view name);

struct IterationMode {
    ModeKind kind = ModeKind::TransferNoiseScaled;
    /// Self-feedback gain; the convergence theory assumes alpha = 1.
    double alpha = 1.0;

    bool is_transfer() const noexcept;
    bool is_noise_scaled() const noexcept;

    bool operator==(const IterationMode&) const = default;
};

struct RunConfig {
    IterationMode mode;
    StepSchedule schedule = StepSchedule::poly_decay(0.5, 0.75);
    NoiseModel noise{0.01, 0};
    std::uint64_t iterations = 0;
    bool record_states = false;
    /// Initial state; the zero vector when absent.
    std::optional<Vector> initial_state;
};

struct Trajectory {
    /// E(s^(k)) for k = 0..K, recorded before step k.
    std::vector<double> energies;
    SpinState final_state;
    std::vector<SpinState> states;
    std::uint64_t seed_used = 0;
    /// Number of Linearized steps whose result had to be projected back into the box.
    std::uint64_t clamp_events = 0;
};

/// Elementwise cos^2(x - pi/4) - 1/2, evaluated as sin(2x) / 2 (same function,
/// but exact at x = 0 and never outside [-1/2, 1/2]).
SpinState transfer(const Eigen::Ref<const Vector>& argument);

inline double transfer_scalar(double x) noexcept { return 0.5 * std::sin(2.0 * x); }

/// Feedback vector of the given mode. `zeta` is only read by the noise-scaled modes.
/// For the linearized modes this is the unprojected next iterate before additive noise.
Vector feedback(const CouplingProblem& p, const SpinState& s, double beta_k, const IterationMode& mode,
                const Eigen::Ref<const Vector>& zeta);

/// One iteration. Draws exactly n Gaussian variates from `rng`.
SpinState step(const CouplingProblem& p, const SpinState& s, std::uint64_t k, const StepSchedule& sched,
               const IterationMode& mode, const NoiseModel& noise, Philox& rng);

Trajectory run(const CouplingProblem& p, const SpinState& s0, const RunConfig& config);

/// Like run(), but the noise stream is seeded with `seed` instead of config.noise.seed,
/// and energies are streamed to `on_energy(k, E)` instead of being stored.
/// Returns the final state and the clamp count; used by the ensemble driver.
struct StreamResult {
    SpinState final_state;
    std::uint64_t clamp_events = 0;
};
StreamResult run_streaming(const CouplingProblem& p, const SpinState& s0, const RunConfig& config,
                           std::uint64_t seed,
                           const std::function<void(std::uint64_t, double)>& on_energy);

/// Resolves config.initial_state (zero vector when unset) against the problem size.
SpinState initial_state(const CouplingProblem& p, const RunConfig& config);

/// Checks the config for admissible values; warns when alpha != 1.
void validate(const RunConfig& config);

/// Sink for non-fatal diagnostics. Defaults to printing on stderr; an empty handler restores that.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace ecim
