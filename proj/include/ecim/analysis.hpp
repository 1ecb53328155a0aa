#pragma once

#include "ecim/dynamics.hpp"
#include "ecim/problem.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecim {

/// Per-iteration Monte Carlo estimate of E[E(s^(k)) - E*] over M seeded runs.
struct EnsembleStats {
    std::size_t runs = 0;
    std::uint64_t iterations = 0;
    std::vector<double> mean_gap;
    /// 95% normal-approximation half-widths, z_0.975 * sd / sqrt(M).
    std::vector<double> ci_halfwidth;
    std::uint64_t clamp_events = 0;
    /// E(s^(K)) - E* of each run, in run order.
    std::vector<double> final_gaps;
};

/// Runs M trajectories, run i drawing its noise from substream base_seed ^ i.
/// The reduction order is fixed, so the result does not depend on thread count.
EnsembleStats ensemble_run(const CouplingProblem& p, const SpinState& s0, const RunConfig& config, std::size_t runs,
                           std::uint64_t base_seed, double e_star, std::size_t max_threads = 0);

/// Asymptotic gap floor of the unmodified dynamics,
/// (lambda_max / 2 mu) (beta c^2 + n sigma^2 / beta).
double liminf_bound_original(double lambda_max, double mu, double beta, double c_squared, std::size_t n,
                             double sigma_squared);

/// Floor once the noise is scaled by the step, (lambda_max / 2 mu) beta (c^2 + n sigma^2).
double liminf_bound_modified(double lambda_max, double mu, double beta, double c_squared, std::size_t n,
                             double sigma_squared);

/// floor(initial_gap / (2 beta mu epsilon)): iterations after which the running
/// minimum of the expected gap is within epsilon of the constant-step floor.
std::uint64_t iteration_bound_kappa(double initial_gap, double beta, double mu, double epsilon);

enum class MuSource { UserSupplied, Estimated };
std::string_view to_string(MuSource source) noexcept;
MuSource mu_source_from_string(std::string_view name);

struct BoundReport {
    double lambda_max = 0.0;
    double mu_used = 0.0;
    MuSource mu_source = MuSource::Estimated;
    double c_squared = 0.0;
    double liminf_bound_original = 0.0;
    double liminf_bound_modified = 0.0;
    std::optional<std::uint64_t> kappa;
    std::optional<double> epsilon;

    // Inputs the bounds were evaluated at.
    double beta = 0.0;
    std::size_t n = 0;
    double sigma_squared = 0.0;
    double initial_gap = 0.0;
    ModeKind mode = ModeKind::LinearizedNoiseScaled;
    StepSchedule::Kind schedule_kind = StepSchedule::Kind::Constant;
    /// PL holds on the box and the bound was derived for this mode.
    bool assumption_verified = false;

    /// The floor that applies to `mode`: modified for noise-scaled modes, original otherwise.
    double applicable_bound() const noexcept;
};

/// Evaluates every bound at beta = schedule_value(config.schedule, 0). With a
/// decaying schedule this is beta0, the largest step the run takes.
BoundReport compute_bounds(const SpectralSummary& summary, std::size_t n, const RunConfig& config, double mu,
                           MuSource mu_source, double initial_gap, std::optional<double> epsilon,
                           bool pl_verified);

enum class VerdictKind { Pass, Fail, AssumptionUnverified };
std::string_view to_string(VerdictKind kind) noexcept;

struct Verdict {
    std::string check;
    /// Threshold the observation was compared against.
    double bound = 0.0;
    double observed = 0.0;
    /// |bound - observed|; the direction is given by the verdict.
    double margin = 0.0;
    VerdictKind verdict = VerdictKind::Fail;
    MuSource mu_source = MuSource::Estimated;
};

struct CheckContext {
    MuSource mu_source = MuSource::Estimated;
    /// When false, PASS/FAIL is replaced by ASSUMPTION_UNVERIFIED.
    bool assumption_verified = true;
};

inline constexpr double kDefaultTailFraction = 0.2;

/// liminf is approximated by the minimum of (mean_gap - ci) over the trailing
/// tail_fraction of iterations. PASS when that minimum is at most `bound`.
Verdict verify_gap_bound(const EnsembleStats& stats, double bound, double tail_fraction = kDefaultTailFraction,
                         const CheckContext& ctx = {});

/// PASS when min_{0<=k<=kappa} mean_gap[k] <= bound_value + epsilon + ci at the argmin.
Verdict verify_kappa(const EnsembleStats& stats, double bound_value, std::uint64_t kappa, double epsilon,
                     const CheckContext& ctx = {});

struct RateFit {
    double exponent = 0.0;
    double r_squared = 0.0;
    std::size_t window_begin = 0;
    std::size_t window_end = 0;
};

/// Half-open range of iteration indices.
struct RateWindow {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// The last decade [ (K+1)/10, K+1 ), or [1, K+1) for short runs.
RateWindow default_rate_window(std::uint64_t iterations);

/// Least-squares slope of log(gap[k]) against log(k + 1) over the window.
RateFit rate_fit(std::span<const double> gaps, RateWindow window);
RateFit rate_fit(const EnsembleStats& stats, RateWindow window);

struct RecursionCheck {
    std::size_t holds = 0;
    std::size_t total = 0;
    double fraction() const noexcept { return total ? static_cast<double>(holds) / static_cast<double>(total) : 0.0; }
};

/// Checks mean_gap[k+1] <= (1 - 2 beta_k mu) mean_gap[k] + drift_k + slack * ci[k+1]
/// for every k, where drift_k is lambda_max beta_k^2 (c^2 + n sigma^2) for the
/// noise-scaled dynamics and lambda_max (beta^2 c^2 + n sigma^2) otherwise.
RecursionCheck one_step_recursion(const EnsembleStats& stats, const StepSchedule& schedule, bool noise_scaled,
                                  double lambda_max, double mu, double c_squared, std::size_t n,
                                  double sigma_squared, double slack = 3.0);

}  // namespace ecim
