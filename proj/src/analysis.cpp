#include "ecim/analysis.hpp"

#include "ecim/error.hpp"
#include "ecim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecim {

namespace {

// Runs per reduction chunk. Fixed so the floating-point summation order is
// independent of how many threads execute the chunks.
constexpr std::size_t kChunkRuns = 8;
constexpr double kZ95 = 1.959963984540054;

struct Moments {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;
};

void merge_into(Moments& acc, const Moments& part) {
    if (part.count == 0) return;
    if (acc.count == 0) {
        acc = part;
        return;
    }
    const double na = static_cast<double>(acc.count);
    const double nb = static_cast<double>(part.count);
    const double total = na + nb;
    for (std::size_t k = 0; k < acc.mean.size(); ++k) {
        const double delta = part.mean[k] - acc.mean[k];
        acc.mean[k] += delta * nb / total;
        acc.m2[k] += part.m2[k] + delta * delta * na * nb / total;
    }
    acc.count += part.count;
}

void require_bound_inputs(double mu, double beta, double c_squared, double sigma_squared) {
    if (!(mu > 0.0)) throw ParameterError("mu must be positive, got " + std::to_string(mu));
    if (!(beta > 0.0)) throw ParameterError("beta must be positive, got " + std::to_string(beta));
    if (!(c_squared >= 0.0)) throw ParameterError("c^2 must be nonnegative");
    if (!(sigma_squared >= 0.0)) throw ParameterError("sigma^2 must be nonnegative");
}

VerdictKind judge(bool pass, const CheckContext& ctx) {
    if (!ctx.assumption_verified) return VerdictKind::AssumptionUnverified;
    return pass ? VerdictKind::Pass : VerdictKind::Fail;
}

}  // namespace

EnsembleStats ensemble_run(const CouplingProblem& p, const SpinState& s0, const RunConfig& config, std::size_t runs,
                           std::uint64_t base_seed, double e_star, std::size_t max_threads) {
    if (runs < 2) throw ParameterError("an ensemble needs at least 2 runs, got " + std::to_string(runs));
    validate(config);
    const std::size_t length = config.iterations + 1;
    const std::size_t chunks = (runs + kChunkRuns - 1) / kChunkRuns;

    std::vector<Moments> parts(chunks);
    std::vector<double> final_gaps(runs);
    std::vector<std::uint64_t> clamps(runs, 0);

    parallel_for(
        chunks,
        [&](std::size_t c) {
            Moments& m = parts[c];
            m.mean.assign(length, 0.0);
            m.m2.assign(length, 0.0);
            const std::size_t first = c * kChunkRuns;
            const std::size_t last = std::min(runs, first + kChunkRuns);
            for (std::size_t run = first; run < last; ++run) {
                const double weight = 1.0 / static_cast<double>(++m.count);
                const auto result = run_streaming(p, s0, config, substream_seed(base_seed, run),
                                                  [&](std::uint64_t k, double energy) {
                                                      const double gap = energy - e_star;
                                                      const double delta = gap - m.mean[k];
                                                      m.mean[k] += delta * weight;
                                                      m.m2[k] += delta * (gap - m.mean[k]);
                                                      if (k + 1 == length) final_gaps[run] = gap;
                                                  });
                clamps[run] = result.clamp_events;
            }
        },
        max_threads);

    Moments total;
    for (const auto& part : parts) merge_into(total, part);

    EnsembleStats out;
    out.runs = runs;
    out.iterations = config.iterations;
    out.mean_gap = std::move(total.mean);
    out.ci_halfwidth.resize(length);
    const double m = static_cast<double>(runs);
    for (std::size_t k = 0; k < length; ++k) {
        const double variance = std::max(0.0, total.m2[k] / (m - 1.0));
        out.ci_halfwidth[k] = kZ95 * std::sqrt(variance / m);
    }
    for (auto c : clamps) out.clamp_events += c;
    out.final_gaps = std::move(final_gaps);
    return out;
}

double liminf_bound_original(double lambda_max, double mu, double beta, double c_squared, std::size_t n,
                             double sigma_squared) {
    require_bound_inputs(mu, beta, c_squared, sigma_squared);
    return lambda_max / (2.0 * mu) * (beta * c_squared + static_cast<double>(n) * sigma_squared / beta);
}

double liminf_bound_modified(double lambda_max, double mu, double beta, double c_squared, std::size_t n,
                             double sigma_squared) {
    require_bound_inputs(mu, beta, c_squared, sigma_squared);
    return lambda_max / (2.0 * mu) * beta * (c_squared + static_cast<double>(n) * sigma_squared);
}

std::uint64_t iteration_bound_kappa(double initial_gap, double beta, double mu, double epsilon) {
    if (!(initial_gap >= 0.0) || !std::isfinite(initial_gap)) {
        throw ParameterError("initial gap must be finite and nonnegative, got " + std::to_string(initial_gap));
    }
    if (!(beta > 0.0)) throw ParameterError("beta must be positive, got " + std::to_string(beta));
    if (!(mu > 0.0)) throw ParameterError("mu must be positive, got " + std::to_string(mu));
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be positive, got " + std::to_string(epsilon));

    const double ratio = initial_gap / (2.0 * beta * mu * epsilon);
    double whole = std::floor(ratio);
    // A quotient that is an integer in exact arithmetic can land one ulp low.
    if (whole + 1.0 - ratio <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, ratio)) whole += 1.0;
    return static_cast<std::uint64_t>(whole);
}

std::string_view to_string(MuSource source) noexcept {
    return source == MuSource::UserSupplied ? "user_supplied" : "estimated";
}

MuSource mu_source_from_string(std::string_view name) {
    if (name == "user_supplied") return MuSource::UserSupplied;
    if (name == "estimated") return MuSource::Estimated;
    throw ParameterError("unknown mu source '" + std::string(name) + "'");
}

double BoundReport::applicable_bound() const noexcept {
    return mode == ModeKind::TransferNoiseScaled || mode == ModeKind::LinearizedNoiseScaled
               ? liminf_bound_modified
               : liminf_bound_original;
}

BoundReport compute_bounds(const SpectralSummary& summary, std::size_t n, const RunConfig& config, double mu,
                           MuSource mu_source, double initial_gap, std::optional<double> epsilon,
                           bool pl_verified) {
    BoundReport r;
    r.lambda_max = summary.lambda_max;
    r.mu_used = mu;
    r.mu_source = mu_source;
    r.c_squared = summary.c_squared;
    r.beta = schedule_value(config.schedule, 0);
    r.n = n;
    r.sigma_squared = config.noise.sigma_squared;
    r.initial_gap = initial_gap;
    r.mode = config.mode.kind;
    r.schedule_kind = config.schedule.kind();
    // The gap bounds are derived for the linearized iteration only.
    r.assumption_verified = pl_verified && !config.mode.is_transfer();
    r.liminf_bound_original = liminf_bound_original(r.lambda_max, mu, r.beta, r.c_squared, n, r.sigma_squared);
    r.liminf_bound_modified = liminf_bound_modified(r.lambda_max, mu, r.beta, r.c_squared, n, r.sigma_squared);
    if (epsilon) {
        r.epsilon = epsilon;
        r.kappa = iteration_bound_kappa(std::max(0.0, initial_gap), r.beta, mu, *epsilon);
    }
    return r;
}

std::string_view to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Pass: return "PASS";
        case VerdictKind::Fail: return "FAIL";
        case VerdictKind::AssumptionUnverified: return "ASSUMPTION_UNVERIFIED";
    }
    return "FAIL";
}

Verdict verify_gap_bound(const EnsembleStats& stats, double bound, double tail_fraction, const CheckContext& ctx) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ParameterError("tail fraction must lie in (0, 1], got " + std::to_string(tail_fraction));
    }
    const std::size_t length = stats.mean_gap.size();
    if (length == 0) throw ParameterError("ensemble statistics are empty");
    const auto tail = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(length))));

    double observed = std::numeric_limits<double>::infinity();
    for (std::size_t k = length - std::min(tail, length); k < length; ++k) {
        observed = std::min(observed, stats.mean_gap[k] - stats.ci_halfwidth[k]);
    }
    const bool pass = observed <= bound;
    return {"gap_bound", bound, observed, std::fabs(bound - observed), judge(pass, ctx), ctx.mu_source};
}

Verdict verify_kappa(const EnsembleStats& stats, double bound_value, std::uint64_t kappa, double epsilon,
                     const CheckContext& ctx) {
    if (stats.mean_gap.empty() || kappa > stats.mean_gap.size() - 1) {
        throw HorizonError("kappa = " + std::to_string(kappa) + " exceeds the simulated horizon K = " +
                           std::to_string(stats.mean_gap.empty() ? 0 : stats.mean_gap.size() - 1));
    }
    std::size_t argmin = 0;
    for (std::size_t k = 1; k <= kappa; ++k) {
        if (stats.mean_gap[k] < stats.mean_gap[argmin]) argmin = k;
    }
    const double observed = stats.mean_gap[argmin];
    const double threshold = bound_value + epsilon + stats.ci_halfwidth[argmin];
    const bool pass = observed <= threshold;
    return {"kappa", threshold, observed, std::fabs(threshold - observed), judge(pass, ctx), ctx.mu_source};
}

RateWindow default_rate_window(std::uint64_t iterations) {
    const std::size_t length = iterations + 1;
    if (length < 20) return {1, length};
    return {length / 10, length};
}

RateFit rate_fit(std::span<const double> gaps, RateWindow window) {
    if (window.end > gaps.size() || window.begin >= window.end || window.end - window.begin < 2) {
        throw WindowError("rate window [" + std::to_string(window.begin) + ", " + std::to_string(window.end) +
                          ") is not a range of at least two points within " + std::to_string(gaps.size()));
    }
    const double count = static_cast<double>(window.end - window.begin);
    double sx = 0.0, sy = 0.0;
    for (std::size_t k = window.begin; k < window.end; ++k) {
        if (!(gaps[k] > 0.0)) {
            throw WindowError("gap at k = " + std::to_string(k) + " is not positive; cannot take its logarithm");
        }
        sx += std::log(static_cast<double>(k) + 1.0);
        sy += std::log(gaps[k]);
    }
    const double mx = sx / count;
    const double my = sy / count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = window.begin; k < window.end; ++k) {
        const double dx = std::log(static_cast<double>(k) + 1.0) - mx;
        const double dy = std::log(gaps[k]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    // A constant series leaves only rounding noise in syy; report it as an exact flat fit.
    if (syy <= 1e-24 * count * std::max(1.0, my * my)) {
        fit.exponent = 0.0;
        fit.r_squared = 1.0;
    } else {
        fit.exponent = sxy / sxx;
        const double residual = std::max(0.0, syy - fit.exponent * sxy);
        fit.r_squared = 1.0 - residual / syy;
    }
    fit.window_begin = window.begin;
    fit.window_end = window.end;
    return fit;
}

RateFit rate_fit(const EnsembleStats& stats, RateWindow window) {
    return rate_fit(std::span<const double>(stats.mean_gap), window);
}

RecursionCheck one_step_recursion(const EnsembleStats& stats, const StepSchedule& schedule, bool noise_scaled,
                                  double lambda_max, double mu, double c_squared, std::size_t n,
                                  double sigma_squared, double slack) {
    RecursionCheck out;
    const double noise_power = static_cast<double>(n) * sigma_squared;
    for (std::size_t k = 0; k + 1 < stats.mean_gap.size(); ++k) {
        const double beta = schedule_value(schedule, k);
        const double drift = noise_scaled ? lambda_max * beta * beta * (c_squared + noise_power)
                                          : lambda_max * (beta * beta * c_squared + noise_power);
        const double rhs =
            (1.0 - 2.0 * beta * mu) * stats.mean_gap[k] + drift + slack * stats.ci_halfwidth[k + 1];
        ++out.total;
        if (stats.mean_gap[k + 1] <= rhs) ++out.holds;
    }
    return out;
}

}  // namespace ecim
