// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "ecim/analysis.hpp"
#include "ecim/dynamics.hpp"
#include "ecim/generate.hpp"
#include "ecim/io.hpp"
#include "ecim/oracle.hpp"
#include "ecim/problem.hpp"
#include "ecim/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace ecim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> body;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

RunConfig make_config(ModeKind mode, StepSchedule sched, double sigma2, std::uint64_t K) {
    RunConfig c;
    c.mode.kind = mode;
    c.schedule = sched;
    c.noise.sigma_squared = sigma2;
    c.iterations = K;
    return c;
}

// KKT conditions of the box QP, checked directly: interior coordinates have zero
// gradient, coordinates at +1/2 have nonpositive gradient, at -1/2 nonnegative.
// For convex Q this certifies global optimality independently of the oracle.
bool kkt_holds(const CouplingProblem& p, const Vector& s, double tol) {
    const Vector g = p.Q() * s + p.h();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] >= 0.5 - 1e-12) {
            if (g[i] > tol) return false;
        } else if (s[i] <= -0.5 + 1e-12) {
            if (g[i] < -tol) return false;
        } else if (std::abs(g[i]) > tol) {
            return false;
        }
    }
    return true;
}

// Brute-force minimum of 1/2 s^T Q s + h^T s over the box vertices.
double brute_vertex_minimum(const CouplingProblem& p) {
    const std::size_t n = p.n();
    double best = std::numeric_limits<double>::infinity();
    Vector s(static_cast<Eigen::Index>(n));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        for (std::size_t i = 0; i < n; ++i) s[static_cast<Eigen::Index>(i)] = (mask >> i & 1) ? 0.5 : -0.5;
        best = std::min(best, 0.5 * s.dot(p.Q() * s) + p.h().dot(s));
    }
    return best;
}

// Shared reference setup for the PD pipeline criteria.
struct Reference {
    CouplingProblem problem;
    SpectralSummary summary;
    double e_star;
    double mu;
    double initial_gap;
};

const Reference& reference() {
    static const Reference ref = [] {
        CouplingProblem p = generate({8, InstanceKind::PositiveDefinite, 1.0, 7});
        SpectralSummary summary = spectral_summary(p);
        const RelaxedOptimum opt = relaxed_optimum(p);
        if (!opt.certified || !kkt_holds(p, opt.s_star.values(), 1e-7)) {
            throw std::runtime_error("reference optimum failed the KKT check");
        }
        const double mu = pl_constant_estimate(p, opt.e_star, 10000, 1).mu_hat;
        const double gap0 = relaxed_energy(p, SpinState::zeros(p.n())) - opt.e_star;
        return Reference{std::move(p), std::move(summary), opt.e_star, mu, gap0};
    }();
    return ref;
}

constexpr std::size_t kEnsembleRuns = 200;
constexpr std::uint64_t kEnsembleSeed = 42;
constexpr std::uint64_t kConstantHorizon = 20000;

EnsembleStats criterion4_ensemble(std::size_t threads) {
    const Reference& ref = reference();
    const RunConfig c = make_config(ModeKind::Linearized, StepSchedule::constant(0.05), 0.01, kConstantHorizon);
    return ensemble_run(ref.problem, SpinState::zeros(ref.problem.n()), c, kEnsembleRuns, kEnsembleSeed,
                        ref.e_star, threads);
}

struct ModifiedRun {
    double beta;
    EnsembleStats stats;
};

const std::vector<ModifiedRun>& criterion5_runs() {
    static const std::vector<ModifiedRun> runs = [] {
        const Reference& ref = reference();
        std::vector<ModifiedRun> out;
        for (double beta : {0.1, 0.05, 0.025}) {
            const RunConfig c =
                make_config(ModeKind::LinearizedNoiseScaled, StepSchedule::constant(beta), 0.01, kConstantHorizon);
            out.push_back({beta, ensemble_run(ref.problem, SpinState::zeros(ref.problem.n()), c, kEnsembleRuns,
                                              kEnsembleSeed, ref.e_star)});
        }
        return out;
    }();
    return runs;
}

Outcome gradient_descent_equivalence() {
    Philox rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const CouplingProblem p = generate({8, InstanceKind::SymmetricGaussian, 0.0, static_cast<std::uint64_t>(trial)});
        Vector s0(8);
        for (auto& v : s0) v = rng.uniform(-0.01, 0.01);
        const SpinState s(s0);
        const double beta = 1e-3;
        const RunConfig transfer_cfg = [&] {
            RunConfig c = make_config(ModeKind::TransferOriginal, StepSchedule::constant(beta), 0.0, 1);
            c.initial_state = s0;
            return c;
        }();
        RunConfig linear_cfg = transfer_cfg;
        linear_cfg.mode.kind = ModeKind::Linearized;
        const Trajectory a = run(p, s, transfer_cfg);
        const Trajectory b = run(p, s, linear_cfg);
        // Independent expectation: one explicit gradient step s - beta J s.
        const Vector expected = s0 - beta * (p.J() * s0);
        worst = std::max(worst, (a.final_state.values() - b.final_state.values()).cwiseAbs().maxCoeff());
        if ((b.final_state.values() - expected).cwiseAbs().maxCoeff() > 1e-15) {
            return {false, "linearized step differs from s - beta J s"};
        }
    }
    return {worst <= 1e-5, "max coordinate difference " + fmt(worst)};
}

Outcome box_confinement() {
    Philox rng(202);
    std::size_t violations = 0;
    constexpr int kEvaluations = 1000000;
    constexpr int kDim = 8;
    Vector x(kDim);
    for (int i = 0; i < kEvaluations; ++i) {
        const double scale = (i % 3 == 0) ? 1.0 : (i % 3 == 1 ? 10.0 : 1e4);
        for (auto& v : x) v = scale * rng.normal();
        const SpinState out = transfer(x);
        for (int j = 0; j < kDim; ++j) {
            if (!(std::abs(out.values()[j]) <= 0.5)) ++violations;
        }
    }
    return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(kEvaluations) +
                                 " evaluations of dimension " + std::to_string(kDim)};
}

Outcome noise_necessity() {
    const CouplingProblem p = generate({8, InstanceKind::NegativeDefinite, 0.0, 3});
    const double e_star = brute_vertex_minimum(p);
    const RelaxedOptimum opt = relaxed_optimum(p);
    if (!opt.certified || std::abs(opt.e_star - e_star) > 1e-12) return {false, "oracle disagrees with brute force"};
    const double gap0 = relaxed_energy(p, SpinState::zeros(8)) - e_star;

    int stuck = 0;
    int escaped = 0;
    int below_at_end = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RunConfig quiet = make_config(ModeKind::TransferExtended, StepSchedule::constant(0.2), 0.0, 1000);
        quiet.noise.seed = seed;
        const Trajectory t = run(p, SpinState::zeros(8), quiet);
        const bool all_at_start =
            std::all_of(t.energies.begin(), t.energies.end(), [&](double e) { return e - e_star == gap0; });
        if (all_at_start) ++stuck;

        RunConfig noisy = quiet;
        noisy.noise.sigma_squared = 0.01;
        const Trajectory u = run(p, SpinState::zeros(8), noisy);
        // First passage below 0.2 gap0 at some k <= K.
        const double lowest = *std::min_element(u.energies.begin(), u.energies.end());
        if (lowest - e_star < 0.2 * gap0) ++escaped;
        if (u.energies.back() - e_star < 0.2 * gap0) ++below_at_end;
    }
    return {stuck == 100 && escaped >= 95,
            "noise-free runs stuck " + std::to_string(stuck) + "/100, noisy runs reached 0.2 gap0 " +
                std::to_string(escaped) + "/100 (" + std::to_string(below_at_end) + "/100 still below at K, gap0 " +
                fmt(gap0) + ")"};
}

Outcome liminf_original() {
    const Reference& ref = reference();
    const EnsembleStats stats = criterion4_ensemble(0);
    const double bound = liminf_bound_original(ref.summary.lambda_max, ref.mu, 0.05, ref.summary.c_squared,
                                               ref.problem.n(), 0.01);
    const Verdict v = verify_gap_bound(stats, bound);
    return {v.verdict == VerdictKind::Pass,
            "observed " + fmt(v.observed) + " bound " + fmt(bound) + " mu " + fmt(ref.mu)};
}

Outcome modified_constant_step() {
    const Reference& ref = reference();
    bool ok = true;
    std::string detail;
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& r : criterion5_runs()) {
        const double bound = liminf_bound_modified(ref.summary.lambda_max, ref.mu, r.beta, ref.summary.c_squared,
                                                   ref.problem.n(), 0.01);
        const Verdict v = verify_gap_bound(r.stats, bound);
        ok = ok && v.verdict == VerdictKind::Pass && v.observed < previous;
        previous = v.observed;
        detail += "beta " + fmt(r.beta) + ": observed " + fmt(v.observed) + " bound " + fmt(bound) + "; ";
    }
    return {ok, detail};
}

Outcome kappa_bound() {
    const Reference& ref = reference();
    const ModifiedRun& r = criterion5_runs()[1];
    const double epsilon = 0.1 * ref.initial_gap;
    const std::uint64_t kappa = iteration_bound_kappa(ref.initial_gap, r.beta, ref.mu, epsilon);
    // floor(gap0 / (2 beta mu epsilon)) recomputed here.
    const auto expected = static_cast<std::uint64_t>(std::floor(ref.initial_gap / (2 * r.beta * ref.mu * epsilon)));
    if (kappa != expected) return {false, "kappa formula mismatch"};
    const double bound = liminf_bound_modified(ref.summary.lambda_max, ref.mu, r.beta, ref.summary.c_squared,
                                               ref.problem.n(), 0.01);
    const Verdict v = verify_kappa(r.stats, bound, kappa, epsilon);
    return {v.verdict == VerdictKind::Pass,
            "kappa " + std::to_string(kappa) + " observed " + fmt(v.observed) + " threshold " + fmt(v.bound)};
}

Outcome almost_sure_surrogate() {
    const Reference& ref = reference();
    const RunConfig c =
        make_config(ModeKind::LinearizedNoiseScaled, StepSchedule::poly_decay(0.5, 0.75), 0.01, 100000);
    const EnsembleStats stats = ensemble_run(ref.problem, SpinState::zeros(ref.problem.n()), c, 100, 7, ref.e_star);
    const double worst = *std::max_element(stats.final_gaps.begin(), stats.final_gaps.end());
    const RateFit fit = rate_fit(stats, default_rate_window(stats.iterations));
    return {worst < 1e-3 && fit.exponent < 0 && fit.r_squared > 0.8,
            "worst final gap " + fmt(worst) + ", exponent " + fmt(fit.exponent) + ", r2 " + fmt(fit.r_squared)};
}

Outcome one_step_recursion_holds() {
    const Reference& ref = reference();
    bool ok = true;
    std::string detail;
    for (const auto& r : criterion5_runs()) {
        if (!(r.beta * ref.mu < 0.5)) return {false, "beta mu >= 1/2"};
        const RecursionCheck check = one_step_recursion(r.stats, StepSchedule::constant(r.beta), true,
                                                        ref.summary.lambda_max, ref.mu, ref.summary.c_squared,
                                                        ref.problem.n(), 0.01);
        ok = ok && check.fraction() >= 0.95;
        detail += "beta " + fmt(r.beta) + ": " + fmt(100 * check.fraction()) + "%; ";
    }
    return {ok, detail};
}

Outcome oracle_cross_validation() {
    const InstanceKind kinds[] = {InstanceKind::SymmetricGaussian, InstanceKind::AsymmetricGaussian,
                                  InstanceKind::PositiveDefinite, InstanceKind::NegativeDefinite,
                                  InstanceKind::Indefinite};
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const CouplingProblem p = generate({4, kinds[i % 5], 0.5 * static_cast<double>(i % 3), 1000 + i});
        const RelaxedOptimum grid = relaxed_optimum_grid(p);
        const RelaxedOptimum pg = relaxed_optimum_projected_gradient(p);
        worst = std::max(worst, std::abs(grid.e_star - pg.e_star));
    }
    std::size_t violations = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const std::size_t n = 2 + i % 19;
        const CouplingProblem p = generate({n, InstanceKind::NegativeDefinite, 0.3, 2000 + i});
        const RelaxedOptimum scan = relaxed_optimum_vertex_scan(p);
        const RelaxedOptimum pg = relaxed_optimum_projected_gradient(p);
        for (double e : pg.probe_energies) {
            if (scan.e_star > e + 1e-12) ++violations;
        }
    }
    return {worst <= 1e-6 && violations == 0,
            "max |grid - projected gradient| " + fmt(worst) + ", vertex-scan violations " + std::to_string(violations)};
}

Outcome finite_differences() {
    Philox rng(303);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const std::size_t n = 1 + i % 12;
        const CouplingProblem p = generate({n, InstanceKind::AsymmetricGaussian, 1.0, 500 + i});
        Vector s(static_cast<Eigen::Index>(n));
        for (auto& v : s) v = rng.uniform(-0.5, 0.5);
        const Vector g = gradient(p, s);
        Vector fd(static_cast<Eigen::Index>(n));
        const double h = 1e-5;
        for (Eigen::Index j = 0; j < s.size(); ++j) {
            Vector plus = s, minus = s;
            plus[j] += h;
            minus[j] -= h;
            fd[j] = (relaxed_energy(p, plus) - relaxed_energy(p, minus)) / (2 * h);
        }
        worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-12));
    }
    return {worst <= 1e-6, "max relative error " + fmt(worst)};
}

Outcome determinism() {
    const std::string first = io::ensemble_csv(criterion4_ensemble(0));
    const std::string second = io::ensemble_csv(criterion4_ensemble(0));
    const std::string single = io::ensemble_csv(criterion4_ensemble(1));
    return {first == second && first == single,
            std::to_string(first.size()) + " bytes; repeat " + (first == second ? "identical" : "differs") +
                ", single-thread " + (first == single ? "identical" : "differs")};
}

}  // namespace

int main() {
    set_warning_handler([](std::string_view) {});
    const std::vector<Criterion> criteria = {
        {1, "gradient-descent equivalence", 1, gradient_descent_equivalence},
        {2, "box confinement", 5, box_confinement},
        {3, "noise necessity", 10, noise_necessity},
        {4, "liminf bound, original dynamics", 120, liminf_original},
        {5, "modified constant-step bound", 300, modified_constant_step},
        {6, "iteration bound kappa", 0, kappa_bound},
        {7, "almost-sure convergence surrogate", 300, almost_sure_surrogate},
        {8, "one-step recursion", 0, one_step_recursion_holds},
        {9, "oracle cross-validation", 120, oracle_cross_validation},
        {10, "gradient vs finite differences", 0, finite_differences},
        {11, "determinism", 0, determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.body();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0 && seconds > c.budget_seconds) {
            outcome.pass = false;
            outcome.detail += " (over the " + fmt(c.budget_seconds) + " s budget)";
        }
        if (!outcome.pass) ++failures;
        std::printf("criterion %2d %-36s %s  %s [%.2f s]\n", c.id, c.name.c_str(), outcome.pass ? "PASS" : "FAIL",
                    outcome.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
