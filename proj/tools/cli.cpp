#include "cli.hpp"

#include "ecim/analysis.hpp"
#include "ecim/dynamics.hpp"
#include "ecim/error.hpp"
#include "ecim/generate.hpp"
#include "ecim/io.hpp"
#include "ecim/oracle.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>

namespace ecim::cli {

namespace {

using io::json;

constexpr std::size_t kPlSamples = 10000;

struct Options {
    std::string spec, problem, config, oracle, ensemble, bounds, out;
    std::size_t runs = 200;
    std::uint64_t seed = 0;
    std::optional<double> mu;
    std::optional<double> epsilon;
    double tail = kDefaultTailFraction;
    std::size_t pl_samples = kPlSamples;
};

std::string dump(const json& j) {
    return j.dump(2) + "\n";
}

int cmd_generate(const Options& o, std::ostream& out) {
    const GeneratorSpec spec = io::generator_spec_from_json(io::read_json(o.spec));
    const CouplingProblem p = generate(spec);
    io::write_text_atomic(o.out, dump(io::to_json(p)));
    out << "generated " << *p.label() << "\n";
    return kOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
    const CouplingProblem p = io::problem_from_json(io::read_json(o.problem));
    const RunConfig config = io::run_config_from_json(io::read_json(o.config));
    const Trajectory t = run(p, initial_state(p, config), config);
    io::write_text_atomic(o.out, io::trajectory_csv(t));

    const DiscreteSpins spins = round_to_spins(t.final_state);
    out << "final_energy " << io::format_double(t.energies.back()) << "\n";
    out << "spins";
    for (int s : spins.values()) out << ' ' << (s > 0 ? "+1" : "-1");
    out << "\n";
    out << "discrete_energy " << io::format_double(discrete_energy(p, spins)) << "\n";
    return kOk;
}

io::OracleReport build_oracle(const CouplingProblem& p, std::size_t pl_samples, std::uint64_t seed,
                              std::ostream& err) {
    OptimumBudget budget;
    budget.seed = seed;
    const RelaxedOptimum opt = relaxed_optimum(p, budget);
    const SpectralSummary summary = spectral_summary(p);
    const DefinitenessClass cls = classify_definiteness(summary);

    io::OracleReport r;
    r.e_star = opt.e_star;
    r.s_star = opt.s_star.values();
    r.method = opt.method;
    r.certified = opt.certified;
    r.definiteness = cls.definiteness;
    r.noise_required = cls.noise_required;
    r.lambda_max = summary.lambda_max;
    r.lambda_min = summary.lambda_min;
    r.c_squared = summary.c_squared;
    try {
        r.mu_hat = pl_constant_estimate(p, opt.e_star, pl_samples, seed).mu_hat;
    } catch (const Error& e) {
        err << "warning: no PL estimate: " << e.what() << "\n";
    }
    if (!opt.certified) err << "warning: E* is not certified (" << to_string(opt.method) << ")\n";
    return r;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
    const CouplingProblem p = io::problem_from_json(io::read_json(o.problem));
    const io::OracleReport r = build_oracle(p, o.pl_samples, o.seed, err);
    io::write_text_atomic(o.out, dump(io::to_json(r)));
    out << "e_star " << io::format_double(r.e_star) << " certified " << (r.certified ? "true" : "false")
        << " definiteness " << to_string(r.definiteness) << "\n";
    return kOk;
}

int cmd_ensemble(const Options& o, std::ostream& out, std::ostream& err) {
    const CouplingProblem p = io::problem_from_json(io::read_json(o.problem));
    const RunConfig config = io::run_config_from_json(io::read_json(o.config));
    double e_star;
    if (!o.oracle.empty()) {
        e_star = io::oracle_report_from_json(io::read_json(o.oracle)).e_star;
    } else {
        OptimumBudget budget;
        budget.seed = o.seed;
        const RelaxedOptimum opt = relaxed_optimum(p, budget);
        if (!opt.certified) err << "warning: E* is not certified (" << to_string(opt.method) << ")\n";
        e_star = opt.e_star;
    }
    const EnsembleStats stats = ensemble_run(p, initial_state(p, config), config, o.runs, o.seed, e_star);
    io::write_text_atomic(o.out, io::ensemble_csv(stats));
    if (stats.clamp_events > 0) {
        err << "warning: " << stats.clamp_events << " linearized steps were clamped to the box\n";
    }
    out << "final_mean_gap " << io::format_double(stats.mean_gap.back()) << " ci "
        << io::format_double(stats.ci_halfwidth.back()) << "\n";
    return kOk;
}

int cmd_bounds(const Options& o, std::ostream& out) {
    const CouplingProblem p = io::problem_from_json(io::read_json(o.problem));
    const RunConfig config = io::run_config_from_json(io::read_json(o.config));
    const io::OracleReport oracle = io::oracle_report_from_json(io::read_json(o.oracle));
    const SpectralSummary summary = spectral_summary(p);

    double mu;
    MuSource source;
    if (o.mu) {
        mu = *o.mu;
        source = MuSource::UserSupplied;
    } else if (oracle.mu_hat) {
        mu = *oracle.mu_hat;
        source = MuSource::Estimated;
    } else {
        throw FormatError("oracle.mu_hat is null; pass --mu to supply the PL constant");
    }
    const double initial_gap = relaxed_energy(p, initial_state(p, config)) - oracle.e_star;
    const bool pl_verified = pl_assumption_verified(summary.definiteness);
    const BoundReport r =
        compute_bounds(summary, p.n(), config, mu, source, initial_gap, o.epsilon, pl_verified);
    io::write_text_atomic(o.out, dump(io::to_json(r)));
    out << "liminf_bound_original " << io::format_double(r.liminf_bound_original) << "\n";
    out << "liminf_bound_modified " << io::format_double(r.liminf_bound_modified) << "\n";
    if (r.kappa) out << "kappa " << *r.kappa << "\n";
    return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const EnsembleStats stats = io::ensemble_from_csv(io::read_text(o.ensemble));
    const BoundReport bounds = io::bound_report_from_json(io::read_json(o.bounds));
    const CheckContext ctx{bounds.mu_source, bounds.assumption_verified};

    std::vector<Verdict> verdicts;
    verdicts.push_back(verify_gap_bound(stats, bounds.applicable_bound(), o.tail, ctx));
    if (bounds.kappa && bounds.epsilon) {
        verdicts.push_back(verify_kappa(stats, bounds.applicable_bound(), *bounds.kappa, *bounds.epsilon, ctx));
    }

    json report;
    report["verdicts"] = json::array();
    for (const auto& v : verdicts) report["verdicts"].push_back(io::to_json(v));
    try {
        report["rate_fit"] = io::to_json(rate_fit(stats, default_rate_window(stats.iterations)));
    } catch (const WindowError& e) {
        report["rate_fit"] = nullptr;
        report["rate_fit_error"] = e.what();
    }
    io::write_text_atomic(o.out, dump(report));

    int code = kOk;
    for (const auto& v : verdicts) {
        out << v.check << ' ' << to_string(v.verdict) << " observed " << io::format_double(v.observed)
            << " bound " << io::format_double(v.bound) << "\n";
        if (v.verdict == VerdictKind::Fail) code = kFail;
        if (v.verdict == VerdictKind::AssumptionUnverified && code == kOk) code = kAssumptionUnverified;
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator and convergence-bound harness for opto-electronic coherent Ising machines"};
    app.require_subcommand(1);
    Options o;

    auto* generate_cmd = app.add_subcommand("generate", "Write a random problem instance");
    generate_cmd->add_option("--spec", o.spec, "Generator spec JSON")->required();
    generate_cmd->add_option("--out", o.out, "Output problem JSON")->required();

    auto* solve_cmd = app.add_subcommand("solve", "Run one trajectory");
    solve_cmd->add_option("--problem", o.problem, "Problem JSON")->required();
    solve_cmd->add_option("--config", o.config, "Run config JSON")->required();
    solve_cmd->add_option("--out", o.out, "Trajectory CSV")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "Compute E*, s*, the PL estimate and the curvature class");
    oracle_cmd->add_option("--problem", o.problem, "Problem JSON")->required();
    oracle_cmd->add_option("--out", o.out, "Oracle report JSON")->required();
    oracle_cmd->add_option("--seed", o.seed, "Seed for multi-start and PL sampling");
    oracle_cmd->add_option("--samples", o.pl_samples, "PL samples")->check(CLI::Range(1000UL, 100000000UL));

    auto* ensemble_cmd = app.add_subcommand("ensemble", "Run M seeded trajectories and write the mean gap");
    ensemble_cmd->add_option("--problem", o.problem, "Problem JSON")->required();
    ensemble_cmd->add_option("--config", o.config, "Run config JSON")->required();
    ensemble_cmd->add_option("-M", o.runs, "Number of runs")->required()->check(CLI::Range(2UL, 100000000UL));
    ensemble_cmd->add_option("--seed", o.seed, "Base seed; run i uses seed ^ i")->required();
    ensemble_cmd->add_option("--oracle", o.oracle, "Oracle report to take E* from (computed when omitted)");
    ensemble_cmd->add_option("--out", o.out, "Ensemble CSV")->required();

    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the convergence bounds");
    bounds_cmd->add_option("--problem", o.problem, "Problem JSON")->required();
    bounds_cmd->add_option("--config", o.config, "Run config JSON")->required();
    bounds_cmd->add_option("--oracle", o.oracle, "Oracle report JSON")->required();
    bounds_cmd->add_option("--mu", o.mu, "PL constant (overrides the oracle estimate)");
    bounds_cmd->add_option("--epsilon", o.epsilon, "Tolerance for the iteration bound kappa");
    bounds_cmd->add_option("--out", o.out, "Bound report JSON")->required();

    auto* verify_cmd = app.add_subcommand("verify", "Compare an ensemble against the bounds");
    verify_cmd->add_option("--ensemble", o.ensemble, "Ensemble CSV")->required();
    verify_cmd->add_option("--bounds", o.bounds, "Bound report JSON")->required();
    verify_cmd->add_option("--tail", o.tail, "Trailing fraction used for liminf")->check(CLI::Range(1e-9, 1.0));
    verify_cmd->add_option("--out", o.out, "Verdict JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*generate_cmd) return cmd_generate(o, out);
        if (*solve_cmd) return cmd_solve(o, out);
        if (*oracle_cmd) return cmd_oracle(o, out, err);
        if (*ensemble_cmd) return cmd_ensemble(o, out, err);
        if (*bounds_cmd) return cmd_bounds(o, out);
        if (*verify_cmd) return cmd_verify(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}

}  // namespace ecim::cli
