#include "ecim/analysis.hpp"
#include "ecim/dynamics.hpp"
#include "ecim/error.hpp"
#include "ecim/generate.hpp"
#include "ecim/io.hpp"
#include "ecim/oracle.hpp"
#include "ecim/problem.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ecim;

namespace {

// Spin states cross the boundary as plain float arrays.
SpinState to_state(const Vector& v) {
    return SpinState(v);
}

SpinState start_state(const CouplingProblem& p, const RunConfig& config, const std::optional<Vector>& s0) {
    if (s0) return to_state(*s0);
    return initial_state(p, config);
}

RunConfig make_config(ModeKind mode, double alpha, const StepSchedule& schedule, double sigma_squared,
                      std::uint64_t seed, std::uint64_t iterations, bool record_states,
                      std::optional<Vector> initial) {
    RunConfig c;
    c.mode = {mode, alpha};
    c.schedule = schedule;
    c.noise = {sigma_squared, seed};
    c.iterations = iterations;
    c.record_states = record_states;
    c.initial_state = std::move(initial);
    validate(c);
    return c;
}

template <class E>
void register_error(py::module_& m, const char* name, py::handle base) {
    py::register_exception<E>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coherent Ising machine simulator and convergence-bound analysis";

    auto base = py::register_exception<Error>(m, "EcimError", PyExc_RuntimeError);
    register_error<InstanceError>(m, "InstanceError", base);
    register_error<ParameterError>(m, "ParameterError", base);
    register_error<UnsupportedSizeError>(m, "UnsupportedSizeError", base);
    register_error<FlatObjectiveError>(m, "FlatObjectiveError", base);
    register_error<WindowError>(m, "WindowError", base);
    register_error<HorizonError>(m, "HorizonError", base);
    register_error<FormatError>(m, "FormatError", base);

    m.attr("BOX_HALF_WIDTH") = kBoxHalfWidth;

    // problem

    py::enum_<Definiteness>(m, "Definiteness")
        .value("POSITIVE_DEFINITE", Definiteness::PositiveDefinite)
        .value("POSITIVE_SEMIDEFINITE", Definiteness::PositiveSemidefinite)
        .value("NEGATIVE_DEFINITE", Definiteness::NegativeDefinite)
        .value("NEGATIVE_SEMIDEFINITE", Definiteness::NegativeSemidefinite)
        .value("INDEFINITE", Definiteness::Indefinite)
        .value("ZERO", Definiteness::Zero);

    py::class_<CouplingProblem>(m, "CouplingProblem")
        .def(py::init<Matrix, Vector, std::optional<std::string>>(), py::arg("J"), py::arg("h"),
             py::arg("label") = std::nullopt)
        .def_property_readonly("n", &CouplingProblem::n)
        .def_property_readonly("J", &CouplingProblem::J)
        .def_property_readonly("h", &CouplingProblem::h)
        .def_property_readonly("Q", &CouplingProblem::Q)
        .def_property_readonly("label", &CouplingProblem::label)
        .def("__eq__", &CouplingProblem::operator==)
        .def("__repr__", [](const CouplingProblem& p) {
            return "CouplingProblem(n=" + std::to_string(p.n()) + (p.label() ? ", label='" + *p.label() + "'" : "") +
                   ")";
        })
        .def("to_json", [](const CouplingProblem& p) { return io::to_json(p).dump(); })
        .def_static("from_json", [](const std::string& text) {
            try {
                return io::problem_from_json(io::json::parse(text));
            } catch (const io::json::exception& e) {
                throw FormatError(e.what());
            }
        });

    py::class_<SpectralSummary>(m, "SpectralSummary")
        .def_readonly("Q", &SpectralSummary::Q)
        .def_readonly("lambda_max", &SpectralSummary::lambda_max)
        .def_readonly("lambda_min", &SpectralSummary::lambda_min)
        .def_readonly("definiteness", &SpectralSummary::definiteness)
        .def_readonly("c_squared", &SpectralSummary::c_squared)
        .def_readonly("c_squared_exact", &SpectralSummary::c_squared_exact);

    m.def("relaxed_energy",
          [](const CouplingProblem& p, const Vector& s) { return relaxed_energy(p, to_state(s)); },
          py::arg("problem"), py::arg("s"));
    m.def("gradient", [](const CouplingProblem& p, const Vector& s) { return gradient(p, to_state(s)); },
          py::arg("problem"), py::arg("s"));
    m.def("discrete_energy",
          [](const CouplingProblem& p, const std::vector<int>& sigma) {
              return discrete_energy(p, DiscreteSpins(sigma));
          },
          py::arg("problem"), py::arg("sigma"));
    m.def("round_to_spins", [](const Vector& s) { return round_to_spins(to_state(s)).values(); }, py::arg("s"));
    m.def("spectral_summary", &spectral_summary, py::arg("problem"));

    // generate

    py::enum_<InstanceKind>(m, "InstanceKind")
        .value("SYMMETRIC_GAUSSIAN", InstanceKind::SymmetricGaussian)
        .value("ASYMMETRIC_GAUSSIAN", InstanceKind::AsymmetricGaussian)
        .value("POSITIVE_DEFINITE", InstanceKind::PositiveDefinite)
        .value("NEGATIVE_DEFINITE", InstanceKind::NegativeDefinite)
        .value("INDEFINITE", InstanceKind::Indefinite);

    m.def("generate",
          [](std::size_t n, InstanceKind kind, double field_scale, std::uint64_t seed) {
              return generate({n, kind, field_scale, seed});
          },
          py::arg("n"), py::arg("kind") = InstanceKind::SymmetricGaussian, py::arg("field_scale") = 0.0,
          py::arg("seed") = 0);

    // dynamics

    py::enum_<ModeKind>(m, "Mode")
        .value("TRANSFER_ORIGINAL", ModeKind::TransferOriginal)
        .value("TRANSFER_EXTENDED", ModeKind::TransferExtended)
        .value("LINEARIZED", ModeKind::Linearized)
        .value("TRANSFER_NOISE_SCALED", ModeKind::TransferNoiseScaled)
        .value("LINEARIZED_NOISE_SCALED", ModeKind::LinearizedNoiseScaled);

    py::class_<StepSchedule>(m, "StepSchedule")
        .def_static("constant", &StepSchedule::constant, py::arg("beta"))
        .def_static("poly_decay", &StepSchedule::poly_decay, py::arg("beta0"), py::arg("r"))
        .def_property_readonly("beta", &StepSchedule::beta)
        .def_property_readonly("exponent", &StepSchedule::exponent)
        .def_property_readonly("is_constant",
                               [](const StepSchedule& s) { return s.kind() == StepSchedule::Kind::Constant; })
        .def("__call__", &schedule_value, py::arg("k"))
        .def("__eq__", &StepSchedule::operator==);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init(&make_config), py::arg("mode") = ModeKind::TransferNoiseScaled, py::arg("alpha") = 1.0,
             py::arg("schedule") = StepSchedule::poly_decay(0.5, 0.75), py::arg("sigma_squared") = 0.01,
             py::arg("seed") = 0, py::arg("iterations") = 0, py::arg("record_states") = false,
             py::arg("initial_state") = std::nullopt)
        .def_property_readonly("mode", [](const RunConfig& c) { return c.mode.kind; })
        .def_property_readonly("alpha", [](const RunConfig& c) { return c.mode.alpha; })
        .def_property_readonly("schedule", [](const RunConfig& c) { return c.schedule; })
        .def_property_readonly("sigma_squared", [](const RunConfig& c) { return c.noise.sigma_squared; })
        .def_property_readonly("seed", [](const RunConfig& c) { return c.noise.seed; })
        .def_readonly("iterations", &RunConfig::iterations)
        .def_readonly("record_states", &RunConfig::record_states)
        .def_readonly("initial_state", &RunConfig::initial_state)
        .def("to_json", [](const RunConfig& c) { return io::to_json(c).dump(); });

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("energies", &Trajectory::energies)
        .def_property_readonly("final_state", [](const Trajectory& t) { return t.final_state.values(); })
        .def_property_readonly("states",
                               [](const Trajectory& t) {
                                   std::vector<Vector> out;
                                   out.reserve(t.states.size());
                                   for (const auto& s : t.states) out.push_back(s.values());
                                   return out;
                               })
        .def_readonly("seed_used", &Trajectory::seed_used)
        .def_readonly("clamp_events", &Trajectory::clamp_events);

    m.def("transfer", [](const Vector& x) { return transfer(x).values(); }, py::arg("x"));
    m.def("run",
          [](const CouplingProblem& p, const RunConfig& c, std::optional<Vector> s0) {
              return run(p, start_state(p, c, s0), c);
          },
          py::arg("problem"), py::arg("config"), py::arg("s0") = std::nullopt,
          py::call_guard<py::gil_scoped_release>());

    // oracle

    py::enum_<OptimumMethod>(m, "OptimumMethod")
        .value("VERTEX_SCAN", OptimumMethod::VertexScan)
        .value("GRID_REFINE", OptimumMethod::GridRefine)
        .value("MULTI_START_PROJ_GRAD", OptimumMethod::MultiStartProjGrad);

    py::class_<RelaxedOptimum>(m, "RelaxedOptimum")
        .def_property_readonly("s_star", [](const RelaxedOptimum& r) { return r.s_star.values(); })
        .def_readonly("e_star", &RelaxedOptimum::e_star)
        .def_readonly("method", &RelaxedOptimum::method)
        .def_readonly("certified", &RelaxedOptimum::certified)
        .def_readonly("converged_starts", &RelaxedOptimum::converged_starts);

    m.def("relaxed_optimum",
          [](const CouplingProblem& p, std::size_t starts, std::uint64_t seed) {
              OptimumBudget b;
              b.starts = starts;
              b.seed = seed;
              return relaxed_optimum(p, b);
          },
          py::arg("problem"), py::arg("starts") = 64, py::arg("seed") = 0,
          py::call_guard<py::gil_scoped_release>());

    py::class_<DiscreteOptimum>(m, "DiscreteOptimum")
        .def_property_readonly("sigma", [](const DiscreteOptimum& d) { return d.sigma.values(); })
        .def_readonly("energy", &DiscreteOptimum::energy);
    m.def("discrete_optimum", &discrete_optimum, py::arg("problem"));

    py::class_<PLEstimate>(m, "PLEstimate")
        .def_readonly("mu_hat", &PLEstimate::mu_hat)
        .def_readonly("sample_count", &PLEstimate::sample_count)
        .def_property_readonly("min_ratio_location", [](const PLEstimate& e) { return e.min_ratio_location.values(); });
    m.def("pl_constant_estimate", &pl_constant_estimate, py::arg("problem"), py::arg("e_star"),
          py::arg("samples") = 10000, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<DefinitenessClass>(m, "DefinitenessClass")
        .def_readonly("definiteness", &DefinitenessClass::definiteness)
        .def_property_readonly("landscape", [](const DefinitenessClass& c) { return std::string(c.landscape); })
        .def_readonly("noise_required", &DefinitenessClass::noise_required);
    m.def("classify_definiteness", &classify_definiteness, py::arg("summary"));

    // analysis

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("runs", &EnsembleStats::runs)
        .def_readonly("iterations", &EnsembleStats::iterations)
        .def_readonly("mean_gap", &EnsembleStats::mean_gap)
        .def_readonly("ci_halfwidth", &EnsembleStats::ci_halfwidth)
        .def_readonly("clamp_events", &EnsembleStats::clamp_events)
        .def_readonly("final_gaps", &EnsembleStats::final_gaps)
        .def("to_csv", &io::ensemble_csv);

    m.def("ensemble_run",
          [](const CouplingProblem& p, const RunConfig& c, std::size_t runs, std::uint64_t base_seed, double e_star,
             std::optional<Vector> s0, std::size_t max_threads) {
              return ensemble_run(p, start_state(p, c, s0), c, runs, base_seed, e_star, max_threads);
          },
          py::arg("problem"), py::arg("config"), py::arg("runs"), py::arg("base_seed"), py::arg("e_star"),
          py::arg("s0") = std::nullopt, py::arg("max_threads") = 0, py::call_guard<py::gil_scoped_release>());

    m.def("liminf_bound_original", &liminf_bound_original, py::arg("lambda_max"), py::arg("mu"), py::arg("beta"),
          py::arg("c_squared"), py::arg("n"), py::arg("sigma_squared"));
    m.def("liminf_bound_modified", &liminf_bound_modified, py::arg("lambda_max"), py::arg("mu"), py::arg("beta"),
          py::arg("c_squared"), py::arg("n"), py::arg("sigma_squared"));
    m.def("iteration_bound_kappa", &iteration_bound_kappa, py::arg("initial_gap"), py::arg("beta"), py::arg("mu"),
          py::arg("epsilon"));

    py::enum_<MuSource>(m, "MuSource")
        .value("USER_SUPPLIED", MuSource::UserSupplied)
        .value("ESTIMATED", MuSource::Estimated);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("lambda_max", &BoundReport::lambda_max)
        .def_readonly("mu_used", &BoundReport::mu_used)
        .def_readonly("mu_source", &BoundReport::mu_source)
        .def_readonly("c_squared", &BoundReport::c_squared)
        .def_readonly("liminf_bound_original", &BoundReport::liminf_bound_original)
        .def_readonly("liminf_bound_modified", &BoundReport::liminf_bound_modified)
        .def_readonly("kappa", &BoundReport::kappa)
        .def_readonly("epsilon", &BoundReport::epsilon)
        .def_readonly("beta", &BoundReport::beta)
        .def_readonly("n", &BoundReport::n)
        .def_readonly("sigma_squared", &BoundReport::sigma_squared)
        .def_readonly("initial_gap", &BoundReport::initial_gap)
        .def_readonly("assumption_verified", &BoundReport::assumption_verified)
        .def_property_readonly("applicable_bound", &BoundReport::applicable_bound)
        .def("to_json", [](const BoundReport& r) { return io::to_json(r).dump(); });

    m.def("compute_bounds",
          [](const CouplingProblem& p, const RunConfig& c, double mu, double e_star, MuSource source,
             std::optional<double> epsilon, std::optional<Vector> s0) {
              const SpectralSummary summary = spectral_summary(p);
              const double gap = relaxed_energy(p, start_state(p, c, s0)) - e_star;
              return compute_bounds(summary, p.n(), c, mu, source, gap, epsilon,
                                    pl_assumption_verified(summary.definiteness));
          },
          py::arg("problem"), py::arg("config"), py::arg("mu"), py::arg("e_star"),
          py::arg("mu_source") = MuSource::Estimated, py::arg("epsilon") = std::nullopt,
          py::arg("s0") = std::nullopt);

    py::enum_<VerdictKind>(m, "VerdictKind")
        .value("PASS", VerdictKind::Pass)
        .value("FAIL", VerdictKind::Fail)
        .value("ASSUMPTION_UNVERIFIED", VerdictKind::AssumptionUnverified);

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("check", &Verdict::check)
        .def_readonly("bound", &Verdict::bound)
        .def_readonly("observed", &Verdict::observed)
        .def_readonly("margin", &Verdict::margin)
        .def_readonly("verdict", &Verdict::verdict)
        .def_readonly("mu_source", &Verdict::mu_source)
        .def("__repr__", [](const Verdict& v) {
            return "Verdict(" + v.check + ", " + std::string(to_string(v.verdict)) + ")";
        });

    m.def("verify_gap_bound",
          [](const EnsembleStats& stats, const BoundReport& bounds, double tail) {
              return verify_gap_bound(stats, bounds.applicable_bound(), tail,
                                      {bounds.mu_source, bounds.assumption_verified});
          },
          py::arg("stats"), py::arg("bounds"), py::arg("tail_fraction") = kDefaultTailFraction);
    m.def("verify_kappa",
          [](const EnsembleStats& stats, const BoundReport& bounds) {
              if (!bounds.kappa || !bounds.epsilon) throw ParameterError("bound report carries no kappa");
              return verify_kappa(stats, bounds.applicable_bound(), *bounds.kappa, *bounds.epsilon,
                                  {bounds.mu_source, bounds.assumption_verified});
          },
          py::arg("stats"), py::arg("bounds"));

    py::class_<RateFit>(m, "RateFit")
        .def_readonly("exponent", &RateFit::exponent)
        .def_readonly("r_squared", &RateFit::r_squared)
        .def_readonly("window_begin", &RateFit::window_begin)
        .def_readonly("window_end", &RateFit::window_end);

    m.def("rate_fit",
          [](const std::vector<double>& gaps, std::optional<std::size_t> begin, std::optional<std::size_t> end) {
              RateWindow w = default_rate_window(gaps.empty() ? 0 : gaps.size() - 1);
              if (begin) w.begin = *begin;
              if (end) w.end = *end;
              return rate_fit(std::span<const double>(gaps), w);
          },
          py::arg("gaps"), py::arg("begin") = std::nullopt, py::arg("end") = std::nullopt);
}
