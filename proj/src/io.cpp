#include "ecim/io.hpp"

#include "ecim/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ecim::io {

namespace {

const json& field(const json& j, const char* name, const char* context) {
    if (!j.is_object()) throw FormatError(std::string(context) + ": expected a JSON object");
    const auto it = j.find(name);
    if (it == j.end()) throw FormatError(std::string(context) + ": missing field '" + name + "'");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw FormatError(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw FormatError(where + ": value is not finite");
    return x;
}

double number_field(const json& j, const char* name, const char* context) {
    return number(field(j, name, context), std::string(context) + "." + name);
}

std::uint64_t unsigned_field(const json& j, const char* name, const char* context) {
    const json& v = field(j, name, context);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw FormatError(std::string(context) + "." + name + ": expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

Vector vector_from(const json& v, const std::string& where) {
    if (!v.is_array()) throw FormatError(where + ": expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

json array_of(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

template <class Parse>
auto wrap(const char* context, Parse&& parse) {
    try {
        return parse();
    } catch (const json::exception& e) {
        throw FormatError(std::string(context) + ": " + e.what());
    } catch (const InstanceError& e) {
        throw FormatError(std::string(context) + ": " + e.what());
    } catch (const ParameterError& e) {
        throw FormatError(std::string(context) + ": " + e.what());
    }
}

Definiteness definiteness_from_string(const std::string& name) {
    for (auto d : {Definiteness::PositiveDefinite, Definiteness::PositiveSemidefinite, Definiteness::NegativeDefinite,
                   Definiteness::NegativeSemidefinite, Definiteness::Indefinite, Definiteness::Zero}) {
        if (to_string(d) == name) return d;
    }
    throw FormatError("unknown definiteness '" + name + "'");
}

OptimumMethod method_from_string(const std::string& name) {
    for (auto m : {OptimumMethod::VertexScan, OptimumMethod::GridRefine, OptimumMethod::MultiStartProjGrad}) {
        if (to_string(m) == name) return m;
    }
    throw FormatError("unknown optimum method '" + name + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, const std::string& where) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw FormatError(where + ": '" + text + "' is not a number");
    return value;
}

}  // namespace

json to_json(const CouplingProblem& p) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < p.J().rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < p.J().cols(); ++j) row.push_back(p.J()(i, j));
        rows.push_back(std::move(row));
    }
    json out;
    out["n"] = p.n();
    out["J"] = std::move(rows);
    out["h"] = array_of(p.h());
    out["label"] = p.label() ? json(*p.label()) : json(nullptr);
    return out;
}

CouplingProblem problem_from_json(const json& j) {
    return wrap("problem", [&] {
        const std::uint64_t n = unsigned_field(j, "n", "problem");
        if (n == 0) throw FormatError("problem.n: must be at least 1");
        const json& rows = field(j, "J", "problem");
        if (!rows.is_array() || rows.size() != n) {
            throw FormatError("problem.J: expected " + std::to_string(n) + " rows");
        }
        Matrix couplings(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const std::string where = "problem.J[" + std::to_string(i) + "]";
            if (!rows[i].is_array() || rows[i].size() != n) {
                throw FormatError(where + ": ragged row, expected " + std::to_string(n) + " entries");
            }
            couplings.row(static_cast<Eigen::Index>(i)) = vector_from(rows[i], where).transpose();
        }
        Vector h = vector_from(field(j, "h", "problem"), "problem.h");
        if (static_cast<std::uint64_t>(h.size()) != n) {
            throw FormatError("problem.h: expected " + std::to_string(n) + " entries, got " + std::to_string(h.size()));
        }
        std::optional<std::string> label;
        if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) throw FormatError("problem.label: expected a string or null");
            label = it->get<std::string>();
        }
        return CouplingProblem(std::move(couplings), std::move(h), std::move(label));
    });
}

json to_json(const RunConfig& config) {
    json schedule;
    if (config.schedule.kind() == StepSchedule::Kind::Constant) {
        schedule["kind"] = "constant";
        schedule["beta"] = config.schedule.beta();
    } else {
        schedule["kind"] = "poly";
        schedule["beta0"] = config.schedule.beta();
        schedule["r"] = config.schedule.exponent();
    }
    json out;
    out["mode"] = std::string(to_string(config.mode.kind));
    out["alpha"] = config.mode.alpha;
    out["schedule"] = std::move(schedule);
    out["sigma2"] = config.noise.sigma_squared;
    out["K"] = config.iterations;
    out["seed"] = config.noise.seed;
    out["record_states"] = config.record_states;
    if (config.initial_state) out["s0"] = array_of(*config.initial_state);
    return out;
}

RunConfig run_config_from_json(const json& j) {
    return wrap("config", [&] {
        RunConfig config;
        const json& mode = field(j, "mode", "config");
        if (!mode.is_string()) throw FormatError("config.mode: expected a string");
        config.mode.kind = mode_kind_from_string(mode.get<std::string>());
        if (j.contains("alpha")) config.mode.alpha = number_field(j, "alpha", "config");

        const json& schedule = field(j, "schedule", "config");
        const json& kind = field(schedule, "kind", "config.schedule");
        if (!kind.is_string()) throw FormatError("config.schedule.kind: expected a string");
        const auto kind_name = kind.get<std::string>();
        if (kind_name == "constant") {
            config.schedule = StepSchedule::constant(number_field(schedule, "beta", "config.schedule"));
        } else if (kind_name == "poly") {
            config.schedule = StepSchedule::poly_decay(number_field(schedule, "beta0", "config.schedule"),
                                                       number_field(schedule, "r", "config.schedule"));
        } else {
            throw FormatError("config.schedule.kind: expected 'constant' or 'poly', got '" + kind_name + "'");
        }

        config.noise.sigma_squared = number_field(j, "sigma2", "config");
        if (config.noise.sigma_squared < 0.0) throw FormatError("config.sigma2: must be nonnegative");
        config.iterations = unsigned_field(j, "K", "config");
        config.noise.seed = unsigned_field(j, "seed", "config");
        if (const auto it = j.find("record_states"); it != j.end()) {
            if (!it->is_boolean()) throw FormatError("config.record_states: expected a boolean");
            config.record_states = it->get<bool>();
        }
        if (const auto it = j.find("s0"); it != j.end() && !it->is_null()) {
            config.initial_state = vector_from(*it, "config.s0");
        }
        return config;
    });
}

json to_json(const GeneratorSpec& spec) {
    json out;
    out["n"] = spec.n;
    out["kind"] = std::string(to_string(spec.kind));
    out["field_scale"] = spec.field_scale;
    out["seed"] = spec.seed;
    return out;
}

GeneratorSpec generator_spec_from_json(const json& j) {
    return wrap("spec", [&] {
        GeneratorSpec spec;
        spec.n = unsigned_field(j, "n", "spec");
        const json& kind = field(j, "kind", "spec");
        if (!kind.is_string()) throw FormatError("spec.kind: expected a string");
        spec.kind = instance_kind_from_string(kind.get<std::string>());
        spec.field_scale = number_field(j, "field_scale", "spec");
        spec.seed = unsigned_field(j, "seed", "spec");
        return spec;
    });
}

json to_json(const OracleReport& report) {
    json out;
    out["e_star"] = report.e_star;
    out["s_star"] = array_of(report.s_star);
    out["method"] = std::string(to_string(report.method));
    out["certified"] = report.certified;
    out["mu_hat"] = report.mu_hat ? json(*report.mu_hat) : json(nullptr);
    out["definiteness"] = std::string(to_string(report.definiteness));
    out["noise_required"] = report.noise_required;
    out["lambda_max"] = report.lambda_max;
    out["lambda_min"] = report.lambda_min;
    out["c_squared"] = report.c_squared;
    return out;
}

OracleReport oracle_report_from_json(const json& j) {
    return wrap("oracle", [&] {
        OracleReport r;
        r.e_star = number_field(j, "e_star", "oracle");
        r.s_star = vector_from(field(j, "s_star", "oracle"), "oracle.s_star");
        const json& method = field(j, "method", "oracle");
        if (!method.is_string()) throw FormatError("oracle.method: expected a string");
        r.method = method_from_string(method.get<std::string>());
        const json& certified = field(j, "certified", "oracle");
        if (!certified.is_boolean()) throw FormatError("oracle.certified: expected a boolean");
        r.certified = certified.get<bool>();
        const json& mu = field(j, "mu_hat", "oracle");
        if (!mu.is_null()) r.mu_hat = number(mu, "oracle.mu_hat");
        if (const auto it = j.find("definiteness"); it != j.end()) {
            r.definiteness = definiteness_from_string(it->get<std::string>());
        }
        if (const auto it = j.find("noise_required"); it != j.end()) r.noise_required = it->get<bool>();
        if (j.contains("lambda_max")) r.lambda_max = number_field(j, "lambda_max", "oracle");
        if (j.contains("lambda_min")) r.lambda_min = number_field(j, "lambda_min", "oracle");
        if (j.contains("c_squared")) r.c_squared = number_field(j, "c_squared", "oracle");
        return r;
    });
}

json to_json(const BoundReport& r) {
    json out;
    out["lambda_max"] = r.lambda_max;
    out["mu_used"] = r.mu_used;
    out["mu_source"] = std::string(to_string(r.mu_source));
    out["c_squared"] = r.c_squared;
    out["liminf_bound_original"] = r.liminf_bound_original;
    out["liminf_bound_modified"] = r.liminf_bound_modified;
    out["kappa"] = r.kappa ? json(*r.kappa) : json(nullptr);
    out["epsilon"] = r.epsilon ? json(*r.epsilon) : json(nullptr);
    out["beta"] = r.beta;
    out["n"] = r.n;
    out["sigma2"] = r.sigma_squared;
    out["initial_gap"] = r.initial_gap;
    out["mode"] = std::string(to_string(r.mode));
    out["schedule_kind"] = r.schedule_kind == StepSchedule::Kind::Constant ? "constant" : "poly";
    out["assumption_verified"] = r.assumption_verified;
    return out;
}

BoundReport bound_report_from_json(const json& j) {
    return wrap("bounds", [&] {
        BoundReport r;
        r.lambda_max = number_field(j, "lambda_max", "bounds");
        r.mu_used = number_field(j, "mu_used", "bounds");
        const json& source = field(j, "mu_source", "bounds");
        if (!source.is_string()) throw FormatError("bounds.mu_source: expected a string");
        r.mu_source = mu_source_from_string(source.get<std::string>());
        r.c_squared = number_field(j, "c_squared", "bounds");
        r.liminf_bound_original = number_field(j, "liminf_bound_original", "bounds");
        r.liminf_bound_modified = number_field(j, "liminf_bound_modified", "bounds");
        if (const json& kappa = field(j, "kappa", "bounds"); !kappa.is_null()) {
            r.kappa = unsigned_field(j, "kappa", "bounds");
        }
        if (const json& eps = field(j, "epsilon", "bounds"); !eps.is_null()) r.epsilon = number(eps, "bounds.epsilon");
        r.beta = number_field(j, "beta", "bounds");
        r.n = unsigned_field(j, "n", "bounds");
        r.sigma_squared = number_field(j, "sigma2", "bounds");
        r.initial_gap = number_field(j, "initial_gap", "bounds");
        const json& mode = field(j, "mode", "bounds");
        if (!mode.is_string()) throw FormatError("bounds.mode: expected a string");
        r.mode = mode_kind_from_string(mode.get<std::string>());
        const json& kind = field(j, "schedule_kind", "bounds");
        if (!kind.is_string()) throw FormatError("bounds.schedule_kind: expected a string");
        r.schedule_kind = kind.get<std::string>() == "constant" ? StepSchedule::Kind::Constant
                                                                : StepSchedule::Kind::PolyDecay;
        const json& verified = field(j, "assumption_verified", "bounds");
        if (!verified.is_boolean()) throw FormatError("bounds.assumption_verified: expected a boolean");
        r.assumption_verified = verified.get<bool>();
        return r;
    });
}

json to_json(const Verdict& v) {
    json out;
    out["check"] = v.check;
    out["bound"] = v.bound;
    out["observed"] = v.observed;
    out["margin"] = v.margin;
    out["verdict"] = std::string(to_string(v.verdict));
    out["mu_source"] = std::string(to_string(v.mu_source));
    return out;
}

json to_json(const RateFit& fit) {
    json out;
    out["exponent"] = fit.exponent;
    out["r_squared"] = fit.r_squared;
    out["window"] = {fit.window_begin, fit.window_end};
    return out;
}

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "k,energy\n";
    for (std::size_t k = 0; k < trajectory.energies.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(trajectory.energies[k]);
        out += '\n';
    }
    return out;
}

std::string ensemble_csv(const EnsembleStats& stats) {
    std::string out = "k,mean_gap,ci_halfwidth\n";
    for (std::size_t k = 0; k < stats.mean_gap.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += format_double(stats.mean_gap[k]);
        out += ',';
        out += format_double(stats.ci_halfwidth[k]);
        out += '\n';
    }
    return out;
}

EnsembleStats ensemble_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "k,mean_gap,ci_halfwidth") {
        throw FormatError("ensemble: header must be 'k,mean_gap,ci_halfwidth'");
    }
    EnsembleStats stats;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        const std::string where = "ensemble row " + std::to_string(row + 1);
        if (cells.size() != 3) throw FormatError(where + ": expected 3 columns");
        if (cells[0] != std::to_string(row)) throw FormatError(where + ": column k should be " + std::to_string(row));
        stats.mean_gap.push_back(parse_double(cells[1], where + " mean_gap"));
        stats.ci_halfwidth.push_back(parse_double(cells[2], where + " ci_halfwidth"));
        ++row;
    }
    if (row == 0) throw FormatError("ensemble: no data rows");
    stats.iterations = row - 1;
    return stats;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json read_json(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open '" + temp.string() + "' for writing");
        out << text;
        if (!out.flush()) throw FormatError("failed writing '" + temp.string() + "'");
    }
    std::filesystem::rename(temp, path);
}

}  // namespace ecim::io
