#include "helpers.hpp"

#include "ecim/error.hpp"
#include "ecim/generate.hpp"
#include "ecim/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <string>

using namespace ecim;
using io::json;

namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("problem JSON round-trip") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CouplingProblem p = generate({1 + seed, InstanceKind::AsymmetricGaussian, 0.7, seed});
        const json j = io::to_json(p);
        CHECK(j.at("n") == p.n());
        const CouplingProblem back = io::problem_from_json(json::parse(j.dump()));
        CHECK(back == p);
    }
    const CouplingProblem unlabeled(test::mat({{1, 2}, {3, 4}}), test::vec({0.5, -0.5}));
    const json j = io::to_json(unlabeled);
    CHECK(j.at("label").is_null());
    CHECK(io::problem_from_json(j) == unlabeled);
}

TEST_CASE("problem reader names the offending field") {
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"n":2,"J":[[0,1],[1]],"h":[0,0],"label":null})")); })
              .find("problem.J[1]") != std::string::npos);
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"n":2,"J":[[0,1],[1,0]],"h":[0],"label":null})")); })
              .find("problem.h") != std::string::npos);
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"J":[[0]],"h":[0]})")); }).find("'n'") !=
          std::string::npos);
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"n":1,"J":[["x"]],"h":[0]})")); }).find("problem.J") !=
          std::string::npos);
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"n":1,"J":[[0]],"h":[0],"label":3})")); })
              .find("problem.label") != std::string::npos);
    CHECK(error_of([] { io::problem_from_json(json::parse(R"({"n":0,"J":[],"h":[]})")); }) != "");
}

TEST_CASE("run config JSON round-trip") {
    RunConfig c;
    c.mode.kind = ModeKind::Linearized;
    c.mode.alpha = 1.0;
    c.schedule = StepSchedule::constant(0.05);
    c.noise = {0.01, 42};
    c.iterations = 20000;
    c.record_states = true;
    c.initial_state = test::vec({0.1, -0.2});
    const RunConfig back = io::run_config_from_json(json::parse(io::to_json(c).dump()));
    CHECK(back.mode == c.mode);
    CHECK(back.schedule == c.schedule);
    CHECK(back.noise == c.noise);
    CHECK(back.iterations == c.iterations);
    CHECK(back.record_states);
    CHECK(*back.initial_state == *c.initial_state);

    const RunConfig poly = io::run_config_from_json(json::parse(
        R"({"mode":"transfer_noise_scaled","schedule":{"kind":"poly","beta0":0.5,"r":0.75},"sigma2":0.01,"K":10,"seed":3})"));
    CHECK(poly.schedule == StepSchedule::poly_decay(0.5, 0.75));
    CHECK(poly.mode.alpha == 1.0);
    CHECK_FALSE(poly.record_states);
    CHECK_FALSE(poly.initial_state);
}

TEST_CASE("run config reader never defaults physics parameters") {
    const std::string base = R"("mode":"linearized","schedule":{"kind":"constant","beta":0.1},"K":5,"seed":1)";
    CHECK(error_of([&] { io::run_config_from_json(json::parse("{" + base + "}")); }).find("sigma2") !=
          std::string::npos);
    CHECK(error_of([] {
              io::run_config_from_json(json::parse(R"({"mode":"linearized","schedule":{"kind":"constant"},"sigma2":0,"K":1,"seed":1})"));
          }).find("beta") != std::string::npos);
    CHECK(error_of([] {
              io::run_config_from_json(json::parse(R"({"mode":"linear","schedule":{"kind":"constant","beta":1},"sigma2":0,"K":1,"seed":1})"));
          }).find("linear") != std::string::npos);
    CHECK(error_of([] {
              io::run_config_from_json(json::parse(R"({"mode":"linearized","schedule":{"kind":"poly","beta0":1,"r":0.3},"sigma2":0,"K":1,"seed":1})"));
          }) != "");
    CHECK(error_of([] {
              io::run_config_from_json(json::parse(R"({"mode":"linearized","schedule":{"kind":"constant","beta":1},"sigma2":-1,"K":1,"seed":1})"));
          }).find("sigma2") != std::string::npos);
    CHECK(error_of([] {
              io::run_config_from_json(json::parse(R"({"mode":"linearized","schedule":{"kind":"constant","beta":1},"sigma2":0,"K":-1,"seed":1})"));
          }).find("K") != std::string::npos);
}

TEST_CASE("generator spec, oracle and bound reports round-trip") {
    const GeneratorSpec spec{5, InstanceKind::NegativeDefinite, 0.3, 8};
    const GeneratorSpec back = io::generator_spec_from_json(io::to_json(spec));
    CHECK(back.n == 5);
    CHECK(back.kind == InstanceKind::NegativeDefinite);
    CHECK(back.field_scale == 0.3);
    CHECK(back.seed == 8);

    io::OracleReport o;
    o.e_star = -0.123456789012345;
    o.s_star = test::vec({0.5, -0.1});
    o.method = OptimumMethod::VertexScan;
    o.certified = true;
    o.definiteness = Definiteness::NegativeDefinite;
    o.noise_required = true;
    const json oj = io::to_json(o);
    CHECK(oj.at("mu_hat").is_null());
    CHECK(oj.at("method") == "VertexScan");
    const io::OracleReport ob = io::oracle_report_from_json(json::parse(oj.dump()));
    CHECK(ob.e_star == o.e_star);
    CHECK(ob.s_star == o.s_star);
    CHECK(ob.method == o.method);
    CHECK(ob.certified);
    CHECK_FALSE(ob.mu_hat);
    CHECK(ob.definiteness == Definiteness::NegativeDefinite);

    BoundReport b;
    b.lambda_max = 2;
    b.mu_used = 0.5;
    b.mu_source = MuSource::UserSupplied;
    b.c_squared = 1;
    b.liminf_bound_original = 1;
    b.liminf_bound_modified = 0.208;
    b.kappa = 100;
    b.epsilon = 0.1;
    b.mode = ModeKind::Linearized;
    b.assumption_verified = true;
    const BoundReport bb = io::bound_report_from_json(json::parse(io::to_json(b).dump()));
    CHECK(bb.kappa == b.kappa);
    CHECK(bb.epsilon == b.epsilon);
    CHECK(bb.mu_source == MuSource::UserSupplied);
    CHECK(bb.liminf_bound_modified == 0.208);
    CHECK(bb.mode == ModeKind::Linearized);
    CHECK(bb.assumption_verified);
}

TEST_CASE("verdict JSON has the documented fields") {
    const Verdict v{"gap_bound", 0.5, 0.25, 0.25, VerdictKind::Pass, MuSource::Estimated};
    const json j = io::to_json(v);
    CHECK(j.at("check") == "gap_bound");
    CHECK(j.at("bound") == 0.5);
    CHECK(j.at("observed") == 0.25);
    CHECK(j.at("margin") == 0.25);
    CHECK(j.at("verdict") == "PASS");
    CHECK(j.at("mu_source") == "estimated");
}

TEST_CASE("CSV writers and reader") {
    Trajectory t{{1.5, -0.25, 1e-300}, SpinState::zeros(1), {}, 0, 0};
    CHECK(io::trajectory_csv(t) == "k,energy\n0,1.5\n1,-0.25\n2,1e-300\n");

    EnsembleStats s;
    s.mean_gap = {1.0, 0.1234567890123456789, 3e-7};
    s.ci_halfwidth = {0.0, 0.01, 1e-8};
    const std::string csv = io::ensemble_csv(s);
    CHECK(csv.rfind("k,mean_gap,ci_halfwidth\n0,1,0\n", 0) == 0);
    const EnsembleStats back = io::ensemble_from_csv(csv);
    CHECK(back.mean_gap == s.mean_gap);
    CHECK(back.ci_halfwidth == s.ci_halfwidth);
    CHECK(back.iterations == 2);

    CHECK(error_of([] { io::ensemble_from_csv("k,gap\n0,1\n"); }).find("header") != std::string::npos);
    CHECK(error_of([] { io::ensemble_from_csv("k,mean_gap,ci_halfwidth\n0,1\n"); }).find("row 1") !=
          std::string::npos);
    CHECK(error_of([] { io::ensemble_from_csv("k,mean_gap,ci_halfwidth\n0,abc,0\n"); }).find("mean_gap") !=
          std::string::npos);
    CHECK(error_of([] { io::ensemble_from_csv("k,mean_gap,ci_halfwidth\n1,1,0\n"); }) != "");
    CHECK(error_of([] { io::ensemble_from_csv("k,mean_gap,ci_halfwidth\n"); }) != "");
}

TEST_CASE("doubles format to the shortest round-trip string") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(-2.0) == "-2");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(io::format_double(x)) == x);
}

TEST_CASE("atomic writes replace the file and leave no temporary") {
    const auto dir = std::filesystem::temp_directory_path() / "ecim_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.json";
    io::write_text_atomic(path, "first");
    io::write_text_atomic(path, "second");
    CHECK(io::read_text(path) == "second");
    CHECK_FALSE(std::filesystem::exists(dir / "out.json.tmp"));
    CHECK_THROWS_AS(io::read_text(dir / "missing.json"), FormatError);
    io::write_text_atomic(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(io::read_json(dir / "bad.json"), FormatError);
    io::write_text_atomic(dir / "overflow.json", R"({"n":1,"J":[[1e999]],"h":[0]})");
    CHECK_THROWS_AS(io::read_json(dir / "overflow.json"), FormatError);
    std::filesystem::remove_all(dir);
}
