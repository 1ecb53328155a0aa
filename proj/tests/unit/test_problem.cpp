#include "helpers.hpp"

#include "ecim/error.hpp"
#include "ecim/problem.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ecim;
using ecim::test::mat;
using ecim::test::problem;
using ecim::test::vec;

TEST_CASE("relaxed energy examples") {
    CHECK(relaxed_energy(problem({{0, 0}, {0, 0}}, {0, 0}), SpinState(vec({0.5, 0.5}))) == 0.0);
    CHECK(relaxed_energy(problem({{0, 1}, {1, 0}}, {0, 0}), SpinState(vec({0.5, 0.5}))) == 0.25);
    CHECK(relaxed_energy(problem({{2, 0}, {0, 2}}, {1, 0}), SpinState(vec({-0.5, 0}))) == -0.25);
}

TEST_CASE("discrete energy examples") {
    CHECK(discrete_energy(problem({{0, 1}, {1, 0}}, {0, 0}), DiscreteSpins({1, -1})) == -1.0);
    CHECK(discrete_energy(problem({{0, 0}, {0, 0}}, {1, -1}), DiscreteSpins({-1, 1})) == -2.0);
    CHECK(discrete_energy(problem({{0, 1}, {1, 0}}, {1, 1}), DiscreteSpins({1, 1})) == 3.0);
}

TEST_CASE("gradient examples") {
    CHECK(gradient(problem({{2, 0}, {0, 2}}, {1, 0}), SpinState(vec({0.5, 0}))) == vec({2, 0}));

    const CouplingProblem asym = problem({{0, 2}, {0, 0}}, {0, 0});
    CHECK(asym.Q() == mat({{0, 1}, {1, 0}}));
    CHECK(gradient(asym, SpinState(vec({0.5, 0.5}))) == vec({0.5, 0.5}));

    const CouplingProblem p = problem({{1, -3, 2}, {0.5, 0, 1}, {4, 2, -1}}, {0.3, -0.7, 1.1});
    CHECK(gradient(p, SpinState::zeros(3)) == p.h());
}

TEST_CASE("spectral summary examples") {
    const SpectralSummary a = spectral_summary(problem({{0, 2}, {0, 0}}, {0, 0}));
    CHECK(a.Q == mat({{0, 1}, {1, 0}}));
    CHECK(a.lambda_max == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.lambda_min == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(a.definiteness == Definiteness::Indefinite);

    const SpectralSummary b = spectral_summary(problem({{2, 0}, {0, 2}}, {0, 0}));
    CHECK(b.lambda_max == doctest::Approx(2.0));
    CHECK(b.lambda_min == doctest::Approx(2.0));
    CHECK(b.definiteness == Definiteness::PositiveDefinite);
    CHECK(b.c_squared == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(b.c_squared_exact);

    const SpectralSummary c = spectral_summary(problem({{1, 0}, {0, 1}}, {0, 0}));
    CHECK(c.c_squared == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("definiteness classes") {
    CHECK(definiteness_from_spectrum(1, 2) == Definiteness::PositiveDefinite);
    CHECK(definiteness_from_spectrum(0, 2) == Definiteness::PositiveSemidefinite);
    CHECK(definiteness_from_spectrum(-2, -1) == Definiteness::NegativeDefinite);
    CHECK(definiteness_from_spectrum(-2, 0) == Definiteness::NegativeSemidefinite);
    CHECK(definiteness_from_spectrum(-1, 1) == Definiteness::Indefinite);
    CHECK(definiteness_from_spectrum(0, 0) == Definiteness::Zero);
    CHECK(definiteness_from_spectrum(-1e-12, 3) == Definiteness::PositiveSemidefinite);
    CHECK(zero_eigenvalue_tolerance(-5, 3) == doctest::Approx(5e-10));
    CHECK(zero_eigenvalue_tolerance(0.1, 0.2) == doctest::Approx(1e-10));
}

TEST_CASE("c^2 falls back to the analytic bound above the enumeration limit") {
    Philox rng(5);
    const std::size_t n = kExactGradientBoundMaxN + 1;
    const CouplingProblem p = test::random_problem(rng, n);
    const SpectralSummary s = spectral_summary(p);
    CHECK_FALSE(s.c_squared_exact);
    const double q_norm = std::max(std::abs(s.lambda_max), std::abs(s.lambda_min));
    const double expected = std::pow(0.5 * std::sqrt(static_cast<double>(n)) * q_norm + p.h().norm(), 2);
    CHECK(s.c_squared == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rounding examples") {
    CHECK(round_to_spins(SpinState(vec({0.3, -0.2}))) == DiscreteSpins({1, -1}));
    CHECK(round_to_spins(SpinState(vec({0, 0}))) == DiscreteSpins({1, 1}));
    CHECK(round_to_spins(SpinState(vec({-0.5, 0.5}))) == DiscreteSpins({-1, 1}));
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(CouplingProblem(Matrix::Zero(2, 3), Vector::Zero(2)), InstanceError);
    CHECK_THROWS_AS(CouplingProblem(Matrix::Zero(2, 2), Vector::Zero(3)), InstanceError);
    CHECK_THROWS_AS(CouplingProblem(Matrix::Zero(0, 0), Vector::Zero(0)), InstanceError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(CouplingProblem(bad, Vector::Zero(2)), InstanceError);
    CHECK_THROWS_AS(CouplingProblem(Matrix::Zero(2, 2), vec({0, INFINITY})), InstanceError);

    CHECK_THROWS_AS(SpinState(vec({0.6})), InstanceError);
    CHECK_THROWS_AS(SpinState(vec({NAN})), InstanceError);
    CHECK_THROWS_AS(DiscreteSpins({1, 0}), InstanceError);

    const CouplingProblem p = problem({{0, 1}, {1, 0}}, {0, 0});
    CHECK_THROWS_AS(relaxed_energy(p, SpinState::zeros(3)), InstanceError);
    CHECK_THROWS_AS(gradient(p, SpinState::zeros(1)), InstanceError);
    CHECK_THROWS_AS(discrete_energy(p, DiscreteSpins({1, 1, 1})), InstanceError);
}

TEST_CASE("clamping reports whether it moved anything") {
    bool moved = true;
    CHECK(SpinState::clamped(vec({0.1, -0.5}), &moved) == SpinState(vec({0.1, -0.5})));
    CHECK_FALSE(moved);
    CHECK(SpinState::clamped(vec({0.7, -2}), &moved) == SpinState(vec({0.5, -0.5})));
    CHECK(moved);
}

TEST_CASE("property: s^T J s equals s^T Q s") {
    Philox rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 15;
        const CouplingProblem p = test::random_problem(rng, n);
        const Vector s = test::random_box_point(rng, n);
        const double a = s.dot(p.J() * s);
        const double b = s.dot(p.Q() * s);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("property: gradient matches central differences") {
    Philox rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 10;
        const CouplingProblem p = test::random_problem(rng, n);
        const Vector s = test::random_box_point(rng, n);
        Vector fd(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            Vector plus = s, minus = s;
            plus[i] += 1e-5;
            minus[i] -= 1e-5;
            fd[i] = (relaxed_energy(p, plus) - relaxed_energy(p, minus)) / 2e-5;
        }
        const Vector g = gradient(p, s);
        CHECK((g - fd).norm() <= 1e-6 * std::max(g.norm(), 1e-12));
    }
}

TEST_CASE("property: Rayleigh quotients lie in the spectrum") {
    Philox rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + trial;
        const CouplingProblem p = test::random_problem(rng, n);
        const SpectralSummary s = spectral_summary(p);
        CHECK(s.lambda_min <= s.lambda_max);
        CHECK((s.Q - s.Q.transpose()).norm() <= 1e-12 * std::max(1.0, s.Q.norm()));
        for (int k = 0; k < 100; ++k) {
            const Vector v = test::random_vector(rng, n).normalized();
            const double r = v.dot(s.Q * v);
            CHECK(r <= s.lambda_max + 1e-9);
            CHECK(r >= s.lambda_min - 1e-9);
        }
    }
}

TEST_CASE("property: c^2 bounds the squared gradient over the box") {
    Philox rng(24);
    for (std::size_t n : {1u, 3u, 6u, 10u}) {
        const CouplingProblem p = test::random_problem(rng, n);
        const SpectralSummary s = spectral_summary(p);
        REQUIRE(s.c_squared_exact);
        for (int k = 0; k < 10000 / 4; ++k) {
            CHECK(gradient(p, test::random_box_point(rng, n)).squaredNorm() <= s.c_squared + 1e-9);
        }
        // The supremum is attained at a vertex.
        double best = 0.0;
        for (std::uint64_t mask = 0; mask < (1u << n); ++mask) {
            Vector v(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = (mask >> i & 1) ? 0.5 : -0.5;
            best = std::max(best, gradient(p, v).squaredNorm());
        }
        CHECK(s.c_squared == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("property: rounding a vertex recovers its spins") {
    Philox rng(25);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> spins(1 + trial % 12);
        for (auto& s : spins) s = rng.uniform() < 0.5 ? -1 : 1;
        const DiscreteSpins sigma(spins);
        CHECK(round_to_spins(vertex_of(sigma)) == sigma);
    }
}

TEST_CASE("discrete energy is the relaxed energy at twice the vertex") {
    Philox rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 8;
        const CouplingProblem p = test::random_problem(rng, n);
        std::vector<int> spins(n);
        for (auto& s : spins) s = rng.uniform() < 0.5 ? -1 : 1;
        const DiscreteSpins sigma(spins);
        const Vector x = sigma.as_vector();
        CHECK(discrete_energy(p, sigma) == doctest::Approx(0.5 * x.dot(p.J() * x) + p.h().dot(x)));
    }
}
