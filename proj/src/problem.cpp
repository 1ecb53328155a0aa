#include "ecim/problem.hpp"

#include "ecim/error.hpp"
#include "vertex_enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ecim {

namespace {

void require_size(const CouplingProblem& p, Eigen::Index size, const char* what) {
    if (size != static_cast<Eigen::Index>(p.n())) {
        throw InstanceError(std::string(what) + ": expected length " + std::to_string(p.n()) +
                            ", got " + std::to_string(size));
    }
}

}  // namespace

CouplingProblem::CouplingProblem(Matrix couplings, Vector field, std::optional<std::string> label)
    : couplings_(std::move(couplings)), field_(std::move(field)), label_(std::move(label)) {
    if (field_.size() == 0) throw InstanceError("problem must have at least one spin");
    if (couplings_.rows() != couplings_.cols()) {
        throw InstanceError("J must be square, got " + std::to_string(couplings_.rows()) + "x" +
                            std::to_string(couplings_.cols()));
    }
    if (couplings_.rows() != field_.size()) {
        throw InstanceError("J has dimension " + std::to_string(couplings_.rows()) +
                            " but h has length " + std::to_string(field_.size()));
    }
    if (!couplings_.allFinite()) throw InstanceError("J contains a non-finite entry");
    if (!field_.allFinite()) throw InstanceError("h contains a non-finite entry");

    const Eigen::Index n = field_.size();
    symmetric_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        symmetric_(i, i) = couplings_(i, i);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double q = 0.5 * (couplings_(i, j) + couplings_(j, i));
            symmetric_(i, j) = q;
            symmetric_(j, i) = q;
        }
    }
}

bool CouplingProblem::operator==(const CouplingProblem& other) const {
    return couplings_ == other.couplings_ && field_ == other.field_ && label_ == other.label_;
}

SpinState::SpinState(Vector values) : values_(std::move(values)) {
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < -kBoxHalfWidth || v > kBoxHalfWidth) {
            throw InstanceError("spin " + std::to_string(i) + " = " + std::to_string(v) +
                                " lies outside [-1/2, 1/2]");
        }
    }
}

SpinState SpinState::zeros(std::size_t n) {
    return SpinState(Vector::Zero(static_cast<Eigen::Index>(n)));
}

SpinState SpinState::clamped(Vector values, bool* clamped) {
    bool moved = false;
    for (auto& v : values) {
        if (v > kBoxHalfWidth) {
            v = kBoxHalfWidth;
            moved = true;
        } else if (v < -kBoxHalfWidth) {
            v = -kBoxHalfWidth;
            moved = true;
        }
    }
    if (clamped) *clamped = moved;
    return SpinState(std::move(values));
}

DiscreteSpins::DiscreteSpins(std::vector<int> spins) : spins_(std::move(spins)) {
    for (std::size_t i = 0; i < spins_.size(); ++i) {
        if (spins_[i] != 1 && spins_[i] != -1) {
            throw InstanceError("spin " + std::to_string(i) + " = " + std::to_string(spins_[i]) +
                                " is not +1 or -1");
        }
    }
}

Vector DiscreteSpins::as_vector() const {
    Vector v(static_cast<Eigen::Index>(spins_.size()));
    for (std::size_t i = 0; i < spins_.size(); ++i) v[static_cast<Eigen::Index>(i)] = spins_[i];
    return v;
}

std::string_view to_string(Definiteness d) noexcept {
    switch (d) {
        case Definiteness::PositiveDefinite: return "PositiveDefinite";
        case Definiteness::PositiveSemidefinite: return "PositiveSemidefinite";
        case Definiteness::NegativeDefinite: return "NegativeDefinite";
        case Definiteness::NegativeSemidefinite: return "NegativeSemidefinite";
        case Definiteness::Indefinite: return "Indefinite";
        case Definiteness::Zero: return "Zero";
    }
    return "Unknown";
}

double relaxed_energy(const CouplingProblem& p, const Eigen::Ref<const Vector>& s) {
    require_size(p, s.size(), "relaxed_energy");
    return 0.5 * s.dot(p.J() * s) + p.h().dot(s);
}

double relaxed_energy(const CouplingProblem& p, const SpinState& s) {
    return relaxed_energy(p, s.values());
}

double discrete_energy(const CouplingProblem& p, const DiscreteSpins& sigma) {
    require_size(p, static_cast<Eigen::Index>(sigma.size()), "discrete_energy");
    const Vector v = sigma.as_vector();
    return 0.5 * v.dot(p.J() * v) + p.h().dot(v);
}

Vector gradient(const CouplingProblem& p, const Eigen::Ref<const Vector>& s) {
    require_size(p, s.size(), "gradient");
    return p.Q() * s + p.h();
}

Vector gradient(const CouplingProblem& p, const SpinState& s) {
    return gradient(p, s.values());
}

double zero_eigenvalue_tolerance(double lambda_min, double lambda_max) noexcept {
    return 1e-10 * std::max({1.0, std::fabs(lambda_max), std::fabs(lambda_min)});
}

Definiteness definiteness_from_spectrum(double lambda_min, double lambda_max) noexcept {
    const double tol = zero_eigenvalue_tolerance(lambda_min, lambda_max);
    if (std::fabs(lambda_min) <= tol && std::fabs(lambda_max) <= tol) return Definiteness::Zero;
    if (lambda_min > tol) return Definiteness::PositiveDefinite;
    if (lambda_min >= -tol) return Definiteness::PositiveSemidefinite;
    if (lambda_max < -tol) return Definiteness::NegativeDefinite;
    if (lambda_max <= tol) return Definiteness::NegativeSemidefinite;
    return Definiteness::Indefinite;
}

SpectralSummary spectral_summary(const CouplingProblem& p) {
    if (p.n() > kSpectralMaxN) {
        throw UnsupportedSizeError("spectral_summary supports n <= " +
                                   std::to_string(kSpectralMaxN) + ", got " +
                                   std::to_string(p.n()));
    }
    SpectralSummary out;
    out.Q = p.Q();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(out.Q),
                                                                Eigen::EigenvaluesOnly);
    const auto& eig = solver.eigenvalues();  // ascending
    out.lambda_min = eig[0];
    out.lambda_max = eig[eig.size() - 1];
    out.definiteness = definiteness_from_spectrum(out.lambda_min, out.lambda_max);

    // ||Qs + h||^2 is convex in s, so its supremum over the box sits at a vertex.
    if (p.n() <= kExactGradientBoundMaxN) {
        double best = 0.0;
        const Vector& h = p.h();
        detail::for_each_vertex(out.Q, kBoxHalfWidth,
                                [&](const std::vector<int>&, const Vector&, const Vector& qs) {
                                    best = std::max(best, (qs + h).squaredNorm());
                                });
        out.c_squared = best;
        out.c_squared_exact = true;
    } else {
        const double spectral_norm = std::max(std::fabs(out.lambda_min), std::fabs(out.lambda_max));
        const double bound = 0.5 * std::sqrt(static_cast<double>(p.n())) * spectral_norm + p.h().norm();
        out.c_squared = bound * bound;
        out.c_squared_exact = false;
    }
    return out;
}

DiscreteSpins round_to_spins(const SpinState& s) {
    std::vector<int> spins(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) spins[i] = s[i] < 0.0 ? -1 : 1;
    return DiscreteSpins(std::move(spins));
}

SpinState vertex_of(const DiscreteSpins& sigma) {
    return SpinState(kBoxHalfWidth * sigma.as_vector());
}

}  // namespace ecim
