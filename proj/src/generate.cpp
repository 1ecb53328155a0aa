#include "ecim/generate.hpp"

#include "ecim/error.hpp"
#include "ecim/rng.hpp"

#include <cmath>
#include <string>

namespace ecim {

namespace {

Matrix gaussian_matrix(Eigen::Index n, double scale, Philox& rng) {
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = scale * rng.normal();
    }
    return a;
}

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs of
// R's diagonal folded into Q.
Matrix random_orthogonal(Eigen::Index n, Philox& rng) {
    const Eigen::MatrixXd a = gaussian_matrix(n, 1.0, rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

Matrix symmetrize(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

}  // namespace

std::string_view to_string(InstanceKind kind) noexcept {
    switch (kind) {
        case InstanceKind::SymmetricGaussian: return "symmetric_gaussian";
        case InstanceKind::AsymmetricGaussian: return "asymmetric_gaussian";
        case InstanceKind::PositiveDefinite: return "positive_definite";
        case InstanceKind::NegativeDefinite: return "negative_definite";
        case InstanceKind::Indefinite: return "indefinite";
    }
    return "unknown";
}

InstanceKind instance_kind_from_string(std::string_view name) {
    for (auto kind : {InstanceKind::SymmetricGaussian, InstanceKind::AsymmetricGaussian,
                      InstanceKind::PositiveDefinite, InstanceKind::NegativeDefinite, InstanceKind::Indefinite}) {
        if (to_string(kind) == name) return kind;
    }
    throw ParameterError("unknown instance kind '" + std::string(name) + "'");
}

CouplingProblem generate(const GeneratorSpec& spec) {
    if (spec.n == 0) throw ParameterError("n must be at least 1");
    if (!(spec.field_scale >= 0.0) || !std::isfinite(spec.field_scale)) {
        throw ParameterError("field_scale must be finite and nonnegative");
    }
    if (spec.kind == InstanceKind::Indefinite && spec.n < 2) {
        throw ParameterError("an indefinite instance needs n >= 2");
    }
    const auto n = static_cast<Eigen::Index>(spec.n);
    Philox rng(spec.seed);

    Matrix couplings;
    switch (spec.kind) {
        case InstanceKind::SymmetricGaussian:
            couplings = symmetrize(gaussian_matrix(n, 1.0 / std::sqrt(static_cast<double>(n)), rng));
            break;
        case InstanceKind::AsymmetricGaussian:
            couplings = gaussian_matrix(n, 1.0 / std::sqrt(static_cast<double>(n)), rng);
            break;
        case InstanceKind::PositiveDefinite:
        case InstanceKind::NegativeDefinite:
        case InstanceKind::Indefinite: {
            Vector eigenvalues(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                double sign = 1.0;
                if (spec.kind == InstanceKind::NegativeDefinite) sign = -1.0;
                if (spec.kind == InstanceKind::Indefinite) sign = i % 2 == 0 ? 1.0 : -1.0;
                eigenvalues[i] = sign * rng.uniform(0.5, 2.0);
            }
            const Matrix u = random_orthogonal(n, rng);
            couplings = symmetrize(u * eigenvalues.asDiagonal() * u.transpose());
            break;
        }
    }

    Vector field = Vector::Zero(n);
    if (spec.field_scale > 0.0) {
        for (Eigen::Index i = 0; i < n; ++i) field[i] = rng.normal();
        field *= spec.field_scale / field.norm();
    }

    std::string label = std::string(to_string(spec.kind)) + "-n" + std::to_string(spec.n) + "-seed" +
                        std::to_string(spec.seed);
    return CouplingProblem(std::move(couplings), std::move(field), std::move(label));
}

}  // namespace ecim
