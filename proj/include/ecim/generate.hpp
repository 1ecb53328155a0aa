#pragma once

#include "ecim/problem.hpp"

#include <cstdint>
#include <string_view>

namespace ecim {

enum class InstanceKind {
    SymmetricGaussian,
    AsymmetricGaussian,
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
};

std::string_view to_string(InstanceKind kind) noexcept;
InstanceKind instance_kind_from_string(std::string_view name);

struct GeneratorSpec {
    std::size_t n = 8;
    InstanceKind kind = InstanceKind::SymmetricGaussian;
    /// ||h||; zero disables the field.
    double field_scale = 0.0;
    std::uint64_t seed = 0;
};

/// Random instance of the requested family. Gaussian kinds draw J_ij ~ N(0, 1/n);
/// the definite and indefinite kinds build U diag(lambda) U^T with U Haar-orthogonal
/// and |lambda_i| uniform in [0.5, 2]. Deterministic for a fixed spec.
CouplingProblem generate(const GeneratorSpec& spec);

}  // namespace ecim
