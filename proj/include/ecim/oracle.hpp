#pragma once

#include "ecim/problem.hpp"

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace ecim {

enum class OptimumMethod { VertexScan, GridRefine, MultiStartProjGrad };

std::string_view to_string(OptimumMethod method) noexcept;

/// Minimum of the relaxed objective over the box.
struct RelaxedOptimum {
    SpinState s_star;
    double e_star = 0.0;
    OptimumMethod method = OptimumMethod::MultiStartProjGrad;
    /// True only when e_star is provably the global box minimum.
    bool certified = false;
    /// Projected-gradient starts that met the stationarity tolerance (0 for exact methods).
    std::size_t converged_starts = 0;
    /// Final energy of every projected-gradient start, in start order.
    std::vector<double> probe_energies;
};

struct OptimumBudget {
    std::size_t starts = 64;
    std::size_t max_iterations = 100000;
    /// Projected-gradient stationarity threshold ||s - P(s - grad E(s))||.
    double tolerance = 1e-9;
    /// Spacing the grid search refines down to.
    double grid_resolution = 1e-3;
    std::uint64_t seed = 0;
};

/// Largest n handled by the exhaustive grid search.
inline constexpr std::size_t kGridMaxN = 4;
/// Largest n handled by the exhaustive vertex scan.
inline constexpr std::size_t kVertexScanMaxN = 20;
/// Largest n handled by discrete_optimum.
inline constexpr std::size_t kDiscreteMaxN = 24;

/// Dispatches to the cheapest certifiable method: grid search for n <= 4, vertex
/// scan for concave instances up to n = 20, and multi-start projected gradient
/// otherwise.
RelaxedOptimum relaxed_optimum(const CouplingProblem& p, const OptimumBudget& budget = {});

/// Grid scan refined to `budget.grid_resolution`, polished by solving the
/// stationarity system on every face of the box. Exact, so always certified.
RelaxedOptimum relaxed_optimum_grid(const CouplingProblem& p, const OptimumBudget& budget = {});

/// Minimum over the 2^n box vertices. Certified when Q is negative semidefinite.
RelaxedOptimum relaxed_optimum_vertex_scan(const CouplingProblem& p);

/// Multi-start projected gradient descent. Certified only for convex instances
/// where a start reached the stationarity tolerance.
RelaxedOptimum relaxed_optimum_projected_gradient(const CouplingProblem& p, const OptimumBudget& budget = {});

struct DiscreteOptimum {
    DiscreteSpins sigma;
    double energy = 0.0;
};

/// Exact Ising ground state by enumeration; ties resolve to the lexicographically
/// smallest spin vector (with -1 < +1).
DiscreteOptimum discrete_optimum(const CouplingProblem& p);

struct PLEstimate {
    double mu_hat = 0.0;
    std::size_t sample_count = 0;
    SpinState min_ratio_location;
};

/// Minimum of 1/2 ||grad E||^2 / (E - E*) over box-uniform samples.
PLEstimate pl_constant_estimate(const CouplingProblem& p, double e_star, std::size_t sample_count,
                                std::uint64_t seed = 0);

struct DefinitenessClass {
    Definiteness definiteness = Definiteness::Zero;
    /// "convex", "concave", "saddle" or "linear".
    std::string_view landscape;
    /// Stationary points other than minima exist, so noise is needed to escape them.
    bool noise_required = false;
};

DefinitenessClass classify_definiteness(const SpectralSummary& summary);

/// Whether the PL inequality is known to hold on the box (strongly convex Q).
bool pl_assumption_verified(Definiteness d) noexcept;

}  // namespace ecim
