#include "ecim/oracle.hpp"

#include "ecim/error.hpp"
#include "ecim/parallel.hpp"
#include "ecim/rng.hpp"
#include "vertex_enumeration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ecim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
    double energy = kInf;
    Vector s;
};

void keep_better(Candidate& best, double energy, const Vector& s) {
    if (energy < best.energy) {
        best.energy = energy;
        best.s = s;
    }
}

Vector clamp_to_box(Vector s) {
    return s.cwiseMax(-kBoxHalfWidth).cwiseMin(kBoxHalfWidth);
}

bool is_concave(Definiteness d) {
    return d == Definiteness::NegativeDefinite || d == Definiteness::NegativeSemidefinite ||
           d == Definiteness::Zero;
}

bool is_convex(Definiteness d) {
    return d == Definiteness::PositiveDefinite || d == Definiteness::PositiveSemidefinite ||
           d == Definiteness::Zero;
}

// Evaluates every grid point of a tensor grid; axes[i] lists the coordinates along axis i.
template <class Visitor>
void for_each_grid_point(const std::vector<std::vector<double>>& axes, Visitor&& visit) {
    const std::size_t n = axes.size();
    std::vector<std::size_t> index(n, 0);
    Vector s(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) s[static_cast<Eigen::Index>(i)] = axes[i][0];
    while (true) {
        visit(s);
        std::size_t axis = 0;
        while (axis < n) {
            if (++index[axis] < axes[axis].size()) {
                s[static_cast<Eigen::Index>(axis)] = axes[axis][index[axis]];
                break;
            }
            index[axis] = 0;
            s[static_cast<Eigen::Index>(axis)] = axes[axis][0];
            ++axis;
        }
        if (axis == n) return;
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = hi;
    return out;
}

// Stationary point of E restricted to each face of the box: every coordinate is
// fixed at -1/2, fixed at +1/2, or free. The global minimum lies in the relative
// interior of some face; faces whose free block is singular are skipped because
// their minimum (if any) is matched on a lower-dimensional face.
void scan_faces(const CouplingProblem& p, Candidate& best) {
    const auto n = static_cast<Eigen::Index>(p.n());
    std::size_t faces = 1;
    for (Eigen::Index i = 0; i < n; ++i) faces *= 3;

    for (std::size_t code = 0; code < faces; ++code) {
        std::size_t rest = code;
        std::vector<Eigen::Index> free_idx;
        Vector s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int digit = static_cast<int>(rest % 3);
            rest /= 3;
            if (digit == 2) {
                free_idx.push_back(i);
                s[i] = 0.0;
            } else {
                s[i] = digit == 0 ? -kBoxHalfWidth : kBoxHalfWidth;
            }
        }
        if (!free_idx.empty()) {
            const auto m = static_cast<Eigen::Index>(free_idx.size());
            Eigen::MatrixXd block(m, m);
            Eigen::VectorXd rhs(m);
            const Vector fixed_part = p.Q() * s + p.h();  // free coordinates are zero in s
            for (Eigen::Index a = 0; a < m; ++a) {
                rhs[a] = -fixed_part[free_idx[static_cast<std::size_t>(a)]];
                for (Eigen::Index b = 0; b < m; ++b) {
                    block(a, b) = p.Q()(free_idx[static_cast<std::size_t>(a)], free_idx[static_cast<std::size_t>(b)]);
                }
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(block);
            lu.setThreshold(1e-12);
            if (lu.rank() < m) continue;
            const Eigen::VectorXd x = lu.solve(rhs);
            bool feasible = true;
            for (Eigen::Index a = 0; a < m; ++a) {
                if (std::fabs(x[a]) > kBoxHalfWidth + 1e-12) {
                    feasible = false;
                    break;
                }
                s[free_idx[static_cast<std::size_t>(a)]] = std::clamp(x[a], -kBoxHalfWidth, kBoxHalfWidth);
            }
            if (!feasible) continue;
        }
        keep_better(best, relaxed_energy(p, s), s);
    }
}

struct StartResult {
    double energy = kInf;
    Vector s;
    bool converged = false;
};

StartResult projected_gradient(const CouplingProblem& p, Vector s, double step_size, const OptimumBudget& budget) {
    StartResult out;
    for (std::size_t it = 0; it < budget.max_iterations; ++it) {
        const Vector g = gradient(p, s);
        const double stationarity = (s - clamp_to_box(s - g)).norm();
        if (stationarity < budget.tolerance) {
            out.converged = true;
            break;
        }
        s = clamp_to_box(s - step_size * g);
    }
    out.energy = relaxed_energy(p, s);
    out.s = std::move(s);
    return out;
}

RelaxedOptimum finish(const CouplingProblem& p, const Candidate& best, OptimumMethod method, bool certified) {
    RelaxedOptimum out{SpinState(clamp_to_box(best.s)), 0.0, method, certified, 0, {}};
    out.e_star = relaxed_energy(p, out.s_star);
    return out;
}

}  // namespace

std::string_view to_string(OptimumMethod method) noexcept {
    switch (method) {
        case OptimumMethod::VertexScan: return "VertexScan";
        case OptimumMethod::GridRefine: return "GridRefine";
        case OptimumMethod::MultiStartProjGrad: return "MultiStartProjGrad";
    }
    return "Unknown";
}

RelaxedOptimum relaxed_optimum(const CouplingProblem& p, const OptimumBudget& budget) {
    if (p.n() <= kGridMaxN) return relaxed_optimum_grid(p, budget);
    if (p.n() <= kVertexScanMaxN && is_concave(spectral_summary(p).definiteness)) {
        return relaxed_optimum_vertex_scan(p);
    }
    return relaxed_optimum_projected_gradient(p, budget);
}

RelaxedOptimum relaxed_optimum_grid(const CouplingProblem& p, const OptimumBudget& budget) {
    const std::size_t n = p.n();
    if (n > kGridMaxN) {
        throw UnsupportedSizeError("grid search supports n <= " + std::to_string(kGridMaxN) + ", got " +
                                   std::to_string(n));
    }
    if (!(budget.grid_resolution > 0.0)) throw ParameterError("grid resolution must be positive");

    // Coarse pass: about 2e5 points in total, never finer than the target resolution.
    const auto finest = static_cast<std::size_t>(std::ceil(1.0 / budget.grid_resolution)) + 1;
    const auto per_axis = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(std::pow(2e5, 1.0 / static_cast<double>(n)))), 3, finest);
    const std::vector<std::vector<double>> coarse_axes(n, linspace(-kBoxHalfWidth, kBoxHalfWidth, per_axis));
    double spacing = 1.0 / static_cast<double>(per_axis - 1);

    constexpr std::size_t kSeeds = 8;
    std::vector<std::pair<double, Vector>> seeds;
    Candidate best;
    for_each_grid_point(coarse_axes, [&](const Vector& s) {
        const double e = relaxed_energy(p, s);
        keep_better(best, e, s);
        if (seeds.size() < kSeeds || e < seeds.back().first) {
            if (seeds.size() == kSeeds) seeds.pop_back();
            auto pos = std::upper_bound(seeds.begin(), seeds.end(), e,
                                        [](double v, const auto& entry) { return v < entry.first; });
            seeds.insert(pos, {e, s});
        }
    });

    // Zoom: an 11-point grid spanning one coarse cell on either side, shrinking by 5x per level.
    for (const auto& seed : seeds) {
        Vector center = seed.second;
        double h = spacing;
        while (h > budget.grid_resolution) {
            const double fine = std::max(h / 5.0, budget.grid_resolution);
            std::vector<std::vector<double>> axes(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double c = center[static_cast<Eigen::Index>(i)];
                for (int j = -5; j <= 5; ++j) {
                    axes[i].push_back(std::clamp(c + j * fine, -kBoxHalfWidth, kBoxHalfWidth));
                }
                axes[i].erase(std::unique(axes[i].begin(), axes[i].end()), axes[i].end());
            }
            Candidate local{relaxed_energy(p, center), center};
            for_each_grid_point(axes, [&](const Vector& s) { keep_better(local, relaxed_energy(p, s), s); });
            center = local.s;
            keep_better(best, local.energy, local.s);
            h = fine;
        }
    }

    scan_faces(p, best);
    return finish(p, best, OptimumMethod::GridRefine, true);
}

RelaxedOptimum relaxed_optimum_vertex_scan(const CouplingProblem& p) {
    if (p.n() > kVertexScanMaxN) {
        throw UnsupportedSizeError("vertex scan supports n <= " + std::to_string(kVertexScanMaxN) + ", got " +
                                   std::to_string(p.n()));
    }
    Candidate best;
    const Vector& h = p.h();
    detail::for_each_vertex(p.Q(), kBoxHalfWidth, [&](const std::vector<int>&, const Vector& s, const Vector& qs) {
        const double e = 0.5 * s.dot(qs) + h.dot(s);
        if (e < best.energy) {
            best.energy = e;
            best.s = s;
        }
    });
    // A concave function attains its box minimum at a vertex.
    const bool certified = is_concave(spectral_summary(p).definiteness);
    return finish(p, best, OptimumMethod::VertexScan, certified);
}

RelaxedOptimum relaxed_optimum_projected_gradient(const CouplingProblem& p, const OptimumBudget& budget) {
    if (budget.starts == 0) throw ParameterError("projected gradient needs at least one start");
    const SpectralSummary summary = spectral_summary(p);
    const double upper_curvature = summary.lambda_max;
    const double step_size =
        upper_curvature > zero_eigenvalue_tolerance(summary.lambda_min, summary.lambda_max) ? 1.0 / upper_curvature
                                                                                            : 0.1;

    const auto n = static_cast<Eigen::Index>(p.n());
    auto start_point = [&](std::size_t index) -> Vector {
        if (index == 0) return Vector::Zero(n);
        if (index <= 2) {
            const double sign = index == 1 ? -1.0 : 1.0;
            Vector s(n);
            for (Eigen::Index i = 0; i < n; ++i) s[i] = sign * (p.h()[i] < 0.0 ? -kBoxHalfWidth : kBoxHalfWidth);
            return s;
        }
        Philox rng(substream_seed(budget.seed, index));
        Vector s(n);
        for (Eigen::Index i = 0; i < n; ++i) s[i] = rng.uniform(-kBoxHalfWidth, kBoxHalfWidth);
        return s;
    };

    std::vector<StartResult> results(budget.starts);
    parallel_for(budget.starts, [&](std::size_t i) {
        results[i] = projected_gradient(p, start_point(i), step_size, budget);
    });

    Candidate best;
    std::size_t converged = 0;
    std::vector<double> probes;
    probes.reserve(results.size());
    for (const auto& r : results) {
        keep_better(best, r.energy, r.s);
        if (r.converged) ++converged;
        probes.push_back(r.energy);
    }
    // KKT conditions are sufficient for global optimality of a convex objective.
    const bool certified = converged > 0 && is_convex(summary.definiteness);
    RelaxedOptimum out = finish(p, best, OptimumMethod::MultiStartProjGrad, certified);
    out.converged_starts = converged;
    out.probe_energies = std::move(probes);
    return out;
}

DiscreteOptimum discrete_optimum(const CouplingProblem& p) {
    if (p.n() > kDiscreteMaxN) {
        throw UnsupportedSizeError("discrete_optimum supports n <= " + std::to_string(kDiscreteMaxN) + ", got " +
                                   std::to_string(p.n()));
    }
    const Vector& h = p.h();
    double best_energy = kInf;
    std::vector<int> best;
    double best_exact = kInf;

    detail::for_each_vertex(p.Q(), 1.0, [&](const std::vector<int>& sigma, const Vector& s, const Vector& qs) {
        const double e = 0.5 * s.dot(qs) + h.dot(s);
        if (best.empty()) {
            best_energy = e;
            best = sigma;
            return;
        }
        const double tol = 1e-9 * std::max(1.0, std::fabs(best_energy));
        if (e < best_energy - tol) {
            best_energy = e;
            best = sigma;
            best_exact = kInf;
            return;
        }
        if (e > best_energy + tol) return;
        // Near-tie: settle it with directly evaluated energies, then lexicographically.
        if (best_exact == kInf) best_exact = discrete_energy(p, DiscreteSpins(best));
        const double exact = discrete_energy(p, DiscreteSpins(sigma));
        const double tie_tol = 1e-12 * std::max(1.0, std::fabs(best_exact));
        if (exact < best_exact - tie_tol || (exact <= best_exact + tie_tol && sigma < best)) {
            best = sigma;
            best_energy = e;
            best_exact = exact;
        }
    });

    DiscreteSpins sigma(std::move(best));
    const double energy = discrete_energy(p, sigma);
    return {std::move(sigma), energy};
}

PLEstimate pl_constant_estimate(const CouplingProblem& p, double e_star, std::size_t sample_count,
                                std::uint64_t seed) {
    if (sample_count < 1000) {
        throw ParameterError("PL estimation needs at least 1000 samples, got " + std::to_string(sample_count));
    }
    const auto n = static_cast<Eigen::Index>(p.n());
    Philox rng(seed);
    Vector s(n);
    double mu = kInf;
    Vector where = Vector::Zero(n);
    std::size_t used = 0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) s[j] = rng.uniform(-kBoxHalfWidth, kBoxHalfWidth);
        const double excess = relaxed_energy(p, s) - e_star;
        if (excess < 1e-12) continue;
        ++used;
        const double ratio = 0.5 * gradient(p, s).squaredNorm() / excess;
        if (ratio < mu) {
            mu = ratio;
            where = s;
        }
    }
    if (used == 0) throw FlatObjectiveError("every PL sample lies at the optimum; objective is flat");
    if (!(mu > 0.0)) {
        throw Error("sampled point with vanishing gradient above the optimum; the PL inequality fails");
    }
    return {mu, used, SpinState(where)};
}

DefinitenessClass classify_definiteness(const SpectralSummary& summary) {
    switch (summary.definiteness) {
        case Definiteness::PositiveDefinite:
        case Definiteness::PositiveSemidefinite:
            return {summary.definiteness, "convex", false};
        case Definiteness::NegativeDefinite:
        case Definiteness::NegativeSemidefinite:
            return {summary.definiteness, "concave", true};
        case Definiteness::Indefinite:
            return {summary.definiteness, "saddle", true};
        case Definiteness::Zero:
            return {summary.definiteness, "linear", false};
    }
    return {summary.definiteness, "unknown", true};
}

bool pl_assumption_verified(Definiteness d) noexcept {
    return d == Definiteness::PositiveDefinite;
}

}  // namespace ecim
