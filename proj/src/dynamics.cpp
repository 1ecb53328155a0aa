#include "ecim/dynamics.hpp"

#include "ecim/error.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

namespace ecim {

namespace {

std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}

void print_warning(std::string_view message) {
    std::cerr << "warning: " << message << '\n';
}

WarningHandler& warning_handler() {
    static WarningHandler handler = print_warning;
    return handler;
}

struct Workspace {
    explicit Workspace(Eigen::Index n) : product(n), noise(n), argument(n) {}
    Vector product;
    Vector noise;
    Vector argument;
};

double energy_with(const CouplingProblem& p, const Vector& s, Vector& buffer) {
    buffer.noalias() = p.J() * s;
    return 0.5 * s.dot(buffer) + p.h().dot(s);
}

void apply_transfer(const Vector& argument, Vector& s) {
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = transfer_scalar(argument[i]);
}

bool clamp_in_place(Vector& s) {
    bool moved = false;
    for (auto& v : s) {
        if (v > kBoxHalfWidth) {
            v = kBoxHalfWidth;
            moved = true;
        } else if (v < -kBoxHalfWidth) {
            v = -kBoxHalfWidth;
            moved = true;
        }
    }
    return moved;
}

// One iteration on a raw buffer; returns true if the linearized iterate was clamped.
bool advance(const CouplingProblem& p, Vector& s, double beta, const IterationMode& mode, double sigma,
             Philox& rng, Workspace& w) {
    for (Eigen::Index i = 0; i < s.size(); ++i) w.noise[i] = sigma * rng.normal();

    switch (mode.kind) {
        case ModeKind::TransferOriginal:
            w.product.noalias() = p.J() * s;
            w.argument = mode.alpha * s - beta * w.product + w.noise;
            apply_transfer(w.argument, s);
            return false;
        case ModeKind::TransferExtended:
            w.product.noalias() = p.Q() * s;
            w.product += p.h();
            w.argument = mode.alpha * s - beta * w.product + w.noise;
            apply_transfer(w.argument, s);
            return false;
        case ModeKind::TransferNoiseScaled:
            w.product.noalias() = p.Q() * s;
            w.product += p.h();
            w.argument = mode.alpha * s - beta * (w.product - w.noise);
            apply_transfer(w.argument, s);
            return false;
        case ModeKind::Linearized:
            w.product.noalias() = p.Q() * s;
            w.product += p.h();
            s = s - beta * w.product + w.noise;
            return clamp_in_place(s);
        case ModeKind::LinearizedNoiseScaled:
            w.product.noalias() = p.Q() * s;
            w.product += p.h();
            s = s - beta * (w.product - w.noise);
            return clamp_in_place(s);
    }
    return false;
}

void require_dimension(const CouplingProblem& p, std::size_t size, const char* what) {
    if (size != p.n()) {
        throw InstanceError(std::string(what) + ": expected length " + std::to_string(p.n()) +
                            ", got " + std::to_string(size));
    }
}

}  // namespace

StepSchedule StepSchedule::constant(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ParameterError("constant step size must be positive, got " + std::to_string(beta));
    }
    return {Kind::Constant, beta, 0.0};
}

StepSchedule StepSchedule::poly_decay(double beta0, double r) {
    if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
        throw ParameterError("beta0 must be positive, got " + std::to_string(beta0));
    }
    if (!(r > 0.5 && r <= 1.0)) {
        throw ParameterError("decay exponent r must lie in (0.5, 1], got " + std::to_string(r));
    }
    return {Kind::PolyDecay, beta0, r};
}

double schedule_value(const StepSchedule& sched, std::uint64_t k) {
    if (sched.kind() == StepSchedule::Kind::Constant) return sched.beta();
    return sched.beta() / std::pow(static_cast<double>(k) + 1.0, sched.exponent());
}

std::string_view to_string(ModeKind kind) noexcept {
    switch (kind) {
        case ModeKind::TransferOriginal: return "transfer_original";
        case ModeKind::TransferExtended: return "transfer_extended";
        case ModeKind::Linearized: return "linearized";
        case ModeKind::TransferNoiseScaled: return "transfer_noise_scaled";
        case ModeKind::LinearizedNoiseScaled: return "linearized_noise_scaled";
    }
    return "unknown";
}

ModeKind mode_kind_from_string(std::string_view name) {
    for (auto kind : {ModeKind::TransferOriginal, ModeKind::TransferExtended, ModeKind::Linearized,
                      ModeKind::TransferNoiseScaled, ModeKind::LinearizedNoiseScaled}) {
        if (to_string(kind) == name) return kind;
    }
    throw ParameterError("unknown iteration mode '" + std::string(name) + "'");
}

bool IterationMode::is_transfer() const noexcept {
    return kind == ModeKind::TransferOriginal || kind == ModeKind::TransferExtended ||
           kind == ModeKind::TransferNoiseScaled;
}

bool IterationMode::is_noise_scaled() const noexcept {
    return kind == ModeKind::TransferNoiseScaled || kind == ModeKind::LinearizedNoiseScaled;
}

SpinState transfer(const Eigen::Ref<const Vector>& argument) {
    Vector out(argument.size());
    for (Eigen::Index i = 0; i < argument.size(); ++i) out[i] = transfer_scalar(argument[i]);
    return SpinState(std::move(out));
}

Vector feedback(const CouplingProblem& p, const SpinState& s, double beta_k, const IterationMode& mode,
                const Eigen::Ref<const Vector>& zeta) {
    require_dimension(p, s.size(), "feedback state");
    if (!(beta_k > 0.0)) throw ParameterError("step size must be positive");
    const Vector& x = s.values();
    switch (mode.kind) {
        case ModeKind::TransferOriginal:
            return mode.alpha * x - beta_k * (p.J() * x);
        case ModeKind::TransferExtended:
            return mode.alpha * x - beta_k * gradient(p, x);
        case ModeKind::TransferNoiseScaled:
            require_dimension(p, static_cast<std::size_t>(zeta.size()), "feedback noise");
            return mode.alpha * x - beta_k * (gradient(p, x) - zeta);
        case ModeKind::Linearized:
            return x - beta_k * gradient(p, x);
        case ModeKind::LinearizedNoiseScaled:
            require_dimension(p, static_cast<std::size_t>(zeta.size()), "feedback noise");
            return x - beta_k * (gradient(p, x) - zeta);
    }
    return x;
}

SpinState step(const CouplingProblem& p, const SpinState& s, std::uint64_t k, const StepSchedule& sched,
               const IterationMode& mode, const NoiseModel& noise, Philox& rng) {
    require_dimension(p, s.size(), "step");
    if (noise.sigma_squared < 0.0) throw ParameterError("noise variance must be nonnegative");
    Workspace w(static_cast<Eigen::Index>(p.n()));
    Vector x = s.values();
    advance(p, x, schedule_value(sched, k), mode, std::sqrt(noise.sigma_squared), rng, w);
    return SpinState(std::move(x));
}

void validate(const RunConfig& config) {
    const double sigma2 = config.noise.sigma_squared;
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw ParameterError("noise variance must be finite and nonnegative, got " + std::to_string(sigma2));
    }
    if (!std::isfinite(config.mode.alpha)) throw ParameterError("alpha must be finite");
    if (config.mode.alpha != 1.0) {
        warn("alpha = " + std::to_string(config.mode.alpha) +
             "; the convergence bounds assume alpha = 1");
    }
}

SpinState initial_state(const CouplingProblem& p, const RunConfig& config) {
    if (!config.initial_state) return SpinState::zeros(p.n());
    require_dimension(p, static_cast<std::size_t>(config.initial_state->size()), "initial state");
    return SpinState(*config.initial_state);
}

StreamResult run_streaming(const CouplingProblem& p, const SpinState& s0, const RunConfig& config,
                           std::uint64_t seed,
                           const std::function<void(std::uint64_t, double)>& on_energy) {
    require_dimension(p, s0.size(), "run initial state");
    const auto n = static_cast<Eigen::Index>(p.n());
    Workspace w(n);
    Vector energy_buffer(n);
    Vector x = s0.values();
    Philox rng(seed);
    const double sigma = std::sqrt(config.noise.sigma_squared);

    std::uint64_t clamps = 0;
    for (std::uint64_t k = 0; k < config.iterations; ++k) {
        on_energy(k, energy_with(p, x, energy_buffer));
        if (advance(p, x, schedule_value(config.schedule, k), config.mode, sigma, rng, w)) ++clamps;
    }
    on_energy(config.iterations, energy_with(p, x, energy_buffer));
    return {SpinState(std::move(x)), clamps};
}

Trajectory run(const CouplingProblem& p, const SpinState& s0, const RunConfig& config) {
    validate(config);
    require_dimension(p, s0.size(), "run initial state");
    const auto n = static_cast<Eigen::Index>(p.n());

    Trajectory out{{}, s0, {}, config.noise.seed, 0};
    out.energies.reserve(config.iterations + 1);
    if (config.record_states) {
        out.states.reserve(config.iterations + 1);
        out.states.push_back(s0);
    }

    Workspace w(n);
    Vector energy_buffer(n);
    Vector x = s0.values();
    Philox rng(config.noise.seed);
    const double sigma = std::sqrt(config.noise.sigma_squared);

    for (std::uint64_t k = 0; k < config.iterations; ++k) {
        out.energies.push_back(energy_with(p, x, energy_buffer));
        if (advance(p, x, schedule_value(config.schedule, k), config.mode, sigma, rng, w)) {
            ++out.clamp_events;
        }
        if (config.record_states) out.states.emplace_back(x);
    }
    out.energies.push_back(energy_with(p, x, energy_buffer));
    out.final_state = SpinState(std::move(x));
    if (out.clamp_events > 0) {
        warn(std::to_string(out.clamp_events) + " of " + std::to_string(config.iterations) +
             " linearized steps were clamped to the box");
    }
    return out;
}

void set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(warning_mutex());
    warning_handler() = handler ? std::move(handler) : WarningHandler(print_warning);
}

void warn(std::string_view message) {
    std::lock_guard lock(warning_mutex());
    warning_handler()(message);
}

}  // namespace ecim
