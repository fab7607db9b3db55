#include "matmart/martingale.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "matmart/rng.hpp"

namespace matmart {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kCenteredTol = 1e-10;

}  // namespace

FiniteKernel FiniteKernel::from_spec(KernelSpec spec) {
    if (spec.dim < 1) throw std::invalid_argument("kernel dimension must be positive");
    if (spec.horizon < 0) throw std::invalid_argument("kernel horizon must be nonnegative");
    if (spec.states.empty()) throw std::invalid_argument("kernel needs at least one state");
    const int n_states = static_cast<int>(spec.states.size());
    if (spec.initial_state < 0 || spec.initial_state >= n_states)
        throw std::invalid_argument("kernel initial state out of range");

    for (int s = 0; s < n_states; ++s) {
        const auto& outcomes = spec.states[s];
        if (outcomes.empty()) continue;  // legal only if never consulted; checked below
        double sum = 0.0;
        for (const auto& o : outcomes) {
            if (!(o.probability > 0.0) || !std::isfinite(o.probability))
                throw std::invalid_argument("kernel outcome probabilities must be positive");
            if (o.value.dim() != spec.dim)
                throw std::invalid_argument("kernel outcome dimension mismatch");
            if (o.next_state < 0 || o.next_state >= n_states)
                throw std::invalid_argument("kernel outcome next-state out of range");
            sum += o.probability;
        }
        if (std::abs(sum - 1.0) > kProbSumTol)
            throw std::invalid_argument("kernel state " + std::to_string(s) +
                                        " probabilities sum to " + std::to_string(sum) + ", not 1");
    }

    FiniteKernel kernel(std::move(spec));
    const KernelSpec& sp = kernel.spec_;

    // Reachability sweep over (state, step), step = 0..horizon.
    kernel.reachable_.assign(sp.horizon + 1, std::vector<char>(n_states, 0));
    kernel.reachable_[0][sp.initial_state] = 1;
    for (int k = 0; k < sp.horizon; ++k) {
        for (int s = 0; s < n_states; ++s) {
            if (!kernel.reachable_[k][s]) continue;
            if (sp.states[s].empty())
                throw std::invalid_argument("kernel state " + std::to_string(s) +
                                            " is reachable before the horizon but has no outcomes");
            for (const auto& o : sp.states[s]) kernel.reachable_[k + 1][o.next_state] = 1;
        }
    }

    std::vector<char> consulted(n_states, 0);
    for (int k = 0; k < sp.horizon; ++k)
        for (int s = 0; s < n_states; ++s) consulted[s] |= kernel.reachable_[k][s];

    // Conditional second moments, difference bound, and centering.
    kernel.second_moments_.reserve(n_states);
    for (int s = 0; s < n_states; ++s) {
        SymMatrix second(sp.dim);
        SymMatrix mean(sp.dim);
        for (const auto& o : sp.states[s]) {
            second.add_scaled(o.value.square(), o.probability);
            mean.add_scaled(o.value, o.probability);
            if (consulted[s])
                kernel.max_outcome_lambda_max_ =
                    std::max(kernel.max_outcome_lambda_max_, lambda_max(o.value));
        }
        if (sp.centered && consulted[s] && mean.max_abs() > kCenteredTol)
            throw std::invalid_argument("kernel state " + std::to_string(s) +
                                        " is not centered: conditional mean is nonzero");
        kernel.second_moments_.push_back(std::move(second));
    }
    return kernel;
}

const std::vector<KernelOutcome>& FiniteKernel::outcomes_at(int state) const {
    if (state < 0 || state >= state_count()) throw std::invalid_argument("kernel state out of range");
    return spec_.states[state];
}

const SymMatrix& FiniteKernel::second_moment_at(int state) const {
    if (state < 0 || state >= state_count()) throw std::invalid_argument("kernel state out of range");
    return second_moments_[state];
}

bool FiniteKernel::is_reachable(int state, int step) const {
    if (state < 0 || state >= state_count() || step < 0 || step > spec_.horizon) return false;
    return reachable_[step][state] != 0;
}

FiniteKernel kernel_rademacher_series(std::span<const SymMatrix> coefficients) {
    if (coefficients.empty()) throw std::invalid_argument("rademacher series needs at least one coefficient");
    const int d = coefficients.front().dim();
    KernelSpec spec;
    spec.name = "rademacher_series";
    spec.dim = d;
    spec.horizon = static_cast<int>(coefficients.size());
    spec.centered = true;
    for (int k = 0; k < spec.horizon; ++k) {
        const SymMatrix& a = coefficients[k];
        if (a.dim() != d) throw std::invalid_argument("rademacher coefficients must share one dimension");
        const int next = std::min(k + 1, spec.horizon - 1);
        spec.states.push_back({KernelOutcome{0.5, a, next}, KernelOutcome{0.5, -1.0 * a, next}});
    }
    return FiniteKernel::from_spec(std::move(spec));
}

FiniteKernel kernel_state_dependent_walk(const KernelSpec& spec) {
    return FiniteKernel::from_spec(spec);
}

FiniteKernel builtin_kernel(std::string_view name, int horizon) {
    if (horizon < 0) throw std::invalid_argument("kernel horizon must be nonnegative");
    KernelSpec spec;
    spec.horizon = horizon;
    spec.centered = true;
    if (name == "walk1d") {
        spec.name = "walk1d";
        spec.dim = 1;
        const SymMatrix one{{1.0}};
        spec.states.push_back({KernelOutcome{0.5, one, 0}, KernelOutcome{0.5, -1.0 * one, 0}});
    } else if (name == "rademacher2d") {
        spec.name = "rademacher2d";
        spec.dim = 2;
        // Coefficients alternate between diag(1, 0) and the off-diagonal flip.
        const SymMatrix a{{1.0, 0.0}, {0.0, 0.0}};
        const SymMatrix b{{0.0, 1.0}, {1.0, 0.0}};
        spec.states.push_back({KernelOutcome{0.5, a, 1}, KernelOutcome{0.5, -1.0 * a, 1}});
        spec.states.push_back({KernelOutcome{0.5, b, 0}, KernelOutcome{0.5, -1.0 * b, 0}});
    } else if (name == "statewalk") {
        spec.name = "statewalk";
        spec.dim = 1;
        // Step size halves after any down-step and recovers after an up-step,
        // so the quadratic variation is path dependent.
        const SymMatrix full{{1.0}};
        const SymMatrix half{{0.5}};
        spec.states.push_back({KernelOutcome{0.5, full, 0}, KernelOutcome{0.5, -1.0 * full, 1}});
        spec.states.push_back({KernelOutcome{0.5, half, 0}, KernelOutcome{0.5, -1.0 * half, 1}});
    } else {
        throw std::invalid_argument("unknown built-in kernel: " + std::string(name));
    }
    return FiniteKernel::from_spec(std::move(spec));
}

std::vector<std::string> builtin_kernel_names() { return {"walk1d", "rademacher2d", "statewalk"}; }

Trajectory simulate(const FiniteKernel& kernel, int steps, std::span<const double> theta_list,
                    uint64_t seed) {
    if (steps < 0) throw std::invalid_argument("step count must be nonnegative");
    if (steps > kernel.horizon())
        throw std::invalid_argument("step count " + std::to_string(steps) +
                                    " exceeds kernel horizon " + std::to_string(kernel.horizon()));
    std::vector<double> g_values(theta_list.size());
    for (size_t i = 0; i < theta_list.size(); ++i) g_values[i] = g_function_value(theta_list[i]);

    Trajectory trajectory;
    trajectory.dim = kernel.dim();
    trajectory.theta_list.assign(theta_list.begin(), theta_list.end());
    trajectory.seed = seed;
    trajectory.steps.reserve(steps);

    Rng rng(seed);
    int state = kernel.initial_state();
    SymMatrix y(kernel.dim());
    SymMatrix w(kernel.dim());
    std::vector<double> probs;
    for (int k = 0; k < steps; ++k) {
        const auto& outcomes = kernel.outcomes_at(state);
        w.add_scaled(kernel.second_moment_at(state), 1.0);

        probs.clear();
        for (const auto& o : outcomes) probs.push_back(o.probability);
        const KernelOutcome& drawn = outcomes[rng.next_outcome(probs)];
        y.add_scaled(drawn.value, 1.0);
        state = drawn.next_state;

        TrajectoryStep step{drawn.value, y, w, {}};
        step.s.reserve(theta_list.size());
        for (size_t i = 0; i < theta_list.size(); ++i) {
            SymMatrix exponent = theta_list[i] * y;
            exponent.add_scaled(w, -g_values[i]);
            step.s.push_back(trace_exp(exponent));
        }
        trajectory.steps.push_back(std::move(step));
    }
    return trajectory;
}

SymMatrix exact_conditional_second_moment(const FiniteKernel& kernel, int state, int step) {
    if (!kernel.is_reachable(state, step))
        throw std::invalid_argument("state " + std::to_string(state) + " is not reachable at step " +
                                    std::to_string(step));
    if (step >= kernel.horizon())
        throw std::invalid_argument("no outcomes are taken at the horizon");
    return kernel.second_moment_at(state);
}

StoppingRecord stopping_time(const Trajectory& trajectory, double t, double sigma2) {
    StoppingRecord record;
    record.t = t;
    record.sigma2 = sigma2;
    // k = 0: Y_0 = 0, W_0 = 0.
    if (0.0 >= t && 0.0 <= sigma2) {
        record.kappa = 0;
        record.hit = true;
        return record;
    }
    for (size_t k = 0; k < trajectory.steps.size(); ++k) {
        const auto& step = trajectory.steps[k];
        if (lambda_max(step.y) >= t && lambda_max(step.w) <= sigma2) {
            record.kappa = static_cast<int>(k + 1);
            record.hit = true;
            return record;
        }
    }
    return record;
}

double g_function_value(double theta) {
    if (!(theta > 0.0)) throw std::domain_error("g(theta) requires theta > 0");
    return std::expm1(theta) - theta;
}

}  // namespace matmart
