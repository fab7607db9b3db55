#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matmart/symmat.hpp"

namespace matmart {

/// One branch of a finite outcome distribution.
struct KernelOutcome {
    double probability;  // in (0, 1]
    SymMatrix value;
    int next_state;
};

/// (probability, matrix) pair; used for standalone finite distributions.
struct WeightedMatrix {
    double probability;
    SymMatrix value;
};

/// Raw description of a finite-state kernel, as parsed from a kernel file
/// or assembled programmatically. Validated by FiniteKernel::from_spec.
struct KernelSpec {
    std::string name;
    int dim = 0;
    int horizon = 0;
    int initial_state = 0;
    bool centered = false;
    std::vector<std::vector<KernelOutcome>> states;
};

/// Generator of an adapted matrix difference sequence with exactly
/// computable conditional moments.
///
/// The outcome distribution is a function of a finite automaton state;
/// step-dependent behavior is encoded by advancing the state. Conditional
/// expectations are exact finite sums over the outcome table.
///
/// Immutable after construction; safe to share across threads.
class FiniteKernel {
public:
    /// Validates and freezes a spec. Checks: positive probabilities
    /// summing to 1 within 1e-12 per populated state, outcome dimensions,
    /// next-state ranges, and (for `centered` specs) a zero conditional
    /// mean within 1e-10 at every reachable state.
    static FiniteKernel from_spec(KernelSpec spec);

    int dim() const { return spec_.dim; }
    int horizon() const { return spec_.horizon; }
    int initial_state() const { return spec_.initial_state; }
    bool centered() const { return spec_.centered; }
    int state_count() const { return static_cast<int>(spec_.states.size()); }
    const std::string& name() const { return spec_.name; }

    const std::vector<KernelOutcome>& outcomes_at(int state) const;

    /// Cached conditional second moment sum_i p_i X_i^2 for a state.
    const SymMatrix& second_moment_at(int state) const;

    /// True when (state, k) is reachable from (initial_state, 0);
    /// k may range over 0..horizon.
    bool is_reachable(int state, int step) const;

    /// Exact uniform difference bound: max over reachable outcomes of
    /// lambda_max(X_i).
    double max_outcome_lambda_max() const { return max_outcome_lambda_max_; }

private:
    explicit FiniteKernel(KernelSpec spec) : spec_(std::move(spec)) {}

    KernelSpec spec_;
    std::vector<SymMatrix> second_moments_;
    std::vector<std::vector<char>> reachable_;  // [step][state]
    double max_outcome_lambda_max_ = 0.0;
};

/// Independent series X_k = eps_k A_k with Rademacher signs; the
/// predictable quadratic variation is the deterministic sum of A_k^2.
FiniteKernel kernel_rademacher_series(std::span<const SymMatrix> coefficients);

/// Kernel whose outcome distribution depends on a finite summary of
/// history, per the transition table in `spec`. This is the general
/// adapted (non-independent) regime where the quadratic variation is
/// genuinely random.
FiniteKernel kernel_state_dependent_walk(const KernelSpec& spec);

/// Built-in kernels addressable by name: "walk1d" (scalar +-1 walk),
/// "rademacher2d" (d=2 alternating-coefficient series), "statewalk"
/// (scalar walk whose step halves after any down-step).
FiniteKernel builtin_kernel(std::string_view name, int horizon);
std::vector<std::string> builtin_kernel_names();

/// One realized path: differences X_k, partial sums Y_k, predictable
/// quadratic variation W_k, and the discrepancy value S_k per tracked theta.
struct TrajectoryStep {
    SymMatrix x;
    SymMatrix y;
    SymMatrix w;
    std::vector<double> s;  // parallel to Trajectory::theta_list
};

struct Trajectory {
    int dim = 0;
    std::vector<double> theta_list;
    uint64_t seed = 0;
    std::vector<TrajectoryStep> steps;

    /// S_0 = tr exp(0) = d, independent of theta.
    double s0() const { return dim; }
};

/// Runs `steps` transitions of the kernel (steps <= horizon) with the
/// given stream seed. Deterministic for a fixed seed. S_k is tracked with
/// the built-in g(theta) = e^theta - theta - 1 at each theta in
/// `theta_list` (all entries must be positive).
Trajectory simulate(const FiniteKernel& kernel, int steps, std::span<const double> theta_list,
                    uint64_t seed);
inline Trajectory simulate(const FiniteKernel& kernel, int steps,
                           std::initializer_list<double> theta_list, uint64_t seed) {
    return simulate(kernel, steps, std::span<const double>(theta_list.begin(), theta_list.size()),
                    seed);
}

/// Conditional second moment at a reachable (state, step) with
/// step < horizon.
SymMatrix exact_conditional_second_moment(const FiniteKernel& kernel, int state, int step);

/// First index k with lambda_max(Y_k) >= t and lambda_max(W_k) <= sigma2
/// (both non-strict), or "never".
struct StoppingRecord {
    std::optional<int> kappa;
    bool hit = false;
    double t = 0.0;
    double sigma2 = 0.0;
};

StoppingRecord stopping_time(const Trajectory& trajectory, double t, double sigma2);

/// The built-in cgf bound g(theta) = e^theta - theta - 1, theta > 0.
double g_function_value(double theta);

}  // namespace matmart
