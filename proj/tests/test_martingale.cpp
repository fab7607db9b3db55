#include "matmart/martingale.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "matmart/rng.hpp"
#include "matmart/symmat.hpp"

using namespace matmart;

namespace {

bool steps_identical(const Trajectory& a, const Trajectory& b) {
    if (a.steps.size() != b.steps.size()) return false;
    for (size_t k = 0; k < a.steps.size(); ++k) {
        if ((a.steps[k].x - b.steps[k].x).max_abs() != 0.0) return false;
        if ((a.steps[k].y - b.steps[k].y).max_abs() != 0.0) return false;
        if ((a.steps[k].w - b.steps[k].w).max_abs() != 0.0) return false;
        if (a.steps[k].s != b.steps[k].s) return false;
    }
    return true;
}

KernelSpec deterministic_scalar_spec(double step_value, int horizon) {
    KernelSpec spec;
    spec.dim = 1;
    spec.horizon = horizon;
    spec.states.push_back({KernelOutcome{1.0, SymMatrix{{step_value}}, 0}});
    return spec;
}

}  // namespace

TEST_CASE("g_function_value") {
    CHECK(g_function_value(1e-8) == doctest::Approx(5.0000000166666611e-17).epsilon(1e-12));
    CHECK(g_function_value(1.0) == doctest::Approx(0.71828182845904524).epsilon(1e-14));
    CHECK(g_function_value(std::log(2.0)) == doctest::Approx(0.30685281944005469).epsilon(1e-14));
    CHECK_THROWS_AS(g_function_value(0.0), std::domain_error);
    CHECK_THROWS_AS(g_function_value(-1.0), std::domain_error);
}

TEST_CASE("kernel_rademacher_series") {
    SUBCASE("scalar walk has deterministic quadratic variation") {
        const std::vector<SymMatrix> coeffs(5, SymMatrix{{1.0}});
        const FiniteKernel kernel = kernel_rademacher_series(coeffs);
        CHECK(kernel.dim() == 1);
        CHECK(kernel.horizon() == 5);
        CHECK(kernel.centered());
        const Trajectory trajectory = simulate(kernel, 5, {}, 42);
        for (int k = 0; k < 5; ++k) {
            CHECK(trajectory.steps[k].w(0, 0) == doctest::Approx(k + 1.0).epsilon(1e-15));
            CHECK(std::abs(trajectory.steps[k].x(0, 0)) == 1.0);
        }
    }
    SUBCASE("second moments match hand-computed squares") {
        const SymMatrix a1{{1.0, 0.0}, {0.0, 0.0}};
        const SymMatrix a2{{0.0, 1.0}, {1.0, 0.0}};
        const std::vector<SymMatrix> coeffs = {a1, a2};
        const FiniteKernel kernel = kernel_rademacher_series(coeffs);

        const SymMatrix v1 = exact_conditional_second_moment(kernel, 0, 0);
        CHECK(v1(0, 0) == 1.0);
        CHECK(v1(1, 1) == 0.0);
        CHECK(v1(0, 1) == 0.0);

        const SymMatrix v2 = exact_conditional_second_moment(kernel, 1, 1);
        CHECK(v2(0, 0) == 1.0);
        CHECK(v2(1, 1) == 1.0);
        CHECK(v2(0, 1) == 0.0);
    }
    SUBCASE("dimension mismatch is rejected") {
        const std::vector<SymMatrix> coeffs = {SymMatrix(1), SymMatrix(2)};
        CHECK_THROWS_AS(kernel_rademacher_series(coeffs), std::invalid_argument);
    }
}

TEST_CASE("kernel_state_dependent_walk") {
    SUBCASE("single-state spec duplicates the rademacher walk") {
        KernelSpec spec;
        spec.dim = 1;
        spec.horizon = 6;
        spec.centered = true;
        const SymMatrix one{{1.0}};
        spec.states.push_back({KernelOutcome{0.5, one, 0}, KernelOutcome{0.5, -1.0 * one, 0}});
        const FiniteKernel custom = kernel_state_dependent_walk(spec);
        const FiniteKernel builtin = builtin_kernel("walk1d", 6);
        for (uint64_t seed : {1ull, 2ull, 99ull}) {
            CHECK(steps_identical(simulate(custom, 6, {}, seed), simulate(builtin, 6, {}, seed)));
        }
    }
    SUBCASE("halved-step walk has a random quadratic variation") {
        const FiniteKernel kernel = builtin_kernel("statewalk", 4);
        CHECK(kernel.centered());
        bool saw_distinct_w = false;
        double first_w = -1.0;
        for (uint64_t seed = 0; seed < 16 && !saw_distinct_w; ++seed) {
            const Trajectory trajectory = simulate(kernel, 4, {}, seed);
            const double w_final = trajectory.steps.back().w(0, 0);
            if (first_w < 0.0)
                first_w = w_final;
            else if (w_final != first_w)
                saw_distinct_w = true;
        }
        CHECK(saw_distinct_w);
    }
    SUBCASE("row sums must be 1") {
        KernelSpec spec;
        spec.dim = 1;
        spec.horizon = 2;
        const SymMatrix one{{1.0}};
        spec.states.push_back({KernelOutcome{0.5, one, 0}, KernelOutcome{0.4, -1.0 * one, 0}});
        CHECK_THROWS_AS(kernel_state_dependent_walk(spec), std::invalid_argument);
    }
    SUBCASE("centered flag is verified") {
        KernelSpec spec;
        spec.dim = 1;
        spec.horizon = 2;
        spec.centered = true;
        const SymMatrix one{{1.0}};
        spec.states.push_back({KernelOutcome{0.9, one, 0}, KernelOutcome{0.1, -1.0 * one, 0}});
        CHECK_THROWS_AS(kernel_state_dependent_walk(spec), std::invalid_argument);
    }
}

TEST_CASE("simulate") {
    SUBCASE("zero steps") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 4);
        const Trajectory trajectory = simulate(kernel, 0, {0.5}, 7);
        CHECK(trajectory.steps.empty());
        CHECK(trajectory.s0() == 1.0);
    }
    SUBCASE("scalar walk ranges and quadratic variation") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 12);
        const Trajectory trajectory = simulate(kernel, 12, {}, 2718);
        double y = 0.0;
        for (int k = 0; k < 12; ++k) {
            y += trajectory.steps[k].x(0, 0);
            CHECK(trajectory.steps[k].y(0, 0) == y);
            CHECK(std::abs(y) <= k + 1.0);
            CHECK(trajectory.steps[k].w(0, 0) == doctest::Approx(k + 1.0).epsilon(1e-15));
        }
    }
    SUBCASE("stored S_k matches independent recomputation") {
        const FiniteKernel kernel = builtin_kernel("rademacher2d", 8);
        const std::vector<double> thetas = {0.5, 1.0};
        const Trajectory trajectory = simulate(kernel, 8, thetas, 99);
        for (const auto& step : trajectory.steps) {
            for (size_t i = 0; i < thetas.size(); ++i) {
                SymMatrix exponent = thetas[i] * step.y;
                exponent.add_scaled(step.w, -g_function_value(thetas[i]));
                const double recomputed = trace_exp(exponent);
                CHECK(std::abs(step.s[i] - recomputed) <= 1e-12 * std::max(1.0, recomputed));
                CHECK(step.s[i] > 0.0);
            }
        }
    }
    SUBCASE("deterministic for a fixed seed") {
        const FiniteKernel kernel = builtin_kernel("statewalk", 10);
        CHECK(steps_identical(simulate(kernel, 10, {1.0}, 5), simulate(kernel, 10, {1.0}, 5)));
    }
    SUBCASE("horizon is enforced") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 4);
        CHECK_THROWS_AS(simulate(kernel, 5, {}, 1), std::invalid_argument);
    }
    SUBCASE("theta must be positive") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 4);
        CHECK_THROWS_AS(simulate(kernel, 4, {0.0}, 1), std::domain_error);
    }
    SUBCASE("PQV increments stay positive semidefinite") {
        for (const auto& name : builtin_kernel_names()) {
            const FiniteKernel kernel = builtin_kernel(name, 8);
            const Trajectory trajectory = simulate(kernel, 8, {}, 123);
            SymMatrix prev(kernel.dim());
            for (const auto& step : trajectory.steps) {
                CHECK(lambda_min(step.w - prev) >= -1e-10);
                prev = step.w;
            }
        }
    }
}

TEST_CASE("exact_conditional_second_moment") {
    SUBCASE("scalar walk has unit second moment at every reachable node") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 5);
        for (int k = 0; k < 5; ++k) {
            CHECK(exact_conditional_second_moment(kernel, 0, k)(0, 0) == 1.0);
        }
    }
    SUBCASE("three-outcome centered scalar") {
        KernelSpec spec;
        spec.dim = 1;
        spec.horizon = 3;
        spec.centered = true;
        spec.states.push_back({KernelOutcome{0.25, SymMatrix{{-1.0}}, 0},
                               KernelOutcome{0.5, SymMatrix{{0.0}}, 0},
                               KernelOutcome{0.25, SymMatrix{{1.0}}, 0}});
        const FiniteKernel kernel = kernel_state_dependent_walk(spec);
        CHECK(exact_conditional_second_moment(kernel, 0, 1)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("unreachable states are rejected") {
        const FiniteKernel kernel = builtin_kernel("statewalk", 3);
        // state 1 (half step) is reachable only after a down-step, so not at k = 0
        CHECK_THROWS_AS(exact_conditional_second_moment(kernel, 1, 0), std::invalid_argument);
        CHECK_NOTHROW(exact_conditional_second_moment(kernel, 1, 1));
        // nothing is drawn at the horizon
        CHECK_THROWS_AS(exact_conditional_second_moment(kernel, 0, 3), std::invalid_argument);
    }
}

TEST_CASE("stopping_time") {
    SUBCASE("boundary semantics at k = 0") {
        const FiniteKernel kernel = builtin_kernel("walk1d", 4);
        const Trajectory trajectory = simulate(kernel, 4, {}, 3);
        const StoppingRecord record = stopping_time(trajectory, 0.0, 1e18);
        CHECK(record.hit);
        REQUIRE(record.kappa.has_value());
        CHECK(*record.kappa == 0);
    }
    SUBCASE("deterministic ascending path stops at the level") {
        const FiniteKernel up = kernel_state_dependent_walk(deterministic_scalar_spec(1.0, 6));
        const Trajectory trajectory = simulate(up, 6, {}, 1);
        const StoppingRecord record = stopping_time(trajectory, 2.0, 4.0);
        CHECK(record.hit);
        REQUIRE(record.kappa.has_value());
        CHECK(*record.kappa == 2);
    }
    SUBCASE("deterministic descending path never stops") {
        const FiniteKernel down = kernel_state_dependent_walk(deterministic_scalar_spec(-1.0, 4));
        const Trajectory trajectory = simulate(down, 4, {}, 1);
        const StoppingRecord record = stopping_time(trajectory, 2.0, 4.0);
        CHECK_FALSE(record.hit);
        CHECK_FALSE(record.kappa.has_value());
    }
    SUBCASE("variance cap can forbid an otherwise-reached level") {
        const FiniteKernel up = kernel_state_dependent_walk(deterministic_scalar_spec(1.0, 6));
        const Trajectory trajectory = simulate(up, 6, {}, 1);
        // level 2 is reached at k = 2, but W_2 = 2 > sigma2 = 1.5
        CHECK_FALSE(stopping_time(trajectory, 2.0, 1.5).hit);
    }
}

TEST_CASE("trace_exp discrepancy dominates its scalar lower bound") {
    // tr exp(theta Y - g(theta) W) >= exp(theta t - g(theta) w) whenever
    // lambda_max(Y) >= t and lambda_max(W) <= w.
    Rng rng(314);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 1 + rng.next_below(6);
        SymMatrix y(d), w(d);
        {
            std::vector<double> ye(static_cast<size_t>(d) * d), we(static_cast<size_t>(d) * d);
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    ye[static_cast<size_t>(i) * d + j] = ye[static_cast<size_t>(j) * d + i] =
                        rng.next_range(-2.0, 2.0);
                    we[static_cast<size_t>(i) * d + j] = we[static_cast<size_t>(j) * d + i] =
                        rng.next_range(-2.0, 2.0);
                }
            y = SymMatrix(d, ye);
            w = SymMatrix(d, we);
        }
        const double t = lambda_max(y) - rng.next_range(0.0, 1.0);
        const double w_cap = lambda_max(w) + rng.next_range(0.0, 1.0);
        for (double theta : {0.1, 0.5, 1.0, 2.0}) {
            SymMatrix exponent = theta * y;
            exponent.add_scaled(w, -g_function_value(theta));
            const double discrepancy = trace_exp(exponent);
            const double floor = std::exp(theta * t - g_function_value(theta) * w_cap);
            CHECK(discrepancy >= floor - 1e-12);
        }
    }
}

TEST_CASE("builtin kernels") {
    CHECK(builtin_kernel_names().size() == 3);
    CHECK_THROWS_AS(builtin_kernel("nope", 4), std::invalid_argument);
    for (const auto& name : builtin_kernel_names()) {
        const FiniteKernel kernel = builtin_kernel(name, 6);
        CHECK(kernel.centered());
        CHECK(kernel.max_outcome_lambda_max() == doctest::Approx(1.0).epsilon(1e-15));
    }
}
