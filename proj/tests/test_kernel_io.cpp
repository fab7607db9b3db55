#include "matmart/kernel_io.hpp"

#include <sstream>
#include <string>

#include "doctest.h"
#include "matmart/martingale.hpp"

using namespace matmart;

namespace {

KernelSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_kernel_spec(in, "test.kernel");
}

const char* kHalvedWalk = R"(# scalar walk, step halves after a down-step
kernel halved_walk
dim 1
horizon 8
states 2
centered true
initial 0

state 0
outcome 0.5 -> 0 : 1
outcome 0.5 -> 1 : -1

state 1
outcome 0.5 -> 0 : 0.5
outcome 0.5 -> 1 : -0.5
)";

}  // namespace

TEST_CASE("parses a complete kernel file") {
    const KernelSpec spec = parse(kHalvedWalk);
    CHECK(spec.name == "halved_walk");
    CHECK(spec.dim == 1);
    CHECK(spec.horizon == 8);
    CHECK(spec.centered);
    CHECK(spec.initial_state == 0);
    REQUIRE(spec.states.size() == 2);
    REQUIRE(spec.states[0].size() == 2);
    CHECK(spec.states[0][0].probability == 0.5);
    CHECK(spec.states[0][1].next_state == 1);
    CHECK(spec.states[1][0].value(0, 0) == 0.5);

    // The parsed spec behaves exactly like the built-in statewalk kernel.
    const FiniteKernel kernel = FiniteKernel::from_spec(spec);
    const FiniteKernel builtin = builtin_kernel("statewalk", 8);
    const Trajectory a = simulate(kernel, 8, {1.0}, 77);
    const Trajectory b = simulate(builtin, 8, {1.0}, 77);
    REQUIRE(a.steps.size() == b.steps.size());
    for (size_t k = 0; k < a.steps.size(); ++k) {
        CHECK((a.steps[k].y - b.steps[k].y).max_abs() == 0.0);
        CHECK(a.steps[k].s == b.steps[k].s);
    }
}

TEST_CASE("matrix entries are row-major") {
    const KernelSpec spec = parse(
        "dim 2\nhorizon 1\nstates 1\nstate 0\n"
        "outcome 0.5 -> 0 : 0 1 1 0\n"
        "outcome 0.5 -> 0 : 0 -1 -1 0\n");
    CHECK(spec.states[0][0].value(0, 1) == 1.0);
    CHECK(spec.states[0][0].value(0, 0) == 0.0);
    CHECK_NOTHROW(FiniteKernel::from_spec(spec));
}

TEST_CASE("diagnostics carry line and column") {
    SUBCASE("unknown directive") {
        try {
            parse("dim 1\nbogus 3\n");
            FAIL("expected a parse error");
        } catch (const KernelParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() == 1);
            CHECK(std::string(e.what()).find("test.kernel:2:1") != std::string::npos);
        }
    }
    SUBCASE("bad probability token") {
        try {
            parse("dim 1\nstates 1\nstate 0\noutcome half -> 0 : 1\n");
            FAIL("expected a parse error");
        } catch (const KernelParseError& e) {
            CHECK(e.line() == 4);
            CHECK(e.column() == 9);
        }
    }
    SUBCASE("wrong entry count") {
        CHECK_THROWS_AS(parse("dim 2\nstates 1\nstate 0\noutcome 1.0 -> 0 : 1 2 3\n"),
                        KernelParseError);
    }
    SUBCASE("missing declarations") {
        CHECK_THROWS_AS(parse("horizon 3\n"), KernelParseError);
        CHECK_THROWS_AS(parse("dim 2\n"), KernelParseError);
    }
    SUBCASE("outcome outside a state block") {
        CHECK_THROWS_AS(parse("dim 1\nstates 1\noutcome 1.0 -> 0 : 1\n"), KernelParseError);
    }
    SUBCASE("next state out of range") {
        CHECK_THROWS_AS(parse("dim 1\nstates 1\nstate 0\noutcome 1.0 -> 3 : 1\n"), KernelParseError);
    }
    SUBCASE("duplicate state block") {
        CHECK_THROWS_AS(parse("dim 1\nstates 1\nstate 0\nstate 0\n"), KernelParseError);
    }
}

TEST_CASE("probabilities are re-validated when the kernel is built") {
    const KernelSpec spec = parse(
        "dim 1\nhorizon 2\nstates 1\nstate 0\n"
        "outcome 0.5 -> 0 : 1\noutcome 0.4 -> 0 : -1\n");
    CHECK_THROWS_AS(FiniteKernel::from_spec(spec), std::invalid_argument);
}

TEST_CASE("missing file reports its path") {
    try {
        load_kernel_spec("/nonexistent/path.kernel");
        FAIL("expected a parse error");
    } catch (const KernelParseError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/path.kernel") != std::string::npos);
    }
}
