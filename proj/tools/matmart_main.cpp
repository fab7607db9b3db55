// matmart: evaluate matrix-martingale tail bounds, simulate kernels,
// estimate tail probabilities, and certify the underlying trace
// inequalities.
//
// Exit codes: 0 success, 1 contract-violation finding (an empirical
// confidence interval contradicting a bound, or a failed certification),
// 2 usage or parse error, 3 internal numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "matmart/bounds.hpp"
#include "matmart/errors.hpp"
#include "matmart/kernel_io.hpp"
#include "matmart/martingale.hpp"
#include "matmart/rng.hpp"
#include "matmart/table_io.hpp"
#include "matmart/verify.hpp"

namespace {

using namespace matmart;

constexpr const char* kToolVersion = "0.1.0";

struct OutputSpec {
    std::string path;    // empty: table goes to stdout
    std::string format;  // empty: infer from path, default json
};

std::string resolve_format(const OutputSpec& spec) {
    if (!spec.format.empty()) return spec.format;
    if (spec.path.size() >= 4 && spec.path.substr(spec.path.size() - 4) == ".csv") return "csv";
    return "json";
}

void emit_table(const Table& table, const OutputSpec& spec) {
    const std::string format = resolve_format(spec);
    if (spec.path.empty()) {
        table.write(std::cout, format);
        return;
    }
    std::ofstream out(spec.path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + spec.path);
    table.write(out, format);
    std::cout << "wrote " << table.row_count() << " rows to " << spec.path << "\n";
}

std::string command_echo(int argc, char** argv) {
    std::string echo;
    for (int i = 0; i < argc; ++i) {
        if (i) echo += ' ';
        echo += argv[i];
    }
    return echo;
}

/// Resolves --kernel: a built-in name gets the requested horizon; anything
/// else is read as a kernel file whose declared horizon must cover K.
FiniteKernel resolve_kernel(const std::string& name_or_path, int horizon) {
    for (const auto& name : builtin_kernel_names()) {
        if (name == name_or_path) return builtin_kernel(name, horizon);
    }
    const KernelSpec spec = load_kernel_spec(name_or_path);
    FiniteKernel kernel = FiniteKernel::from_spec(spec);
    if (horizon > kernel.horizon()) {
        throw std::invalid_argument("kernel file " + name_or_path + " has horizon " +
                                    std::to_string(kernel.horizon()) + " < K = " +
                                    std::to_string(horizon));
    }
    return kernel;
}

void print_kv(const char* key, double value) {
    std::cout << key << "=" << format_double(value) << "\n";
}

// ---------------------------------------------------------------------------
// bound / invert

struct BoundOptions {
    std::string kind;
    double t = 0.0, sigma2 = 0.0, R = 1.0;
    int d = 0, d1 = 0, d2 = 0;
    OutputSpec output;
};

int run_bound(const BoundOptions& opt, const std::string& echo) {
    BoundResult result{};
    int dim = opt.d;
    if (opt.kind == "freedman") {
        if (opt.d < 1) throw std::invalid_argument("--kind freedman requires -d");
        result = freedman_tail_bound(TailQuery{opt.t, opt.sigma2, opt.R, opt.d});
    } else if (opt.kind == "bennett") {
        if (opt.d < 1) throw std::invalid_argument("--kind bennett requires -d");
        result = bennett_tail_bound(TailQuery{opt.t, opt.sigma2, opt.R, opt.d});
    } else if (opt.kind == "rectangular") {
        if (opt.d1 < 1 || opt.d2 < 1) throw std::invalid_argument("--kind rectangular requires --d1 and --d2");
        if (opt.d > 0) throw std::invalid_argument("--kind rectangular takes --d1/--d2, not -d");
        result = rectangular_freedman_bound(opt.t, opt.sigma2, opt.R, opt.d1, opt.d2);
        dim = opt.d1 + opt.d2;
    } else if (opt.kind == "master") {
        if (opt.d < 1) throw std::invalid_argument("--kind master requires -d");
        if (opt.R != 1.0)
            throw std::invalid_argument("--kind master assumes a unit difference bound; rescale "
                                        "t and sigma2 instead of passing -R");
        result = optimize_theta(opt.t, opt.sigma2, CgfBoundFn::freedman(), opt.d);
    } else {
        throw std::invalid_argument("unknown bound kind: " + opt.kind);
    }

    std::cout << "kind=" << opt.kind << "\n";
    print_kv("t", opt.t);
    print_kv("sigma2", opt.sigma2);
    print_kv("R", opt.R);
    std::cout << "d=" << dim << "\n";
    print_kv("raw", result.value);
    print_kv("reported", result.reported());
    std::cout << "clipped=" << (result.clipped ? "true" : "false") << "\n";
    if (result.theta_star) print_kv("theta_star", *result.theta_star);

    if (!opt.output.path.empty()) {
        Table table({"kind", "t", "sigma2", "R", "d", "raw", "reported", "clipped", "theta_star"});
        table.set_meta("tool", std::string("matmart"));
        table.set_meta("version", std::string(kToolVersion));
        table.set_meta("command", echo);
        table.add_row({opt.kind, opt.t, opt.sigma2, opt.R, static_cast<long long>(dim), result.value,
                       result.reported(), result.clipped,
                       result.theta_star ? Cell{*result.theta_star} : Cell{std::string("none")}});
        emit_table(table, opt.output);
    }
    return 0;
}

struct InvertOptions {
    double delta = 0.0, sigma2 = 0.0, R = 1.0;
    int d = 0;
};

int run_invert(const InvertOptions& opt) {
    const double t = invert_freedman_for_t(opt.delta, opt.sigma2, opt.R, opt.d);
    print_kv("delta", opt.delta);
    print_kv("t", t);
    print_kv("bound_at_t", freedman_tail_bound(TailQuery{t, opt.sigma2, opt.R, opt.d}).value);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string kernel;
    int horizon = 0;
    std::vector<double> thetas;
    uint64_t seed = 0;
    OutputSpec output;
};

int run_simulate(const SimulateOptions& opt, const std::string& echo) {
    const FiniteKernel kernel = resolve_kernel(opt.kernel, opt.horizon);
    const Trajectory trajectory = simulate(kernel, opt.horizon, opt.thetas, opt.seed);

    std::vector<std::string> columns = {"k", "lambda_max_Y", "lambda_max_W"};
    for (size_t i = 0; i < opt.thetas.size(); ++i) columns.push_back("S_" + std::to_string(i + 1));
    Table table(std::move(columns));
    table.set_meta("tool", std::string("matmart"));
    table.set_meta("version", std::string(kToolVersion));
    table.set_meta("command", echo);
    table.set_meta("kernel", kernel.name());
    table.set_meta("dim", static_cast<long long>(kernel.dim()));
    table.set_meta("K", static_cast<long long>(opt.horizon));
    table.set_meta("seed", static_cast<long long>(opt.seed));
    for (size_t i = 0; i < opt.thetas.size(); ++i)
        table.set_meta("theta_" + std::to_string(i + 1), opt.thetas[i]);

    std::vector<Cell> row0 = {static_cast<long long>(0), 0.0, 0.0};
    for (size_t i = 0; i < opt.thetas.size(); ++i) row0.push_back(trajectory.s0());
    table.add_row(std::move(row0));
    for (size_t k = 0; k < trajectory.steps.size(); ++k) {
        const auto& step = trajectory.steps[k];
        std::vector<Cell> row = {static_cast<long long>(k + 1), lambda_max(step.y), lambda_max(step.w)};
        for (double s : step.s) row.push_back(s);
        table.add_row(std::move(row));
    }
    emit_table(table, opt.output);
    return 0;
}

// ---------------------------------------------------------------------------
// verify-tail / sweep

struct VerifyTailOptions {
    std::string kernel;
    int horizon = 0;
    double t = 0.0, sigma2 = 0.0;
    long long trials = 0;
    uint64_t seed = 0;
    double R_override = 0.0;
    OutputSpec output;
};

int run_verify_tail(const VerifyTailOptions& opt, const std::string& echo) {
    const FiniteKernel kernel = resolve_kernel(opt.kernel, opt.horizon);
    const std::vector<double> ts = {opt.t};
    const auto rows = bound_vs_empirical_sweep(kernel, opt.horizon, ts, opt.sigma2, opt.trials,
                                               opt.seed, opt.R_override);
    const SweepRow& row = rows.front();

    std::cout << "kernel=" << kernel.name() << "\n";
    std::cout << "K=" << opt.horizon << "\n";
    print_kv("t", row.t);
    print_kv("sigma2", opt.sigma2);
    std::cout << "trials=" << opt.trials << "\n";
    std::cout << "seed=" << opt.seed << "\n";
    std::cout << "hits=" << row.hits << "\n";
    print_kv("p_hat", row.p_hat);
    print_kv("ci_low", row.ci_low);
    print_kv("ci_high", row.ci_high);
    print_kv("freedman", row.freedman);
    print_kv("bennett", row.bennett);
    std::cout << "ok=" << (row.ok ? "true" : "false") << "\n";

    if (!opt.output.path.empty()) {
        Table table({"t", "hits", "p_hat", "ci_low", "ci_high", "freedman", "bennett", "ok"});
        table.set_meta("tool", std::string("matmart"));
        table.set_meta("version", std::string(kToolVersion));
        table.set_meta("command", echo);
        table.set_meta("kernel", kernel.name());
        table.set_meta("K", static_cast<long long>(opt.horizon));
        table.set_meta("sigma2", opt.sigma2);
        table.set_meta("trials", opt.trials);
        table.set_meta("seed", static_cast<long long>(opt.seed));
        table.set_meta("confidence", 0.99);
        table.set_meta("event", std::string("exists k <= K; lower-bounds the unbounded-horizon "
                                            "tail, so bound violations are still violations"));
        table.add_row({row.t, row.hits, row.p_hat, row.ci_low, row.ci_high, row.freedman,
                       row.bennett, row.ok});
        emit_table(table, opt.output);
    }
    return row.ok ? 0 : 1;
}

struct SweepOptions {
    std::string kernel;
    int horizon = 0;
    double t_min = 0.0, t_max = 0.0;
    int t_count = 0;
    double sigma2 = 0.0;
    long long trials = 0;
    uint64_t seed = 0;
    double R_override = 0.0;
    OutputSpec output;
};

int run_sweep(const SweepOptions& opt, const std::string& echo) {
    if (opt.t_count < 1) throw std::invalid_argument("--t-count must be at least 1");
    if (opt.t_max < opt.t_min) throw std::invalid_argument("--t-max must be >= --t-min");
    std::vector<double> ts;
    ts.reserve(opt.t_count);
    for (int i = 0; i < opt.t_count; ++i) {
        ts.push_back(opt.t_count == 1
                         ? opt.t_min
                         : opt.t_min + (opt.t_max - opt.t_min) * i / (opt.t_count - 1));
    }

    const FiniteKernel kernel = resolve_kernel(opt.kernel, opt.horizon);
    const auto rows = bound_vs_empirical_sweep(kernel, opt.horizon, ts, opt.sigma2, opt.trials,
                                               opt.seed, opt.R_override);

    Table table({"t", "hits", "p_hat", "ci_low", "ci_high", "freedman", "bennett", "ok"});
    table.set_meta("tool", std::string("matmart"));
    table.set_meta("version", std::string(kToolVersion));
    table.set_meta("command", echo);
    table.set_meta("kernel", kernel.name());
    table.set_meta("K", static_cast<long long>(opt.horizon));
    table.set_meta("sigma2", opt.sigma2);
    table.set_meta("trials", opt.trials);
    table.set_meta("seed", static_cast<long long>(opt.seed));
    table.set_meta("confidence", 0.99);
    table.set_meta("event", std::string("exists k <= K; lower-bounds the unbounded-horizon "
                                        "tail, so bound violations are still violations"));
    bool all_ok = true;
    for (const auto& row : rows) {
        all_ok = all_ok && row.ok;
        table.add_row({row.t, row.hits, row.p_hat, row.ci_low, row.ci_high, row.freedman,
                       row.bennett, row.ok});
    }
    emit_table(table, opt.output);
    std::cout << "ok=" << (all_ok ? "true" : "false") << "\n";
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// certify

struct CertifyOptions {
    std::string suite;
    int instances = 1000;
    uint64_t seed = 0;
    OutputSpec output;
};

struct SuiteOutcome {
    double min_margin = std::numeric_limits<double>::infinity();
    bool all_pass = true;
    int count = 0;
};

void summarize(const std::string& suite, const SuiteOutcome& outcome) {
    std::cout << "suite=" << suite << " cases=" << outcome.count
              << " min_margin=" << format_double(outcome.min_margin)
              << " pass=" << (outcome.all_pass ? "true" : "false") << "\n";
}

int run_certify(const CertifyOptions& opt, const std::string& echo) {
    const bool all = opt.suite == "all";
    if (!all && opt.suite != "lieb" && opt.suite != "mgf" && opt.suite != "supermartingale" &&
        opt.suite != "h-inequality") {
        throw std::invalid_argument("unknown certification suite: " + opt.suite);
    }
    if (opt.instances < 0) throw std::invalid_argument("--instances must be nonnegative");
    if (opt.instances == 0 && (all || opt.suite == "lieb" || opt.suite == "mgf")) {
        std::cout << "warning: 0 instances requested; randomized suites pass vacuously\n";
    }

    Table table({"suite", "case", "instance", "margin", "tolerance", "pass"});
    table.set_meta("tool", std::string("matmart"));
    table.set_meta("version", std::string(kToolVersion));
    table.set_meta("command", echo);
    table.set_meta("seed", static_cast<long long>(opt.seed));
    table.set_meta("instances", static_cast<long long>(opt.instances));

    bool all_pass = true;
    const bool cases_to_stdout = opt.output.path.empty();
    const auto record = [&](const std::string& suite, long long index,
                            const CertificationReport& report, SuiteOutcome& outcome) {
        table.add_row({suite, static_cast<long long>(index), report.instance, report.margin,
                       report.tolerance, report.pass});
        if (cases_to_stdout) {
            std::cout << "suite=" << suite << " case=" << index
                      << " margin=" << format_double(report.margin)
                      << " pass=" << (report.pass ? "true" : "false") << "\n";
        }
        outcome.min_margin = std::min(outcome.min_margin, report.margin);
        outcome.all_pass = outcome.all_pass && report.pass;
        ++outcome.count;
    };

    if (all || opt.suite == "h-inequality") {
        SuiteOutcome outcome;
        double min_slack = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (int i = 0; i <= 10000; ++i) {
            const HBoundCheck check = h_lower_bound_check(i * 0.01);
            min_slack = std::min(min_slack, check.lhs - check.rhs);
            ok = ok && check.ok;
        }
        record("h-inequality", 0,
               CertificationReport{"h(u) >= (u^2/2)/(1+u/3) on [0,100], 10001 points", min_slack,
                                   ok, 1e-12},
               outcome);
        summarize("h-inequality", outcome);
        all_pass = all_pass && outcome.all_pass;
    }
    if (all || opt.suite == "lieb") {
        SuiteOutcome outcome;
        Rng rng(opt.seed);
        for (int i = 0; i < opt.instances; ++i) {
            const LiebInstance instance = random_lieb_instance(rng);
            record("lieb", i, check_lieb_corollary(instance.h, instance.dist), outcome);
        }
        summarize("lieb", outcome);
        all_pass = all_pass && outcome.all_pass;
    }
    if (all || opt.suite == "mgf") {
        SuiteOutcome outcome;
        Rng rng(opt.seed + 1);
        const std::vector<double> thetas = {0.1, 0.5, 1.0, 2.0, 4.0};
        for (int i = 0; i < opt.instances; ++i) {
            const auto dist = random_mgf_instance(rng);
            record("mgf", i, check_mgf_lemma(dist, thetas), outcome);
        }
        summarize("mgf", outcome);
        all_pass = all_pass && outcome.all_pass;
    }
    if (all || opt.suite == "supermartingale") {
        SuiteOutcome outcome;
        const std::vector<std::pair<std::string, int>> kernels = {
            {"walk1d", 10}, {"rademacher2d", 6}, {"statewalk", 8}};
        long long index = 0;
        for (const auto& [name, horizon] : kernels) {
            const FiniteKernel kernel = builtin_kernel(name, horizon);
            for (double theta : {0.1, 0.5, 1.0, 2.0}) {
                record("supermartingale", index++, check_supermartingale_exact(kernel, theta),
                       outcome);
            }
        }
        summarize("supermartingale", outcome);
        all_pass = all_pass && outcome.all_pass;
    }

    if (!opt.output.path.empty()) emit_table(table, opt.output);
    std::cout << "pass=" << (all_pass ? "true" : "false") << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix-martingale tail bounds: evaluation, simulation, certification"};
    app.require_subcommand(1);
    const std::string echo = command_echo(argc, argv);

    BoundOptions bound_opt;
    CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate a closed-form or optimized tail bound");
    bound_cmd->add_option("--kind", bound_opt.kind, "freedman|bennett|rectangular|master")->required();
    bound_cmd->add_option("-t,--t", bound_opt.t, "threshold level")->required();
    bound_cmd->add_option("--sigma2", bound_opt.sigma2, "variance proxy cap (w for --kind master)")->required();
    bound_cmd->add_option("-R,--R", bound_opt.R, "uniform difference bound (default 1)");
    bound_cmd->add_option("-d,--d", bound_opt.d, "matrix dimension");
    bound_cmd->add_option("--d1", bound_opt.d1, "rows (rectangular)");
    bound_cmd->add_option("--d2", bound_opt.d2, "columns (rectangular)");
    bound_cmd->add_option("--output", bound_opt.output.path, "write the result table to this path");
    bound_cmd->add_option("--format", bound_opt.output.format, "csv|json (default from extension)");

    InvertOptions invert_opt;
    CLI::App* invert_cmd = app.add_subcommand("invert", "smallest t with Freedman bound = delta");
    invert_cmd->add_option("--delta", invert_opt.delta, "target bound value in (0, 1)")->required();
    invert_cmd->add_option("--sigma2", invert_opt.sigma2, "variance proxy cap")->required();
    invert_cmd->add_option("-R,--R", invert_opt.R, "uniform difference bound (default 1)");
    invert_cmd->add_option("-d,--d", invert_opt.d, "matrix dimension")->required();

    SimulateOptions sim_opt;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run one kernel trajectory");
    sim_cmd->add_option("--kernel", sim_opt.kernel, "built-in name (walk1d, rademacher2d, statewalk) or kernel file")->required();
    sim_cmd->add_option("--K", sim_opt.horizon, "number of steps")->required();
    sim_cmd->add_option("--theta", sim_opt.thetas, "tracked theta values for S_k (repeatable)");
    sim_cmd->add_option("--seed", sim_opt.seed, "RNG seed (required; no silent default)")->required();
    sim_cmd->add_option("--output", sim_opt.output.path, "write the trajectory table to this path");
    sim_cmd->add_option("--format", sim_opt.output.format, "csv|json (default from extension)");

    VerifyTailOptions vt_opt;
    CLI::App* vt_cmd = app.add_subcommand("verify-tail", "Monte Carlo tail estimate versus the bounds");
    vt_cmd->add_option("--kernel", vt_opt.kernel, "built-in name or kernel file")->required();
    vt_cmd->add_option("--K", vt_opt.horizon, "number of steps")->required();
    vt_cmd->add_option("-t,--t", vt_opt.t, "threshold level")->required();
    vt_cmd->add_option("--sigma2", vt_opt.sigma2, "variance proxy cap")->required();
    vt_cmd->add_option("--trials", vt_opt.trials, "number of trajectories")->required();
    vt_cmd->add_option("--seed", vt_opt.seed, "RNG seed (required; no silent default)")->required();
    vt_cmd->add_option("-R,--R", vt_opt.R_override, "override the inferred difference bound");
    vt_cmd->add_option("--output", vt_opt.output.path, "write the result row to this path");
    vt_cmd->add_option("--format", vt_opt.output.format, "csv|json (default from extension)");

    SweepOptions sweep_opt;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "bounds versus empirical tail across a t grid");
    sweep_cmd->add_option("--kernel", sweep_opt.kernel, "built-in name or kernel file")->required();
    sweep_cmd->add_option("--K", sweep_opt.horizon, "number of steps")->required();
    sweep_cmd->add_option("--t-min", sweep_opt.t_min, "first threshold")->required();
    sweep_cmd->add_option("--t-max", sweep_opt.t_max, "last threshold")->required();
    sweep_cmd->add_option("--t-count", sweep_opt.t_count, "grid size")->required();
    sweep_cmd->add_option("--sigma2", sweep_opt.sigma2, "variance proxy cap")->required();
    sweep_cmd->add_option("--trials", sweep_opt.trials, "number of trajectories")->required();
    sweep_cmd->add_option("--seed", sweep_opt.seed, "RNG seed (required; no silent default)")->required();
    sweep_cmd->add_option("-R,--R", sweep_opt.R_override, "override the inferred difference bound");
    sweep_cmd->add_option("--output", sweep_opt.output.path, "write the sweep table to this path");
    sweep_cmd->add_option("--format", sweep_opt.output.format, "csv|json (default from extension)");

    CertifyOptions cert_opt;
    CLI::App* cert_cmd = app.add_subcommand("certify", "run a trace-inequality certification suite");
    cert_cmd->add_option("--suite", cert_opt.suite, "lieb|mgf|supermartingale|h-inequality|all")->required();
    cert_cmd->add_option("--instances", cert_opt.instances, "randomized instances per suite (default 1000)");
    cert_cmd->add_option("--seed", cert_opt.seed, "RNG seed (required; no silent default)")->required();
    cert_cmd->add_option("--output", cert_opt.output.path, "write per-case margins to this path");
    cert_cmd->add_option("--format", cert_opt.output.format, "csv|json (default from extension)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (bound_cmd->parsed()) return run_bound(bound_opt, echo);
        if (invert_cmd->parsed()) return run_invert(invert_opt);
        if (sim_cmd->parsed()) return run_simulate(sim_opt, echo);
        if (vt_cmd->parsed()) return run_verify_tail(vt_opt, echo);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opt, echo);
        if (cert_cmd->parsed()) return run_certify(cert_opt, echo);
    } catch (const KernelParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
