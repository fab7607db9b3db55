#include "matmart/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "matmart/errors.hpp"

#include <boost/math/distributions/beta.hpp>

namespace matmart {

namespace {

int resolve_thread_count(long long trials) {
    int n = 0;
    if (const char* env = std::getenv("MATMART_THREADS")) {
        n = std::atoi(env);
    }
    if (n < 1) n = static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, 64);
    if (trials < 4096) n = 1;  // not worth spawning for tiny batches
    return static_cast<int>(std::min<long long>(n, trials));
}

/// Largest lambda_max(Y_k) seen while lambda_max(W_k) <= sigma2, over
/// k = 0..steps. The eligible k form a prefix because W_k is
/// nondecreasing in the semidefinite order. Returns -inf if no k is
/// eligible (possible only when sigma2 < 0).
double max_level_within_variance(const FiniteKernel& kernel, int steps, double sigma2, Rng rng) {
    double level = -std::numeric_limits<double>::infinity();
    if (sigma2 < 0.0) return level;
    level = 0.0;  // k = 0: Y_0 = 0, W_0 = 0

    int state = kernel.initial_state();
    SymMatrix y(kernel.dim());
    SymMatrix w(kernel.dim());
    std::vector<double> probs;
    for (int k = 1; k <= steps; ++k) {
        const auto& outcomes = kernel.outcomes_at(state);
        w.add_scaled(kernel.second_moment_at(state), 1.0);
        if (lambda_max(w) > sigma2) break;

        probs.clear();
        for (const auto& o : outcomes) probs.push_back(o.probability);
        const KernelOutcome& drawn = outcomes[rng.next_outcome(probs)];
        y.add_scaled(drawn.value, 1.0);
        state = drawn.next_state;
        level = std::max(level, lambda_max(y));
    }
    return level;
}

/// Per-trial hit indicator with early exit; equivalent to
/// stopping_time(simulate(...), t, sigma2).hit.
bool hit_trial(const FiniteKernel& kernel, int steps, double t, double sigma2, Rng rng) {
    if (0.0 >= t && 0.0 <= sigma2) return true;
    if (sigma2 < 0.0) return false;

    int state = kernel.initial_state();
    SymMatrix y(kernel.dim());
    SymMatrix w(kernel.dim());
    std::vector<double> probs;
    for (int k = 1; k <= steps; ++k) {
        const auto& outcomes = kernel.outcomes_at(state);
        w.add_scaled(kernel.second_moment_at(state), 1.0);
        if (lambda_max(w) > sigma2) return false;

        probs.clear();
        for (const auto& o : outcomes) probs.push_back(o.probability);
        const KernelOutcome& drawn = outcomes[rng.next_outcome(probs)];
        y.add_scaled(drawn.value, 1.0);
        state = drawn.next_state;
        if (lambda_max(y) >= t) return true;
    }
    return false;
}

void check_simulation_inputs(const FiniteKernel& kernel, int horizon, long long trials) {
    if (horizon < 0 || horizon > kernel.horizon())
        throw std::invalid_argument("horizon exceeds the kernel's");
    if (trials < 1) throw std::invalid_argument("at least one trial is required");
}

void check_distribution(std::span<const WeightedMatrix> dist, int dim) {
    if (dist.empty()) throw std::invalid_argument("empty outcome distribution");
    double sum = 0.0;
    for (const auto& wm : dist) {
        if (!(wm.probability > 0.0) || !std::isfinite(wm.probability))
            throw std::invalid_argument("distribution probabilities must be positive");
        if (wm.value.dim() != dim) throw std::invalid_argument("dimension mismatch");
        sum += wm.probability;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("distribution probabilities must sum to 1");
}

}  // namespace

BinomialInterval clopper_pearson(long long hits, long long trials, double confidence) {
    if (trials < 1) throw std::invalid_argument("interval requires trials >= 1");
    if (hits < 0 || hits > trials) throw std::invalid_argument("hits out of range");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("confidence must lie in (0, 1)");
    const double alpha = 1.0 - confidence;
    BinomialInterval ci{0.0, 1.0};
    if (hits > 0) {
        boost::math::beta_distribution<double> lower(static_cast<double>(hits),
                                                     static_cast<double>(trials - hits + 1));
        ci.low = boost::math::quantile(lower, alpha / 2.0);
    }
    if (hits < trials) {
        boost::math::beta_distribution<double> upper(static_cast<double>(hits + 1),
                                                     static_cast<double>(trials - hits));
        ci.high = boost::math::quantile(upper, 1.0 - alpha / 2.0);
    }
    return ci;
}

TailEstimate estimate_tail_probability(const FiniteKernel& kernel, int horizon, double t,
                                       double sigma2, long long trials, uint64_t seed) {
    check_simulation_inputs(kernel, horizon, trials);

    const int n_threads = resolve_thread_count(trials);
    std::vector<long long> partial(n_threads, 0);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        const long long begin = trials * w / n_threads;
        const long long end = trials * (w + 1) / n_threads;
        workers.emplace_back([&, w, begin, end] {
            long long count = 0;
            for (long long i = begin; i < end; ++i) {
                if (hit_trial(kernel, horizon, t, sigma2, Rng::for_stream(seed, static_cast<uint64_t>(i))))
                    ++count;
            }
            partial[w] = count;
        });
    }
    for (auto& worker : workers) worker.join();

    TailEstimate estimate;
    estimate.trials = trials;
    for (long long c : partial) estimate.hits += c;
    estimate.p_hat = static_cast<double>(estimate.hits) / static_cast<double>(trials);
    const BinomialInterval ci = clopper_pearson(estimate.hits, trials, estimate.confidence);
    estimate.ci_low = ci.low;
    estimate.ci_high = ci.high;
    estimate.t = t;
    estimate.sigma2 = sigma2;
    estimate.horizon = horizon;
    estimate.seed = seed;
    return estimate;
}

double scalar_walk_oracle(int horizon, double t, double sigma2) {
    if (horizon < 0 || horizon > 40)
        throw std::invalid_argument("scalar walk oracle supports 0 <= K <= 40");
    if (sigma2 < 0.0) return 0.0;  // even k = 0 fails the W-cap
    if (t <= 0.0) return 1.0;      // hit at k = 0

    // Eligible steps form the prefix k <= floor(sigma2) since W_k = k.
    const int k_max = static_cast<int>(std::min<double>(horizon, std::floor(sigma2)));
    const int level = static_cast<int>(std::ceil(t));  // integer walk: Y >= t iff Y >= ceil(t)
    if (k_max < 1 || level > k_max) return 0.0;

    // Path counts are dyadic with denominator 2^k_max <= 2^40, exact in
    // a double. alive[y + k] = number of unabsorbed paths at position y.
    std::vector<unsigned long long> alive(2 * static_cast<size_t>(k_max) + 1, 0);
    alive[k_max] = 1;  // position 0
    unsigned long long numerator = 0;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<unsigned long long> next(alive.size(), 0);
        for (int y = -k + 1; y <= k - 1; ++y) {
            const unsigned long long count = alive[static_cast<size_t>(y + k_max)];
            if (count == 0) continue;
            if (y + 1 >= level) {
                numerator += count << (k_max - k);  // first passage at step k
            } else {
                next[static_cast<size_t>(y + 1 + k_max)] += count;
            }
            next[static_cast<size_t>(y - 1 + k_max)] += count;
        }
        alive.swap(next);
    }
    return static_cast<double>(numerator) / std::exp2(k_max);
}

CertificationReport check_lieb_corollary(const SymMatrix& h, std::span<const WeightedMatrix> x_dist) {
    check_distribution(x_dist, h.dim());

    SymMatrix mean_exp(h.dim());
    double expected_trace = 0.0;
    for (const auto& wm : x_dist) {
        mean_exp.add_scaled(matrix_exp(wm.value), wm.probability);
        expected_trace += wm.probability * trace_exp(h + wm.value);
    }
    const double rhs = trace_exp(h + matrix_log(mean_exp));
    const double margin = rhs - expected_trace;
    const double scale = std::max({1.0, std::abs(rhs), std::abs(expected_trace)});
    const double tolerance = 1e-9 * scale;

    std::ostringstream label;
    label << "lieb d=" << h.dim() << " outcomes=" << x_dist.size();
    return CertificationReport{label.str(), margin, margin >= -tolerance, tolerance};
}

CertificationReport check_mgf_lemma(std::span<const WeightedMatrix> x_dist,
                                    std::span<const double> theta_grid) {
    if (x_dist.empty()) throw std::invalid_argument("empty outcome distribution");
    const int dim = x_dist.front().value.dim();
    check_distribution(x_dist, dim);

    SymMatrix mean(dim);
    for (const auto& wm : x_dist) mean.add_scaled(wm.value, wm.probability);
    if (mean.max_abs() > 1e-10)
        throw std::invalid_argument("mgf lemma requires a centered distribution");
    for (const auto& wm : x_dist) {
        if (lambda_max(wm.value) > 1.0 + 1e-12)
            throw std::invalid_argument("mgf lemma requires lambda_max(X) <= 1 per outcome");
    }

    SymMatrix second(dim);
    for (const auto& wm : x_dist) second.add_scaled(wm.value.square(), wm.probability);

    double margin = std::numeric_limits<double>::infinity();
    for (double theta : theta_grid) {
        SymMatrix lhs(dim);
        for (const auto& wm : x_dist) lhs.add_scaled(matrix_exp(theta * wm.value), wm.probability);
        const SymMatrix rhs = matrix_exp(g_function_value(theta) * second);
        for (double v : rhs.data()) {
            if (!std::isfinite(v))
                throw NumericalError("mgf certification exceeds double range for this instance");
        }
        margin = std::min(margin, lambda_min(rhs - lhs));
    }

    std::ostringstream label;
    label << "mgf d=" << dim << " outcomes=" << x_dist.size() << " thetas=" << theta_grid.size();
    return CertificationReport{label.str(), margin, margin >= -1e-9, 1e-9};
}

namespace {

struct SupermartingaleWalk {
    const FiniteKernel& kernel;
    double theta;
    double g_theta;
    long long nodes = 0;
    double margin = std::numeric_limits<double>::infinity();

    static constexpr long long kNodeBudget = 100000;

    void visit(int state, int step, const SymMatrix& y, const SymMatrix& w, double s_current) {
        if (step == kernel.horizon()) return;
        if (++nodes > kNodeBudget)
            throw std::runtime_error("supermartingale certification exceeds the node budget; "
                                     "use Monte Carlo verification instead");

        SymMatrix w_next = w;
        w_next.add_scaled(kernel.second_moment_at(state), 1.0);

        double expected = 0.0;
        const auto& outcomes = kernel.outcomes_at(state);
        std::vector<std::pair<SymMatrix, double>> children;
        children.reserve(outcomes.size());
        for (const auto& o : outcomes) {
            SymMatrix y_next = y;
            y_next.add_scaled(o.value, 1.0);
            SymMatrix exponent = theta * y_next;
            exponent.add_scaled(w_next, -g_theta);
            const double s_next = trace_exp(exponent);
            expected += o.probability * s_next;
            children.emplace_back(std::move(y_next), s_next);
        }
        margin = std::min(margin, s_current - expected);
        for (size_t i = 0; i < outcomes.size(); ++i) {
            visit(outcomes[i].next_state, step + 1, children[i].first, w_next, children[i].second);
        }
    }
};

}  // namespace

CertificationReport check_supermartingale_exact(const FiniteKernel& kernel, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!kernel.centered())
        throw std::invalid_argument("supermartingale certification requires a centered kernel");
    if (kernel.max_outcome_lambda_max() > 1.0 + 1e-12)
        throw std::invalid_argument("supermartingale certification requires outcomes with "
                                    "lambda_max <= 1 (rescale the kernel)");

    SupermartingaleWalk walk{kernel, theta, g_function_value(theta)};
    const SymMatrix zero(kernel.dim());
    walk.visit(kernel.initial_state(), 0, zero, zero, static_cast<double>(kernel.dim()));

    std::ostringstream label;
    label << "supermartingale kernel=" << (kernel.name().empty() ? "anonymous" : kernel.name())
          << " K=" << kernel.horizon() << " theta=" << theta << " nodes=" << walk.nodes;
    return CertificationReport{label.str(), walk.margin, walk.margin >= -1e-9, 1e-9};
}

std::vector<SweepRow> bound_vs_empirical_sweep(const FiniteKernel& kernel, int horizon,
                                               std::span<const double> t_grid, double sigma2,
                                               long long trials, uint64_t seed, double R_override) {
    check_simulation_inputs(kernel, horizon, trials);
    if (t_grid.empty()) throw std::invalid_argument("empty t grid");
    const double bound_R = R_override > 0.0 ? R_override : kernel.max_outcome_lambda_max();
    if (!(bound_R > 0.0))
        throw std::invalid_argument("kernel difference bound is not positive; "
                                    "pass an explicit R");

    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::sort(ts.begin(), ts.end());

    // One simulation pass serves every t: a trajectory hits level t iff
    // its maximal eligible level reaches t.
    const int n_threads = resolve_thread_count(trials);
    std::vector<std::vector<long long>> partial(n_threads, std::vector<long long>(ts.size(), 0));
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        const long long begin = trials * w / n_threads;
        const long long end = trials * (w + 1) / n_threads;
        workers.emplace_back([&, w, begin, end] {
            auto& counts = partial[w];
            for (long long i = begin; i < end; ++i) {
                const double level = max_level_within_variance(
                    kernel, horizon, sigma2, Rng::for_stream(seed, static_cast<uint64_t>(i)));
                for (size_t j = 0; j < ts.size() && level >= ts[j]; ++j) ++counts[j];
            }
        });
    }
    for (auto& worker : workers) worker.join();

    std::vector<SweepRow> rows;
    rows.reserve(ts.size());
    for (size_t j = 0; j < ts.size(); ++j) {
        long long hits = 0;
        for (int w = 0; w < n_threads; ++w) hits += partial[w][j];
        const BinomialInterval ci = clopper_pearson(hits, trials, 0.99);
        const TailQuery q{ts[j], sigma2, bound_R, kernel.dim()};
        const double freedman = freedman_tail_bound(q).value;
        const double bennett = bennett_tail_bound(q).value;
        const bool ok = ci.low <= std::min(1.0, bennett) && ci.low <= std::min(1.0, freedman);
        rows.push_back(SweepRow{ts[j], hits, static_cast<double>(hits) / trials, ci.low, ci.high,
                                freedman, bennett, ok});
    }
    return rows;
}

SymMatrix random_symmetric(Rng& rng, int dim, double entry_bound) {
    std::vector<double> entries(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const double v = rng.next_range(-entry_bound, entry_bound);
            entries[static_cast<size_t>(i) * dim + j] = v;
            entries[static_cast<size_t>(j) * dim + i] = v;
        }
    }
    return SymMatrix(dim, entries);
}

LiebInstance random_lieb_instance(Rng& rng) {
    const int dim = 1 + rng.next_below(5);
    const int outcomes = 1 + rng.next_below(4);
    LiebInstance instance{random_symmetric(rng, dim, 2.0), {}};
    std::vector<double> weights(outcomes);
    double sum = 0.0;
    for (double& w : weights) {
        w = rng.next_range(0.05, 1.0);  // bounded away from zero
        sum += w;
    }
    instance.dist.reserve(outcomes);
    for (int i = 0; i < outcomes; ++i) {
        instance.dist.push_back(WeightedMatrix{weights[i] / sum, random_symmetric(rng, dim, 2.0)});
    }
    return instance;
}

std::vector<WeightedMatrix> random_mgf_instance(Rng& rng) {
    const int dim = 1 + rng.next_below(5);
    const int outcomes = 2 + rng.next_below(3);
    std::vector<double> weights(outcomes);
    double sum = 0.0;
    for (double& w : weights) {
        w = rng.next_range(0.05, 1.0);
        sum += w;
    }
    std::vector<WeightedMatrix> dist;
    dist.reserve(outcomes);
    for (int i = 0; i < outcomes; ++i) {
        dist.push_back(WeightedMatrix{weights[i] / sum, random_symmetric(rng, dim, 1.0)});
    }

    SymMatrix mean(dim);
    for (const auto& wm : dist) mean.add_scaled(wm.value, wm.probability);
    for (auto& wm : dist) wm.value.add_scaled(mean, -1.0);

    // Scale down (never up) until lambda_max <= 1 and the spectral norm is
    // at most 1/2. The norm cap keeps ||exp(g(theta) E X^2)|| below ~3e5 at
    // theta = 4, so the semidefinite margin stays resolvable in doubles at
    // the 1e-9 tolerance.
    double scale = 1.0;
    for (const auto& wm : dist) {
        scale = std::max(scale, lambda_max(wm.value));
        scale = std::max(scale, 2.0 * spectral_norm(wm.value));
    }
    if (scale > 1.0) {
        for (auto& wm : dist) wm.value = (1.0 / scale) * wm.value;
    }
    return dist;
}

}  // namespace matmart
