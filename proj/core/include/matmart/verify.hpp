#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "matmart/bounds.hpp"
#include "matmart/martingale.hpp"
#include "matmart/rng.hpp"
#include "matmart/symmat.hpp"

namespace matmart {

/// Monte Carlo estimate of a tail probability with an exact binomial
/// (Clopper-Pearson) confidence interval.
struct TailEstimate {
    long long trials = 0;
    long long hits = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    double confidence = 0.99;
    // query echo
    double t = 0.0;
    double sigma2 = 0.0;
    int horizon = 0;
    uint64_t seed = 0;
};

/// Exact binomial confidence interval at the given two-sided confidence.
struct BinomialInterval {
    double low;
    double high;
};
BinomialInterval clopper_pearson(long long hits, long long trials, double confidence);

/// Estimates P{exists k <= K : lambda_max(Y_k) >= t and lambda_max(W_k) <= sigma2}
/// over `trials` independent trajectories. Deterministic for a fixed seed
/// and independent of the worker count (set MATMART_THREADS to override).
TailEstimate estimate_tail_probability(const FiniteKernel& kernel, int horizon, double t,
                                       double sigma2, long long trials, uint64_t seed);

/// Exact first-passage probability for the scalar +-1 walk, whose
/// quadratic variation is W_k = k: P{exists k <= K : Y_k >= t and k <= sigma2}.
/// Dynamic programming over dyadic path counts; exact for K <= 40.
double scalar_walk_oracle(int horizon, double t, double sigma2);

/// Result of a numerical certification of one trace inequality.
struct CertificationReport {
    std::string instance;
    double margin = 0.0;  // smallest slack observed; negative means violated
    bool pass = false;
    double tolerance = 0.0;
};

/// Certifies E tr exp(H + X) <= tr exp(H + log E e^X) by exact finite-sum
/// evaluation. margin = rhs - lhs; pass iff margin >= -1e-9 * scale.
CertificationReport check_lieb_corollary(const SymMatrix& h,
                                         std::span<const WeightedMatrix> x_dist);

/// Certifies E e^{theta X} <= exp((e^theta - theta - 1) E(X^2)) in the
/// semidefinite order for each theta in the grid. Preconditions: the
/// distribution is centered (mean within 1e-10) and lambda_max(X_i) <= 1.
/// margin = min over theta of lambda_min(rhs - lhs); pass iff >= -1e-9.
CertificationReport check_mgf_lemma(std::span<const WeightedMatrix> x_dist,
                                    std::span<const double> theta_grid);

/// Exhaustively enumerates the kernel's outcome tree and verifies
/// E_{k-1} S_k <= S_{k-1} at every node for the given theta, where
/// S_k = tr exp(theta Y_k - g(theta) W_k) with the built-in g.
/// margin = min over nodes of (S_{k-1} - E_{k-1} S_k); +inf for a
/// zero-horizon kernel. Requires a centered kernel scaled so that
/// every outcome has lambda_max <= 1, and at most 1e5 tree nodes.
CertificationReport check_supermartingale_exact(const FiniteKernel& kernel, double theta);

/// One row of a bound-versus-empirical comparison.
struct SweepRow {
    double t;
    long long hits;
    double p_hat;
    double ci_low;
    double ci_high;
    double freedman;  // raw bound value
    double bennett;   // raw bound value
    bool ok;          // ci_low <= min(1, bound) for both bounds
};

/// Runs one batch of trajectories and compares the empirical tail against
/// the Freedman and Bennett bounds at every t in the grid (rows sorted by
/// t). R is inferred from the kernel's outcome set unless `R_override`
/// is positive. A row with ok == false flags a would-be counterexample.
std::vector<SweepRow> bound_vs_empirical_sweep(const FiniteKernel& kernel, int horizon,
                                               std::span<const double> t_grid, double sigma2,
                                               long long trials, uint64_t seed,
                                               double R_override = 0.0);

/// Seeded random instance generators for the certification suites.
/// Matrices have entries uniform in [-bound, bound]; mgf instances are
/// centered and rescaled so the largest outcome eigenvalue is exactly 1.
SymMatrix random_symmetric(Rng& rng, int dim, double entry_bound);

struct LiebInstance {
    SymMatrix h;
    std::vector<WeightedMatrix> dist;
};
LiebInstance random_lieb_instance(Rng& rng);
std::vector<WeightedMatrix> random_mgf_instance(Rng& rng);

}  // namespace matmart
