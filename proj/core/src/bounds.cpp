#include "matmart/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "matmart/martingale.hpp"

namespace matmart {

namespace {

constexpr double kThetaLo = 1e-8;
constexpr double kThetaHi = 50.0;
constexpr int kCoarseGridSize = 64;
constexpr double kLogThetaTol = 1e-10;

void check_g_nonnegative(const CgfBoundFn::Fn& g) {
    const double log_lo = std::log(kThetaLo), log_hi = std::log(kThetaHi);
    for (int i = 0; i < kCoarseGridSize; ++i) {
        const double theta = std::exp(log_lo + (log_hi - log_lo) * i / (kCoarseGridSize - 1));
        const double v = g(theta);
        if (std::isnan(v) || v < 0.0) {
            throw std::invalid_argument("cgf bound function must be nonnegative on (0, inf)");
        }
    }
}

}  // namespace

void TailQuery::validate() const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("tail query requires t >= 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("tail query requires sigma2 > 0");
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("tail query requires R > 0");
    if (d < 1) throw std::invalid_argument("tail query requires d >= 1");
}

CgfBoundFn::CgfBoundFn(Fn g, std::string description)
    : g_(std::move(g)), description_(std::move(description)) {
    check_g_nonnegative(g_);
}

CgfBoundFn::CgfBoundFn(Fn g, std::string description, ArgminFn closed_form_argmin)
    : g_(std::move(g)), description_(std::move(description)), argmin_(std::move(closed_form_argmin)) {
    check_g_nonnegative(g_);
}

const CgfBoundFn& CgfBoundFn::freedman() {
    static const CgfBoundFn instance(
        [](double theta) { return g_function_value(theta); },
        "exp(theta) - theta - 1",
        [](double t, double w) { return std::log1p(t / w); });
    return instance;
}

double bennett_h(double u) {
    if (std::isnan(u) || u < 0.0) throw std::domain_error("bennett_h requires u >= 0");
    return (1.0 + u) * std::log1p(u) - u;
}

BoundResult freedman_tail_bound(const TailQuery& q) {
    q.validate();
    const double exponent = -(q.t * q.t / 2.0) / (q.sigma2 + q.R * q.t / 3.0);
    const double value = q.d * std::exp(exponent);
    return BoundResult{value, std::nullopt, value > 1.0};
}

BoundResult bennett_tail_bound(const TailQuery& q) {
    q.validate();
    const double u = q.R * q.t / q.sigma2;
    const double value = q.d * std::exp(-(q.sigma2 / (q.R * q.R)) * bennett_h(u));
    return BoundResult{value, std::nullopt, value > 1.0};
}

double master_bound_at_theta(double t, double w, double theta, const CgfBoundFn& g, int d) {
    if (!(theta > 0.0)) throw std::domain_error("master bound requires theta > 0");
    if (!(w >= 0.0)) throw std::invalid_argument("master bound requires w >= 0");
    if (d < 1) throw std::invalid_argument("master bound requires d >= 1");
    const double gv = g(theta);
    if (std::isinf(gv) && gv > 0.0) return static_cast<double>(d);
    return d * std::exp(-theta * t + gv * w);
}

BoundResult optimize_theta(double t, double w, const CgfBoundFn& g, int d) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("optimize_theta requires t >= 0");
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("optimize_theta requires w > 0");
    if (d < 1) throw std::invalid_argument("optimize_theta requires d >= 1");

    // theta* -> 0 as t -> 0; the limit value is the trivial bound d.
    if (t == 0.0) return BoundResult{static_cast<double>(d), std::nullopt, d > 1};

    if (g.has_closed_form_argmin()) {
        const double theta_star = g.closed_form_argmin(t, w);
        const double value = master_bound_at_theta(t, w, theta_star, g, d);
        return BoundResult{value, theta_star, value > 1.0};
    }

    const auto objective = [&](double log_theta) { return master_bound_at_theta(t, w, std::exp(log_theta), g, d); };

    const double log_lo = std::log(kThetaLo), log_hi = std::log(kThetaHi);
    double best_log_theta = 0.0, best_value = std::numeric_limits<double>::infinity();
    int best_index = -1;
    std::vector<double> grid_logs(kCoarseGridSize);
    bool any_finite_g = false;
    for (int i = 0; i < kCoarseGridSize; ++i) {
        const double lt = log_lo + (log_hi - log_lo) * i / (kCoarseGridSize - 1);
        grid_logs[i] = lt;
        if (std::isfinite(g(std::exp(lt)))) any_finite_g = true;
        const double v = objective(lt);
        if (std::isfinite(v) && v < best_value) {
            best_value = v;
            best_log_theta = lt;
            best_index = i;
        }
    }
    if (best_index < 0) throw std::runtime_error("no finite bound");
    if (!any_finite_g) {
        // g is +inf across the whole bracket; only the trivial bound remains.
        return BoundResult{static_cast<double>(d), std::nullopt, d > 1};
    }

    // Golden-section refinement on log(theta) around the best grid point.
    double lo = grid_logs[std::max(0, best_index - 1)];
    double hi = grid_logs[std::min(kCoarseGridSize - 1, best_index + 1)];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    while (hi - lo > kLogThetaTol) {
        if (!std::isfinite(f1) || (std::isfinite(f2) && f2 < f1)) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = objective(x1);
        }
        if (std::isfinite(f1) && f1 < best_value) {
            best_value = f1;
            best_log_theta = x1;
        }
        if (std::isfinite(f2) && f2 < best_value) {
            best_value = f2;
            best_log_theta = x2;
        }
    }

    return BoundResult{best_value, std::exp(best_log_theta), best_value > 1.0};
}

BoundResult rectangular_freedman_bound(double t, double sigma2, double R, int d1, int d2) {
    if (d1 < 1 || d2 < 1) throw std::invalid_argument("rectangular bound requires d1, d2 >= 1");
    return freedman_tail_bound(TailQuery{t, sigma2, R, d1 + d2});
}

double invert_freedman_for_t(double delta, double sigma2, double R, int d) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("invert requires delta > 0");
    TailQuery{0.0, sigma2, R, d}.validate();
    if (delta >= d) return 0.0;  // bound already trivial at t = 0

    // Solve t^2/2 = L (sigma2 + R t / 3) with L = log(d / delta).
    const double level = std::log(d / delta);
    const double half_linear = level * R / 3.0;
    return half_linear + std::sqrt(half_linear * half_linear + 2.0 * level * sigma2);
}

HBoundCheck h_lower_bound_check(double u) {
    const double lhs = bennett_h(u);
    const double rhs = (u * u / 2.0) / (1.0 + u / 3.0);
    return HBoundCheck{lhs, rhs, lhs >= rhs - 1e-12};
}

}  // namespace matmart
