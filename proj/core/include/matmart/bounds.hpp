#pragma once

#include <functional>
#include <optional>
#include <string>

namespace matmart {

/// Parameters of a tail query: threshold t, variance-proxy level sigma2,
/// uniform difference bound R, matrix dimension d.
struct TailQuery {
    double t;
    double sigma2;
    double R;
    int d;

    /// Throws std::invalid_argument unless t >= 0, sigma2 > 0, R > 0, d >= 1.
    void validate() const;
};

/// A tail-bound value. `value` is the raw right-hand side (may exceed 1);
/// `reported()` clips to 1, and `clipped` records whether clipping applied.
struct BoundResult {
    double value;
    std::optional<double> theta_star;
    bool clipped;

    double reported() const { return clipped ? 1.0 : value; }
};

/// A cgf-bound function g: (0, inf) -> [0, inf], paired with a previsible
/// variance proxy. Nonnegativity is checked on a probe grid at
/// construction; g may return +inf (the bound then degrades to the
/// trivial value d).
class CgfBoundFn {
public:
    using Fn = std::function<double(double)>;
    using ArgminFn = std::function<double(double, double)>;  // (t, w) -> theta*

    CgfBoundFn(Fn g, std::string description);
    CgfBoundFn(Fn g, std::string description, ArgminFn closed_form_argmin);

    /// The built-in g(theta) = e^theta - theta - 1, with its closed-form
    /// minimizer theta* = log(1 + t/w).
    static const CgfBoundFn& freedman();

    double operator()(double theta) const { return g_(theta); }
    const std::string& description() const { return description_; }
    bool has_closed_form_argmin() const { return static_cast<bool>(argmin_); }
    double closed_form_argmin(double t, double w) const { return argmin_(t, w); }

private:
    Fn g_;
    std::string description_;
    ArgminFn argmin_;
};

/// Bennett function h(u) = (1+u) log(1+u) - u for u >= 0.
double bennett_h(double u);

/// d * exp(-(t^2/2) / (sigma2 + R t / 3)).
BoundResult freedman_tail_bound(const TailQuery& q);

/// d * exp(-(sigma2/R^2) * h(R t / sigma2)); never exceeds the Freedman form.
BoundResult bennett_tail_bound(const TailQuery& q);

/// Objective of the master bound at a single theta:
/// d * exp(-theta t + g(theta) w). An infinite g(theta) yields the
/// trivial bound d.
double master_bound_at_theta(double t, double w, double theta, const CgfBoundFn& g, int d);

/// inf over theta > 0 of the master objective. Uses the closed-form
/// minimizer when g carries one; otherwise a coarse log-spaced grid
/// followed by golden-section refinement. The returned value never
/// exceeds the objective at any probed theta.
BoundResult optimize_theta(double t, double w, const CgfBoundFn& g, int d);

/// (d1 + d2) * exp(-(t^2/2) / (sigma2 + R t / 3)) for rectangular martingales.
BoundResult rectangular_freedman_bound(double t, double sigma2, double R, int d1, int d2);

/// Smallest t at which the Freedman bound equals delta (closed-form
/// positive root); returns 0 when delta >= d.
double invert_freedman_for_t(double delta, double sigma2, double R, int d);

/// One point of the comparison h(u) >= (u^2/2) / (1 + u/3).
struct HBoundCheck {
    double lhs;
    double rhs;
    bool ok;
};
HBoundCheck h_lower_bound_check(double u);

}  // namespace matmart
