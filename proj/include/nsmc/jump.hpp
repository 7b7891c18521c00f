#pragma once

#include <functional>
#include <optional>

#include "nsmc/linalg.hpp"
#include "nsmc/model.hpp"

namespace nsmc {

// A certified rate matrix: off-diagonal entries nonnegative (negative dust
// above -tol clamped to zero), each row summing to 0 within tol.
class RateMatrix {
public:
    const Matrix& mat() const { return q_; }
    int dim() const { return q_.rows(); }
    double operator()(int i, int j) const { return q_(i, j); }
    // Largest exit rate max_x |Q(x, x)|.
    double max_exit_rate() const;

private:
    explicit RateMatrix(Matrix q) : q_(std::move(q)) {}
    friend RateMatrix validate_rate(const Matrix& q, double tol);
    Matrix q_;
};

// Validates and wraps `q`; throws NotStochastic with the offending row index
// when an off-diagonal entry is below -tol or a row sum strays from 0.
RateMatrix validate_rate(const Matrix& q, double tol = 1e-9);

// Local model of a slowly varying rate family around a reference time:
// Q(s) ~= base + (s - t) f1 + (s - t)^2 / 2 f2 near s = t.
class RateDriftModel {
public:
    RateDriftModel(RateMatrix base, Matrix f1, std::optional<Matrix> f2 = std::nullopt);

    const RateMatrix& base() const { return base_; }
    const Matrix& f1() const { return f1_; }
    const std::optional<Matrix>& f2() const { return f2_; }
    int dim() const { return base_.dim(); }

private:
    RateMatrix base_;
    Matrix f1_;
    std::optional<Matrix> f2_;
};

// A rate family on [0, T] for the integration oracle; provider must be pure.
struct RatePath {
    std::function<RateMatrix(double)> provider;
    double T = 0.0;
    int dim = 0;

    RateMatrix at(double s) const; // range-checked access
};

// Poisson-clock representation R = I + Q / lam; lam must dominate every exit
// rate or the diagonal goes negative (reported as NotStochastic).
StochasticMatrix uniformize(const RateMatrix& q, double lam);
// Default clock rate 0.5 ||Q|| + 1 (strictly dominating, so R has positive
// diagonal and inherits aperiodicity).
double default_uniformization_rate(const RateMatrix& q);

// First-order value of E r(X(t)) under slow rate drift:
//   pi r - pi F1 (Pi - Q)^{-2} r
// with pi the stationary row of the base rate matrix and Pi = e pi.
double jump_first(const RateDriftModel& rm, const RewardSpec& reward);

// Second-order value (requires f2):
//   pi r - pi F1 M^{-2} r + pi F2 M^{-3} r
//        + pi F1 [ M^{-2} F1 M^{-2} + 2 M^{-1} F1 M^{-3} ] r,   M = Pi - Q.
// The F2 term carries coefficient 1: the time-weighted deviation integral
// evaluates to 2 M^{-3} (I - Pi), which cancels the 1/2 from the Taylor
// remainder.  (A halving ladder distinguishes this from the 1/2 variant:
// only coefficient 1 leaves a third-order residual.)
double jump_second(const RateDriftModel& rm, const RewardSpec& reward);

// Integration oracle for E r(X(t)): classical RK4 on mu'(s) = mu(s) Q(s)
// from 0 to t with fixed step h (final partial step shortened).  h must be
// at most 0.1 / (largest exit rate seen); mass is renormalized each step and
// the drift per step must stay below 1e-12.
double exact_jump(const RatePath& path, const RewardSpec& reward, double t, double h);

} // namespace nsmc
