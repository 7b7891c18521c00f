#pragma once

#include <functional>
#include <optional>

#include "nsmc/linalg.hpp"
#include "nsmc/model.hpp"

namespace nsmc {

// Infinite-horizon discounted reward: value = sum_{j>=0} e^{-alpha j} E r(X_j).
struct DiscountSpec {
    double alpha;     // per-period discount rate, > 0
    RewardSpec reward;

    DiscountSpec(double alpha, RewardSpec reward);
};

// Growth coefficients of a drifting family P_k = P-tilde + a_{k1} D1 + a_{k2} D2 / 2
// (general shape; the polynomial case a1(k) = k-1, a2(k) = (k-1)^2 is the one
// with dedicated fast paths below).  `p` is the declared polynomial growth
// exponent: |a1(k)|, |a2(k)| = O(k^p), spot-checked before use.
struct CoeffSeq {
    std::function<double(long)> a1;
    std::optional<std::function<double(long)>> a2;
    double p = 0.0;
};

// a1(k) = k-1, a2(k) = (k-1)^2, growth exponent 2.
CoeffSeq linear_growth_coeffs();

// Stationary (no-drift) value: nu solves (I - e^{-alpha} P) nu = r; kappa0 = mu nu.
struct StationaryValue {
    ColVec nu;
    double kappa0;
};
StationaryValue stationary_value(const StochasticMatrix& p, const DiscountSpec& spec);

// Brute-force reference: kappa = sum_{j=0}^{n-1} e^{-alpha j} mu P_1...P_j r with
// the truncation depth n chosen so the geometric tail is below
// eps_report^6 (1 - e^{-alpha}) / ||r||; propagates a row vector (O(n dim^2)).
struct TruncatedValue {
    double kappa;
    long n_trunc;
};
TruncatedValue exact_truncated(const TransitionSequence& seq, const DiscountSpec& spec,
                               double eps_report);

// First-order correction for general growth coefficients:
//   kappa0 + e^{-alpha} mu sum_{k=0..K} a1(k+1) e^{-alpha k} P^k D nu
// where D is the (drift-scaled) derivative direction with zero row sums and
// nu = (I - e^{-alpha} P)^{-1} r.  K < 0 selects the default truncation depth
// (geometric tail below 1e-12 relative).
double first_order_general(const StochasticMatrix& base, const Matrix& direction,
                           const CoeffSeq& coeffs, const DiscountSpec& spec, long K = -1);

// First-order value for the linear-drift family, via three solves against the
// single coefficient matrix (I - e^{-alpha} P):
//   (I - e^{-alpha}P) nu  = r
//   (I - e^{-alpha}P) nu1 = E1 nu
//   (I - e^{-alpha}P) nu2 = nu1
//   kappa1 = mu nu + e^{-2 alpha} mu P nu2
struct FirstOrderValue {
    double kappa1;
    ColVec nu, nu1, nu2;
};
FirstOrderValue first_order_linear(const DriftModel& dm, const DiscountSpec& spec);

// Second-order correction for general growth coefficients (requires coeffs.a2):
// the four-term expansion with both infinite sums truncated at K (default as in
// first_order_general, with the tail exponent raised by one power).
double second_order_general(const StochasticMatrix& base, const Matrix& d1,
                            const Matrix& d2, const CoeffSeq& coeffs,
                            const DiscountSpec& spec, long K = -1);

// Second-order value for the quadratic-drift family (requires dm.e2), evaluated
// from one LU factorization of (I - e^{-alpha} P):
//   kappa2 = mu nu
//          + b^2  mu P D^2 E1 D r
//          + b^2/2 mu P (2 b P D^3 + D^2) E2 D r
//          + 2 b^3 mu P D^3 E1 D E1 D r
//          + b^4  mu P D^2 E1 P D^2 E1 D r
// with b = e^{-alpha} and D = (I - b P)^{-1} applied via solves.
double second_order_linear(const DriftModel& dm, const DiscountSpec& spec);

} // namespace nsmc
