#pragma once

#include "nsmc/linalg.hpp"
#include "nsmc/model.hpp"

namespace nsmc {

// Value of E sum_{j=0}^{n-1} r(X_j) with the breakdown grouped by power of
// the horizon n as displayed (the n^2 group carries its full
// (n-1)(n-2)/2 coefficient).  value = order_n2 + order_n + order_1 exactly
// as summed.
struct CumulativeResult {
    double value;
    double order_n2;
    double order_n;
    double order_1;
};

// Brute force in a single pass: running sum of mu P_1...P_j r for j < n.
double exact_cumulative(const TransitionSequence& seq, const RewardSpec& reward, long n);

// First-order drift expansion:
//   (n-1) pi r + mu Z r
//   + (n-1)(n-2)/2 pi E1 Z r - (n-1) pi E1 Z^2 P r
//   + pi E1 Z^3 P r + mu P Z^2 E1 Z r - pi E1 Z r
CumulativeResult cumulative_first(const DriftModel& dm, const RewardSpec& reward, long n);

} // namespace nsmc
