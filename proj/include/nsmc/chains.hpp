#pragma once

#include "nsmc/model.hpp"

namespace nsmc {

// Periodic-review inventory control with order-up-to level S and reorder
// level s; demand in period k is Poisson with mean m + eps (k-1).
struct InventoryParams {
    int s;
    int S;
    double m;
    double eps;

    InventoryParams(int s, int S, double m, double eps);
};

// Which side of the reorder comparison the no-order branch keeps: stay at
// x - d when x - d >= s (below_s) or when x - d >= S (below_S; degenerate
// in practice — every step reorders — but kept selectable so calibration
// can compare conventions).
enum class ReorderVariant { below_s, below_S };

// Post-decision chain on {s, ..., S}: from x, demand d leads to x - d when
// that stays at or above the variant threshold; all remaining demand mass
// (reorder cases and the Poisson tail alike) is lumped onto S.
StochasticMatrix inventory_matrix(const InventoryParams& p, long k, ReorderVariant v);

// Derivative of the k-th matrix in the demand mean, scaled by eps^order
// (order 1 or 2), so it plugs directly into DriftModel slots.  Rows sum to 0;
// the lump column at S absorbs the complement.
Matrix inventory_matrix_deriv(const InventoryParams& p, long k, ReorderVariant v, int order);

TransitionSequence inventory_sequence(const InventoryParams& p, ReorderVariant v);

// Review-first chain on {0, ..., S}: at the start of a period the position is
// raised to S whenever x < s (the order arrives before demand); demand then
// draws the position down with unfilled demand lost (floor at 0).  This is
// the variant the bundled reference tables are built on (see tables.hpp).
StochasticMatrix review_chain_matrix(const InventoryParams& p, long k);
Matrix review_chain_deriv(const InventoryParams& p, long k, int order);
TransitionSequence review_chain_sequence(const InventoryParams& p);

// Reward r(x) = x on {0..S} (review chain) or {s..S} (inventory_matrix).
ColVec identity_reward(int lo, int hi);

// Binomial(S, mean/S) distribution on {0..S} as a row vector.
RowVec binomial_initial(int S, double mean);

// Tri-diagonal chain: up/down masses per state, remainder stays put.  The
// boundary masses leading off the state space must be zero.
StochasticMatrix birth_death(const std::vector<double>& p_up,
                             const std::vector<double>& p_down);

// Deterministic seeded fixtures (identical across platforms):
// strictly positive rows, normalized — irreducible and aperiodic.
StochasticMatrix random_chain(int dim, unsigned long long seed);
// Row-centered direction matrix with entries in [-1, 1); rows sum to ~0.
Matrix random_drift(int dim, unsigned long long seed);
// Rate matrix with off-diagonal entries in [0.2, 1) and diagonal set to the
// negated row sum — irreducible.
Matrix random_rate(int dim, unsigned long long seed);
// Row vector with entries in [0.5, 1.5), normalized to mass 1.
RowVec random_distribution(int dim, unsigned long long seed);

} // namespace nsmc
