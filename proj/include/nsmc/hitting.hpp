#pragma once

#include <vector>

#include "nsmc/linalg.hpp"
#include "nsmc/model.hpp"

namespace nsmc {

// Reward accumulated until the chain first leaves the transient set C.
// `r` lives on the full state space (rewards collected both inside C and on
// the exit state); `mu` is a full-space initial distribution carried by C.
struct AbsorbingSpec {
    std::vector<int> C; // strictly increasing state indices, nonempty, proper
    ColVec r;
    RowVec mu;

    AbsorbingSpec(std::vector<int> C, ColVec r, RowVec mu);
};

// Principal C x C block plus the effective one-step reward
// r_eff(x) = r(x) + sum_{y not in C} P(x, y) r(y).
struct BlockData {
    Matrix B;
    ColVec r_eff;
};

BlockData build_block(const StochasticMatrix& p, const AbsorbingSpec& spec);

// C x C principal block of any same-dimension matrix (drift directions use
// the same extraction as transition matrices).
Matrix principal_block(const Matrix& m, const std::vector<int>& C);
// Exit-weighted reward of a (derivative) matrix: x -> sum_{y not in C} m(x,y) r(y).
ColVec exit_reward(const Matrix& m, const std::vector<int>& C, const ColVec& r);
// Restriction of a full-space row to the C coordinates.
RowVec restrict_row(const RowVec& mu, const std::vector<int>& C);

// Constant-chain value: w = (I - B)^{-1} r_eff, delta0 = mu_c w.  Requires a
// contracting power of B within 4 |C| steps (otherwise some state may never
// reach the exit set and the system can be singular).
struct HittingValue {
    ColVec w;
    double delta0;
};
HittingValue stationary_hitting(const BlockData& block, const RowVec& mu_c);

// Brute-force reference for a drifting family: sum_j mu B_1...B_j r_eff^{(j+1)},
// truncated once the geometric tail envelope drops below tol.  The envelope's
// (l, beta) pair is taken from the first block and re-verified on disjoint
// windows of the actual drifting products as they are consumed.
double exact_hitting(const TransitionSequence& seq, const AbsorbingSpec& spec, double tol);

// First-order drift correction:
//   delta ~= mu (I-B)^{-1} rt + mu B (I-B)^{-2} B1 (I-B)^{-1} rt + mu B (I-B)^{-2} rt1
// with B1 the C x C block of e1, rt the effective reward of the base matrix,
// and rt1 the exit-weighted reward of e1.
double first_order_hitting(const DriftModel& dm, const AbsorbingSpec& spec);

} // namespace nsmc
