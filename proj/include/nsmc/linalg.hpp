#pragma once

#include <optional>

#include "nsmc/errors.hpp"
#include "nsmc/matrix.hpp"
#include "nsmc/model.hpp"

namespace nsmc {

// LU factorization with partial pivoting (P A = L U, unit-diagonal L), kept
// around so one factorization can serve many right-hand sides.  A pivot below
// 1e-13 * ||A|| is treated as singular.
class LuFactors {
public:
    explicit LuFactors(const Matrix& a);

    int dim() const { return lu_.rows(); }

    // Solves A x = b.
    ColVec solve(const ColVec& b) const;
    // Solves y A = c for a row vector (measure-side solves), reusing the
    // same factorization via the transposed triangular sweeps.
    RowVec solve_row(const RowVec& c) const;
    // Solves A X = B column by column.
    Matrix solve_matrix(const Matrix& b) const;

private:
    Matrix lu_;
    std::vector<int> piv_;
};

// One-shot solve of A x = b by Gaussian elimination with partial pivoting.
ColVec solve(const Matrix& a, const ColVec& b);

// Dense inverse via column-wise solves against the identity.
Matrix inverse(const Matrix& a);

// Smallest l <= l_max with ||A^l|| < 1 (max-row-sum norm), or absent when no
// power in range contracts.
std::optional<int> contraction_power(const Matrix& a, int l_max);

// Residual of the factorial-weighted geometric series identity
//   sum_{n=0..K} (n+j)(n+j-1)...(n+1) A^n  =  j! (I - A)^{-(j+1)}
// truncated at K, in the max-row-sum norm.  Requires some power of A with
// norm < 1 within K steps (throws NotContracting otherwise).  Test harness
// helper: certifies the series identities the correction formulas rest on.
double neumann_identity_residual(const Matrix& a, int j, int K);

// Stationary row pi with pi P = pi, pi e = 1, found by replacing the last
// balance equation of the transposed system with the normalization row.
// Negative dust above -1e-12 is clamped and the row renormalized; a singular
// system, larger negative entries, or a residual above 1e-10 all signal a
// reducible (or otherwise degenerate) chain.
RowVec stationary_distribution(const StochasticMatrix& p);

// Z = (I - P + Pi)^{-1} with Pi = e pi: the fundamental matrix carrying all
// long-run correction terms.  Satisfies pi Z = pi and Z e = e.
Matrix fundamental_matrix(const StochasticMatrix& p, const RowVec& pi);

// Stationary row of an irreducible rate matrix: pi Q = 0, pi e = 1.
RowVec ctmc_stationary(const Matrix& q);

} // namespace nsmc
