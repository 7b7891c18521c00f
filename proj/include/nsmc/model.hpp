#pragma once

#include <functional>
#include <optional>

#include "nsmc/errors.hpp"
#include "nsmc/matrix.hpp"

namespace nsmc {

// A square matrix certified row-stochastic: entries nonnegative (negative
// dust above -tol is clamped to zero) and each row summing to 1 within tol.
// Construction only through validate_stochastic so the certificate is real.
class StochasticMatrix {
public:
    const Matrix& mat() const { return m_; }
    int dim() const { return m_.rows(); }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    explicit StochasticMatrix(Matrix m) : m_(std::move(m)) {}
    friend StochasticMatrix validate_stochastic(const Matrix& a, double tol);
    Matrix m_;
};

// Validates and wraps `a`; throws NotStochastic with the offending row index
// when an entry is below -tol or a row sum strays from 1 by more than tol.
StochasticMatrix validate_stochastic(const Matrix& a, double tol = 1e-9);

// A one-parameter family of transition matrices (P_k : k >= 1).  `provider`
// must be a pure function of k; `horizon`, when set, is the largest index the
// family is defined for.
struct TransitionSequence {
    std::function<StochasticMatrix(long)> provider;
    std::optional<long> horizon;
    int dim = 0;

    // Bounds-checked access: k must be >= 1 and <= horizon when one is set.
    StochasticMatrix at(long k) const;
};

// Local model of a slowly varying family: a base matrix plus a per-step
// drift matrix e1 and an optional per-step-squared curvature matrix e2.
// Step k of the induced family is base + (k-1) e1 + (k-1)^2/2 e2.
class DriftModel {
public:
    DriftModel(StochasticMatrix base, Matrix e1,
               std::optional<Matrix> e2 = std::nullopt);

    const StochasticMatrix& base() const { return base_; }
    const Matrix& e1() const { return e1_; }
    const std::optional<Matrix>& e2() const { return e2_; }
    // Curvature term, or the zero matrix when none was supplied.
    Matrix e2_or_zero() const;
    int dim() const { return base_.dim(); }

private:
    StochasticMatrix base_;
    Matrix e1_;
    std::optional<Matrix> e2_;
};

// Per-period reward column r plus the initial distribution row mu.
struct RewardSpec {
    ColVec r;
    RowVec mu;

    RewardSpec(ColVec r, RowVec mu);
};

// First- and second-difference estimates of the drift matrices from sampled
// members of the family:
//   e1 ~= (P_j - P_1) / (j - 1)
//   e2 ~= (P_{2j-1} - 2 P_j + P_1) / (j - 1)^2
// Exact when the family is linear (resp. quadratic) in k, for every j >= 2.
Matrix fd_first(const TransitionSequence& seq, int j);
Matrix fd_second(const TransitionSequence& seq, int j);

// Difference spacing used for discounted measures: ceil(1 / (1 - e^-alpha)),
// roughly one discounting time constant.
int default_fd_index(double alpha);

// Materializes the quadratic family induced by a drift model, validating
// stochasticity lazily at each access; throws NotStochastic carrying the
// step index k when the drift has pushed an entry negative (the horizon is
// too long for this drift).
TransitionSequence drift_sequence(const DriftModel& dm, long k_max);

} // namespace nsmc
