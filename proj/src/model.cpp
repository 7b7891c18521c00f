#include "nsmc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

StochasticMatrix validate_stochastic(const Matrix& a, double tol) {
    if (a.rows() != a.cols())
        throw NotStochastic("transition matrix must be square", -1);
    Matrix m = a;
    for (int i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (!std::isfinite(v))
                throw NotStochastic("non-finite entry in row " + std::to_string(i), i);
            if (v < 0.0) {
                if (v < -tol)
                    throw NotStochastic("negative entry in row " + std::to_string(i), i);
                v = 0.0; // clamp rounding dust
                m(i, j) = 0.0;
            }
            sum += v;
        }
        if (std::fabs(sum - 1.0) > tol)
            throw NotStochastic("row " + std::to_string(i) + " sums to " +
                                    std::to_string(sum) + ", expected 1",
                                i);
    }
    return StochasticMatrix(std::move(m));
}

StochasticMatrix TransitionSequence::at(long k) const {
    if (k < 1)
        throw std::out_of_range("transition sequence index must be >= 1, got " +
                                std::to_string(k));
    if (horizon && k > *horizon)
        throw std::out_of_range("transition sequence index " + std::to_string(k) +
                                " exceeds horizon " + std::to_string(*horizon));
    return provider(k);
}

namespace {

void require_vanishing_row_sums(const Matrix& d, int dim, const char* name) {
    if (d.rows() != dim || d.cols() != dim)
        throw std::invalid_argument(std::string(name) +
                                    " dimension does not match base matrix");
    for (int i = 0; i < d.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < d.cols(); ++j) sum += d(i, j);
        if (std::fabs(sum) > 1e-9)
            throw std::invalid_argument(
                std::string(name) + " row " + std::to_string(i) +
                " sums to " + std::to_string(sum) +
                "; drift rows must sum to 0 (differences of stochastic rows)");
    }
}

} // namespace

DriftModel::DriftModel(StochasticMatrix base, Matrix e1, std::optional<Matrix> e2)
    : base_(std::move(base)), e1_(std::move(e1)), e2_(std::move(e2)) {
    require_vanishing_row_sums(e1_, base_.dim(), "drift matrix e1");
    if (e2_) require_vanishing_row_sums(*e2_, base_.dim(), "curvature matrix e2");
}

Matrix DriftModel::e2_or_zero() const {
    if (e2_) return *e2_;
    return Matrix(dim(), dim());
}

RewardSpec::RewardSpec(ColVec r_in, RowVec mu_in)
    : r(std::move(r_in)), mu(std::move(mu_in)) {
    if (r.empty() || r.size() != mu.size())
        throw std::invalid_argument("reward and initial distribution must share a dimension");
    double sum = 0.0;
    for (double v : mu) {
        if (v < -1e-12)
            throw std::invalid_argument("initial distribution has a negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("initial distribution sums to " +
                                    std::to_string(sum) + ", expected 1");
}

Matrix fd_first(const TransitionSequence& seq, int j) {
    if (j < 2)
        throw std::invalid_argument("first-difference index must be >= 2");
    Matrix d = seq.at(j).mat() - seq.at(1).mat();
    d *= 1.0 / (j - 1);
    return d;
}

Matrix fd_second(const TransitionSequence& seq, int j) {
    if (j < 2)
        throw std::invalid_argument("second-difference index must be >= 2");
    Matrix d = seq.at(2L * j - 1).mat() - 2.0 * seq.at(j).mat() + seq.at(1).mat();
    d *= 1.0 / (static_cast<double>(j - 1) * (j - 1));
    return d;
}

int default_fd_index(double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("discount rate must be positive");
    return static_cast<int>(std::ceil(1.0 / (1.0 - std::exp(-alpha))));
}

TransitionSequence drift_sequence(const DriftModel& dm, long k_max) {
    TransitionSequence seq;
    seq.dim = dm.dim();
    seq.horizon = k_max;
    // Capture by value so the sequence outlives the model.
    Matrix base = dm.base().mat();
    Matrix e1 = dm.e1();
    std::optional<Matrix> e2 = dm.e2();
    seq.provider = [base, e1, e2](long k) -> StochasticMatrix {
        Matrix p = base;
        const double t = static_cast<double>(k - 1);
        p += t * e1;
        if (e2) p += (t * t / 2.0) * (*e2);
        try {
            return validate_stochastic(p, 1e-9);
        } catch (const NotStochastic&) {
            throw NotStochastic("drifted matrix at step " + std::to_string(k) +
                                    " is no longer stochastic; shorten the horizon",
                                static_cast<int>(k));
        }
    };
    return seq;
}

} // namespace nsmc
