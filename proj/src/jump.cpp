#include "nsmc/jump.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

double RateMatrix::max_exit_rate() const {
    double rate = 0.0;
    for (int i = 0; i < q_.rows(); ++i) rate = std::max(rate, std::fabs(q_(i, i)));
    return rate;
}

RateMatrix validate_rate(const Matrix& q, double tol) {
    if (q.rows() != q.cols())
        throw NotStochastic("rate matrix must be square", -1);
    Matrix m = q;
    for (int i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            if (!std::isfinite(v))
                throw NotStochastic("non-finite rate in row " + std::to_string(i), i);
            if (i != j && v < 0.0) {
                if (v < -tol)
                    throw NotStochastic("negative off-diagonal rate in row " +
                                            std::to_string(i), i);
                m(i, j) = 0.0; // clamp rounding dust
                v = 0.0;
            }
            sum += v;
        }
        if (std::fabs(sum) > tol)
            throw NotStochastic("rate row " + std::to_string(i) + " sums to " +
                                    std::to_string(sum) + ", expected 0",
                                i);
    }
    return RateMatrix(std::move(m));
}

namespace {

void require_vanishing_row_sums(const Matrix& d, int dim, const char* name) {
    if (d.rows() != dim || d.cols() != dim)
        throw std::invalid_argument(std::string(name) +
                                    " dimension does not match base rate matrix");
    for (int i = 0; i < d.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < d.cols(); ++j) sum += d(i, j);
        if (std::fabs(sum) > 1e-9)
            throw std::invalid_argument(std::string(name) + " row " + std::to_string(i) +
                                        " sums to " + std::to_string(sum) +
                                        "; rate-drift rows must sum to 0");
    }
}

} // namespace

RateDriftModel::RateDriftModel(RateMatrix base, Matrix f1, std::optional<Matrix> f2)
    : base_(std::move(base)), f1_(std::move(f1)), f2_(std::move(f2)) {
    require_vanishing_row_sums(f1_, base_.dim(), "rate drift f1");
    if (f2_) require_vanishing_row_sums(*f2_, base_.dim(), "rate curvature f2");
}

RateMatrix RatePath::at(double s) const {
    if (s < 0.0 || s > T)
        throw std::out_of_range("rate path queried at s=" + std::to_string(s) +
                                " outside [0, " + std::to_string(T) + "]");
    return provider(s);
}

StochasticMatrix uniformize(const RateMatrix& q, double lam) {
    if (!(lam > 0.0))
        throw std::invalid_argument("uniformization rate must be positive");
    Matrix r = Matrix::identity(q.dim());
    r += (1.0 / lam) * q.mat();
    return validate_stochastic(r, 1e-9);
}

double default_uniformization_rate(const RateMatrix& q) {
    return 0.5 * norm_rowsum(q.mat()) + 1.0;
}

double jump_first(const RateDriftModel& rm, const RewardSpec& reward) {
    const RowVec pi = ctmc_stationary(rm.base().mat());
    LuFactors lu(Matrix::rows_equal(pi) - rm.base().mat());
    const ColVec m2r = lu.solve(lu.solve(reward.r));
    return dot(pi, reward.r) - dot(pi * rm.f1(), m2r);
}

double jump_second(const RateDriftModel& rm, const RewardSpec& reward) {
    if (!rm.f2())
        throw std::invalid_argument("second-order value requires the curvature matrix f2");
    const RowVec pi = ctmc_stationary(rm.base().mat());
    LuFactors lu(Matrix::rows_equal(pi) - rm.base().mat());
    const Matrix& f1 = rm.f1();
    const RowVec pif1 = pi * f1;

    const ColVec m1r = lu.solve(reward.r);
    const ColVec m2r = lu.solve(m1r);
    const ColVec m3r = lu.solve(m2r);
    const ColVec cross1 = lu.solve(lu.solve(f1 * m2r)); // M^{-2} F1 M^{-2} r
    const ColVec cross2 = lu.solve(f1 * m3r);           // M^{-1} F1 M^{-3} r

    return dot(pi, reward.r) - dot(pif1, m2r)
         + dot(pi * *rm.f2(), m3r)
         + dot(pif1, cross1) + 2.0 * dot(pif1, cross2);
}

double exact_jump(const RatePath& path, const RewardSpec& reward, double t, double h) {
    if (!(t >= 0.0) || t > path.T)
        throw std::invalid_argument("evaluation time must lie in [0, T]");
    if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
    const int n = path.dim;
    if (static_cast<int>(reward.mu.size()) != n)
        throw std::invalid_argument("initial distribution dimension mismatch");

    RowVec mu = reward.mu;
    auto deriv = [&](const RowVec& state, double s, double step) {
        RateMatrix q = path.at(s);
        if (step > 0.1 / std::max(q.max_exit_rate(), 1e-300))
            throw std::invalid_argument(
                "step size exceeds 0.1 / (largest exit rate) at s=" + std::to_string(s));
        return state * q.mat();
    };
    double s = 0.0;
    while (s < t) {
        const double step = std::min(h, t - s);
        if (!(step > 1e-15 * std::max(1.0, t))) break; // remaining time below resolution
        const RowVec k1 = deriv(mu, s, step);
        RowVec y(n);
        for (int i = 0; i < n; ++i) y[i] = mu[i] + 0.5 * step * k1[i];
        const RowVec k2 = deriv(y, s + 0.5 * step, step);
        for (int i = 0; i < n; ++i) y[i] = mu[i] + 0.5 * step * k2[i];
        const RowVec k3 = deriv(y, s + 0.5 * step, step);
        for (int i = 0; i < n; ++i) y[i] = mu[i] + step * k3[i];
        const RowVec k4 = deriv(y, s + step, step);
        double mass = 0.0;
        for (int i = 0; i < n; ++i) {
            mu[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (mu[i] < -1e-9)
                throw std::runtime_error("negative mass " + std::to_string(mu[i]) +
                                         " during integration at s=" + std::to_string(s));
            mass += mu[i];
        }
        if (std::fabs(mass - 1.0) > 1e-12)
            throw std::runtime_error("mass drifted by " + std::to_string(mass - 1.0) +
                                     " in one step at s=" + std::to_string(s));
        for (int i = 0; i < n; ++i) mu[i] /= mass;
        s += step;
    }
    return dot(mu, reward.r);
}

} // namespace nsmc
