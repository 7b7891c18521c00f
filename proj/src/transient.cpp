#include "nsmc/transient.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

double exact_transient(const TransitionSequence& seq, const RewardSpec& reward, long n) {
    if (n < 0) throw std::invalid_argument("horizon must be >= 0");
    RowVec mu = reward.mu;
    for (long k = 1; k <= n; ++k) mu = mu * seq.at(k).mat();
    return dot(mu, reward.r);
}

TransientResult forward_first(const DriftModel& dm, const RewardSpec& reward, long n) {
    const RowVec pi = stationary_distribution(dm.base());
    const Matrix z = fundamental_matrix(dm.base(), pi);
    const RowVec pie1 = pi * dm.e1();
    const ColVec zr = z * reward.r;
    TransientResult out;
    out.order0 = dot(pi, reward.r);
    out.order1_n_coeff = static_cast<double>(n) * dot(pie1, zr);
    out.order1_const = -dot(pie1, z * zr);
    out.order2 = 0.0;
    out.value = out.order0 + out.order1_n_coeff + out.order1_const;
    return out;
}

TransientResult backward_first(const DriftModel& dm_at_n, const RewardSpec& reward) {
    const RowVec pi = stationary_distribution(dm_at_n.base());
    const Matrix z = fundamental_matrix(dm_at_n.base(), pi);
    const ColVec pr = dm_at_n.base().mat() * reward.r;
    TransientResult out;
    out.order0 = dot(pi, reward.r);
    out.order1_n_coeff = 0.0;
    out.order1_const = -dot(pi * dm_at_n.e1(), z * (z * pr));
    out.order2 = 0.0;
    out.value = out.order0 + out.order1_const;
    return out;
}

double poisson_correction(const StochasticMatrix& p_n, const Matrix& e1,
                          const RewardSpec& reward) {
    const RowVec pi = stationary_distribution(p_n);
    const int n = p_n.dim();
    LuFactors lu(Matrix::identity(n) - p_n.mat() + Matrix::rows_equal(pi));
    const ColVec pr = p_n.mat() * reward.r;
    const ColVec h1 = lu.solve(pr);
    const ColVec h2 = lu.solve(h1);

    // Self-check of the centered form (I - P) h1 = P r - (pi r) e up to an
    // additive multiple of e: project the residual off the constants and
    // require what is left to vanish.
    const double pir = dot(pi, reward.r);
    ColVec res = pr;
    const ColVec ph1 = p_n.mat() * h1;
    for (int i = 0; i < n; ++i) res[i] = (h1[i] - ph1[i]) - (pr[i] - pir);
    const double shift = dot(pi, res);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::fabs(res[i] - shift));
    if (worst > 1e-10 * std::max(1.0, norm_max(reward.r)))
        throw std::runtime_error("centered-equation self-check failed: residual " +
                                 std::to_string(worst));

    return -dot(pi * e1, h2);
}

TransientResult backward_second(const DriftModel& dm_at_n, const RewardSpec& reward,
                                SecondOrderMode mode) {
    if (!dm_at_n.e2())
        throw std::invalid_argument("second-order value requires the curvature matrix e2");
    const RowVec pi = stationary_distribution(dm_at_n.base());
    const Matrix z = fundamental_matrix(dm_at_n.base(), pi);
    const Matrix& e1 = dm_at_n.e1();
    const Matrix& e2 = *dm_at_n.e2();
    const RowVec pie1 = pi * e1;

    const ColVec pr = dm_at_n.base().mat() * reward.r;
    const ColVec zpr = z * pr;
    const ColVec z2pr = z * zpr;
    const ColVec z3pr = z * z2pr;
    ColVec bracket(z3pr.size());
    for (size_t i = 0; i < bracket.size(); ++i) bracket[i] = 2.0 * z3pr[i] - z2pr[i];

    TransientResult out;
    out.order0 = dot(pi, reward.r);
    out.order1_n_coeff = 0.0;
    out.order1_const =
        -dot(pie1, mode == SecondOrderMode::corrected ? z2pr : zpr);
    out.order2 = dot(pie1, z * (z * (e1 * z2pr)))
               + 0.5 * dot(pi * e2, bracket)
               + dot(pie1, z * (e1 * bracket));
    out.value = out.order0 + out.order1_const + out.order2;
    return out;
}

} // namespace nsmc
