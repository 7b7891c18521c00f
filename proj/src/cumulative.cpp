#include "nsmc/cumulative.hpp"

#include <stdexcept>

namespace nsmc {

double exact_cumulative(const TransitionSequence& seq, const RewardSpec& reward, long n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    RowVec mu = reward.mu;
    double total = dot(mu, reward.r);
    for (long k = 1; k < n; ++k) {
        mu = mu * seq.at(k).mat();
        total += dot(mu, reward.r);
    }
    return total;
}

CumulativeResult cumulative_first(const DriftModel& dm, const RewardSpec& reward, long n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    const RowVec pi = stationary_distribution(dm.base());
    const Matrix z = fundamental_matrix(dm.base(), pi);
    const Matrix& p = dm.base().mat();
    const RowVec pie1 = pi * dm.e1();

    const ColVec zr = z * reward.r;
    const ColVec zpr = z * (p * reward.r);
    const ColVec z2pr = z * zpr;
    const ColVec z3pr = z * z2pr;
    const ColVec z2e1zr = z * (z * (dm.e1() * zr));

    const double nn = static_cast<double>(n);
    CumulativeResult out;
    out.order_n2 = (nn - 1.0) * (nn - 2.0) / 2.0 * dot(pie1, zr);
    out.order_n = (nn - 1.0) * dot(pi, reward.r) - (nn - 1.0) * dot(pie1, z2pr);
    out.order_1 = dot(reward.mu, zr) + dot(pie1, z3pr) +
                  dot(reward.mu * p, z2e1zr) - dot(pie1, zr);
    out.value = out.order_n2 + out.order_n + out.order_1;
    return out;
}

} // namespace nsmc
