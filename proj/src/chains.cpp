#include "nsmc/chains.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

InventoryParams::InventoryParams(int s_in, int S_in, double m_in, double eps_in)
    : s(s_in), S(S_in), m(m_in), eps(eps_in) {
    if (s < 0 || s >= S)
        throw std::invalid_argument("reorder level must satisfy 0 <= s < S");
    if (!(m > 0.0)) throw std::invalid_argument("base demand mean must be positive");
    if (eps < 0.0) throw std::invalid_argument("drift rate must be nonnegative");
}

namespace {

// Poisson pmf values 0..dmax.  The multiplicative recurrence from e^{-lambda}
// is exact to rounding for moderate means; for large means e^{-lambda}
// underflows, so switch to log space (stable: d ln(lambda) - lambda - ln d!).
std::vector<double> poisson_pmf(double lambda, int dmax) {
    std::vector<double> p(static_cast<size_t>(dmax) + 1);
    if (lambda <= 700.0) {
        p[0] = std::exp(-lambda);
        for (int d = 0; d < dmax; ++d) p[d + 1] = p[d] * lambda / (d + 1);
    } else {
        const double ll = std::log(lambda);
        for (int d = 0; d <= dmax; ++d)
            p[d] = std::exp(d * ll - lambda - std::lgamma(d + 1.0));
    }
    return p;
}

double demand_mean(const InventoryParams& p, long k) {
    return p.m + p.eps * static_cast<double>(k - 1);
}

// First or second derivative of the Poisson pmf in its mean:
//   d/dl   pmf(d) = pmf(d-1) - pmf(d)
//   d2/dl2 pmf(d) = pmf(d-2) - 2 pmf(d-1) + pmf(d)
// with pmf of negative index zero.
double pmf_deriv(const std::vector<double>& pm, int d, int order) {
    auto at = [&](int i) { return i < 0 ? 0.0 : pm[i]; };
    if (order == 1) return at(d - 1) - at(d);
    return at(d - 2) - 2.0 * at(d - 1) + at(d);
}

} // namespace

StochasticMatrix inventory_matrix(const InventoryParams& p, long k, ReorderVariant v) {
    if (k < 1) throw std::invalid_argument("matrix index must be >= 1");
    const int threshold = v == ReorderVariant::below_s ? p.s : p.S;
    const int dim = p.S - p.s + 1;
    const std::vector<double> pm = poisson_pmf(demand_mean(p, k), p.S - threshold);
    Matrix out(dim, dim);
    for (int x = p.s; x <= p.S; ++x) {
        const int i = x - p.s;
        double kept = 0.0;
        for (int d = 0; x - d >= threshold; ++d) {
            out(i, x - d - p.s) += pm[d];
            kept += pm[d];
        }
        out(i, p.S - p.s) += 1.0 - kept; // reorder cases and Poisson tail
    }
    return validate_stochastic(out, 1e-12);
}

Matrix inventory_matrix_deriv(const InventoryParams& p, long k, ReorderVariant v,
                              int order) {
    if (k < 1) throw std::invalid_argument("matrix index must be >= 1");
    if (order != 1 && order != 2)
        throw std::invalid_argument("derivative order must be 1 or 2");
    const int threshold = v == ReorderVariant::below_s ? p.s : p.S;
    const int dim = p.S - p.s + 1;
    const std::vector<double> pm = poisson_pmf(demand_mean(p, k), p.S - threshold);
    const double scale = std::pow(p.eps, order);
    Matrix out(dim, dim);
    for (int x = p.s; x <= p.S; ++x) {
        const int i = x - p.s;
        double kept = 0.0;
        for (int d = 0; x - d >= threshold; ++d) {
            const double g = pmf_deriv(pm, d, order);
            out(i, x - d - p.s) += scale * g;
            kept += g;
        }
        out(i, p.S - p.s) += -scale * kept; // keeps the row sum at zero
    }
    return out;
}

TransitionSequence inventory_sequence(const InventoryParams& p, ReorderVariant v) {
    TransitionSequence seq;
    seq.dim = p.S - p.s + 1;
    seq.provider = [p, v](long k) { return inventory_matrix(p, k, v); };
    return seq;
}

StochasticMatrix review_chain_matrix(const InventoryParams& p, long k) {
    if (k < 1) throw std::invalid_argument("matrix index must be >= 1");
    const int dim = p.S + 1;
    const std::vector<double> pm = poisson_pmf(demand_mean(p, k), p.S - 1);
    Matrix out(dim, dim);
    for (int x = 0; x <= p.S; ++x) {
        const int top = x < p.s ? p.S : x; // position after the review step
        double above = 0.0;
        for (int j = top; j >= 1; --j) {
            out(x, j) = pm[top - j];
            above += pm[top - j];
        }
        out(x, 0) = 1.0 - above; // demand at or beyond the position: sold out
    }
    return validate_stochastic(out, 1e-12);
}

Matrix review_chain_deriv(const InventoryParams& p, long k, int order) {
    if (k < 1) throw std::invalid_argument("matrix index must be >= 1");
    if (order != 1 && order != 2)
        throw std::invalid_argument("derivative order must be 1 or 2");
    const int dim = p.S + 1;
    const std::vector<double> pm = poisson_pmf(demand_mean(p, k), p.S - 1);
    const double scale = std::pow(p.eps, order);
    Matrix out(dim, dim);
    for (int x = 0; x <= p.S; ++x) {
        const int top = x < p.s ? p.S : x;
        double above = 0.0;
        for (int j = top; j >= 1; --j) {
            const double g = pmf_deriv(pm, top - j, order);
            out(x, j) = scale * g;
            above += g;
        }
        out(x, 0) = -scale * above;
    }
    return out;
}

TransitionSequence review_chain_sequence(const InventoryParams& p) {
    TransitionSequence seq;
    seq.dim = p.S + 1;
    seq.provider = [p](long k) { return review_chain_matrix(p, k); };
    return seq;
}

ColVec identity_reward(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("empty reward range");
    ColVec r(static_cast<size_t>(hi - lo) + 1);
    for (int x = lo; x <= hi; ++x) r[x - lo] = static_cast<double>(x);
    return r;
}

RowVec binomial_initial(int S, double mean) {
    if (S < 1 || !(mean > 0.0) || mean > S)
        throw std::invalid_argument("binomial initial distribution needs 0 < mean <= S");
    const double q = mean / S;
    RowVec out(static_cast<size_t>(S) + 1, 0.0);
    if (q == 1.0) { // degenerate: all mass at S
        out[S] = 1.0;
        return out;
    }
    out[0] = std::pow(1.0 - q, S);
    for (int x = 0; x < S; ++x)
        out[x + 1] = out[x] * (static_cast<double>(S - x) / (x + 1)) * (q / (1.0 - q));
    return out;
}

StochasticMatrix birth_death(const std::vector<double>& p_up,
                             const std::vector<double>& p_down) {
    const int n = static_cast<int>(p_up.size());
    if (n == 0 || p_down.size() != p_up.size())
        throw std::invalid_argument("up/down mass vectors must be nonempty and conformable");
    if (p_down[0] != 0.0 || p_up[n - 1] != 0.0)
        throw std::invalid_argument("boundary masses leading off the state space must be 0");
    Matrix out(n, n);
    for (int i = 0; i < n; ++i) {
        if (p_up[i] < 0.0 || p_down[i] < 0.0 || p_up[i] + p_down[i] > 1.0)
            throw std::invalid_argument("row " + std::to_string(i) +
                                        " masses must be nonnegative with sum <= 1");
        if (i + 1 < n) out(i, i + 1) = p_up[i];
        if (i - 1 >= 0) out(i, i - 1) = p_down[i];
        out(i, i) = 1.0 - p_up[i] - p_down[i];
    }
    return validate_stochastic(out, 1e-12);
}

namespace {

// splitmix64: tiny, well-mixed, and identical on every platform.
struct SplitMix {
    unsigned long long state;
    double next_unit() { // uniform in [0, 1)
        state += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

} // namespace

StochasticMatrix random_chain(int dim, unsigned long long seed) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    SplitMix rng{seed};
    Matrix out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int j = 0; j < dim; ++j) {
            out(i, j) = 0.1 + 0.9 * rng.next_unit();
            sum += out(i, j);
        }
        for (int j = 0; j < dim; ++j) out(i, j) /= sum;
    }
    return validate_stochastic(out, 1e-12);
}

Matrix random_drift(int dim, unsigned long long seed) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    SplitMix rng{seed};
    Matrix out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        double mean = 0.0;
        for (int j = 0; j < dim; ++j) {
            out(i, j) = 2.0 * rng.next_unit() - 1.0;
            mean += out(i, j);
        }
        mean /= dim;
        for (int j = 0; j < dim; ++j) out(i, j) -= mean;
    }
    return out;
}

Matrix random_rate(int dim, unsigned long long seed) {
    if (dim < 2) throw std::invalid_argument("rate fixtures need dimension >= 2");
    SplitMix rng{seed};
    Matrix out(dim, dim);
    for (int i = 0; i < dim; ++i) {
        double sum = 0.0;
        for (int j = 0; j < dim; ++j) {
            if (j == i) continue;
            out(i, j) = 0.2 + 0.8 * rng.next_unit();
            sum += out(i, j);
        }
        out(i, i) = -sum;
    }
    return out;
}

RowVec random_distribution(int dim, unsigned long long seed) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    SplitMix rng{seed};
    RowVec out(dim);
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
        out[i] = 0.5 + rng.next_unit();
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

} // namespace nsmc
