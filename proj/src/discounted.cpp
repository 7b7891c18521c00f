#include "nsmc/discounted.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

DiscountSpec::DiscountSpec(double alpha_in, RewardSpec reward_in)
    : alpha(alpha_in), reward(std::move(reward_in)) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("discount rate must be positive");
}

CoeffSeq linear_growth_coeffs() {
    CoeffSeq c;
    c.a1 = [](long k) { return static_cast<double>(k - 1); };
    c.a2 = [](long k) {
        const double t = static_cast<double>(k - 1);
        return t * t;
    };
    c.p = 2.0;
    return c;
}

namespace {

void require_zero_row_sums(const Matrix& d, const char* name) {
    for (int i = 0; i < d.rows(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < d.cols(); ++j) sum += d(i, j);
        if (std::fabs(sum) > 1e-9)
            throw std::invalid_argument(std::string(name) + " row " +
                                        std::to_string(i) + " sums to " +
                                        std::to_string(sum) + ", expected 0");
    }
}

// Spot-check that |a(k)| stays within the declared O(k^p) growth: estimate the
// constant on k <= 64, then verify it (with generous slack) further out.
void spot_check_growth(const std::function<double(long)>& a, double p, const char* name) {
    double c = 0.0;
    for (long k = 1; k <= 64; ++k)
        c = std::max(c, std::fabs(a(k)) / std::pow(static_cast<double>(k), p));
    for (long k : {256L, 1024L, 4096L, 16384L}) {
        const double bound = 1000.0 * (c + 1.0) * std::pow(static_cast<double>(k), p);
        if (std::fabs(a(k)) > bound)
            throw std::invalid_argument(std::string(name) +
                                        " grows faster than the declared k^" +
                                        std::to_string(p) + " at k=" + std::to_string(k));
    }
}

// Smallest K >= 0 with e^{-alpha K} (K+1)^q scale <= 1e-12 (1 - e^{-alpha}).
long default_truncation(double alpha, double q, double scale) {
    const double target = 1e-12 * (1.0 - std::exp(-alpha));
    for (long K = 0;; ++K) {
        const double tail = std::exp(-alpha * K) * std::pow(K + 1.0, q) * scale;
        if (tail <= target) return K;
        if (K > 50'000'000)
            throw std::runtime_error("series truncation depth exceeds 5e7; "
                                     "discount rate too small to sum directly");
    }
}

} // namespace

StationaryValue stationary_value(const StochasticMatrix& p, const DiscountSpec& spec) {
    const int n = p.dim();
    const double b = std::exp(-spec.alpha);
    Matrix a = Matrix::identity(n) - b * p.mat();
    ColVec nu = solve(a, spec.reward.r);
    return {nu, dot(spec.reward.mu, nu)};
}

TruncatedValue exact_truncated(const TransitionSequence& seq, const DiscountSpec& spec,
                               double eps_report) {
    if (!(eps_report > 0.0))
        throw std::invalid_argument("report precision must be positive");
    const double rnorm = norm_max(spec.reward.r);
    if (rnorm == 0.0) return {0.0, 0};
    const double alpha = spec.alpha;
    const double tail = std::pow(eps_report, 6) * (1.0 - std::exp(-alpha)) / rnorm;
    long n = static_cast<long>(std::ceil(-std::log(tail) / alpha));
    if (n < 1) n = 1;
    RowVec mu = spec.reward.mu;
    double kappa = dot(mu, spec.reward.r);
    for (long j = 1; j < n; ++j) {
        mu = mu * seq.at(j).mat();
        kappa += std::exp(-alpha * j) * dot(mu, spec.reward.r);
    }
    return {kappa, n};
}

double first_order_general(const StochasticMatrix& base, const Matrix& direction,
                           const CoeffSeq& coeffs, const DiscountSpec& spec, long K) {
    require_zero_row_sums(direction, "derivative direction");
    spot_check_growth(coeffs.a1, coeffs.p, "first-order coefficients");
    const int n = base.dim();
    const double b = std::exp(-spec.alpha);
    LuFactors lu(Matrix::identity(n) - b * base.mat());
    ColVec nu = lu.solve(spec.reward.r);
    if (K < 0)
        K = default_truncation(spec.alpha, coeffs.p + 1.0,
                               std::max(norm_rowsum(direction), 1.0));
    ColVec w = direction * nu;
    RowVec u = spec.reward.mu;
    double corr = 0.0;
    double disc = 1.0;
    for (long k = 0; k <= K; ++k) {
        if (k > 0) {
            u = u * base.mat();
            disc *= b;
        }
        corr += coeffs.a1(k + 1) * disc * dot(u, w);
    }
    return dot(spec.reward.mu, nu) + b * corr;
}

FirstOrderValue first_order_linear(const DriftModel& dm, const DiscountSpec& spec) {
    const int n = dm.dim();
    const double b = std::exp(-spec.alpha);
    const Matrix& p = dm.base().mat();
    LuFactors lu(Matrix::identity(n) - b * p);
    FirstOrderValue out;
    out.nu = lu.solve(spec.reward.r);
    out.nu1 = lu.solve(dm.e1() * out.nu);
    out.nu2 = lu.solve(out.nu1);
    out.kappa1 = dot(spec.reward.mu, out.nu) +
                 b * b * dot(spec.reward.mu * p, out.nu2);
    return out;
}

double second_order_general(const StochasticMatrix& base, const Matrix& d1,
                            const Matrix& d2, const CoeffSeq& coeffs,
                            const DiscountSpec& spec, long K) {
    require_zero_row_sums(d1, "first derivative direction");
    require_zero_row_sums(d2, "second derivative direction");
    if (!coeffs.a2)
        throw std::invalid_argument("second-order evaluation requires the a2 coefficients");
    spot_check_growth(coeffs.a1, coeffs.p, "first-order coefficients");
    spot_check_growth(*coeffs.a2, coeffs.p, "second-order coefficients");
    const int n = base.dim();
    const double alpha = spec.alpha;
    const double b = std::exp(-alpha);
    const Matrix& p = base.mat();
    LuFactors lu(Matrix::identity(n) - b * p);
    ColVec nu = lu.solve(spec.reward.r);
    if (K < 0)
        K = default_truncation(alpha, coeffs.p + 2.0,
                               std::max({norm_rowsum(d1), norm_rowsum(d2), 1.0}));

    const ColVec d1nu = d1 * nu;
    const ColVec d2nu = d2 * nu;

    // Single sweep for the two single-sum corrections.
    double corr1 = 0.0, corr2 = 0.0;
    {
        RowVec u = spec.reward.mu;
        double disc = 1.0;
        for (long k = 0; k <= K; ++k) {
            if (k > 0) {
                u = u * p;
                disc *= b;
            }
            corr1 += coeffs.a1(k + 1) * disc * dot(u, d1nu);
            corr2 += (*coeffs.a2)(k + 1) * disc * dot(u, d2nu);
        }
    }

    // Double sum: outer index k >= 1, inner index l >= k+1 reparametrized as
    // l = k + 1 + m.  The inner column vectors P^m (D1 nu) are shared across
    // outer indices, so build them once.
    std::vector<ColVec> v(static_cast<size_t>(K) + 1);
    v[0] = d1nu;
    for (long m = 1; m <= K; ++m) v[m] = p * v[m - 1];
    double corr11 = 0.0;
    {
        RowVec u = spec.reward.mu; // mu P^{k-1} at outer index k
        double disc = 1.0;         // e^{-alpha (k-1)}
        for (long k = 1; k <= K; ++k) {
            if (k > 1) {
                u = u * p;
                disc *= b;
            }
            const double ak = coeffs.a1(k);
            if (ak != 0.0) {
                ColVec inner(n, 0.0);
                double dm = 1.0; // e^{-alpha m}
                for (long m = 0; m <= K; ++m) {
                    if (m > 0) dm *= b;
                    const double c = coeffs.a1(k + 1 + m) * dm;
                    if (c != 0.0)
                        for (int i = 0; i < n; ++i) inner[i] += c * v[m][i];
                }
                corr11 += ak * disc * dot(u * d1, inner);
            }
        }
    }

    return dot(spec.reward.mu, nu) + b * corr1 + 0.5 * b * corr2 + b * b * corr11;
}

double second_order_linear(const DriftModel& dm, const DiscountSpec& spec) {
    if (!dm.e2())
        throw std::invalid_argument("second-order value requires the curvature matrix e2");
    const int n = dm.dim();
    const double b = std::exp(-spec.alpha);
    const Matrix& p = dm.base().mat();
    const Matrix& e1 = dm.e1();
    const Matrix& e2 = *dm.e2();
    LuFactors lu(Matrix::identity(n) - b * p);

    const ColVec nu = lu.solve(spec.reward.r); // D r
    // Drift correction chain: D^2 E1 D r.
    const ColVec nu1 = lu.solve(e1 * nu);
    const ColVec nu2 = lu.solve(nu1);
    // Curvature chain: D u, D^2 u, D^3 u with u = E2 D r.
    const ColVec du = lu.solve(e2 * nu);
    const ColVec d2u = lu.solve(du);
    const ColVec d3u = lu.solve(d2u);
    // Repeated-drift chain: D^3 E1 D E1 D r.
    const ColVec dw = lu.solve(e1 * nu1);
    const ColVec d2w = lu.solve(dw);
    const ColVec d3w = lu.solve(d2w);
    // Split-drift chain: D^2 E1 P D^2 E1 D r.
    const ColVec dx = lu.solve(e1 * (p * nu2));
    const ColVec d2x = lu.solve(dx);

    const RowVec mup = spec.reward.mu * p;
    const double b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
    return dot(spec.reward.mu, nu)
         + b2 * dot(mup, nu2)
         + b3 * dot(mup, p * d3u) + 0.5 * b2 * dot(mup, d2u)
         + 2.0 * b3 * dot(mup, d3w)
         + b4 * dot(mup, d2x);
}

} // namespace nsmc
