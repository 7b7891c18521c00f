#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "nsmc/chains.hpp"
#include "nsmc/errors.hpp"
#include "nsmc/jump.hpp"
#include "nsmc/linalg.hpp"
#include "nsmc/matrix.hpp"
#include "nsmc/model.hpp"

using namespace nsmc;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

// generator with every off-diagonal rate at least 0.3 so drifted paths keep
// valid rates over the horizons used here
RateMatrix floored_rate(int dim, unsigned long long seed) {
    Matrix q = random_rate(dim, seed);
    for (int i = 0; i < dim; ++i) {
        double exit = 0.0;
        for (int j = 0; j < dim; ++j)
            if (j != i) {
                q(i, j) += 0.3;
                exit += q(i, j);
            }
        q(i, i) = -exit;
    }
    return validate_rate(q);
}

// linear rate ramp Q(s) = base + (s - t) eps k1, anchored at the endpoint
RatePath ramp_path(const RateMatrix& base, const Matrix& k1, double eps, double t) {
    Matrix q = base.mat();
    return RatePath{
        [q, k1, eps, t](double s) { return validate_rate(q + ((s - t) * eps) * k1); }, t,
        base.dim()};
}

// quadratic variant Q(s) = base + (s-t) eps k1 + (s-t)^2 eps^2 k2 / 2
RatePath ramp_path2(const RateMatrix& base, const Matrix& k1, const Matrix& k2, double eps,
                    double t) {
    Matrix q = base.mat();
    return RatePath{[q, k1, k2, eps, t](double s) {
                        double u = (s - t) * eps;
                        return validate_rate(q + u * k1 + (0.5 * u * u) * k2);
                    },
                    t, base.dim()};
}

}  // namespace

TEST_CASE("validate_rate") {
    CHECK_NOTHROW(validate_rate(random_rate(5, 601)));
    CHECK_NOTHROW(validate_rate(Matrix(3, 3, 0.0)));
    // negative off-diagonal rate
    CHECK_THROWS_AS(validate_rate(from_rows({{0.5, -0.5}, {1.0, -1.0}})), NotStochastic);
    // nonzero row sum
    CHECK_THROWS_AS(validate_rate(from_rows({{-1.0, 1.1}, {1.0, -1.0}})), NotStochastic);
}

TEST_CASE("uniformize") {
    SUBCASE("zero generator gives the identity") {
        RateMatrix q = validate_rate(Matrix(3, 3, 0.0));
        StochasticMatrix r = uniformize(q, 1.0);
        CHECK(norm_rowsum(r.mat() - Matrix::identity(3)) == 0.0);
    }
    SUBCASE("symmetric two-state generator at clock rate two") {
        RateMatrix q = validate_rate(from_rows({{-1.0, 1.0}, {1.0, -1.0}}));
        StochasticMatrix r = uniformize(q, 2.0);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(r(i, j) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("default clock rate strictly dominates every exit rate") {
        RateMatrix q = floored_rate(4, 611);
        double lam = default_uniformization_rate(q);
        StochasticMatrix r = uniformize(q, lam);
        for (int i = 0; i < 4; ++i) CHECK(r(i, i) > 0.0);
    }
    SUBCASE("a clock rate below an exit rate is rejected") {
        RateMatrix q = floored_rate(4, 611);
        CHECK_THROWS_AS(uniformize(q, 0.5 * q.max_exit_rate()), NotStochastic);
    }
    SUBCASE("the embedding inverts: lam (R - I) recovers Q") {
        RateMatrix q = floored_rate(4, 612);
        double lam = default_uniformization_rate(q);
        StochasticMatrix r = uniformize(q, lam);
        CHECK(norm_rowsum(lam * (r.mat() - Matrix::identity(4)) - q.mat()) <= 1e-12);
    }
    SUBCASE("uniformized chain shares the stationary distribution") {
        RateMatrix q = floored_rate(5, 613);
        RowVec pi_c = ctmc_stationary(q.mat());
        RowVec pi_d = stationary_distribution(uniformize(q, default_uniformization_rate(q)));
        for (int i = 0; i < 5; ++i) CHECK(std::abs(pi_c[i] - pi_d[i]) <= 1e-9);
    }
}

TEST_CASE("RateDriftModel validation") {
    RateMatrix q = floored_rate(4, 601);
    Matrix k1 = random_drift(4, 602);
    CHECK_NOTHROW(RateDriftModel(q, k1));
    Matrix bad = k1;
    bad(0, 0) += 1e-3;
    CHECK_THROWS_AS(RateDriftModel(q, bad), std::invalid_argument);
    CHECK_THROWS_AS(RateDriftModel(q, k1, bad), std::invalid_argument);
}

TEST_CASE("jump_first") {
    RateMatrix q = floored_rate(4, 601);
    Matrix k1 = random_drift(4, 602);
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, ctmc_stationary(q.mat()));

    SUBCASE("zero rate drift collapses to the stationary expectation") {
        RowVec pi = ctmc_stationary(q.mat());
        CHECK(jump_first(RateDriftModel(q, Matrix(4, 4, 0.0)), rw) ==
              doctest::Approx(dot(pi, rw.r)).epsilon(1e-13));
    }
    SUBCASE("unit reward gives exactly one") {
        RewardSpec ones(ColVec(4, 1.0), ctmc_stationary(q.mat()));
        CHECK(jump_first(RateDriftModel(q, 1e-3 * k1), ones) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("matches the deviation-kernel closed form") {
        // correction = -pi F1 (Pi - Q)^{-2} r, and the value of that kernel
        // is the same for every clock weight lambda > 0
        RowVec pi = ctmc_stationary(q.mat());
        Matrix f1 = 1e-3 * k1;
        double base_val = dot(pi, rw.r);
        double approx = jump_first(RateDriftModel(q, f1), rw);
        for (double lam : {0.5, 1.0, 7.0}) {
            Matrix m = lam * Matrix::rows_equal(pi) - q.mat();
            Matrix minv = inverse(m);
            ColVec v = minv * (minv * rw.r);
            RowVec pif = pi * f1;
            double expected = base_val - dot(pif, v);
            CHECK(approx == doctest::Approx(expected).epsilon(1e-11));
        }
    }
    SUBCASE("error halves quadratically against the integration oracle") {
        double t = 30.0;
        double h = 0.1 / q.max_exit_rate() / 4.0;
        double errs[2];
        for (int i = 0; i < 2; ++i) {
            double eps = 2e-3 / (1 << i);
            RatePath path = ramp_path(q, k1, eps, t);
            double oracle = exact_jump(path, rw, t, h);
            errs[i] = std::abs(jump_first(RateDriftModel(q, eps * k1), rw) - oracle);
        }
        CHECK(errs[0] / errs[1] >= 3.5);
    }
}

TEST_CASE("jump_second") {
    RateMatrix q = floored_rate(4, 601);
    Matrix k1 = random_drift(4, 602);
    Matrix k2 = random_drift(4, 603);
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, ctmc_stationary(q.mat()));

    SUBCASE("zero drift and curvature collapse to the stationary expectation") {
        Matrix zero(4, 4, 0.0);
        RowVec pi = ctmc_stationary(q.mat());
        CHECK(jump_second(RateDriftModel(q, zero, zero), rw) ==
              doctest::Approx(dot(pi, rw.r)).epsilon(1e-13));
    }
    SUBCASE("curvature matrix is required") {
        CHECK_THROWS_AS(jump_second(RateDriftModel(q, k1), rw), std::invalid_argument);
    }
    SUBCASE("unit reward gives exactly one") {
        RewardSpec ones(ColVec(4, 1.0), ctmc_stationary(q.mat()));
        CHECK(jump_second(RateDriftModel(q, 1e-3 * k1, 1e-6 * k2), ones) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("on a linear ramp the error shrinks at third order") {
        // zero curvature input: remaining error is purely the second-order
        // remainder of the linear family
        double t = 30.0;
        double h = 0.1 / q.max_exit_rate() / 4.0;
        Matrix zero(4, 4, 0.0);
        double errs[2];
        for (int i = 0; i < 2; ++i) {
            double eps = 1e-2 / (1 << i);
            RatePath path = ramp_path(q, k1, eps, t);
            double oracle = exact_jump(path, rw, t, h);
            errs[i] = std::abs(jump_second(RateDriftModel(q, eps * k1, zero), rw) - oracle);
        }
        CHECK(errs[0] / errs[1] >= 7.0);
    }
    SUBCASE("with curvature the error still shrinks at third order") {
        double t = 20.0;
        double h = 0.1 / q.max_exit_rate() / 4.0;
        double errs[2];
        for (int i = 0; i < 2; ++i) {
            double eps = 1e-2 / (1 << i);
            RatePath path = ramp_path2(q, k1, k2, eps, t);
            double oracle = exact_jump(path, rw, t, h);
            RateDriftModel rm(q, eps * k1, (eps * eps) * k2);
            errs[i] = std::abs(jump_second(rm, rw) - oracle);
        }
        CHECK(errs[0] / errs[1] >= 7.0);
    }
}

TEST_CASE("exact_jump") {
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, random_distribution(4, 604));

    SUBCASE("zero generator leaves the initial expectation unchanged") {
        RateMatrix q = validate_rate(Matrix(4, 4, 0.0));
        RatePath path{[q](double) { return q; }, 10.0, 4};
        CHECK(exact_jump(path, rw, 10.0, 0.05) ==
              doctest::Approx(dot(rw.mu, rw.r)).epsilon(1e-12));
    }
    SUBCASE("constant generator mixes to the stationary expectation") {
        RateMatrix q = floored_rate(4, 621);
        RatePath path{[q](double) { return q; }, 60.0, 4};
        double h = 0.1 / q.max_exit_rate() / 2.0;
        RowVec pi = ctmc_stationary(q.mat());
        CHECK(exact_jump(path, rw, 60.0, h) == doctest::Approx(dot(pi, rw.r)).epsilon(1e-9));
    }
    SUBCASE("unit reward is conserved") {
        RateMatrix q = floored_rate(4, 621);
        Matrix k1 = random_drift(4, 622);
        RatePath path = ramp_path(q, k1, 1e-3, 25.0);
        RewardSpec ones(ColVec(4, 1.0), random_distribution(4, 604));
        double h = 0.1 / q.max_exit_rate() / 2.0;
        CHECK(exact_jump(path, ones, 25.0, h) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("argument validation") {
        RateMatrix q = floored_rate(4, 621);
        RatePath path{[q](double) { return q; }, 10.0, 4};
        CHECK_THROWS_AS(exact_jump(path, rw, -1.0, 0.01), std::invalid_argument);
        CHECK_THROWS_AS(exact_jump(path, rw, 11.0, 0.01), std::invalid_argument);
        CHECK_THROWS_AS(exact_jump(path, rw, 5.0, 0.0), std::invalid_argument);
        // step far above the stability guard
        CHECK_THROWS_AS(exact_jump(path, rw, 5.0, 10.0 / q.max_exit_rate()),
                        std::invalid_argument);
        CHECK_THROWS_AS(path.at(-0.5), std::out_of_range);
        CHECK_THROWS_AS(path.at(10.5), std::out_of_range);
    }
    SUBCASE("step refinement converges at fourth order") {
        // slow generator so coarse steps sit above the roundoff floor; the
        // reference uses a far finer step
        Matrix slow = 0.1 * random_rate(4, 601);
        RateMatrix q = validate_rate(slow);
        Matrix k1 = random_drift(4, 602);
        double t = 8.0;
        RatePath path{[q, k1, t](double s) {
                          return validate_rate(q.mat() + (0.02 * std::sin(s)) * k1);
                      },
                      t, 4};
        double ref = exact_jump(path, rw, t, 0.0005);
        double e1 = std::abs(exact_jump(path, rw, t, 0.1) - ref);
        double e2 = std::abs(exact_jump(path, rw, t, 0.05) - ref);
        CHECK(e1 / e2 >= 8.0);
    }
}
