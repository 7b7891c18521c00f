#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nsmc/chains.hpp"
#include "nsmc/linalg.hpp"
#include "nsmc/matrix.hpp"
#include "nsmc/model.hpp"
#include "nsmc/transient.hpp"

using namespace nsmc;

namespace {

StochasticMatrix mixed_chain(int dim, unsigned long long seed, double w) {
    Matrix m = (1.0 - w) * random_chain(dim, seed).mat() + w * Matrix(dim, dim, 1.0 / dim);
    return validate_stochastic(m);
}

// family P_k = base + (k - n) eps g, indexed so the base sits at the horizon end
TransitionSequence backward_family(const StochasticMatrix& base, const Matrix& g, double eps,
                                   long n) {
    Matrix b = base.mat();
    return TransitionSequence{
        [b, g, eps, n](long k) {
            return validate_stochastic(b + (static_cast<double>(k - n) * eps) * g);
        },
        n, base.dim()};
}

// quadratic variant P_k = base + (k-n) eps g + (k-n)^2 eps^2 h / 2
TransitionSequence backward_family2(const StochasticMatrix& base, const Matrix& g,
                                    const Matrix& h, double eps, long n) {
    Matrix b = base.mat();
    return TransitionSequence{
        [b, g, h, eps, n](long k) {
            double u = static_cast<double>(k - n) * eps;
            return validate_stochastic(b + u * g + (0.5 * u * u) * h);
        },
        n, base.dim()};
}

}  // namespace

TEST_CASE("exact_transient") {
    StochasticMatrix p = mixed_chain(3, 51, 0.3);
    RewardSpec rw({1.0, -0.5, 2.0}, {0.2, 0.5, 0.3});

    SUBCASE("horizon zero is the initial expectation") {
        TransitionSequence constant{[p](long) { return p; }, std::nullopt, 3};
        double mur = dot(rw.mu, rw.r);
        CHECK(exact_transient(constant, rw, 0) == doctest::Approx(mur).epsilon(1e-15));
    }
    SUBCASE("long constant horizon mixes to the stationary expectation") {
        TransitionSequence constant{[p](long) { return p; }, std::nullopt, 3};
        RowVec pi = stationary_distribution(p);
        CHECK(exact_transient(constant, rw, 200) == doctest::Approx(dot(pi, rw.r)).epsilon(1e-8));
    }
    SUBCASE("drifting family matches a dense matrix product") {
        Matrix g = random_drift(3, 52);
        TransitionSequence seq = backward_family(p, g, 2e-4, 50);
        Matrix prod = Matrix::identity(3);
        for (long k = 1; k <= 50; ++k) prod = prod * seq.at(k).mat();
        double dense = dot(rw.mu, prod * rw.r);
        CHECK(exact_transient(seq, rw, 50) == doctest::Approx(dense).epsilon(1e-12));
    }
    SUBCASE("unit reward is conserved along any drifting family") {
        Matrix g = random_drift(3, 53);
        TransitionSequence seq = backward_family(p, g, 2e-4, 60);
        RewardSpec ones(ColVec(3, 1.0), {0.2, 0.5, 0.3});
        CHECK(exact_transient(seq, ones, 60) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("forward_first") {
    StochasticMatrix p = mixed_chain(4, 301, 0.3);
    Matrix g = random_drift(4, 302);
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, stationary_distribution(p));

    SUBCASE("zero drift collapses to the stationary expectation") {
        TransientResult v = forward_first(DriftModel(p, Matrix(4, 4, 0.0)), rw, 40);
        RowVec pi = stationary_distribution(p);
        CHECK(v.value == doctest::Approx(dot(pi, rw.r)).epsilon(1e-13));
        CHECK(std::abs(v.order1_n_coeff) <= 1e-13);
        CHECK(std::abs(v.order1_const) <= 1e-13);
    }
    SUBCASE("unit reward gives exactly one") {
        RewardSpec ones(ColVec(4, 1.0), stationary_distribution(p));
        TransientResult v = forward_first(DriftModel(p, 1e-4 * g), ones, 40);
        CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(v.order1_n_coeff) <= 1e-12);
        CHECK(std::abs(v.order1_const) <= 1e-12);
    }
    SUBCASE("breakdown sums to the value") {
        TransientResult v = forward_first(DriftModel(p, 1e-4 * g), rw, 40);
        CHECK(v.value ==
              doctest::Approx(v.order0 + v.order1_n_coeff + v.order1_const + v.order2)
                  .epsilon(1e-15));
    }
    SUBCASE("adding a constant shifts the value by that constant") {
        ColVec shifted = rw.r;
        for (double& x : shifted) x += 3.0;
        DriftModel dm(p, 1e-4 * g);
        double a = forward_first(dm, rw, 40).value;
        double b = forward_first(dm, RewardSpec(shifted, rw.mu), 40).value;
        CHECK(b - a == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("error halves quadratically against the brute-force oracle") {
        // forward indexing: P_k = base + (k - 1) eps g
        double errs[2];
        for (int i = 0; i < 2; ++i) {
            double eps = 1e-4 / (1 << i);
            DriftModel dm(p, eps * g);
            double oracle = exact_transient(drift_sequence(dm, 1000), rw, 40);
            errs[i] = std::abs(forward_first(dm, rw, 40).value - oracle);
        }
        CHECK(errs[0] / errs[1] >= 3.5);
    }
}

TEST_CASE("backward_first") {
    StochasticMatrix p = mixed_chain(4, 401, 0.6);
    Matrix g = random_drift(4, 402);
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, random_distribution(4, 404));

    SUBCASE("zero drift collapses to the stationary expectation") {
        TransientResult v = backward_first(DriftModel(p, Matrix(4, 4, 0.0)), rw);
        RowVec pi = stationary_distribution(p);
        CHECK(v.value == doctest::Approx(dot(pi, rw.r)).epsilon(1e-13));
    }
    SUBCASE("error halves quadratically against the brute-force oracle") {
        long n = 60;
        double errs[2];
        for (int i = 0; i < 2; ++i) {
            double eps = 2.5e-4 / (1 << i);
            TransitionSequence seq = backward_family(p, g, eps, n);
            double oracle = exact_transient(seq, rw, n);
            double approx = backward_first(DriftModel(p, eps * g), rw).value;
            errs[i] = std::abs(approx - oracle);
        }
        CHECK(errs[0] / errs[1] >= 3.5);
    }
}

TEST_CASE("poisson_correction") {
    StochasticMatrix p = mixed_chain(4, 411, 0.3);
    Matrix g = random_drift(4, 412);
    RewardSpec rw({0.7, -0.2, 1.1, 0.4}, random_distribution(4, 413));

    SUBCASE("zero drift gives a zero correction") {
        CHECK(std::abs(poisson_correction(p, Matrix(4, 4, 0.0), rw)) <= 1e-14);
    }
    SUBCASE("matches the resolvent route inside backward_first") {
        double via_poisson = poisson_correction(p, 1e-3 * g, rw);
        TransientResult v = backward_first(DriftModel(p, 1e-3 * g), rw);
        CHECK(via_poisson == doctest::Approx(v.order1_const).epsilon(1e-10));
    }
    SUBCASE("first Poisson iterate preserves the stationary expectation") {
        // h1 = Z P r satisfies pi h1 = pi r
        RowVec pi = stationary_distribution(p);
        Matrix z = fundamental_matrix(p, pi);
        ColVec h1 = z * (p.mat() * rw.r);
        CHECK(dot(pi, h1) == doctest::Approx(dot(pi, rw.r)).epsilon(1e-10));
    }
}

TEST_CASE("backward_second") {
    StochasticMatrix p = mixed_chain(4, 401, 0.6);
    Matrix g = random_drift(4, 402);
    Matrix h = random_drift(4, 403);
    RewardSpec rw({0.2, 1.4, 0.9, 1.8}, random_distribution(4, 404));

    SUBCASE("zero drift and curvature collapse to the stationary expectation") {
        Matrix zero(4, 4, 0.0);
        RowVec pi = stationary_distribution(p);
        for (auto mode : {SecondOrderMode::corrected, SecondOrderMode::as_written}) {
            TransientResult v = backward_second(DriftModel(p, zero, zero), rw, mode);
            CHECK(v.value == doctest::Approx(dot(pi, rw.r)).epsilon(1e-13));
            CHECK(std::abs(v.order2) <= 1e-13);
        }
    }
    SUBCASE("curvature matrix is required") {
        CHECK_THROWS_AS(backward_second(DriftModel(p, g), rw), std::invalid_argument);
    }
    SUBCASE("breakdown sums to the value") {
        TransientResult v = backward_second(DriftModel(p, 1e-3 * g, 1e-6 * h), rw);
        CHECK(v.value ==
              doctest::Approx(v.order0 + v.order1_n_coeff + v.order1_const + v.order2)
                  .epsilon(1e-15));
    }
    SUBCASE("the two modes genuinely differ under drift") {
        DriftModel dm(p, 1e-3 * g, 1e-6 * h);
        double corr = backward_second(dm, rw, SecondOrderMode::corrected).value;
        double aw = backward_second(dm, rw, SecondOrderMode::as_written).value;
        CHECK(std::abs(corr - aw) > 1e-12);
    }
    SUBCASE("corrected mode beats the first-order approximation") {
        long n = 30;
        double eps = 4e-3;
        TransitionSequence seq = backward_family2(p, g, h, eps, n);
        double oracle = exact_transient(seq, rw, n);
        DriftModel dm(p, eps * g, (eps * eps) * h);
        double second = backward_second(dm, rw, SecondOrderMode::corrected).value;
        double first = backward_first(DriftModel(p, eps * g), rw).value;
        CHECK(std::abs(second - oracle) < std::abs(first - oracle));
    }
}
