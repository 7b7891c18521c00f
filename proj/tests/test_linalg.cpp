#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>

#include "nsmc/chains.hpp"
#include "nsmc/errors.hpp"
#include "nsmc/hitting.hpp"
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

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

}  // namespace

TEST_CASE("vector and matrix norms") {
    CHECK(norm_l1({0.3, -0.7}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(norm_max({0.3, -0.7, 0.2}) == doctest::Approx(0.7).epsilon(1e-15));

    // a stochastic matrix has unit row-sum norm
    StochasticMatrix p = random_chain(5, 7);
    CHECK(norm_rowsum(p.mat()) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(norm_rowsum(from_rows({{1.0, -2.0}, {0.0, 0.5}})) == doctest::Approx(3.0));

    // submultiplicativity ||AB|| <= ||A|| ||B||
    Matrix a = random_drift(4, 11);
    Matrix b = random_chain(4, 12).mat();
    CHECK(norm_rowsum(a * b) <= norm_rowsum(a) * norm_rowsum(b) + 1e-14);
}

TEST_CASE("dense solve") {
    SUBCASE("identity returns the right-hand side") {
        ColVec b{2.0, -3.0, 0.5};
        ColVec x = solve(Matrix::identity(3), b);
        for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
    SUBCASE("closed-form 2x2") {
        // A = I - 0.5 * [[.5,.5],[.5,.5]]; A x = (1,0) has x = (1.5, 0.5)
        Matrix a = Matrix::identity(2) - 0.5 * from_rows({{0.5, 0.5}, {0.5, 0.5}});
        ColVec x = solve(a, {1.0, 0.0});
        CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("singular input throws") {
        CHECK_THROWS_AS(solve(Matrix(2, 2, 0.0), {1.0, 1.0}), SingularMatrix);
    }
    SUBCASE("residual on a random system") {
        Matrix a = Matrix::identity(5) - 0.6 * random_chain(5, 31).mat();
        ColVec b{0.3, -1.2, 2.0, 0.0, 0.7};
        ColVec x = solve(a, b);
        ColVec ax = a * x;
        for (int i = 0; i < 5; ++i) CHECK(std::abs(ax[i] - b[i]) <= 1e-10);
    }
    SUBCASE("row-side solve agrees with transposed column solve") {
        Matrix a = Matrix::identity(4) - 0.5 * random_chain(4, 32).mat();
        RowVec c{1.0, 0.0, -2.0, 0.5};
        RowVec y = LuFactors(a).solve_row(c);
        // check y A = c directly
        RowVec ya = y * a;
        for (int i = 0; i < 4; ++i) CHECK(std::abs(ya[i] - c[i]) <= 1e-10);
    }
}

TEST_CASE("matrix inverse") {
    CHECK(max_abs_diff(inverse(Matrix::identity(3)), Matrix::identity(3)) <= 1e-15);

    Matrix d = from_rows({{2.0, 0.0}, {0.0, 4.0}});
    Matrix dinv = inverse(d);
    CHECK(dinv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(dinv(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::abs(dinv(0, 1)) <= 1e-15);

    Matrix a = Matrix::identity(5) - 0.7 * random_chain(5, 41).mat();
    CHECK(norm_rowsum(a * inverse(a) - Matrix::identity(5)) <= 1e-9);
}

TEST_CASE("neumann identity residual") {
    SUBCASE("zero matrix: only the n = 0 term survives") {
        for (int j = 0; j <= 3; ++j)
            CHECK(neumann_identity_residual(Matrix(3, 3, 0.0), j, 50) <= 1e-14);
    }
    SUBCASE("scalar contraction 0.5 I") {
        CHECK(neumann_identity_residual(0.5 * Matrix::identity(2), 0, 200) <= 1e-12);
    }
    SUBCASE("scaled stochastic matrix, j = 2") {
        Matrix a = 0.9 * random_chain(2, 52).mat();
        CHECK(neumann_identity_residual(a, 2, 2000) <= 1e-9);
    }
    SUBCASE("norm-one input is rejected") {
        CHECK_THROWS_AS(neumann_identity_residual(random_chain(3, 53).mat(), 1, 100),
                        NotContracting);
    }
}

TEST_CASE("contraction power search") {
    // stochastic matrices never contract in row-sum norm
    CHECK(!contraction_power(random_chain(4, 61).mat(), 64).has_value());

    auto l = contraction_power(0.5 * Matrix::identity(3), 16);
    REQUIRE(l.has_value());
    CHECK(*l == 1);

    // principal block of the periodic-review chain over the above-threshold
    // states contracts within a handful of steps
    InventoryParams par(4, 10, 1.0, 0.0);
    StochasticMatrix p = review_chain_matrix(par, 1);
    std::vector<int> C;
    for (int x = 5; x <= 10; ++x) C.push_back(x);
    Matrix b = principal_block(p.mat(), C);
    auto lb = contraction_power(b, 4 * static_cast<int>(C.size()));
    REQUIRE(lb.has_value());
    CHECK(*lb <= 10);
}

TEST_CASE("stationary distribution") {
    SUBCASE("symmetric two-state chain") {
        StochasticMatrix p = validate_stochastic(from_rows({{0.5, 0.5}, {0.5, 0.5}}));
        RowVec pi = stationary_distribution(p);
        CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-13));
    }
    SUBCASE("general two-state closed form") {
        // switch rates a = 0.2, b = 0.3 give pi = (b, a) / (a + b) = (0.6, 0.4)
        StochasticMatrix p = validate_stochastic(from_rows({{0.8, 0.2}, {0.3, 0.7}}));
        RowVec pi = stationary_distribution(p);
        CHECK(pi[0] == doctest::Approx(0.6).epsilon(1e-13));
        CHECK(pi[1] == doctest::Approx(0.4).epsilon(1e-13));
    }
    SUBCASE("identity (reducible) is rejected") {
        StochasticMatrix p = validate_stochastic(Matrix::identity(3));
        CHECK_THROWS_AS(stationary_distribution(p), NotIrreducible);
    }
    SUBCASE("random chain: pi P = pi and mass one") {
        StochasticMatrix p = random_chain(6, 71);
        RowVec pi = stationary_distribution(p);
        RowVec pip = pi * p.mat();
        double mass = 0.0;
        for (int i = 0; i < 6; ++i) {
            CHECK(std::abs(pip[i] - pi[i]) <= 1e-12);
            CHECK(pi[i] >= 0.0);
            mass += pi[i];
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("fundamental matrix") {
    SUBCASE("rank-one chain: Z is the identity") {
        StochasticMatrix p = validate_stochastic(from_rows({{0.5, 0.5}, {0.5, 0.5}}));
        RowVec pi = stationary_distribution(p);
        Matrix z = fundamental_matrix(p, pi);
        CHECK(max_abs_diff(z, Matrix::identity(2)) <= 1e-12);
    }
    SUBCASE("defining residual, pi-invariance, row sums") {
        StochasticMatrix p = random_chain(3, 81);
        RowVec pi = stationary_distribution(p);
        Matrix z = fundamental_matrix(p, pi);

        Matrix ipp = Matrix::identity(3) - p.mat() + Matrix::rows_equal(pi);
        CHECK(norm_rowsum(z * ipp - Matrix::identity(3)) <= 1e-9);

        RowVec piz = pi * z;
        ColVec ze = z * ColVec(3, 1.0);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(piz[i] - pi[i]) <= 1e-9);
            CHECK(std::abs(ze[i] - 1.0) <= 1e-9);
        }
    }
    SUBCASE("matches the deviation series sum_n (P - Pi)^n") {
        StochasticMatrix p = random_chain(4, 82);
        RowVec pi = stationary_distribution(p);
        Matrix z = fundamental_matrix(p, pi);

        Matrix dev = p.mat() - Matrix::rows_equal(pi);
        Matrix series = Matrix::identity(4);
        Matrix pow = Matrix::identity(4);
        for (int n = 1; n <= 2000; ++n) {
            pow = pow * dev;
            series += pow;
            if (norm_rowsum(pow) < 1e-13) break;
        }
        CHECK(max_abs_diff(z, series) <= 1e-8);
    }
}

TEST_CASE("ctmc stationary distribution") {
    SUBCASE("symmetric two-state generator") {
        RowVec pi = ctmc_stationary(from_rows({{-1.0, 1.0}, {1.0, -1.0}}));
        CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-13));
    }
    SUBCASE("asymmetric rates") {
        // rates 0 -> 1 at 2, 1 -> 0 at 1 give pi = (1/3, 2/3)
        RowVec pi = ctmc_stationary(from_rows({{-2.0, 2.0}, {1.0, -1.0}}));
        CHECK(pi[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
        CHECK(pi[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    }
    SUBCASE("zero generator is rejected") {
        CHECK_THROWS_AS(ctmc_stationary(Matrix(3, 3, 0.0)), NotIrreducible);
    }
    SUBCASE("pi Q = 0 on a random generator") {
        Matrix q = random_rate(5, 91);
        RowVec pi = ctmc_stationary(q);
        RowVec piq = pi * q;
        for (int i = 0; i < 5; ++i) CHECK(std::abs(piq[i]) <= 1e-11);
    }
}
