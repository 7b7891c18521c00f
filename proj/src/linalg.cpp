#include "nsmc/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsmc {

LuFactors::LuFactors(const Matrix& a) : lu_(a), piv_(a.rows()) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("LU factorization requires a square matrix");
    const int n = lu_.rows();
    const double threshold = 1e-13 * norm_rowsum(a);
    for (int k = 0; k < n; ++k) {
        // Partial pivoting: bring the largest remaining entry in column k up.
        int p = k;
        double best = std::fabs(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::fabs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        piv_[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        if (best <= threshold)
            throw SingularMatrix("pivot " + std::to_string(best) +
                                 " at column " + std::to_string(k) +
                                 " is zero to working precision");
        const double inv_piv = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double m = lu_(i, k) * inv_piv;
            lu_(i, k) = m;
            if (m == 0.0) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

ColVec LuFactors::solve(const ColVec& b) const {
    const int n = dim();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("right-hand side dimension mismatch");
    ColVec x = b;
    for (int k = 0; k < n; ++k)
        if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
    // Forward substitution with unit-diagonal L.
    for (int i = 1; i < n; ++i) {
        double acc = x[i];
        for (int j = 0; j < i; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc;
    }
    // Back substitution with U.
    for (int i = n - 1; i >= 0; --i) {
        double acc = x[i];
        for (int j = i + 1; j < n; ++j) acc -= lu_(i, j) * x[j];
        x[i] = acc / lu_(i, i);
    }
    return x;
}

RowVec LuFactors::solve_row(const RowVec& c) const {
    // y A = c with A = P^T L U: solve v U = c, then u L = v, then undo the
    // row permutation on u.
    const int n = dim();
    if (static_cast<int>(c.size()) != n)
        throw std::invalid_argument("right-hand side dimension mismatch");
    RowVec v(n);
    for (int j = 0; j < n; ++j) {
        double acc = c[j];
        for (int i = 0; i < j; ++i) acc -= v[i] * lu_(i, j);
        v[j] = acc / lu_(j, j);
    }
    for (int j = n - 1; j >= 0; --j) {
        double acc = v[j];
        for (int i = j + 1; i < n; ++i) acc -= v[i] * lu_(i, j);
        v[j] = acc;
    }
    for (int k = n - 1; k >= 0; --k)
        if (piv_[k] != k) std::swap(v[k], v[piv_[k]]);
    return v;
}

Matrix LuFactors::solve_matrix(const Matrix& b) const {
    const int n = dim();
    if (b.rows() != n)
        throw std::invalid_argument("right-hand side dimension mismatch");
    Matrix x(n, b.cols());
    ColVec col(n);
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        ColVec sol = solve(col);
        for (int i = 0; i < n; ++i) x(i, j) = sol[i];
    }
    return x;
}

ColVec solve(const Matrix& a, const ColVec& b) { return LuFactors(a).solve(b); }

Matrix inverse(const Matrix& a) {
    return LuFactors(a).solve_matrix(Matrix::identity(a.rows()));
}

std::optional<int> contraction_power(const Matrix& a, int l_max) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("contraction check requires a square matrix");
    Matrix power = a;
    for (int l = 1; l <= l_max; ++l) {
        if (l > 1) power = power * a;
        if (norm_rowsum(power) < 1.0) return l;
    }
    return std::nullopt;
}

double neumann_identity_residual(const Matrix& a, int j, int K) {
    if (j < 0) throw std::invalid_argument("derivative order j must be >= 0");
    if (!contraction_power(a, K))
        throw NotContracting("no power of the matrix up to " + std::to_string(K) +
                             " has norm below 1; series identities do not apply");
    const int n = a.rows();
    // Truncated factorial-weighted series: coefficients (n+j)!/n! via the
    // recurrence c_{m+1} = c_m (m+j+1)/(m+1), starting at c_0 = j!.
    double c = 1.0;
    for (int i = 2; i <= j; ++i) c *= i;
    const double factorial_j = c;
    Matrix sum(n, n);
    Matrix power = Matrix::identity(n);
    for (int m = 0; m <= K; ++m) {
        if (m > 0) {
            power = power * a;
            c *= static_cast<double>(m + j) / m;
        }
        sum += c * power;
    }
    // Closed form j! (I - A)^{-(j+1)}.
    Matrix inv = inverse(Matrix::identity(n) - a);
    Matrix target = inv;
    for (int i = 1; i <= j; ++i) target = target * inv;
    target *= factorial_j;
    return norm_rowsum(sum - target);
}

namespace {

// Shared kernel for the two stationary solves: x M = 0, x e = 1, realized by
// transposing, overwriting the last balance equation with the normalization
// row, and solving against e_last.
RowVec normalized_left_null_row(const Matrix& m, const char* what) {
    const int n = m.rows();
    Matrix sys(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys(i, j) = m(j, i);
    for (int j = 0; j < n; ++j) sys(n - 1, j) = 1.0;
    ColVec rhs(n, 0.0);
    rhs[n - 1] = 1.0;
    ColVec x;
    try {
        x = solve(sys, rhs);
    } catch (const SingularMatrix&) {
        throw NotIrreducible(std::string(what) +
                             ": stationary system is singular (chain reducible?)");
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (x[i] < -1e-12)
            throw NotIrreducible(std::string(what) +
                                 ": stationary solve produced a negative mass " +
                                 std::to_string(x[i]));
        if (x[i] < 0.0) x[i] = 0.0; // clamp rounding dust
        total += x[i];
    }
    if (!(total > 0.0))
        throw NotIrreducible(std::string(what) + ": stationary solve produced zero mass");
    for (double& v : x) v /= total;
    return RowVec(x.begin(), x.end());
}

} // namespace

RowVec stationary_distribution(const StochasticMatrix& p) {
    RowVec pi = normalized_left_null_row(p.mat() - Matrix::identity(p.dim()),
                                         "stationary distribution");
    RowVec res = pi * p.mat();
    for (size_t i = 0; i < res.size(); ++i) res[i] -= pi[i];
    if (norm_l1(res) > 1e-10)
        throw NotIrreducible("stationary distribution residual " +
                             std::to_string(norm_l1(res)) + " exceeds 1e-10");
    return pi;
}

Matrix fundamental_matrix(const StochasticMatrix& p, const RowVec& pi) {
    if (static_cast<int>(pi.size()) != p.dim())
        throw std::invalid_argument("stationary row dimension mismatch");
    Matrix m = Matrix::identity(p.dim()) - p.mat() + Matrix::rows_equal(pi);
    return inverse(m);
}

RowVec ctmc_stationary(const Matrix& q) {
    if (q.rows() != q.cols())
        throw std::invalid_argument("rate matrix must be square");
    RowVec pi = normalized_left_null_row(q, "rate-matrix stationary row");
    RowVec res = pi * q;
    const double scale = std::max(1.0, norm_rowsum(q));
    if (norm_l1(res) > 1e-10 * scale)
        throw NotIrreducible("rate-matrix stationary residual " +
                             std::to_string(norm_l1(res)) + " too large");
    return pi;
}

} // namespace nsmc
