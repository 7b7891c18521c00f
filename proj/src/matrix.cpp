#include "nsmc/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace nsmc {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::rows_equal(const RowVec& row) {
    const int n = static_cast<int>(row.size());
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = row[j];
    return m;
}

Matrix& Matrix::operator+=(const Matrix& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_)
        throw std::invalid_argument("matrix dimension mismatch in +");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_)
        throw std::invalid_argument("matrix dimension mismatch in -");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= b.a_[i];
    return *this;
}

Matrix& Matrix::operator*=(double c) {
    for (double& v : a_) v *= c;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix dimension mismatch in *");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

RowVec operator*(const RowVec& x, const Matrix& a) {
    if (static_cast<int>(x.size()) != a.rows())
        throw std::invalid_argument("row-vector/matrix dimension mismatch");
    RowVec y(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        for (int j = 0; j < a.cols(); ++j) y[j] += xi * a(i, j);
    }
    return y;
}

ColVec operator*(const Matrix& a, const ColVec& y) {
    if (static_cast<int>(y.size()) != a.cols())
        throw std::invalid_argument("matrix/col-vector dimension mismatch");
    ColVec z(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * y[j];
        z[i] = acc;
    }
    return z;
}

double dot(const RowVec& x, const ColVec& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("dot dimension mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double norm_l1(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += std::fabs(v);
    return acc;
}

double norm_max(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc = std::max(acc, std::fabs(v));
    return acc;
}

double norm_rowsum(const Matrix& a) {
    double best = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < a.cols(); ++j) acc += std::fabs(a(i, j));
        best = std::max(best, acc);
    }
    return best;
}

} // namespace nsmc
