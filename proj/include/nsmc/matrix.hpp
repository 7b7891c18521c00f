#pragma once

#include <cstddef>
#include <vector>

namespace nsmc {

// Distributions and signed measures are row vectors; rewards and value
// functions are column vectors.  Both are plain std::vector<double>; the
// operation signatures keep the two roles apart.
using RowVec = std::vector<double>;
using ColVec = std::vector<double>;

// Dense row-major real matrix.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    static Matrix identity(int n);
    // Rank-one matrix with every row equal to `row` (e.g. the matrix with
    // rows pi used alongside the fundamental matrix).
    static Matrix rows_equal(const RowVec& row);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    Matrix& operator+=(const Matrix& b);
    Matrix& operator-=(const Matrix& b);
    Matrix& operator*=(double c);

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double c) { return a *= c; }
    friend Matrix operator*(double c, Matrix a) { return a *= c; }

private:
    int rows_, cols_;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

// x * A for a row vector x (measure propagation).
RowVec operator*(const RowVec& x, const Matrix& a);
// A * y for a column vector y (value-function transforms).
ColVec operator*(const Matrix& a, const ColVec& y);

double dot(const RowVec& x, const ColVec& y);

// Norms: sum of absolute entries (measures), max absolute entry (functions),
// max absolute row sum (matrices/operators).  Submultiplicative in the usual
// pairings.
double norm_l1(const std::vector<double>& x);
double norm_max(const std::vector<double>& x);
double norm_rowsum(const Matrix& a);

} // namespace nsmc
