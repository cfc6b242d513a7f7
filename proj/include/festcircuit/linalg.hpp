#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace festcircuit::linalg {

using Vector = std::vector<double>;

/// Dense row-major matrix, just enough for the regression and embedding code.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

struct LeastSquares {
    Vector coefficients;
    /// Square upper-triangular factor R with X = QR; (XtX)^-1 = R^-1 R^-T.
    Matrix r;
};

/// Householder QR solve of min ||X b - y||. Throws on rows < cols or when a
/// diagonal of R collapses (rank deficiency).
LeastSquares least_squares(const Matrix& x, const Vector& y);

/// Inverse of a square upper-triangular matrix.
Matrix upper_triangular_inverse(const Matrix& r);

/// Diagonal of (XtX)^-1 obtained from the R factor.
Vector normal_matrix_inverse_diagonal(const Matrix& r);

struct EigenDecomposition {
    Vector values;  // descending
    Matrix vectors; // column k pairs with values[k], unit length
};

/// Cyclic Jacobi rotations for a symmetric matrix. Deterministic: fixed sweep
/// order, convergence on off-diagonal norm, each eigenvector's sign chosen so
/// its largest-magnitude component is positive.
EigenDecomposition jacobi_eigen_symmetric(const Matrix& a);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value for a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace festcircuit::linalg
