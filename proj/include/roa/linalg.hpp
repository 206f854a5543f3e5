#pragma once

#include <stdexcept>
#include <vector>

namespace roa {

// Row-major dense real matrix.
class DenseMatrix {
public:
    DenseMatrix() : rows_(0), cols_(0) {}
    DenseMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static DenseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    DenseMatrix transpose() const;
    DenseMatrix operator*(const DenseMatrix& o) const;
    DenseMatrix operator+(const DenseMatrix& o) const;
    DenseMatrix operator-(const DenseMatrix& o) const;
    DenseMatrix operator*(double s) const;

    bool is_symmetric(double tol = 1e-12) const;
    double max_abs() const;

private:
    int rows_, cols_;
    std::vector<double> data_;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EigenConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// x with M x = b via LU with partial pivoting; throws SingularMatrixError
// when a pivot collapses to working precision.
std::vector<double> solve_linear(const DenseMatrix& M, const std::vector<double>& b);

struct SymEigResult {
    std::vector<double> eigenvalues;  // ascending
    DenseMatrix eigenvectors;         // columns, orthonormal
};

// Cyclic Jacobi; input must be symmetric within 1e-12.
SymEigResult sym_eig(const DenseMatrix& M);

// Largest real part among the eigenvalues of a general square matrix, via
// Hessenberg reduction and shifted QR. Throws EigenConvergenceError past the
// sweep cap (100 * n).
double gen_eig_max_real(const DenseMatrix& M);

// All eigenvalue real parts (same algorithm), unordered.
std::vector<double> eig_real_parts(const DenseMatrix& M);

// Q with J Q + Q J^T = -I via Kronecker vectorization. J must be Hurwitz;
// verified up front with gen_eig_max_real.
DenseMatrix solve_lyapunov(const DenseMatrix& J);

// Cholesky factor L (lower) of an SPD matrix; throws SingularMatrixError if
// a pivot dips below `floor`.
DenseMatrix cholesky(const DenseMatrix& M, double floor = 0.0);

}  // namespace roa
