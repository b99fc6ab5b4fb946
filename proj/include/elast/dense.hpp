#pragma once

#include <cstddef>
#include <vector>

namespace elast {

// Small dense row-major matrix for element-local systems and test oracles.
class DMat {
public:
    DMat() = default;
    DMat(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

    static DMat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    DMat transposed() const;
    DMat operator*(const DMat& o) const;
    std::vector<double> operator*(const std::vector<double>& v) const;

    double max_abs() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// LU factorization with partial pivoting, solving A X = B in place.
// Throws SingularLocalSystemError when a pivot degenerates.
DMat lu_solve(DMat a, DMat b);
std::vector<double> lu_solve(DMat a, std::vector<double> b);
DMat inverse(const DMat& a);

// Least squares min ||A x - b|| via normal equations; fine for well-scaled oracles.
std::vector<double> least_squares(const DMat& a, const std::vector<double>& b);

} // namespace elast
