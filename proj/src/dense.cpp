#include "elast/dense.hpp"

#include "elast/errors.hpp"

#include <cmath>
#include <utility>

namespace elast {

DMat DMat::identity(int n) {
    DMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DMat DMat::transposed() const {
    DMat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DMat DMat::operator*(const DMat& o) const {
    DMat r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double v = (*this)(i, k);
            if (v == 0.0) continue;
            for (int j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
        }
    return r;
}

std::vector<double> DMat::operator*(const std::vector<double>& v) const {
    std::vector<double> r(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double DMat::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

DMat lu_solve(DMat a, DMat b) {
    const int n = a.rows();
    if (n != a.cols() || n != b.rows())
        throw SingularLocalSystemError("lu_solve: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::fabs(a(i, k)) > best) {
                best = std::fabs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0 || !std::isfinite(best))
            throw SingularLocalSystemError("lu_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (int j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < b.cols(); ++j) {
            double s = b(k, j);
            for (int i = k + 1; i < n; ++i) s -= a(k, i) * b(i, j);
            b(k, j) = s / a(k, k);
        }
    }
    return b;
}

std::vector<double> lu_solve(DMat a, std::vector<double> b) {
    DMat rhs(static_cast<int>(b.size()), 1);
    for (size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i), 0) = b[i];
    DMat x = lu_solve(std::move(a), std::move(rhs));
    std::vector<double> out(b.size());
    for (size_t i = 0; i < b.size(); ++i) out[i] = x(static_cast<int>(i), 0);
    return out;
}

DMat inverse(const DMat& a) { return lu_solve(a, DMat::identity(a.rows())); }

std::vector<double> least_squares(const DMat& a, const std::vector<double>& b) {
    const int m = a.rows(), n = a.cols();
    DMat ata(n, n);
    std::vector<double> atb(n, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = a(i, j);
            if (v == 0.0) continue;
            atb[j] += v * b[i];
            for (int k = 0; k < n; ++k) ata(j, k) += v * a(i, k);
        }
    }
    return lu_solve(std::move(ata), std::move(atb));
}

} // namespace elast
