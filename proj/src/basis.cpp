#include "elast/basis.hpp"

#include "elast/errors.hpp"

#include <cmath>
#include <mutex>

namespace elast {

double triangle_monomial_integral(int a, int b) {
    // a! b! / (a+b+2)! computed as a product of ratios to stay in range.
    double v = 1.0;
    int denom_start = a + 1;
    // v = a! / (a+b+2)! partial: multiply 1/(a+1)...(a+b+2), then b! on top.
    for (int t = denom_start; t <= a + b + 2; ++t) v /= t;
    for (int t = 2; t <= b; ++t) v *= t;
    return v;
}

TriangleBasis::TriangleBasis(int degree) : degree_(degree), dim_(scalar_basis_dim(degree)) {
    if (degree < 0) throw UnsupportedDegreeError("TriangleBasis: negative degree");
    expo_.reserve(dim_);
    for (int total = 0; total <= degree; ++total)
        for (int a = total; a >= 0; --a) expo_.emplace_back(a, total - a);

    // Monomial Gram matrix from exact moments; Gram-Schmidt runs in long
    // double since the monomial basis is badly conditioned already at k = 4.
    std::vector<long double> gram(static_cast<size_t>(dim_) * dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            const int a = expo_[i].first + expo_[j].first;
            const int b = expo_[i].second + expo_[j].second;
            long double v = 1.0L;
            for (int t = a + 1; t <= a + b + 2; ++t) v /= t;
            for (int t = 2; t <= b; ++t) v *= t;
            gram[static_cast<size_t>(i) * dim_ + j] = v;
        }

    std::vector<long double> c(static_cast<size_t>(dim_) * dim_, 0.0L);
    for (int i = 0; i < dim_; ++i) c[static_cast<size_t>(i) * dim_ + i] = 1.0L;
    auto inner_product = [&](int i, int j) {
        long double s = 0.0L;
        for (int a = 0; a < dim_; ++a) {
            const long double ca = c[static_cast<size_t>(i) * dim_ + a];
            if (ca == 0.0L) continue;
            for (int b = 0; b < dim_; ++b)
                s += ca * gram[static_cast<size_t>(a) * dim_ + b] * c[static_cast<size_t>(j) * dim_ + b];
        }
        return s;
    };
    for (int i = 0; i < dim_; ++i) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < i; ++j) {
                const long double p = inner_product(i, j);
                for (int a = 0; a < dim_; ++a)
                    c[static_cast<size_t>(i) * dim_ + a] -= p * c[static_cast<size_t>(j) * dim_ + a];
            }
        }
        const long double nrm = sqrtl(inner_product(i, i));
        if (!(nrm > 0.0L)) throw SingularLocalSystemError("TriangleBasis: dependent monomials");
        for (int a = 0; a < dim_; ++a) c[static_cast<size_t>(i) * dim_ + a] /= nrm;
    }
    coeff_ = DMat(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int a = 0; a < dim_; ++a)
            coeff_(i, a) = static_cast<double>(c[static_cast<size_t>(i) * dim_ + a]);
}

void TriangleBasis::values(Vec2 p, std::span<double> out) const {
    // Monomial values in graded order, then multiply by the coefficient rows.
    std::vector<double> mono(dim_);
    {
        int idx = 0;
        for (int total = 0; total <= degree_; ++total)
            for (int a = total; a >= 0; --a)
                mono[idx++] = std::pow(p.x, a) * std::pow(p.y, total - a);
    }
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int a = 0; a < dim_; ++a) s += coeff_(i, a) * mono[a];
        out[i] = s;
    }
}

void TriangleBasis::gradients(Vec2 p, std::span<Vec2> out) const {
    std::vector<Vec2> mono_grad(dim_);
    for (int a = 0; a < dim_; ++a) {
        const int ax = expo_[a].first, ay = expo_[a].second;
        const double gx = ax > 0 ? ax * std::pow(p.x, ax - 1) * std::pow(p.y, ay) : 0.0;
        const double gy = ay > 0 ? ay * std::pow(p.y, ay - 1) * std::pow(p.x, ax) : 0.0;
        mono_grad[a] = {gx, gy};
    }
    for (int i = 0; i < dim_; ++i) {
        Vec2 g{0.0, 0.0};
        for (int a = 0; a < dim_; ++a) g += coeff_(i, a) * mono_grad[a];
        out[i] = g;
    }
}

const TriangleBasis& TriangleBasis::get(int degree) {
    constexpr int kMax = 12;
    if (degree < 0 || degree > kMax)
        throw UnsupportedDegreeError("TriangleBasis: degree " + std::to_string(degree) + " unsupported");
    static std::mutex m;
    static const TriangleBasis* cache[kMax + 1] = {};
    std::lock_guard<std::mutex> lock(m);
    if (!cache[degree]) cache[degree] = new TriangleBasis(degree);
    return *cache[degree];
}

double edge_legendre(int n, double s) {
    const double t = 2.0 * s - 1.0;
    double p0 = 1.0, p1 = t;
    if (n == 0) return 1.0;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return std::sqrt(2.0 * n + 1.0) * p1;
}

void edge_legendre_all(int count, double s, std::span<double> out) {
    const double t = 2.0 * s - 1.0;
    double p0 = 1.0, p1 = t;
    for (int n = 0; n < count; ++n) {
        if (n == 0) {
            out[0] = 1.0;
        } else if (n == 1) {
            out[1] = std::sqrt(3.0) * t;
        } else {
            const double p2 = ((2.0 * n - 1.0) * t * p1 - (n - 1.0) * p0) / n;
            p0 = p1;
            p1 = p2;
            out[n] = std::sqrt(2.0 * n + 1.0) * p2;
        }
    }
}

} // namespace elast
