#include "elast/sparse.hpp"

#include "elast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace elast {

CsrMatrix CsrMatrix::from_triplets(int n, const std::vector<Triplet>& triplets) {
    CsrMatrix m;
    m.n_ = n;
    std::vector<int> count(n + 1, 0);
    for (const auto& t : triplets) ++count[t.row + 1];
    std::vector<int> start(n + 1, 0);
    for (int i = 0; i < n; ++i) start[i + 1] = start[i] + count[i + 1];
    std::vector<int> cols(triplets.size());
    std::vector<double> vals(triplets.size());
    {
        std::vector<int> fill = start;
        for (const auto& t : triplets) {
            const int p = fill[t.row]++;
            cols[p] = t.col;
            vals[p] = t.value;
        }
    }
    m.row_ptr_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        const int lo = start[i], hi = start[i + 1];
        std::vector<int> idx(hi - lo);
        std::iota(idx.begin(), idx.end(), 0);
        // Ties broken by insertion order so duplicate entries are summed in
        // a reproducible order.
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return cols[lo + a] != cols[lo + b] ? cols[lo + a] < cols[lo + b] : a < b;
        });
        int prev_col = -1;
        for (int q : idx) {
            const int c = cols[lo + q];
            const double v = vals[lo + q];
            if (c == prev_col) {
                m.values_.back() += v;
            } else {
                m.cols_.push_back(c);
                m.values_.push_back(v);
                prev_col = c;
            }
        }
        m.row_ptr_[i + 1] = static_cast<int>(m.cols_.size());
    }
    return m;
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[cols_[p]];
        y[i] = s;
    }
    return y;
}

double CsrMatrix::symmetry_defect() const {
    // Compare against the transpose entry by entry.
    std::vector<Triplet> trans;
    trans.reserve(values_.size());
    for (int i = 0; i < n_; ++i)
        for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            trans.push_back({cols_[p], i, values_[p]});
    CsrMatrix at = from_triplets(n_, trans);
    double defect = 0.0;
    for (int i = 0; i < n_; ++i) {
        int pa = row_ptr_[i], pb = at.row_ptr_[i];
        const int ea = row_ptr_[i + 1], eb = at.row_ptr_[i + 1];
        while (pa < ea || pb < eb) {
            const int ca = pa < ea ? cols_[pa] : n_;
            const int cb = pb < eb ? at.cols_[pb] : n_;
            if (ca == cb) {
                defect = std::max(defect, std::fabs(values_[pa] - at.values_[pb]));
                ++pa;
                ++pb;
            } else if (ca < cb) {
                defect = std::max(defect, std::fabs(values_[pa++]));
            } else {
                defect = std::max(defect, std::fabs(at.values_[pb++]));
            }
        }
    }
    return defect;
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

// ---------------------------------------------------------------------------
// Nested dissection ordering
// ---------------------------------------------------------------------------

namespace {

struct NdContext {
    const CsrMatrix* a;
    std::vector<int> perm;
    std::vector<int> member;  // epoch stamp marking the active subset
    std::vector<int> level;   // BFS level within the active subset
    std::vector<int> queue;
    int epoch = 0;
};

// Orders `nodes` (a union of connected components) and appends to ctx.perm.
void nd_recurse(NdContext& ctx, std::vector<int> nodes) {
    const CsrMatrix& a = *ctx.a;
    constexpr size_t kSmall = 32;
    while (!nodes.empty()) {
        if (nodes.size() <= kSmall) {
            for (int v : nodes) ctx.perm.push_back(v);
            return;
        }
        const int epoch = ++ctx.epoch;
        for (int v : nodes) {
            ctx.member[v] = epoch;
            ctx.level[v] = -1;
        }
        auto run_bfs = [&](int root) -> int {
            ctx.queue.clear();
            ctx.queue.push_back(root);
            ctx.level[root] = 0;
            int last = root;
            for (size_t h = 0; h < ctx.queue.size(); ++h) {
                const int u = ctx.queue[h];
                last = u;
                for (int p = a.row_ptr()[u]; p < a.row_ptr()[u + 1]; ++p) {
                    const int w = a.cols()[p];
                    if (w != u && ctx.member[w] == epoch && ctx.level[w] == -1) {
                        ctx.level[w] = ctx.level[u] + 1;
                        ctx.queue.push_back(w);
                    }
                }
            }
            return last;
        };
        // Two BFS sweeps: find a pseudo-peripheral root, then level sets.
        const int far = run_bfs(nodes[0]);
        std::vector<int> component = ctx.queue;
        for (int v : component) ctx.level[v] = -1;
        run_bfs(far);
        component = ctx.queue;

        std::vector<int> rest;
        if (component.size() < nodes.size()) {
            rest.reserve(nodes.size() - component.size());
            for (int v : nodes)
                if (ctx.level[v] == -1) rest.push_back(v);
        }

        if (component.size() <= kSmall) {
            for (int v : component) ctx.perm.push_back(v);
        } else {
            int max_level = 0;
            for (int v : component) max_level = std::max(max_level, ctx.level[v]);
            if (max_level < 2) {
                for (int v : component) ctx.perm.push_back(v);
            } else {
                std::vector<int> level_count(max_level + 1, 0);
                for (int v : component) ++level_count[ctx.level[v]];
                // Thinnest separating level set among balanced cuts (each
                // side keeps at least a quarter of the nodes); fall back to
                // the median level when nothing qualifies.
                std::vector<int> cum(max_level + 2, 0);
                for (int l = 0; l <= max_level; ++l) cum[l + 1] = cum[l] + level_count[l];
                const double total = static_cast<double>(component.size());
                int best = -1;
                int best_size = 1 << 30;
                for (int l = 1; l < max_level; ++l) {
                    const double below = cum[l], above = total - cum[l + 1];
                    if (below < 0.25 * total || above < 0.25 * total) continue;
                    if (level_count[l] < best_size) {
                        best_size = level_count[l];
                        best = l;
                    }
                }
                if (best < 0) {
                    best = 1;
                    double closest = 1e300;
                    for (int l = 1; l < max_level; ++l) {
                        const double miss = std::fabs(cum[l + 1] - 0.5 * total);
                        if (miss < closest) {
                            closest = miss;
                            best = l;
                        }
                    }
                }
                std::vector<int> lower, upper, sep;
                for (int v : component) {
                    if (ctx.level[v] < best) lower.push_back(v);
                    else if (ctx.level[v] > best) upper.push_back(v);
                    else sep.push_back(v);
                }
                nd_recurse(ctx, std::move(lower));
                nd_recurse(ctx, std::move(upper));
                for (int v : sep) ctx.perm.push_back(v);
            }
        }
        nodes = std::move(rest);
    }
}

} // namespace

std::vector<int> nested_dissection_order(const CsrMatrix& a) {
    NdContext ctx;
    ctx.a = &a;
    ctx.member.assign(a.size(), 0);
    ctx.level.assign(a.size(), -1);
    ctx.perm.reserve(a.size());
    std::vector<int> all(a.size());
    std::iota(all.begin(), all.end(), 0);
    nd_recurse(ctx, std::move(all));
    return ctx.perm;
}

// ---------------------------------------------------------------------------
// Up-looking sparse LDL^T
// ---------------------------------------------------------------------------

namespace {

struct LdltFactor {
    int n = 0;
    std::vector<int> perm;     // position -> original index
    std::vector<double> scale; // diagonal equilibration of the original matrix
    std::vector<int> lp, li;
    std::vector<double> lx, d;

    // Solve P S A S P^T y = rhs (in permuted, scaled coordinates).
    void solve_permuted(std::vector<double>& y) const {
        for (int j = 0; j < n; ++j) {
            const double yj = y[j];
            if (yj == 0.0) continue;
            for (int p = lp[j]; p < lp[j + 1]; ++p) y[li[p]] -= lx[p] * yj;
        }
        for (int j = 0; j < n; ++j) y[j] /= d[j];
        for (int j = n - 1; j >= 0; --j) {
            double s = y[j];
            for (int p = lp[j]; p < lp[j + 1]; ++p) s -= lx[p] * y[li[p]];
            y[j] = s;
        }
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) y[i] = b[perm[i]] * scale[perm[i]];
        solve_permuted(y);
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[perm[i]] = y[i] * scale[perm[i]];
        return x;
    }
};

// Returns false on pivot breakdown (zero or, in SPD mode, nonpositive pivot).
bool ldlt_factorize(const CsrMatrix& a, const std::vector<int>& perm, bool require_spd,
                    LdltFactor& f) {
    const int n = a.size();
    f.n = n;
    f.perm = perm;

    f.scale.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
            if (a.cols()[p] == i) {
                const double d = std::fabs(a.values()[p]);
                if (d > 0.0) f.scale[i] = 1.0 / std::sqrt(d);
                break;
            }
        }
    }

    // Permuted, scaled matrix (upper triangle per permuted row suffices, but
    // we build the full pattern for simplicity).
    std::vector<int> inv(n);
    for (int i = 0; i < n; ++i) inv[perm[i]] = i;
    std::vector<Triplet> trips;
    trips.reserve(a.values().size());
    for (int i = 0; i < n; ++i)
        for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
            const int j = a.cols()[p];
            if (inv[j] <= inv[i])
                trips.push_back({inv[i], inv[j], a.values()[p] * f.scale[i] * f.scale[j]});
        }
    const CsrMatrix ap = CsrMatrix::from_triplets(n, trips); // lower triangle, by rows

    // Symbolic: elimination tree and column counts.
    std::vector<int> parent(n, -1), flag(n, -1), lnz(n, 0);
    for (int k = 0; k < n; ++k) {
        flag[k] = k;
        for (int p = ap.row_ptr()[k]; p < ap.row_ptr()[k + 1]; ++p) {
            int i = ap.cols()[p];
            if (i >= k) continue;
            for (; flag[i] != k; i = parent[i]) {
                if (parent[i] == -1) parent[i] = k;
                ++lnz[i];
                flag[i] = k;
            }
        }
    }
    f.lp.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) f.lp[i + 1] = f.lp[i] + lnz[i];
    f.li.assign(f.lp[n], 0);
    f.lx.assign(f.lp[n], 0.0);
    f.d.assign(n, 0.0);

    // Numeric: row-by-row sparse triangular solves along the etree.
    std::vector<double> y(n, 0.0);
    std::vector<int> pattern(n), cur(n, 0);
    std::fill(flag.begin(), flag.end(), -1);
    double diag_scale = 0.0;
    for (int k = 0; k < n; ++k) {
        int top = n;
        flag[k] = k;
        for (int p = ap.row_ptr()[k]; p < ap.row_ptr()[k + 1]; ++p) {
            int i = ap.cols()[p];
            if (i > k) continue;
            y[i] += ap.values()[p];
            int len = 0;
            for (; flag[i] != k; i = parent[i]) {
                pattern[len++] = i;
                flag[i] = k;
            }
            while (len > 0) pattern[--top] = pattern[--len];
        }
        f.d[k] = y[k];
        y[k] = 0.0;
        for (; top < n; ++top) {
            const int i = pattern[top];
            const double yi = y[i];
            y[i] = 0.0;
            const int p2 = f.lp[i] + cur[i];
            for (int p = f.lp[i]; p < p2; ++p) y[f.li[p]] -= f.lx[p] * yi;
            const double lki = yi / f.d[i];
            f.d[k] -= lki * yi;
            f.li[p2] = k;
            f.lx[p2] = lki;
            ++cur[i];
        }
        diag_scale = std::max(diag_scale, std::fabs(f.d[k]));
        const double breakdown = 1e-14 * std::max(diag_scale, 1e-300);
        if (require_spd ? !(f.d[k] > 0.0) : !(std::fabs(f.d[k]) > breakdown)) return false;
    }

    // Convert row-linked storage to per-column CSC-style access: the numeric
    // loop above already appends row indices in increasing k per column, so
    // f.lp/f.li/f.lx is a valid column-compressed L (unit diagonal implicit).
    return true;
}

long double residual_norm(const CsrMatrix& a, const std::vector<double>& x,
                          const std::vector<double>& b, std::vector<double>* r_out) {
    const int n = a.size();
    long double nrm = 0.0L;
    if (r_out) r_out->resize(n);
    for (int i = 0; i < n; ++i) {
        long double s = b[i];
        for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
            s -= static_cast<long double>(a.values()[p]) * static_cast<long double>(x[a.cols()[p]]);
        if (r_out) (*r_out)[i] = static_cast<double>(s);
        nrm += s * s;
    }
    return sqrtl(nrm);
}

double vec_norm(const std::vector<double>& v) {
    long double s = 0.0L;
    for (double x : v) s += static_cast<long double>(x) * x;
    return static_cast<double>(sqrtl(s));
}

// Direct solve + iterative refinement with long-double residuals.
bool refine_to_tolerance(const CsrMatrix& a, const LdltFactor& f, const std::vector<double>& b,
                         double tol, std::vector<double>& x, SolveStats* stats) {
    const double bnorm = vec_norm(b);
    x = f.solve(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        if (stats) stats->relative_residual = 0.0;
        return true;
    }
    std::vector<double> r;
    for (int step = 0; step < 6; ++step) {
        const double rel = static_cast<double>(residual_norm(a, x, b, &r)) / bnorm;
        if (stats) {
            stats->relative_residual = rel;
            stats->refinement_steps = step;
        }
        if (rel <= tol) return true;
        const std::vector<double> dx = f.solve(r);
        for (int i = 0; i < a.size(); ++i) x[i] += dx[i];
    }
    const double rel = static_cast<double>(residual_norm(a, x, b, nullptr)) / bnorm;
    if (stats) stats->relative_residual = rel;
    return rel <= tol;
}

std::vector<int> blocked_nd_order(const CsrMatrix& a, int leading) {
    if (leading <= 0 || leading >= a.size()) return nested_dissection_order(a);
    // Restrict the graph to each block and order independently; the leading
    // block must be eliminated first to keep the factorization pivot-safe.
    auto sub_order = [&](int lo, int hi) {
        std::vector<Triplet> trips;
        for (int i = lo; i < hi; ++i)
            for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p) {
                const int j = a.cols()[p];
                if (j >= lo && j < hi) trips.push_back({i - lo, j - lo, 1.0});
            }
        CsrMatrix sub = CsrMatrix::from_triplets(hi - lo, trips);
        return nested_dissection_order(sub);
    };
    std::vector<int> perm;
    perm.reserve(a.size());
    for (int i : sub_order(0, leading)) perm.push_back(i);
    for (int i : sub_order(leading, a.size())) perm.push_back(leading + i);
    return perm;
}

} // namespace

std::vector<double> minres(const CsrMatrix& a, const std::vector<double>& b, double tol,
                           int max_iter, SolveStats* stats) {
    const int n = a.size();
    // Symmetric diagonal (Jacobi) scaling when every diagonal is nonzero.
    std::vector<double> scale(n, 1.0);
    {
        bool ok = true;
        std::vector<double> diag(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
                if (a.cols()[p] == i) diag[i] = a.values()[p];
        for (int i = 0; i < n; ++i)
            if (diag[i] == 0.0) ok = false;
        if (ok)
            for (int i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(std::fabs(diag[i]));
    }
    std::vector<Triplet> trips;
    for (int i = 0; i < n; ++i)
        for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
            trips.push_back({i, a.cols()[p], a.values()[p] * scale[i] * scale[a.cols()[p]]});
    const CsrMatrix as = CsrMatrix::from_triplets(n, trips);
    std::vector<double> bs(n);
    for (int i = 0; i < n; ++i) bs[i] = b[i] * scale[i];

    std::vector<double> x(n, 0.0);
    const double beta1 = vec_norm(bs);
    if (beta1 == 0.0) return x;

    std::vector<double> v_prev(n, 0.0), v = bs, w0(n, 0.0), w1(n, 0.0);
    for (int i = 0; i < n; ++i) v[i] /= beta1;
    double beta = beta1, eta = beta1;
    double gamma1 = 1.0, gamma0 = 1.0, sigma1 = 0.0, sigma0 = 0.0;
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        std::vector<double> p = as.multiply(v);
        const double alpha = std::inner_product(v.begin(), v.end(), p.begin(), 0.0);
        for (int i = 0; i < n; ++i) p[i] -= alpha * v[i] + beta * v_prev[i];
        const double beta_next = vec_norm(p);

        const double delta = gamma1 * alpha - gamma0 * sigma1 * beta;
        const double rho1 = std::sqrt(delta * delta + beta_next * beta_next);
        const double rho2 = sigma1 * alpha + gamma0 * gamma1 * beta;
        const double rho3 = sigma0 * beta;
        if (rho1 == 0.0) break;
        const double gamma_next = delta / rho1;
        const double sigma_next = beta_next / rho1;

        for (int i = 0; i < n; ++i) {
            const double wn = (v[i] - rho3 * w0[i] - rho2 * w1[i]) / rho1;
            w0[i] = w1[i];
            w1[i] = wn;
            x[i] += gamma_next * eta * wn;
        }
        eta = -sigma_next * eta;

        if (beta_next == 0.0) break;
        for (int i = 0; i < n; ++i) {
            const double vn = p[i] / beta_next;
            v_prev[i] = v[i];
            v[i] = vn;
        }
        beta = beta_next;
        gamma0 = gamma1;
        gamma1 = gamma_next;
        sigma0 = sigma1;
        sigma1 = sigma_next;
        if (std::fabs(eta) / beta1 < 0.01 * tol) break;
    }
    for (int i = 0; i < n; ++i) x[i] *= scale[i];
    const double rel = static_cast<double>(residual_norm(a, x, b, nullptr)) /
                       std::max(vec_norm(b), 1e-300);
    if (stats) {
        stats->used_minres = true;
        stats->minres_iterations = it;
        stats->relative_residual = rel;
    }
    if (rel > tol)
        throw NoConvergenceError("minres: stalled at relative residual " + std::to_string(rel) +
                                 " after " + std::to_string(it) + " iterations");
    return x;
}

std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& b, SolveStats* stats,
                              const SolveOptions& opts) {
    LdltFactor f;
    if (!ldlt_factorize(a, nested_dissection_order(a), true, f))
        throw NotPositiveDefiniteError("solve_spd: nonpositive pivot in LDL^T");
    std::vector<double> x;
    if (!refine_to_tolerance(a, f, b, opts.tolerance, x, stats) && !opts.best_effort)
        throw NoConvergenceError("solve_spd: residual contract " + std::to_string(opts.tolerance) +
                                 " not met");
    return x;
}

std::vector<double> solve_symmetric_indefinite(const CsrMatrix& a, const std::vector<double>& b,
                                               const SolveOptions& opts, SolveStats* stats) {
    LdltFactor f;
    const double tol = opts.tolerance;
    if (ldlt_factorize(a, blocked_nd_order(a, opts.leading_block), false, f)) {
        std::vector<double> x;
        if (refine_to_tolerance(a, f, b, tol, x, stats) || opts.best_effort) return x;
    }
    // Pivot-free LDL^T broke down (or stalled); MINRES handles the rest.
    return minres(a, b, tol, 20 * a.size() + 100, stats);
}

} // namespace elast
