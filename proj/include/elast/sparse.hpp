#pragma once

#include <vector>

namespace elast {

struct Triplet {
    int row;
    int col;
    double value;
};

// Compressed sparse row matrix with sorted, unique column indices per row.
class CsrMatrix {
public:
    CsrMatrix() = default;
    // Duplicate triplets are summed.
    static CsrMatrix from_triplets(int n, const std::vector<Triplet>& triplets);

    int size() const { return n_; }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& cols() const { return cols_; }
    const std::vector<double>& values() const { return values_; }

    std::vector<double> multiply(const std::vector<double>& x) const;
    double symmetry_defect() const; // max |A - A^T| entry
    double max_abs() const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> values_;
};

struct SolveStats {
    double relative_residual = 0.0;
    int refinement_steps = 0;
    bool used_minres = false;
    int minres_iterations = 0;
};

struct SolveOptions {
    // Eliminate this many leading unknowns first (keeps a symmetric positive
    // definite leading block ahead of a saddle-point trailing block).
    int leading_block = 0;
    double tolerance = 1e-10;
    // Return the refined solution with its achieved residual in `stats`
    // instead of throwing NoConvergence when refinement stagnates above the
    // tolerance (used for lambda ~ 1e8 systems whose attainable double
    // precision residual floor sits above it).
    bool best_effort = false;
};

// Fill-reducing ordering: recursive graph bisection with BFS level-set
// separators. Returns perm with perm[i] = original index of position i.
std::vector<int> nested_dissection_order(const CsrMatrix& a);

// Direct solve via up-looking sparse LDL^T with diagonal equilibration and
// iterative refinement. SPD path throws NotPositiveDefiniteError when a pivot
// is nonpositive; the indefinite path falls back to MINRES on pivot
// breakdown. Both verify the residual contract a posteriori.
std::vector<double> solve_spd(const CsrMatrix& a, const std::vector<double>& b,
                              SolveStats* stats = nullptr, const SolveOptions& opts = {});
std::vector<double> solve_symmetric_indefinite(const CsrMatrix& a, const std::vector<double>& b,
                                               const SolveOptions& opts = {},
                                               SolveStats* stats = nullptr);

// MINRES with (optional) diagonal preconditioning; used as a fallback and
// directly testable.
std::vector<double> minres(const CsrMatrix& a, const std::vector<double>& b, double tol,
                           int max_iter, SolveStats* stats = nullptr);

} // namespace elast
