#pragma once

#include "elast/problems.hpp"

#include <optional>
#include <string>
#include <vector>

namespace elast {

struct ExperimentConfig {
    std::string example = "ex1";
    std::vector<Scheme> schemes = {Scheme::S1};
    int k = 2;
    int level_min = 0;
    int level_max = 3;
    std::vector<double> lambdas = {1.0, 1e2, 1e5};
    double mu = 1.0;
    double alpha0 = 16.0;
    MeshFlavor flavor = MeshFlavor::Uniform;
    std::optional<Expression> theta;
    double alpha_th = 1e-3;
    bool stokes_limit = false;
    bool with_timings = false; // report wall times (breaks byte-identical reruns)
    int threads = 0;           // 0: ELASTBENCH_THREADS env var, else 1
    bool allow_big_meshes = false;
};

struct ResultRow {
    std::string scheme;
    int k = 0;
    int level = 0;
    double h = 0.0;
    double lambda = 0.0;
    long ndof_total = 0;
    long ndof_condensable = 0;
    double l2_err = 0.0;
    double h1semi_err = 0.0;
    double div_err = 0.0;
    double energy_err = 0.0;
    double sol_norm_1h = 0.0;
    double grad_norm = 0.0;
    std::optional<double> eoc_l2;
    std::optional<double> eoc_h1;
    double solve_seconds = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string summary; // EOC and robustness digest, one block per scheme
};

// Runs every (scheme, level, lambda) combination; rows come back in a fixed
// deterministic order regardless of the worker pool schedule.
ExperimentResult run_experiment(const ExperimentConfig& config);

extern const char* kCsvHeader;
std::string to_csv(const std::vector<ResultRow>& rows, bool with_timings);
std::string to_json(const std::vector<ResultRow>& rows, bool with_timings);

struct GoldenDiff {
    bool pass = true;
    std::string report;
};

// Cell-by-cell comparison: exact on identity/count columns, relative
// tolerance 1e-6 on measured values; solve_seconds is ignored.
// Throws SchemaMismatchError when headers or shapes differ.
GoldenDiff compare_golden_csv(const std::string& actual_csv, const std::string& golden_csv);

} // namespace elast
