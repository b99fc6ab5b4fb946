#include "elast/runner.hpp"

#include "elast/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <thread>

namespace elast {

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int thread_count(const ExperimentConfig& config, size_t njobs) {
    int n = config.threads;
    if (n <= 0) {
        if (const char* env = std::getenv("ELASTBENCH_THREADS")) n = std::atoi(env);
        if (n <= 0) n = 1;
    }
    return std::max(1, std::min<int>(n, static_cast<int>(njobs)));
}

struct RunKey {
    size_t scheme_idx;
    double lambda;
    int level;
};

} // namespace

const char* kCsvHeader =
    "scheme,k,level,h,lambda,ndof_total,ndof_condensable,l2_err,h1semi_err,div_err,"
    "energy_err,sol_norm_1h,grad_norm,eoc_l2,eoc_h1,solve_seconds";

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.level_min < 0 || config.level_max < config.level_min)
        throw ConfigError("levels: need 0 <= min <= max");
    if (config.level_max > 4 && !config.allow_big_meshes)
        throw ConfigError("levels above 4 are expensive; pass --big-meshes to allow them");
    if (config.lambdas.empty()) throw ConfigError("need at least one lambda");
    if (config.schemes.empty()) throw ConfigError("need at least one scheme");

    // Meshes shared read-only across runs.
    std::map<int, std::shared_ptr<const Mesh>> meshes;
    for (int level = config.level_min; level <= config.level_max; ++level) {
        Mesh m = build_uniform_unit_square(level);
        if (config.flavor == MeshFlavor::Barycentric) m = barycentric_refine(m);
        meshes[level] = std::make_shared<const Mesh>(std::move(m));
    }

    std::vector<RunKey> jobs;
    for (size_t s = 0; s < config.schemes.size(); ++s)
        for (double lambda : config.lambdas)
            for (int level = config.level_min; level <= config.level_max; ++level)
                jobs.push_back({s, lambda, level});

    std::vector<ResultRow> rows(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const RunKey& key = jobs[j];
            try {
                SchemeConfig sc;
                sc.scheme = config.schemes[key.scheme_idx];
                sc.k = config.k;
                sc.mu = config.mu;
                sc.lambda = key.lambda;
                sc.alpha0 = config.alpha0;
                sc.flavor = config.flavor;
                sc.stokes_limit = config.stokes_limit;
                validate(sc);
                const Problem problem =
                    make_problem(config.example, config.mu, key.lambda, config.theta, config.alpha_th);
                const auto mesh = meshes.at(key.level);
                const DiscreteSolution sol = solve_scheme(mesh, sc, problem.forcing, problem.boundary);
                const ErrorReport rep =
                    compute_errors(sol, problem.has_exact ? problem.exact : zero_exact(), config.mu);

                ResultRow row;
                row.scheme = scheme_name(sc.scheme);
                row.k = config.k;
                row.level = key.level;
                row.h = mesh->min_edge_length();
                row.lambda = key.lambda;
                row.ndof_total = sol.stats.ndof_total;
                row.ndof_condensable = sol.stats.ndof_condensable;
                row.l2_err = rep.l2_err;
                row.h1semi_err = rep.h1semi_err;
                row.div_err = rep.div_err;
                row.energy_err = rep.energy_err;
                row.sol_norm_1h = rep.sol_norm_1h;
                row.grad_norm = rep.grad_norm;
                row.solve_seconds = sol.stats.solve_seconds;
                rows[j] = std::move(row);
            } catch (const std::exception& e) {
                errors[j] = std::string(e.what()) + " [scheme=" +
                            scheme_name(config.schemes[key.scheme_idx]) +
                            " level=" + std::to_string(key.level) +
                            " lambda=" + fmt6(key.lambda) + "]";
            }
        }
    };

    const int nthreads = thread_count(config, jobs.size());
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw Error("run failed: " + err);

    // Deterministic order: scheme (as listed), lambda, level.
    std::vector<size_t> order(jobs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (jobs[a].scheme_idx != jobs[b].scheme_idx) return jobs[a].scheme_idx < jobs[b].scheme_idx;
        if (jobs[a].lambda != jobs[b].lambda) return jobs[a].lambda < jobs[b].lambda;
        return jobs[a].level < jobs[b].level;
    });

    ExperimentResult result;
    result.rows.reserve(rows.size());
    for (size_t idx : order) result.rows.push_back(std::move(rows[idx]));

    // EOC columns per (scheme, lambda) group; rates sit on the finer level.
    for (size_t i = 1; i < result.rows.size(); ++i) {
        ResultRow& cur = result.rows[i];
        const ResultRow& prev = result.rows[i - 1];
        if (prev.scheme == cur.scheme && prev.lambda == cur.lambda &&
            prev.level + 1 == cur.level) {
            if (prev.l2_err > 0.0 && cur.l2_err > 0.0)
                cur.eoc_l2 = std::log2(prev.l2_err / cur.l2_err);
            if (prev.h1semi_err > 0.0 && cur.h1semi_err > 0.0)
                cur.eoc_h1 = std::log2(prev.h1semi_err / cur.h1semi_err);
        }
    }

    // Summary: convergence rates per (scheme, lambda), robustness per level.
    std::ostringstream sum;
    for (size_t s = 0; s < config.schemes.size(); ++s) {
        const std::string name = scheme_name(config.schemes[s]);
        sum << "[" << name << " k=" << config.k << "]\n";
        if (config.level_max > config.level_min) {
            for (double lambda : config.lambdas) {
                std::vector<double> l2s, h1s;
                for (const auto& r : result.rows)
                    if (r.scheme == name && r.lambda == lambda) {
                        l2s.push_back(r.l2_err);
                        h1s.push_back(r.h1semi_err);
                    }
                try {
                    sum << "  lambda=" << fmt6(lambda) << "  eoc_l2=" << fmt6(fitted_rate(l2s))
                        << "  eoc_h1=" << fmt6(fitted_rate(h1s)) << "\n";
                } catch (const DegenerateErrorValue&) {
                    sum << "  lambda=" << fmt6(lambda) << "  eoc: degenerate errors\n";
                }
            }
        }
        if (config.lambdas.size() >= 2) {
            // The decay-vs-plateau verdict is only meaningful for gradient
            // forcing fields, where the solution should vanish as lambda grows.
            const bool gradient_forcing = (config.example == "ex2" || config.example == "thermo");
            for (int level = config.level_min; level <= config.level_max; ++level) {
                std::vector<double> lams, grads, sols;
                for (const auto& r : result.rows)
                    if (r.scheme == name && r.level == level) {
                        lams.push_back(r.lambda);
                        grads.push_back(r.grad_norm);
                        sols.push_back(r.sol_norm_1h);
                    }
                const RobustnessReport rg = robustness_metrics(lams, grads);
                const RobustnessReport rs = robustness_metrics(lams, sols);
                sum << "  L=" << level << "  slope(grad_norm)=" << fmt6(rg.slope)
                    << "  slope(sol_norm_1h)=" << fmt6(rs.slope)
                    << "  plateau(grad_norm)=" << fmt6(rg.plateau);
                if (gradient_forcing) {
                    sum << "  [" << (rg.slope <= -0.9  ? "gradient-robust decay"
                                     : rg.slope >= -0.3 ? "plateau (not gradient-robust)"
                                                        : "intermediate")
                        << "]";
                }
                sum << "\n";
            }
        }
    }
    result.summary = sum.str();
    return result;
}

std::string to_csv(const std::vector<ResultRow>& rows, bool with_timings) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& r : rows) {
        os << r.scheme << "," << r.k << "," << r.level << "," << fmt6(r.h) << ","
           << fmt6(r.lambda) << "," << r.ndof_total << "," << r.ndof_condensable << ","
           << fmt6(r.l2_err) << "," << fmt6(r.h1semi_err) << "," << fmt6(r.div_err) << ","
           << fmt6(r.energy_err) << "," << fmt6(r.sol_norm_1h) << "," << fmt6(r.grad_norm) << ",";
        if (r.eoc_l2) os << fmt6(*r.eoc_l2);
        os << ",";
        if (r.eoc_h1) os << fmt6(*r.eoc_h1);
        os << "," << (with_timings ? fmt6(r.solve_seconds) : std::string("0")) << "\n";
    }
    return os.str();
}

std::string to_json(const std::vector<ResultRow>& rows, bool with_timings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o;
        o["scheme"] = r.scheme;
        o["k"] = r.k;
        o["level"] = r.level;
        o["h"] = r.h;
        o["lambda"] = r.lambda;
        o["ndof_total"] = r.ndof_total;
        o["ndof_condensable"] = r.ndof_condensable;
        o["l2_err"] = r.l2_err;
        o["h1semi_err"] = r.h1semi_err;
        o["div_err"] = r.div_err;
        o["energy_err"] = r.energy_err;
        o["sol_norm_1h"] = r.sol_norm_1h;
        o["grad_norm"] = r.grad_norm;
        if (r.eoc_l2) o["eoc_l2"] = *r.eoc_l2;
        if (r.eoc_h1) o["eoc_h1"] = *r.eoc_h1;
        o["solve_seconds"] = with_timings ? r.solve_seconds : 0.0;
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");
        out.push_back(std::move(cells));
    }
    return out;
}

} // namespace

GoldenDiff compare_golden_csv(const std::string& actual_csv, const std::string& golden_csv) {
    const auto actual = parse_csv(actual_csv);
    const auto golden = parse_csv(golden_csv);
    if (actual.empty() || golden.empty())
        throw SchemaMismatchError("compare_golden: empty table");
    if (actual[0] != golden[0]) throw SchemaMismatchError("compare_golden: header mismatch");
    if (actual.size() != golden.size())
        throw SchemaMismatchError("compare_golden: row count mismatch (" +
                                  std::to_string(actual.size() - 1) + " vs " +
                                  std::to_string(golden.size() - 1) + ")");
    const std::vector<std::string> header = actual[0];
    GoldenDiff diff;
    std::ostringstream rep;
    for (size_t r = 1; r < actual.size(); ++r) {
        if (actual[r].size() != header.size() || golden[r].size() != header.size())
            throw SchemaMismatchError("compare_golden: ragged row " + std::to_string(r));
        for (size_t c = 0; c < header.size(); ++c) {
            const std::string& col = header[c];
            const std::string& av = actual[r][c];
            const std::string& gv = golden[r][c];
            if (col == "solve_seconds") continue;
            const bool exact = (col == "scheme" || col == "k" || col == "level" ||
                                col == "ndof_total" || col == "ndof_condensable");
            bool ok;
            if (exact || av.empty() || gv.empty()) {
                ok = (av == gv);
            } else {
                const double a = std::strtod(av.c_str(), nullptr);
                const double g = std::strtod(gv.c_str(), nullptr);
                ok = std::fabs(a - g) <= 1e-6 * std::max(std::fabs(g), 1e-300) ||
                     std::fabs(a - g) <= 1e-12;
            }
            if (!ok) {
                diff.pass = false;
                rep << "row " << r << " col " << col << ": actual=" << av << " golden=" << gv
                    << "\n";
            }
        }
    }
    diff.report = rep.str();
    return diff;
}

} // namespace elast
