// Experiment runner for the elasticity discretization benchmarks: configures
// (scheme, order, levels, lambda sweep, example), executes the runs and emits
// CSV/JSON tables with EOC and robustness summaries.

#include "elast/errors.hpp"
#include "elast/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw elast::Error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw elast::Error("cannot write " + path);
    out << content;
}

// "0..3" or a single "2"
std::pair<int, int> parse_levels(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) {
        const int l = std::stoi(text);
        return {l, l};
    }
    return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
}

std::vector<double> parse_lambdas(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<elast::Scheme> parse_schemes(const std::string& text) {
    std::vector<elast::Scheme> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto s = elast::scheme_from_name(item);
        if (!s) throw elast::ConfigError("unknown scheme '" + item + "'");
        out.push_back(*s);
    }
    return out;
}

int cmd_run(const std::string& example, const std::string& schemes, int k,
            const std::string& levels, const std::string& lambdas, double mu, double alpha0,
            const std::string& mesh_flavor, const std::string& theta, double alpha_th,
            bool stokes_limit, bool timings, int threads, bool big_meshes,
            const std::string& out_path, const std::string& json_path,
            const std::string& golden_path) {
    elast::ExperimentConfig config;
    config.example = example;
    config.schemes = parse_schemes(schemes);
    config.k = k;
    std::tie(config.level_min, config.level_max) = parse_levels(levels);
    config.lambdas = parse_lambdas(lambdas);
    config.mu = mu;
    config.alpha0 = alpha0;
    if (mesh_flavor == "uniform") {
        config.flavor = elast::MeshFlavor::Uniform;
    } else if (mesh_flavor == "bary") {
        config.flavor = elast::MeshFlavor::Barycentric;
    } else {
        throw elast::ConfigError("--mesh must be uniform or bary");
    }
    if (!theta.empty()) config.theta = elast::Expression::parse(theta);
    config.alpha_th = alpha_th;
    config.stokes_limit = stokes_limit;
    config.with_timings = timings;
    config.threads = threads;
    config.allow_big_meshes = big_meshes;

    const elast::ExperimentResult result = elast::run_experiment(config);
    const std::string csv = elast::to_csv(result.rows, timings);
    if (!out_path.empty()) {
        write_file(out_path, csv);
    } else {
        std::cout << csv;
    }
    if (!json_path.empty()) write_file(json_path, elast::to_json(result.rows, timings));
    std::cerr << result.summary;

    if (!golden_path.empty()) {
        const elast::GoldenDiff diff = elast::compare_golden_csv(csv, read_file(golden_path));
        if (!diff.pass) {
            std::cerr << "golden comparison FAILED:\n" << diff.report;
            return 1;
        }
        std::cerr << "golden comparison passed: " << golden_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elastbench: locking and gradient-robustness benchmarks for 2D linear elasticity"};
    app.require_subcommand(1);

    // run
    std::string example = "ex1", schemes = "s1", levels = "0..3", lambdas = "1,1e2,1e5";
    std::string mesh_flavor = "uniform", theta, out_path, json_path, golden_path;
    int k = 2, threads = 0;
    double mu = 1.0, alpha0 = 16.0, alpha_th = 1e-3;
    bool stokes_limit = false, timings = false, big_meshes = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment and emit a CSV table");
    run->add_option("--example", example, "ex1 | ex2 | manufactured-poly | thermo");
    run->add_option("--scheme", schemes, "comma list of m1,m2,sv,s1,s2,s3");
    run->add_option("--k", k, "polynomial order");
    run->add_option("--levels", levels, "level range, e.g. 0..3");
    run->add_option("--lambda", lambdas, "comma list of lambda values");
    run->add_option("--mu", mu, "shear parameter");
    run->add_option("--alpha0", alpha0, "penalty constant (alpha = alpha0 k^2)");
    run->add_option("--mesh", mesh_flavor, "uniform | bary");
    run->add_option("--theta", theta, "temperature expression for the thermo example");
    run->add_option("--alpha-th", alpha_th, "thermal expansion coefficient");
    run->add_flag("--stokes-limit", stokes_limit, "M2 diagnostic: drop the pressure mass block");
    run->add_flag("--timings", timings, "emit wall-clock solve times");
    run->add_option("--threads", threads, "worker threads (default: ELASTBENCH_THREADS or 1)");
    run->add_flag("--big-meshes", big_meshes, "allow levels above 4");
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_option("--json", json_path, "also write a JSON mirror");
    run->add_option("--golden", golden_path, "compare against a golden CSV");

    // compare
    std::string cmp_a, cmp_b;
    CLI::App* cmp = app.add_subcommand("compare", "compare two result CSVs cell by cell");
    cmp->add_option("actual", cmp_a)->required();
    cmp->add_option("golden", cmp_b)->required();

    // mesh dump
    int dump_level = 0;
    bool dump_bary = false;
    std::string dump_out;
    CLI::App* meshcmd = app.add_subcommand("mesh", "dump a mesh as plain text");
    meshcmd->add_option("--level", dump_level);
    meshcmd->add_flag("--bary", dump_bary);
    meshcmd->add_option("--out", dump_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(example, schemes, k, levels, lambdas, mu, alpha0, mesh_flavor, theta,
                           alpha_th, stokes_limit, timings, threads, big_meshes, out_path,
                           json_path, golden_path);
        }
        if (cmp->parsed()) {
            const elast::GoldenDiff diff =
                elast::compare_golden_csv(read_file(cmp_a), read_file(cmp_b));
            if (!diff.pass) {
                std::cerr << diff.report;
                return 1;
            }
            std::cout << "match\n";
            return 0;
        }
        if (meshcmd->parsed()) {
            elast::Mesh m = elast::build_uniform_unit_square(dump_level);
            if (dump_bary) m = elast::barycentric_refine(m);
            const std::string text = elast::dump_mesh(m);
            if (dump_out.empty()) {
                std::cout << text;
            } else {
                write_file(dump_out, text);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
