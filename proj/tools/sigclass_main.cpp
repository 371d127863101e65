// Command-line front end: classify sample files, run the exhaustive oracle,
// check optimality certificates, size grids, evaluate tail and coding bounds,
// and execute experiment plans.  Standard output carries data; progress and
// warnings go to standard error.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigclass/core.hpp"
#include "sigclass/errors.hpp"
#include "sigclass/experiments.hpp"
#include "sigclass/io.hpp"
#include "sigclass/objective.hpp"
#include "sigclass/optimizer.hpp"
#include "sigclass/types_method.hpp"

namespace {

struct GridConstants {
    double c = 1.0;
    double zeta = 0.1;
    double eta = 0.2;
};

GridConstants parse_constants(const std::string& text) {
    double c = 0.0;
    double zeta = 0.0;
    double eta = 0.0;
    char extra = '\0';
    const int got = std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &c, &zeta, &eta, &extra);
    if (got != 3) throw sigclass::ParseError("--constants expects 'c,zeta,eta', got '" + text + "'");
    return {c, zeta, eta};
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sigclass::ParseError("cannot open '" + path + "'");
    return nlohmann::json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw sigclass::Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw sigclass::Error("write failed for '" + path + "'");
}

void attach_metadata(nlohmann::json& j) {
    const std::time_t now = std::time(nullptr);
    char buf[32] = {0};
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["metadata"] = {{"generated_at", buf}};
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ClassifyArgs {
    std::string samples_path;
    std::string method = "fixed_point";
    std::string out_prefix;
    sigclass::OptimizerConfig cfg;
    double certify_tol = 1e-9;
    bool metadata = false;
};

void run_classify(const ClassifyArgs& a) {
    const sigclass::SampleSet samples = sigclass::read_samples_file(a.samples_path);
    const sigclass::Method method = a.method == "soft_descent" ? sigclass::Method::soft_descent
                                                               : sigclass::Method::fixed_point;
    const sigclass::Solution sol = sigclass::multi_start(samples, a.cfg, method);
    const sigclass::CertificateReport report = sigclass::certify(samples, sol, a.certify_tol);

    nlohmann::json j = sol;
    j["certificate"] = report;
    if (a.metadata) attach_metadata(j);
    const std::string text = dump(j);
    std::cout << text;

    if (!a.out_prefix.empty()) {
        write_text_file(a.out_prefix + ".json", text);
        std::ostringstream members;
        sigclass::write_memberships_csv(members, sol.memberships);
        write_text_file(a.out_prefix + ".memberships.csv", members.str());
        std::ostringstream trace;
        sigclass::write_trace_csv(trace, sol.trace);
        write_text_file(a.out_prefix + ".trace.csv", trace.str());
    }
}

struct OracleArgs {
    std::string samples_path;
    std::string out_prefix;
    double variance_floor = 1e-6;
    bool metadata = false;
};

void run_oracle(const OracleArgs& a) {
    const sigclass::SampleSet samples = sigclass::read_samples_file(a.samples_path);
    const sigclass::Solution sol = sigclass::exhaustive_oracle(samples, a.variance_floor);
    nlohmann::json j = sol;
    if (a.metadata) attach_metadata(j);
    const std::string text = dump(j);
    std::cout << text;
    if (!a.out_prefix.empty()) write_text_file(a.out_prefix + ".json", text);
}

struct CertifyArgs {
    std::string samples_path;
    std::string solution_path;
    double tol = 1e-9;
};

void run_certify(const CertifyArgs& a) {
    const sigclass::SampleSet samples = sigclass::read_samples_file(a.samples_path);
    const sigclass::Solution sol = load_json_file(a.solution_path).get<sigclass::Solution>();
    const sigclass::CertificateReport report = sigclass::certify(samples, sol, a.tol);
    std::cout << dump(nlohmann::json(report));
}

struct GridArgs {
    std::int64_t n = 0;
    std::string constants = "1,0.1,0.2";
};

void run_grid(const GridArgs& a) {
    const GridConstants k = parse_constants(a.constants);
    const sigclass::GridSpec grid = sigclass::build_grid(a.n, k.c, k.zeta, k.eta);
    std::cout << dump(nlohmann::json(grid));
}

struct BoundsArgs {
    std::string theta_path;
    std::int64_t n = 0;
    std::string constants = "1,0.1,0.2";
};

void run_bounds(const BoundsArgs& a) {
    const auto theta = load_json_file(a.theta_path).get<sigclass::MixtureParams>();
    sigclass::validate_generative(theta);
    const GridConstants k = parse_constants(a.constants);
    const sigclass::GridSpec grid = sigclass::build_grid(a.n, k.c, k.zeta, k.eta);
    const nlohmann::json j{{"m_bound", grid.m_bound},
                           {"n_bins", grid.n_bins},
                           {"bin_width", grid.bin_width},
                           {"outlier_bound", sigclass::outlier_bound(theta, grid)},
                           {"cross_entropy_rhs", sigclass::cross_entropy_rhs(theta, grid)}};
    std::cout << dump(j);
}

struct ExperimentArgs {
    std::string plan_path;
    std::string out_prefix = "experiment";
    int threads = 0;
    bool metadata = false;
};

void run_experiment(const ExperimentArgs& a) {
    const sigclass::PlanFile pf = sigclass::read_plan_file_path(a.plan_path);
    const int threads = resolve_threads(a.threads);
    const auto progress = [](std::int64_t n) { std::cerr << "n=" << n << " complete" << std::endl; };

    nlohmann::json summary;
    const std::vector<sigclass::TrialRecord>* records = nullptr;
    std::ostringstream plot;

    sigclass::ConsistencyResult consistency;
    sigclass::CoverageResult coverage;
    sigclass::ExponentResult exponent;
    if (pf.mode == "consistency") {
        consistency = sigclass::run_consistency(pf.plan, threads, progress);
        summary = consistency;
        records = &consistency.records;
        sigclass::write_plot_csv(plot, consistency);
    } else if (pf.mode == "coverage") {
        coverage = sigclass::run_kl_coverage(pf.plan, pf.epsilon, threads, progress);
        summary = coverage;
        records = &coverage.records;
        sigclass::write_plot_csv(plot, coverage);
    } else {
        exponent = sigclass::run_exponent(pf.plan, threads, pf.grid_resolution, progress);
        summary = exponent;
        records = nullptr;
        sigclass::write_plot_csv(plot, exponent);
    }

    if (a.metadata) attach_metadata(summary);
    const std::string text = dump(summary);
    std::cout << text;

    write_text_file(a.out_prefix + ".summary.json", text);
    write_text_file(a.out_prefix + ".plot.csv", plot.str());
    std::ostringstream trials;
    if (records != nullptr) {
        sigclass::write_trials_csv(trials, *records);
    } else {
        // Exponent runs keep only per-N tallies; emit the header so the
        // artifact set is uniform across modes.
        sigclass::write_trials_csv(trials, {});
    }
    write_text_file(a.out_prefix + ".trials.csv", trials.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind two-class signal classification by compression-gain minimization"};
    app.require_subcommand(1);

    ClassifyArgs classify_args;
    CLI::App* classify = app.add_subcommand("classify", "Fit memberships to a sample file");
    classify->add_option("samples", classify_args.samples_path, "sample file, one real per line")
        ->required();
    classify->add_option("--seed", classify_args.cfg.seed, "restart seed");
    classify->add_option("--restarts", classify_args.cfg.restarts, "number of restarts");
    classify->add_option("--floor", classify_args.cfg.variance_floor, "variance floor");
    classify->add_option("--tol", classify_args.cfg.tol_objective, "objective tolerance");
    classify->add_option("--max-iters", classify_args.cfg.max_iters, "iteration cap");
    classify->add_option("--step", classify_args.cfg.step_size, "initial descent step");
    classify
        ->add_option("--method", classify_args.method, "fixed_point or soft_descent")
        ->check(CLI::IsMember({"fixed_point", "soft_descent"}));
    classify->add_option("--certify-tol", classify_args.certify_tol, "certificate tolerance");
    classify->add_option("--out", classify_args.out_prefix,
                         "prefix for .json/.memberships.csv/.trace.csv");
    classify->add_flag("--metadata", classify_args.metadata, "include a timestamp block");
    classify->callback([&] { run_classify(classify_args); });

    OracleArgs oracle_args;
    CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive global optimum (N <= 20)");
    oracle->add_option("samples", oracle_args.samples_path, "sample file")->required();
    oracle->add_option("--floor", oracle_args.variance_floor, "variance floor");
    oracle->add_option("--out", oracle_args.out_prefix, "prefix for .json");
    oracle->add_flag("--metadata", oracle_args.metadata, "include a timestamp block");
    oracle->callback([&] { run_oracle(oracle_args); });

    CertifyArgs certify_args;
    CLI::App* certify = app.add_subcommand("certify", "Check a solution's optimality certificate");
    certify->add_option("samples", certify_args.samples_path, "sample file")->required();
    certify->add_option("solution", certify_args.solution_path, "solution JSON")->required();
    certify->add_option("--tol", certify_args.tol, "residual and margin tolerance");
    certify->callback([&] { run_certify(certify_args); });

    GridArgs grid_args;
    CLI::App* grid = app.add_subcommand("grid", "Print the discretization grid for N samples");
    grid->add_option("--n", grid_args.n, "sample count")->required();
    grid->add_option("--constants", grid_args.constants, "c,zeta,eta");
    grid->callback([&] { run_grid(grid_args); });

    BoundsArgs bounds_args;
    CLI::App* bounds =
        app.add_subcommand("bounds", "Evaluate the tail bound and coding bound for parameters");
    bounds->add_option("theta", bounds_args.theta_path, "mixture parameter JSON")->required();
    bounds->add_option("--n", bounds_args.n, "sample count")->required();
    bounds->add_option("--constants", bounds_args.constants, "c,zeta,eta");
    bounds->callback([&] { run_bounds(bounds_args); });

    ExperimentArgs experiment_args;
    CLI::App* experiment = app.add_subcommand("experiment", "Run an experiment plan file");
    experiment->add_option("plan", experiment_args.plan_path, "plan file (key = value)")
        ->required();
    experiment->add_option("--threads", experiment_args.threads,
                           "worker cap (0 = hardware concurrency)");
    experiment->add_option("--out", experiment_args.out_prefix,
                           "prefix for .trials.csv/.summary.json/.plot.csv");
    experiment->add_flag("--metadata", experiment_args.metadata, "include a timestamp block");
    experiment->callback([&] { run_experiment(experiment_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and friends exit 0; actual command line mistakes map to the
        // same code as every other bad input instead of CLI11's internal ones
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const sigclass::TooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const sigclass::AllRestartsCollapsed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const sigclass::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sigclass::EmptySampleSet& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sigclass::NonFiniteSample& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sigclass::BadConstants& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const sigclass::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
