#include <CLI11.hpp>

#include "nirikshak/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nirikshak: stateful REST API test engine"};
    app.require_subcommand(1);

    nirikshak::RunOptions run_options;
    uint64_t seed = 0;
    int steps = 0;
    int iterations = 0;
    int setup_instances = 0;
    auto* run = app.add_subcommand("run", "execute the test engine against the configured API");
    run->add_option("--config", run_options.config_path, "engine configuration file")
        ->required();
    run->add_option("--out", run_options.out_path, "JSONL log output path")->required();
    auto* seed_opt = run->add_option("--seed", seed, "random seed (overrides NIRIKSHAK_SEED)");
    auto* steps_opt = run->add_option("--steps", steps, "walk vertex count");
    auto* iterations_opt = run->add_option("--iterations", iterations, "whole-process repetitions");
    auto* setup_opt =
        run->add_option("--setup-instances", setup_instances, "resource pool size per iteration");

    nirikshak::AnalyzeOptions analyze_options;
    double eps = 0.0;
    int min_pts = 0;
    std::string html_path;
    auto* analyze = app.add_subcommand("analyze", "analyze a JSONL log into a report");
    analyze->add_option("--log", analyze_options.log_path, "JSONL log input path")->required();
    analyze->add_option("--out", analyze_options.out_path, "JSON report output path")->required();
    auto* html_opt = analyze->add_option("--html", html_path, "optional HTML report output path");
    auto* eps_opt = analyze->add_option("--eps", eps, "DBSCAN neighborhood radius");
    auto* min_pts_opt = analyze->add_option("--min-pts", min_pts, "DBSCAN core point threshold");

    nirikshak::GraphOptions graph_options;
    auto* graph = app.add_subcommand("graph", "export the scenario graph as JSON");
    graph->add_option("--config", graph_options.config_path, "engine configuration file")
        ->required();
    graph->add_option("--out", graph_options.out_path, "graph JSON output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? nirikshak::kExitOk : nirikshak::kExitConfig;
    }

    if (run->parsed()) {
        if (seed_opt->count() > 0) run_options.seed = seed;
        if (steps_opt->count() > 0) run_options.steps = steps;
        if (iterations_opt->count() > 0) run_options.iterations = iterations;
        if (setup_opt->count() > 0) run_options.setup_instances = setup_instances;
        return nirikshak::cmd_run(run_options);
    }
    if (analyze->parsed()) {
        if (html_opt->count() > 0) analyze_options.html_path = html_path;
        if (eps_opt->count() > 0) analyze_options.eps = eps;
        if (min_pts_opt->count() > 0) analyze_options.min_pts = min_pts;
        return nirikshak::cmd_analyze(analyze_options);
    }
    return nirikshak::cmd_graph(graph_options);
}
