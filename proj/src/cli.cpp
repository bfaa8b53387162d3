#include "nirikshak/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "nirikshak/analysis.hpp"
#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

std::string read_file(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(std::string(what) + " file not found: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing file: " + path);
}

uint64_t parse_seed(const std::string& text, const char* source) {
    try {
        size_t consumed = 0;
        const auto value = std::stoull(text, &consumed);
        if (consumed != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError(std::string(source) + " must be an unsigned integer, got '" + text + "'");
    }
}

void check_config_keys(const Json& obj, const std::set<std::string>& allowed,
                       const std::string& where) {
    for (const auto& item : obj.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

AnalysisParams parse_analysis_params(const Json& j) {
    AnalysisParams params;
    check_config_keys(j, {"eps", "minPts", "clusterGate", "weights", "groupingOrder"},
                      "config analysis");
    if (j.contains("eps")) params.eps = j["eps"].get<double>();
    if (j.contains("minPts")) params.min_pts = j["minPts"].get<int>();
    if (j.contains("clusterGate")) params.cluster_gate = j["clusterGate"].get<size_t>();
    if (j.contains("weights")) {
        if (!j["weights"].is_array() || j["weights"].size() != params.weights.size()) {
            throw ConfigError("config analysis: weights must be an array of 5 numbers");
        }
        for (size_t i = 0; i < params.weights.size(); ++i) {
            params.weights[i] = j["weights"][i].get<double>();
        }
    }
    if (j.contains("groupingOrder")) {
        if (!j["groupingOrder"].is_array()) {
            throw ConfigError("config analysis: groupingOrder must be an array");
        }
        params.grouping_order.clear();
        for (const auto& attribute : j["groupingOrder"]) {
            params.grouping_order.push_back(attribute.get<std::string>());
        }
    }
    return params;
}

std::string escape_html(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

void hierarchy_html(const HierarchyNode& node, size_t total, std::string& out) {
    out += "<li><span class=\"label\">";
    if (node.attribute == "root") {
        out += "all failures";
    } else {
        out += escape_html(node.attribute) + " = " + escape_html(node.value);
    }
    out += "</span> <span class=\"count\">" + std::to_string(node.count) + "</span>";
    if (total > 0) {
        const double pct = 100.0 * static_cast<double>(node.count) / static_cast<double>(total);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "<div class=\"bar\"><div class=\"fill\" style=\"width:%.1f%%\"></div></div>",
                      pct);
        out += buf;
    }
    if (!node.children.empty()) {
        out += "<ul>";
        for (const auto& child : node.children) hierarchy_html(child, total, out);
        out += "</ul>";
    }
    out += "</li>";
}

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}

} // namespace

CliConfig load_cli_config(const std::string& config_path) {
    const auto text = read_file(config_path, "config");
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top-level value must be an object");
    check_config_keys(doc,
                      {"baseUrl", "resources", "steps", "iterations", "setupInstances", "seed",
                       "maxSteps", "hooks", "requestTimeoutMs", "failFast", "analysis"},
                      "config");

    CliConfig config;
    if (!doc.contains("baseUrl") || !doc["baseUrl"].is_string()) {
        throw ConfigError("config: 'baseUrl' must be a string");
    }
    config.run.base_url = doc["baseUrl"].get<std::string>();

    if (!doc.contains("resources") || !doc["resources"].is_array() || doc["resources"].empty()) {
        throw ConfigError("config: 'resources' must be a non-empty array");
    }
    const auto base_dir = std::filesystem::path(config_path).parent_path();
    const auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path.string() : (base_dir / path).string();
    };
    for (const auto& entry : doc["resources"]) {
        if (!entry.is_object() || !entry.contains("schema") || !entry.contains("endpoints")) {
            throw ConfigError("config: each resource needs 'schema' and 'endpoints' paths");
        }
        check_config_keys(entry, {"schema", "endpoints"}, "config resource");
        ResourceSetup setup;
        const auto schema_path = resolve(entry["schema"].get<std::string>());
        setup.schema = parse_resource_schema(read_file(schema_path, "schema"));
        const auto endpoints_path = resolve(entry["endpoints"].get<std::string>());
        setup.endpoints = parse_endpoints(read_file(endpoints_path, "endpoints"), setup.schema);
        config.resources.push_back(std::move(setup));
    }

    if (doc.contains("steps")) config.run.steps = doc["steps"].get<int>();
    if (doc.contains("iterations")) config.run.iterations = doc["iterations"].get<int>();
    if (doc.contains("setupInstances")) {
        config.run.setup_instances = doc["setupInstances"].get<int>();
    }
    if (doc.contains("maxSteps")) config.run.max_steps = doc["maxSteps"].get<int>();
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() || doc["seed"].get<int64_t>() < 0) {
            throw ConfigError("config: 'seed' must be a non-negative integer");
        }
        config.run.seed = doc["seed"].get<uint64_t>();
    }
    if (doc.contains("hooks")) {
        check_config_keys(doc["hooks"], {"setup", "cleanup"}, "config hooks");
        if (doc["hooks"].contains("setup")) {
            config.run.setup_hook = doc["hooks"]["setup"].get<std::string>();
        }
        if (doc["hooks"].contains("cleanup")) {
            config.run.cleanup_hook = doc["hooks"]["cleanup"].get<std::string>();
        }
    }
    if (doc.contains("requestTimeoutMs")) {
        config.run.request_timeout = std::chrono::milliseconds(doc["requestTimeoutMs"].get<int>());
    }
    if (doc.contains("failFast")) config.run.fail_fast = doc["failFast"].get<bool>();
    if (doc.contains("analysis")) config.run.analysis = parse_analysis_params(doc["analysis"]);

    config.run.validate();
    return config;
}

int cmd_run(const RunOptions& options) {
    return dispatch([&] {
        CliConfig config = load_cli_config(options.config_path);
        if (options.steps) config.run.steps = *options.steps;
        if (options.iterations) config.run.iterations = *options.iterations;
        if (options.setup_instances) config.run.setup_instances = *options.setup_instances;
        if (options.seed) {
            config.run.seed = *options.seed;
        } else if (const char* env = std::getenv("NIRIKSHAK_SEED")) {
            config.run.seed = parse_seed(env, "NIRIKSHAK_SEED");
        }
        config.run.validate();

        const auto records = run(config.run, config.resources);
        emit_log(records, options.out_path);
        const auto ratio = test_ratio(records);
        std::printf("ran %zu tests: %zu passed, %zu failed\nlog written to %s\n", ratio.total,
                    ratio.passed, ratio.failed, options.out_path.c_str());
    });
}

int cmd_analyze(const AnalyzeOptions& options) {
    return dispatch([&] {
        const auto records = parse_log(options.log_path);
        AnalysisParams params;
        if (options.eps) params.eps = *options.eps;
        if (options.min_pts) params.min_pts = *options.min_pts;
        const auto report = analyze(records, params);
        write_file(options.out_path, report_to_json(report).dump(2) + "\n");
        if (options.html_path) write_file(*options.html_path, render_html_report(report));
        if (report.skipped) {
            std::printf("no records, analysis skipped\nreport written to %s\n",
                        options.out_path.c_str());
        } else {
            std::printf("analyzed %zu records (%zu failed)\nreport written to %s\n",
                        report.ratio->total, report.ratio->failed, options.out_path.c_str());
        }
    });
}

int cmd_graph(const GraphOptions& options) {
    return dispatch([&] {
        const CliConfig config = load_cli_config(options.config_path);
        Json nodes = Json::array();
        Json edges = Json::array();
        size_t offset = 0;
        for (const auto& resource : config.resources) {
            const auto graph = build_graph(enumerate_nodes(resource.endpoints));
            const auto exported = graph_to_json(graph);
            for (const auto& node : exported["nodes"]) nodes.push_back(node);
            for (const auto& edge : exported["edges"]) {
                edges.push_back(Json::array(
                    {edge[0].get<size_t>() + offset, edge[1].get<size_t>() + offset}));
            }
            offset += graph.nodes.size();
        }
        write_file(options.out_path, Json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n");
        std::printf("graph with %zu nodes and %zu edges written to %s\n", nodes.size(),
                    edges.size(), options.out_path.c_str());
    });
}

std::string render_html_report(const AnalysisReport& report) {
    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>API Test Report</title>\n<style>\n";
    html += "body{font-family:sans-serif;margin:2rem auto;max-width:56rem;color:#222}\n";
    html += "h1,h2{font-weight:600}\n";
    html += ".ratio{display:flex;align-items:center;gap:2rem}\n";
    html += ".stats td{padding:0.15rem 0.8rem 0.15rem 0}\n";
    html += "ul.tree{list-style:none;padding-left:1.2rem}\n";
    html += "ul.tree .label{font-family:monospace}\n";
    html += "ul.tree .count{color:#666;margin-left:0.4rem}\n";
    html += ".bar{background:#eee;height:6px;width:16rem;border-radius:3px}\n";
    html += ".fill{background:#c0392b;height:6px;border-radius:3px}\n";
    html += "table.clusters{border-collapse:collapse}\n";
    html += "table.clusters td,table.clusters th{border:1px solid #ccc;padding:0.3rem "
            "0.6rem;text-align:left;vertical-align:top}\n";
    html += "code{font-size:0.85em;word-break:break-all}\n";
    html += "</style>\n</head>\n<body>\n<h1>API Test Report</h1>\n";

    if (report.skipped || !report.ratio) {
        html += "<p>No test records. Analysis skipped.</p>\n</body>\n</html>\n";
        return html;
    }

    const auto& ratio = *report.ratio;
    char buf[1024];
    html += "<h2>Pass/fail ratio</h2>\n<div class=\"ratio\">\n";
    {
        const double circumference = 2.0 * 3.14159265358979 * 45.0;
        const double failed_arc =
            circumference * static_cast<double>(ratio.failed) / static_cast<double>(ratio.total);
        std::snprintf(buf, sizeof buf,
                      "<svg width=\"120\" height=\"120\" viewBox=\"0 0 120 120\">"
                      "<circle cx=\"60\" cy=\"60\" r=\"45\" fill=\"none\" stroke=\"#27ae60\" "
                      "stroke-width=\"14\"/>"
                      "<circle cx=\"60\" cy=\"60\" r=\"45\" fill=\"none\" stroke=\"#c0392b\" "
                      "stroke-width=\"14\" stroke-dasharray=\"%.2f %.2f\" "
                      "transform=\"rotate(-90 60 60)\"/></svg>\n",
                      failed_arc, circumference - failed_arc);
        html += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<table class=\"stats\"><tr><td>total</td><td>%zu</td></tr>"
                  "<tr><td>passed</td><td>%zu</td></tr><tr><td>failed</td><td>%zu</td></tr>"
                  "<tr><td>fail ratio</td><td>%.4f</td></tr></table>\n</div>\n",
                  ratio.total, ratio.passed, ratio.failed, ratio.fail_ratio);
    html += buf;

    if (report.hierarchy) {
        html += "<h2>Failure distribution</h2>\n<ul class=\"tree\">";
        hierarchy_html(*report.hierarchy, report.hierarchy->count, html);
        html += "</ul>\n";
    }

    if (report.clusters) {
        html += "<h2>Failure clusters</h2>\n<table class=\"clusters\">\n";
        html += "<tr><th>label</th><th>size</th><th>representative</th></tr>\n";
        for (const auto& row : report.clusters->summary) {
            html += "<tr><td>";
            html += row.label == kNoiseLabel ? "noise" : std::to_string(row.label);
            html += "</td><td>" + std::to_string(row.size) + "</td><td><code>";
            html += escape_html(row.representative.dump());
            html += "</code></td></tr>\n";
        }
        html += "</table>\n";
    }

    html += "</body>\n</html>\n";
    return html;
}

} // namespace nirikshak
