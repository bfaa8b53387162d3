#include "nirikshak/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "nirikshak/errors.hpp"
#include "nirikshak/runner.hpp"

namespace nirikshak {

namespace {

const std::map<std::string, std::function<std::string(const TestRecord&)>>& attribute_table() {
    static const std::map<std::string, std::function<std::string(const TestRecord&)>> table = {
        {"outcome", [](const TestRecord& r) { return to_string(r.outcome); }},
        {"resource", [](const TestRecord& r) { return r.resource; }},
        {"method", [](const TestRecord& r) { return to_string(r.method); }},
        {"methodIndex", [](const TestRecord& r) { return std::to_string(r.method_index); }},
        {"outcomeCase", [](const TestRecord& r) { return to_string(r.outcome_case); }},
        {"url", [](const TestRecord& r) { return r.url; }},
        {"iteration", [](const TestRecord& r) { return std::to_string(r.iteration); }},
        {"errorMessage", [](const TestRecord& r) { return r.error_message; }},
        {"walkId", [](const TestRecord& r) { return std::to_string(r.walk_id); }},
        {"stepIndex", [](const TestRecord& r) { return std::to_string(r.step_index); }},
    };
    return table;
}

std::vector<std::string> url_segments(const std::string& url) {
    std::string path = url;
    const auto query = path.find_first_of("?#");
    if (query != std::string::npos) path.resize(query);
    std::vector<std::string> segments;
    std::string current;
    for (const char c : path) {
        if (c == '/') {
            if (!current.empty()) segments.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) segments.push_back(std::move(current));
    return segments;
}

bool is_hex_span(const std::string& s, size_t from, size_t count) {
    for (size_t i = from; i < from + count; ++i) {
        if (!std::isxdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

bool looks_like_id(const std::string& segment) {
    if (segment.empty()) return false;
    const bool digits = std::all_of(segment.begin(), segment.end(), [](unsigned char c) {
        return std::isdigit(c) != 0;
    });
    if (digits) return true;
    if (segment.size() == 36 && segment[8] == '-' && segment[13] == '-' && segment[18] == '-' &&
        segment[23] == '-') {
        return is_hex_span(segment, 0, 8) && is_hex_span(segment, 9, 4) &&
               is_hex_span(segment, 14, 4) && is_hex_span(segment, 19, 4) &&
               is_hex_span(segment, 24, 12);
    }
    return false;
}

std::set<std::string> tokens(const std::string& s) {
    std::set<std::string> out;
    std::string current;
    for (const char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) out.insert(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) out.insert(std::move(current));
    return out;
}

std::vector<HierarchyNode> group_level(const std::vector<const TestRecord*>& records,
                                       const std::vector<std::string>& order, size_t depth) {
    if (depth == order.size()) return {};
    const auto& value_of = attribute_table().at(order[depth]);
    std::map<std::string, std::vector<const TestRecord*>> buckets;
    for (const TestRecord* record : records) buckets[value_of(*record)].push_back(record);

    std::vector<HierarchyNode> children;
    for (const auto& [value, bucket] : buckets) {
        HierarchyNode node;
        node.attribute = order[depth];
        node.value = value;
        node.count = bucket.size();
        node.children = group_level(bucket, order, depth + 1);
        children.push_back(std::move(node));
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const HierarchyNode& a, const HierarchyNode& b) {
                         if (a.count != b.count) return a.count > b.count;
                         return a.value < b.value;
                     });
    return children;
}

std::vector<size_t> region_query(const std::vector<TestRecord>& records, size_t center,
                                 const AnalysisParams& params) {
    std::vector<size_t> neighbors;
    for (size_t j = 0; j < records.size(); ++j) {
        if (combined_distance(records[center], records[j], params.weights) <= params.eps) {
            neighbors.push_back(j);
        }
    }
    return neighbors;
}

Json hierarchy_to_json(const HierarchyNode& node) {
    Json children = Json::array();
    for (const auto& child : node.children) children.push_back(hierarchy_to_json(child));
    return Json{
        {"attribute", node.attribute},
        {"value", node.value},
        {"count", node.count},
        {"children", children},
    };
}

Json params_to_json(const AnalysisParams& params) {
    return Json{
        {"eps", params.eps},
        {"minPts", params.min_pts},
        {"clusterGate", params.cluster_gate},
        {"weights", params.weights},
        {"groupingOrder", params.grouping_order},
    };
}

} // namespace

void AnalysisParams::validate() const {
    if (!(eps > 0.0) || eps > 1.0) {
        throw ConfigError("eps must be in (0, 1], got " + std::to_string(eps));
    }
    if (min_pts < 1) {
        throw ConfigError("minPts must be at least 1, got " + std::to_string(min_pts));
    }
    double sum = 0.0;
    for (const double w : weights) {
        if (w < 0.0) throw ConfigError("weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("weights must sum to 1, got " + std::to_string(sum));
    }
    if (grouping_order.empty()) throw ConfigError("groupingOrder must not be empty");
    for (const auto& attribute : grouping_order) {
        if (attribute_table().count(attribute) == 0) {
            throw ConfigError("unknown grouping attribute '" + attribute + "'");
        }
    }
}

RatioSummary test_ratio(const std::vector<TestRecord>& records) {
    RatioSummary summary;
    summary.total = records.size();
    for (const auto& record : records) {
        if (record.outcome == TestOutcome::Pass) {
            ++summary.passed;
        } else {
            ++summary.failed;
        }
    }
    if (summary.total > 0) {
        summary.fail_ratio =
            static_cast<double>(summary.failed) / static_cast<double>(summary.total);
    }
    return summary;
}

HierarchyNode hierarchical_grouping(const std::vector<TestRecord>& failed_records,
                                    const std::vector<std::string>& order) {
    for (const auto& attribute : order) {
        if (attribute_table().count(attribute) == 0) {
            throw ConfigError("unknown grouping attribute '" + attribute + "'");
        }
    }
    std::vector<const TestRecord*> pointers;
    pointers.reserve(failed_records.size());
    for (const auto& record : failed_records) pointers.push_back(&record);

    HierarchyNode root;
    root.attribute = "root";
    root.value = "";
    root.count = failed_records.size();
    root.children = group_level(pointers, order, 0);
    return root;
}

double d_outcome(const TestRecord& a, const TestRecord& b) {
    return a.outcome == b.outcome ? 0.0 : 1.0;
}

double d_method(const TestRecord& a, const TestRecord& b) {
    if (a.method != b.method) return 1.0;
    return a.method_index == b.method_index ? 0.0 : 0.5;
}

double d_resource(const TestRecord& a, const TestRecord& b) {
    return a.resource == b.resource ? 0.0 : 1.0;
}

double d_url(const TestRecord& a, const TestRecord& b) {
    const auto sa = url_segments(normalize_url(a.url));
    const auto sb = url_segments(normalize_url(b.url));
    const size_t longer = std::max(sa.size(), sb.size());
    if (longer == 0) return 0.0;
    size_t differing = 0;
    for (size_t i = 0; i < longer; ++i) {
        if (i >= sa.size() || i >= sb.size() || sa[i] != sb[i]) ++differing;
    }
    return static_cast<double>(differing) / static_cast<double>(longer);
}

double d_error(const TestRecord& a, const TestRecord& b) {
    const auto ta = tokens(a.error_message);
    const auto tb = tokens(b.error_message);
    if (ta.empty() && tb.empty()) return 0.0;
    size_t intersection = 0;
    for (const auto& t : ta) intersection += tb.count(t);
    const size_t unions = ta.size() + tb.size() - intersection;
    return 1.0 - static_cast<double>(intersection) / static_cast<double>(unions);
}

double combined_distance(const TestRecord& a, const TestRecord& b,
                         const std::array<double, 5>& weights) {
    return weights[0] * d_outcome(a, b) + weights[1] * d_method(a, b) +
           weights[2] * d_resource(a, b) + weights[3] * d_url(a, b) + weights[4] * d_error(a, b);
}

std::string normalize_url(const std::string& url) {
    std::string path = url;
    const auto query = path.find_first_of("?#");
    if (query != std::string::npos) path.resize(query);
    std::string out;
    for (const auto& segment : url_segments(path)) {
        out += '/';
        out += looks_like_id(segment) ? "{resource:id}" : segment;
    }
    return out.empty() ? "/" : out;
}

std::vector<int> dbscan(const std::vector<TestRecord>& records, const AnalysisParams& params) {
    constexpr int kUnvisited = -2;
    const size_t n = records.size();
    std::vector<int> labels(n, kUnvisited);
    int next_label = 0;

    for (size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        const auto seed_neighbors = region_query(records, i, params);
        if (seed_neighbors.size() < static_cast<size_t>(params.min_pts)) {
            labels[i] = kNoiseLabel;
            continue;
        }
        const int label = next_label++;
        labels[i] = label;
        std::deque<size_t> frontier(seed_neighbors.begin(), seed_neighbors.end());
        while (!frontier.empty()) {
            const size_t j = frontier.front();
            frontier.pop_front();
            if (labels[j] == kNoiseLabel) labels[j] = label; // border point
            if (labels[j] != kUnvisited) continue;
            labels[j] = label;
            const auto neighbors = region_query(records, j, params);
            if (neighbors.size() >= static_cast<size_t>(params.min_pts)) {
                for (const size_t k : neighbors) {
                    if (labels[k] == kUnvisited || labels[k] == kNoiseLabel) {
                        frontier.push_back(k);
                    }
                }
            }
        }
    }
    return labels;
}

AnalysisReport analyze(const std::vector<TestRecord>& records, const AnalysisParams& params) {
    params.validate();
    AnalysisReport report;
    report.params = params;
    if (records.empty()) {
        report.skipped = true;
        return report;
    }
    report.ratio = test_ratio(records);

    std::vector<TestRecord> failed;
    std::vector<size_t> failed_indices;
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].outcome == TestOutcome::Fail) {
            failed.push_back(records[i]);
            failed_indices.push_back(i);
        }
    }
    if (failed.empty()) return report;
    report.hierarchy = hierarchical_grouping(failed, params.grouping_order);

    if (failed.size() > params.cluster_gate) {
        const auto labels = dbscan(failed, params);
        ClusterResult result;
        std::map<int, ClusterSummaryRow> rows;
        for (size_t k = 0; k < failed.size(); ++k) {
            result.assignments.push_back({failed_indices[k], labels[k]});
            auto [it, inserted] = rows.try_emplace(labels[k]);
            if (inserted) {
                it->second.label = labels[k];
                it->second.representative = record_to_json(failed[k]);
            }
            ++it->second.size;
        }
        for (auto& [label, row] : rows) {
            if (label != kNoiseLabel) result.summary.push_back(std::move(row));
        }
        if (rows.count(kNoiseLabel)) result.summary.push_back(std::move(rows[kNoiseLabel]));
        report.clusters = std::move(result);
    }
    return report;
}

Json report_to_json(const AnalysisReport& report) {
    Json out;
    out["skipped"] = report.skipped;
    out["params"] = params_to_json(report.params);
    if (report.ratio) {
        out["ratio"] = Json{
            {"total", report.ratio->total},
            {"passed", report.ratio->passed},
            {"failed", report.ratio->failed},
            {"failRatio", report.ratio->fail_ratio},
        };
    } else {
        out["ratio"] = nullptr;
    }
    out["hierarchy"] = report.hierarchy ? hierarchy_to_json(*report.hierarchy) : Json(nullptr);
    if (report.clusters) {
        Json assignments = Json::array();
        for (const auto& assignment : report.clusters->assignments) {
            assignments.push_back(Json{
                {"recordIndex", assignment.record_index},
                {"label", assignment.label},
            });
        }
        Json summary = Json::array();
        for (const auto& row : report.clusters->summary) {
            summary.push_back(Json{
                {"label", row.label},
                {"size", row.size},
                {"representative", row.representative},
            });
        }
        out["clusters"] = Json{
            {"params",
             Json{{"eps", report.params.eps},
                  {"minPts", report.params.min_pts},
                  {"weights", report.params.weights}}},
            {"assignments", assignments},
            {"summary", summary},
        };
    } else {
        out["clusters"] = nullptr;
    }
    return out;
}

} // namespace nirikshak
