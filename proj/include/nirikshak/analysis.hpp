#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "nirikshak/runner_types.hpp"

namespace nirikshak {

struct RatioSummary {
    size_t total = 0;
    size_t passed = 0;
    size_t failed = 0;
    double fail_ratio = 0.0;
};

/// One level of the failure-distribution tree. Internal counts equal the
/// sum of their children; leaf counts sum to the failed total.
struct HierarchyNode {
    std::string attribute;
    std::string value;
    size_t count = 0;
    std::vector<HierarchyNode> children;
};

inline constexpr int kNoiseLabel = -1;

struct ClusterAssignment {
    size_t record_index = 0; // index into the full log
    int label = kNoiseLabel;
};

struct AnalysisParams {
    double eps = 0.4;
    int min_pts = 7;
    size_t cluster_gate = 100;
    /// Weighted-mean coefficients in attribute order:
    /// outcome, method, resource, url, error message.
    std::array<double, 5> weights{0.2, 0.2, 0.2, 0.2, 0.2};
    std::vector<std::string> grouping_order{"resource", "method", "outcomeCase", "outcome"};

    /// Throws ConfigError when eps/min_pts/weights leave their ranges.
    void validate() const;
};

struct ClusterSummaryRow {
    int label = 0;
    size_t size = 0;
    Json representative;
};

struct ClusterResult {
    std::vector<ClusterAssignment> assignments;
    std::vector<ClusterSummaryRow> summary;
};

struct AnalysisReport {
    bool skipped = false; // true iff there were no records at all
    std::optional<RatioSummary> ratio;
    std::optional<HierarchyNode> hierarchy;
    std::optional<ClusterResult> clusters;
    AnalysisParams params;
};

RatioSummary test_ratio(const std::vector<TestRecord>& records);

/// Group failed records by successive attributes. Children are ordered by
/// descending count, then lexicographic value.
/// Throws ConfigError on an unknown attribute name.
HierarchyNode hierarchical_grouping(const std::vector<TestRecord>& failed_records,
                                    const std::vector<std::string>& order);

// Per-attribute distances, each in [0,1].
double d_outcome(const TestRecord& a, const TestRecord& b);
double d_method(const TestRecord& a, const TestRecord& b);
double d_resource(const TestRecord& a, const TestRecord& b);
double d_url(const TestRecord& a, const TestRecord& b);
double d_error(const TestRecord& a, const TestRecord& b);

/// Weighted mean of the five attribute distances.
double combined_distance(const TestRecord& a, const TestRecord& b,
                         const std::array<double, 5>& weights);

/// Id-bearing path segments replaced by their placeholder form, so records
/// from the same route compare equal.
std::string normalize_url(const std::string& url);

/// DBSCAN over combined_distance. Deterministic: records are visited in
/// input order and clusters expand breadth-first. Labels are 0-based;
/// noise is kNoiseLabel.
std::vector<int> dbscan(const std::vector<TestRecord>& records, const AnalysisParams& params);

/// The gated analysis flow: ratio if any records, hierarchy if any failed,
/// clustering only when failed strictly exceeds cluster_gate.
AnalysisReport analyze(const std::vector<TestRecord>& records, const AnalysisParams& params);

Json report_to_json(const AnalysisReport& report);

} // namespace nirikshak
