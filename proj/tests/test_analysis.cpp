#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "nirikshak/analysis.hpp"
#include "nirikshak/errors.hpp"
#include "nirikshak/rng.hpp"

using namespace nirikshak;

namespace {

TestRecord make_record(TestOutcome outcome, HttpMethod method, int index, const std::string& url,
                       const std::string& error) {
    TestRecord r;
    r.outcome = outcome;
    r.resource = "student";
    r.method = method;
    r.method_index = index;
    r.outcome_case = outcome == TestOutcome::Pass ? OutcomeCase::Positive : OutcomeCase::Negative;
    r.url = url;
    r.iteration = 1;
    r.error_message = error;
    return r;
}

TestRecord random_record(Rng& rng) {
    static const std::vector<HttpMethod> methods{HttpMethod::Get, HttpMethod::Post, HttpMethod::Put,
                                                 HttpMethod::Patch, HttpMethod::Delete};
    static const std::vector<std::string> urls{
        "/student/42", "/student/7c9e6679-7425-40de-944b-e07fc1f90ae7", "/student",
        "/student/42/grades", "/course/3/student/42"};
    static const std::vector<std::string> errors{
        "", "expected status in {404}, got 200", "expected status in {409}, got 201",
        "missing field age", "transport: connection"};
    TestRecord r;
    r.outcome = rng.coin() ? TestOutcome::Pass : TestOutcome::Fail;
    r.resource = rng.coin() ? "student" : "course";
    r.method = rng.pick(methods);
    r.method_index = static_cast<int>(rng.int_in(0, 2));
    r.outcome_case = rng.coin() ? OutcomeCase::Positive : OutcomeCase::Negative;
    r.url = rng.pick(urls);
    r.iteration = static_cast<int>(rng.int_in(1, 5));
    r.error_message = r.outcome == TestOutcome::Fail ? rng.pick(errors) : "";
    if (r.outcome == TestOutcome::Fail && r.error_message.empty()) {
        r.error_message = "transport: timeout";
    }
    return r;
}

// Reference DBSCAN, written straight from the definition: visit in input
// order, core iff the closed eps-ball holds at least minPts records, expand
// breadth-first, border points keep the first label that reaches them.
std::vector<int> reference_dbscan(const std::vector<TestRecord>& records,
                                  const AnalysisParams& params) {
    const int kUnvisited = -2;
    const size_t n = records.size();
    auto neighbors_of = [&](size_t i) {
        std::vector<size_t> out;
        for (size_t j = 0; j < n; ++j) {
            if (combined_distance(records[i], records[j], params.weights) <= params.eps) {
                out.push_back(j);
            }
        }
        return out;
    };
    std::vector<int> labels(n, kUnvisited);
    int next = 0;
    for (size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        const auto seeds = neighbors_of(i);
        if (seeds.size() < static_cast<size_t>(params.min_pts)) {
            labels[i] = kNoiseLabel;
            continue;
        }
        const int label = next++;
        labels[i] = label;
        std::deque<size_t> frontier(seeds.begin(), seeds.end());
        while (!frontier.empty()) {
            const size_t j = frontier.front();
            frontier.pop_front();
            if (labels[j] == kNoiseLabel) labels[j] = label;
            if (labels[j] != kUnvisited) continue;
            labels[j] = label;
            const auto reach = neighbors_of(j);
            if (reach.size() >= static_cast<size_t>(params.min_pts)) {
                frontier.insert(frontier.end(), reach.begin(), reach.end());
            }
        }
    }
    return labels;
}

} // namespace

TEST_CASE("params validation") {
    AnalysisParams params;
    CHECK_NOTHROW(params.validate());

    SUBCASE("eps bounds") {
        params.eps = 0.0;
        CHECK_THROWS_AS(params.validate(), ConfigError);
        params.eps = 1.0;
        CHECK_NOTHROW(params.validate());
        params.eps = 1.01;
        CHECK_THROWS_AS(params.validate(), ConfigError);
    }
    SUBCASE("minPts at least 1") {
        params.min_pts = 0;
        CHECK_THROWS_AS(params.validate(), ConfigError);
    }
    SUBCASE("weights must sum to one") {
        params.weights = {0.3, 0.3, 0.3, 0.05, 0.04};
        CHECK_THROWS_AS(params.validate(), ConfigError);
        params.weights = {0.3, 0.3, 0.3, 0.05, 0.05};
        CHECK_NOTHROW(params.validate());
    }
    SUBCASE("weights must be non-negative") {
        params.weights = {1.2, 0.3, -0.5, 0.0, 0.0};
        CHECK_THROWS_AS(params.validate(), ConfigError);
    }
    SUBCASE("grouping attributes must be known") {
        params.grouping_order = {"resource", "flavour"};
        CHECK_THROWS_WITH_AS(params.validate(), doctest::Contains("flavour"), ConfigError);
        params.grouping_order = {};
        CHECK_THROWS_AS(params.validate(), ConfigError);
    }
}

TEST_CASE("fail ratio") {
    std::vector<TestRecord> records;
    for (int i = 0; i < 318; ++i) {
        records.push_back(make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1",
                                      "expected status in {404}, got 200"));
    }
    for (int i = 0; i < 488; ++i) {
        records.push_back(make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", ""));
    }
    const RatioSummary ratio = test_ratio(records);
    CHECK(ratio.total == 806);
    CHECK(ratio.passed == 488);
    CHECK(ratio.failed == 318);
    CHECK(ratio.fail_ratio == doctest::Approx(318.0 / 806.0).epsilon(1e-12));

    CHECK(test_ratio({}).total == 0);
    CHECK(test_ratio({}).fail_ratio == 0.0);
}

TEST_CASE("outcome, method and resource distances") {
    const auto pass = make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", "");
    const auto fail = make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "x");
    CHECK(d_outcome(pass, pass) == 0.0);
    CHECK(d_outcome(pass, fail) == 1.0);

    const auto get0 = make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", "");
    const auto get1 = make_record(TestOutcome::Pass, HttpMethod::Get, 1, "/student/1", "");
    const auto post0 = make_record(TestOutcome::Pass, HttpMethod::Post, 0, "/student", "");
    CHECK(d_method(get0, get0) == 0.0);
    CHECK(d_method(get0, get1) == 0.5);
    CHECK(d_method(get0, post0) == 1.0);

    auto other = get0;
    other.resource = "course";
    CHECK(d_resource(get0, get0) == 0.0);
    CHECK(d_resource(get0, other) == 1.0);
}

TEST_CASE("url distance normalizes ids and aligns over the longer path") {
    auto with_url = [](const std::string& url) {
        return make_record(TestOutcome::Pass, HttpMethod::Get, 0, url, "");
    };
    // Numeric and uuid segments collapse to the same placeholder.
    CHECK(d_url(with_url("/student/123"), with_url("/student/456")) == 0.0);
    CHECK(d_url(with_url("/student/123"),
                with_url("/student/7c9e6679-7425-40de-944b-e07fc1f90ae7")) == 0.0);
    // Named segments differ.
    CHECK(d_url(with_url("/student/abc"), with_url("/student/def")) == doctest::Approx(0.5));
    // Missing positions count as differing.
    CHECK(d_url(with_url("/student/123"), with_url("/student/123/grades")) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(d_url(with_url("/a/b/c"), with_url("/x/y")) == 1.0);
    CHECK(d_url(with_url("/same"), with_url("/same")) == 0.0);
    // Query strings are not part of the path.
    CHECK(d_url(with_url("/student?limit=5"), with_url("/student")) == 0.0);
}

TEST_CASE("normalize_url") {
    CHECK(normalize_url("/student/123") == "/student/{resource:id}");
    CHECK(normalize_url("/student/7c9e6679-7425-40de-944b-e07fc1f90ae7") ==
          "/student/{resource:id}");
    CHECK(normalize_url("/student/list") == "/student/list");
    CHECK(normalize_url("") == "/");
    CHECK(normalize_url("/student/42?x=1") == "/student/{resource:id}");
}

TEST_CASE("error-message distance is token Jaccard") {
    auto with_error = [](const std::string& message) {
        return make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", message);
    };
    CHECK(d_error(with_error("missing field age"), with_error("missing field age")) == 0.0);
    CHECK(d_error(with_error(""), with_error("")) == 0.0);
    CHECK(d_error(with_error("alpha"), with_error("")) == 1.0);
    // {alpha,beta} vs {beta,gamma}: intersection 1, union 3.
    CHECK(d_error(with_error("alpha beta"), with_error("beta gamma")) ==
          doctest::Approx(2.0 / 3.0));
    // Repeated tokens collapse into a set.
    CHECK(d_error(with_error("a a a b"), with_error("a b")) == 0.0);
}

TEST_CASE("distance properties over random pairs") {
    Rng rng(404);
    const std::array<double, 5> weights{0.2, 0.2, 0.2, 0.2, 0.2};
    for (int i = 0; i < 1500; ++i) {
        const TestRecord a = random_record(rng);
        const TestRecord b = random_record(rng);
        const double ab = combined_distance(a, b, weights);
        const double ba = combined_distance(b, a, weights);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(combined_distance(a, a, weights) == 0.0);
    }
    const TestRecord a = random_record(rng);
    TestRecord copy = a;
    CHECK(combined_distance(a, copy, weights) == 0.0);
}

TEST_CASE("hierarchical grouping orders children by count then value") {
    std::vector<TestRecord> failed;
    for (int i = 0; i < 5; ++i) {
        failed.push_back(make_record(TestOutcome::Fail, HttpMethod::Post, 0, "/student", "dup"));
    }
    for (int i = 0; i < 3; ++i) {
        failed.push_back(make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "miss"));
    }
    for (int i = 0; i < 3; ++i) {
        failed.push_back(make_record(TestOutcome::Fail, HttpMethod::Delete, 0, "/student/1", "x"));
    }
    const HierarchyNode root = hierarchical_grouping(failed, {"resource", "method"});
    CHECK(root.count == 11);
    REQUIRE(root.children.size() == 1); // all student
    const HierarchyNode& student = root.children[0];
    CHECK(student.value == "student");
    CHECK(student.count == 11);
    REQUIRE(student.children.size() == 3);
    CHECK(student.children[0].value == "POST"); // biggest bucket first
    CHECK(student.children[0].count == 5);
    // Equal counts fall back to value order.
    CHECK(student.children[1].value == "DELETE");
    CHECK(student.children[2].value == "GET");

    CHECK_THROWS_AS(hierarchical_grouping(failed, {"flavour"}), ConfigError);
}

TEST_CASE("dbscan on hand-built geometry") {
    AnalysisParams params;
    params.min_pts = 3;
    params.eps = 0.1;

    SUBCASE("fewer than minPts identical records are noise") {
        std::vector<TestRecord> records(2, make_record(TestOutcome::Fail, HttpMethod::Get, 0,
                                                       "/student/1", "boom"));
        CHECK(dbscan(records, params) == std::vector<int>{kNoiseLabel, kNoiseLabel});
    }
    SUBCASE("minPts identical records form one cluster") {
        std::vector<TestRecord> records(3, make_record(TestOutcome::Fail, HttpMethod::Get, 0,
                                                       "/student/1", "boom"));
        CHECK(dbscan(records, params) == std::vector<int>{0, 0, 0});
    }
    SUBCASE("well-separated groups get labels in input order") {
        std::vector<TestRecord> records;
        for (int i = 0; i < 3; ++i) {
            records.push_back(
                make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "boom"));
        }
        for (int i = 0; i < 3; ++i) {
            records.push_back(make_record(TestOutcome::Pass, HttpMethod::Post, 0, "/course", ""));
        }
        const auto labels = dbscan(records, params);
        CHECK(labels == std::vector<int>{0, 0, 0, 1, 1, 1});
    }
}

TEST_CASE("dbscan matches the reference implementation on random logs") {
    Rng rng(777);
    for (int trial = 0; trial < 8; ++trial) {
        const size_t n = static_cast<size_t>(rng.int_in(0, 200));
        std::vector<TestRecord> records;
        records.reserve(n);
        for (size_t i = 0; i < n; ++i) records.push_back(random_record(rng));
        AnalysisParams params;
        params.eps = rng.real_in(0.05, 0.6);
        params.min_pts = static_cast<int>(rng.int_in(1, 8));
        CHECK(dbscan(records, params) == reference_dbscan(records, params));
    }
}

TEST_CASE("analysis gates") {
    AnalysisParams params;
    auto failing = [&](size_t failed, size_t passed) {
        std::vector<TestRecord> records;
        for (size_t i = 0; i < failed; ++i) {
            records.push_back(
                make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "boom"));
        }
        for (size_t i = 0; i < passed; ++i) {
            records.push_back(make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", ""));
        }
        return analyze(records, params);
    };

    SUBCASE("no records at all: skipped") {
        const AnalysisReport report = analyze({}, params);
        CHECK(report.skipped);
        CHECK(!report.ratio.has_value());
        CHECK(!report.hierarchy.has_value());
        CHECK(!report.clusters.has_value());
    }
    SUBCASE("all passed: ratio only") {
        const AnalysisReport report = failing(0, 10);
        CHECK(!report.skipped);
        REQUIRE(report.ratio.has_value());
        CHECK(report.ratio->failed == 0);
        CHECK(!report.hierarchy.has_value());
        CHECK(!report.clusters.has_value());
    }
    SUBCASE("one failure: hierarchy, no clusters") {
        const AnalysisReport report = failing(1, 10);
        REQUIRE(report.hierarchy.has_value());
        CHECK(report.hierarchy->count == 1);
        CHECK(!report.clusters.has_value());
    }
    SUBCASE("exactly the gate: still no clusters") {
        const AnalysisReport report = failing(100, 0);
        CHECK(report.hierarchy.has_value());
        CHECK(!report.clusters.has_value());
    }
    SUBCASE("one over the gate: clusters appear") {
        const AnalysisReport report = failing(101, 0);
        REQUIRE(report.clusters.has_value());
        CHECK(report.clusters->assignments.size() == 101);
        REQUIRE(report.clusters->summary.size() == 1);
        CHECK(report.clusters->summary[0].label == 0);
        CHECK(report.clusters->summary[0].size == 101);
    }
}

TEST_CASE("cluster assignments index into the full log") {
    AnalysisParams params;
    std::vector<TestRecord> records;
    // Alternate pass/fail so failed indices are the odd positions.
    for (int i = 0; i < 202; ++i) {
        if (i % 2 == 0) {
            records.push_back(make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", ""));
        } else {
            records.push_back(
                make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "boom"));
        }
    }
    const AnalysisReport report = analyze(records, params);
    REQUIRE(report.clusters.has_value());
    REQUIRE(report.clusters->assignments.size() == 101);
    for (const auto& assignment : report.clusters->assignments) {
        CHECK(assignment.record_index % 2 == 1);
        CHECK(records[assignment.record_index].outcome == TestOutcome::Fail);
    }
}

TEST_CASE("report json shape") {
    AnalysisParams params;
    std::vector<TestRecord> records;
    for (int i = 0; i < 101; ++i) {
        records.push_back(make_record(TestOutcome::Fail, HttpMethod::Get, 0, "/student/1", "boom"));
    }
    records.push_back(make_record(TestOutcome::Pass, HttpMethod::Get, 0, "/student/1", ""));

    const Json doc = report_to_json(analyze(records, params));
    CHECK(doc["skipped"] == false);
    CHECK(doc["ratio"]["total"] == 102);
    CHECK(doc["ratio"]["failed"] == 101);
    CHECK(doc["hierarchy"]["count"] == 101);
    CHECK(doc["clusters"]["params"]["eps"] == 0.4);
    CHECK(doc["clusters"]["params"]["minPts"] == 7);
    CHECK(doc["clusters"]["assignments"].size() == 101);
    CHECK(doc["clusters"]["summary"][0]["label"] == 0);
    CHECK(doc["clusters"]["summary"][0]["size"] == 101);
    CHECK(doc["clusters"]["summary"][0]["representative"].contains("errorMessage"));
    CHECK(doc["params"]["clusterGate"] == 100);

    const Json skipped = report_to_json(analyze({}, params));
    CHECK(skipped["skipped"] == true);
    CHECK(skipped["ratio"].is_null());
    CHECK(skipped["hierarchy"].is_null());
    CHECK(skipped["clusters"].is_null());
}
