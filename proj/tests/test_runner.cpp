#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "nirikshak/errors.hpp"
#include "nirikshak/mock_api.hpp"
#include "nirikshak/runner.hpp"

using namespace nirikshak;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(NIRIKSHAK_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ResourceSetup student_setup() {
    ResourceSetup setup;
    setup.schema = parse_resource_schema(read_fixture("student/resource.json"));
    setup.endpoints = parse_endpoints(read_fixture("student/endpoints.json"), setup.schema);
    return setup;
}

HttpResponse response_with(int status, std::string body = "",
                           std::vector<std::pair<std::string, std::string>> headers = {}) {
    HttpResponse r;
    r.status = status;
    r.body = std::move(body);
    r.headers = std::move(headers);
    return r;
}

ResourceInstance dummy_instance() {
    ResourceInstance instance;
    instance.resource = "student";
    instance.values = Json{{"id", "a1"}, {"age", 20}};
    return instance;
}

TestRecord sample_record() {
    TestRecord r;
    r.outcome = TestOutcome::Fail;
    r.resource = "student";
    r.method = HttpMethod::Patch;
    r.method_index = 2;
    r.outcome_case = OutcomeCase::Negative;
    r.url = "/student/a1";
    r.iteration = 3;
    r.error_message = "missing field age";
    r.walk_id = 77;
    r.step_index = 1;
    return r;
}

std::string temp_path(const std::string& stem) {
    return "/tmp/nirikshak_runner_test_" + stem + "_" + std::to_string(getpid());
}

} // namespace

TEST_CASE("status assertion message pins the canonical grammar") {
    CaseExpected expected;
    expected.status = {201, 200};
    const auto instance = dummy_instance();

    CHECK(assert_response(response_with(200), expected, instance) == std::nullopt);
    CHECK(assert_response(response_with(201), expected, instance) == std::nullopt);
    CHECK(assert_response(response_with(404), expected, instance) ==
          "expected status in {200,201}, got 404");

    expected.status = {404};
    CHECK(assert_response(response_with(200), expected, instance) ==
          "expected status in {404}, got 200");
}

TEST_CASE("transport failures outrank everything else") {
    CaseExpected expected;
    expected.status = {200};
    HttpResponse r;
    r.transport_kind = "connection";
    CHECK(assert_response(r, expected, dummy_instance()) == "transport: connection");
}

TEST_CASE("expected headers") {
    CaseExpected expected;
    expected.status = {200};
    expected.headers.emplace("X-Token", "abc");
    const auto instance = dummy_instance();

    CHECK(assert_response(response_with(200, "", {{"X-Token", "abc"}}), expected, instance) ==
          std::nullopt);
    CHECK(assert_response(response_with(200), expected, instance) == "missing field X-Token");
    CHECK(assert_response(response_with(200, "", {{"X-Token", "zzz"}}), expected, instance) ==
          "field X-Token: expected abc, got zzz");
    // Header names compare case-insensitively.
    CHECK(assert_response(response_with(200, "", {{"x-token", "abc"}}), expected, instance) ==
          std::nullopt);
}

TEST_CASE("expected body is matched as a subset") {
    CaseExpected expected;
    expected.status = {200};
    expected.body = Json{{"id", "{resource:id}"}, {"age", "{resource:age}"}};
    const auto instance = dummy_instance();

    SUBCASE("extra response keys are fine") {
        CHECK(assert_response(response_with(200, R"({"id":"a1","age":20,"name":"x"})"), expected,
                              instance) == std::nullopt);
    }
    SUBCASE("missing key names its dot path") {
        CHECK(assert_response(response_with(200, R"({"id":"a1"})"), expected, instance) ==
              "missing field age");
    }
    SUBCASE("wrong scalar names field, expected and got") {
        CHECK(assert_response(response_with(200, R"({"id":"a1","age":21})"), expected, instance) ==
              "field age: expected 20, got 21");
    }
    SUBCASE("unparseable body") {
        CHECK(assert_response(response_with(200, "not json"), expected, instance) ==
              "field $: expected json, got text");
    }
    SUBCASE("nested paths") {
        CaseExpected nested;
        nested.status = {200};
        nested.body = Json{{"home", {{"city", "Arborfield"}}}};
        CHECK(assert_response(response_with(200, R"({"home":{"city":"Arborfield"}})"), nested,
                              instance) == std::nullopt);
        CHECK(assert_response(response_with(200, R"({"home":{}})"), nested, instance) ==
              "missing field home.city");
        CHECK(assert_response(response_with(200, R"({"home":{"city":"Dunmore"}})"), nested,
                              instance) == "field home.city: expected \"Arborfield\", got \"Dunmore\"");
    }
    SUBCASE("arrays compare as prefixes") {
        CaseExpected arr;
        arr.status = {200};
        arr.body = Json{{"tags", Json::array({"a", "b"})}};
        CHECK(assert_response(response_with(200, R"({"tags":["a","b","c"]})"), arr, instance) ==
              std::nullopt);
        CHECK(assert_response(response_with(200, R"({"tags":["a"]})"), arr, instance) ==
              "missing field tags[1]");
    }
    SUBCASE("no expected body accepts any payload") {
        CaseExpected bare;
        bare.status = {200};
        CHECK(assert_response(response_with(200, "garbage"), bare, instance) == std::nullopt);
    }
}

TEST_CASE("run config validation") {
    RunConfig config;
    config.base_url = "http://127.0.0.1:1";
    CHECK_NOTHROW(config.validate());

    SUBCASE("empty base url") {
        config.base_url = "";
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
    SUBCASE("steps out of range") {
        config.steps = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.steps = 4;
        CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("steps must be in [1, 3]"),
                             ConfigError);
        config.max_steps = 5;
        CHECK_NOTHROW(config.validate());
    }
    SUBCASE("iterations and instances") {
        config.iterations = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.iterations = 1;
        config.setup_instances = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
}

TEST_CASE("record json round trip") {
    const TestRecord record = sample_record();
    const Json doc = record_to_json(record);
    CHECK(doc["outcome"] == "fail");
    CHECK(doc["resource"] == "student");
    CHECK(doc["method"] == "PATCH");
    CHECK(doc["methodIndex"] == 2);
    CHECK(doc["outcomeCase"] == "NEGATIVE");
    CHECK(doc["url"] == "/student/a1");
    CHECK(doc["iteration"] == 3);
    CHECK(doc["errorMessage"] == "missing field age");
    CHECK(doc["walkId"] == 77);
    CHECK(doc["stepIndex"] == 1);
    CHECK(record_from_json(doc) == record);
}

TEST_CASE("record parsing rejects structural violations") {
    Json doc = record_to_json(sample_record());

    SUBCASE("missing key") {
        doc.erase("url");
        CHECK_THROWS_WITH_AS(record_from_json(doc), doctest::Contains("url"), ConfigError);
    }
    SUBCASE("bad outcome") {
        doc["outcome"] = "maybe";
        CHECK_THROWS_AS(record_from_json(doc), ConfigError);
    }
    SUBCASE("bad method") {
        doc["method"] = "FETCH";
        CHECK_THROWS_AS(record_from_json(doc), ConfigError);
    }
    SUBCASE("pass records must carry no error message") {
        doc["outcome"] = "pass";
        CHECK_THROWS_WITH_AS(record_from_json(doc), doctest::Contains("errorMessage"), ConfigError);
    }
    SUBCASE("fail records must carry one") {
        doc["errorMessage"] = "";
        CHECK_THROWS_AS(record_from_json(doc), ConfigError);
    }
    SUBCASE("extra keys are tolerated") {
        doc["runId"] = "deadbeef";
        doc["timestamp"] = "2026-01-01T00:00:00Z";
        CHECK(record_from_json(doc) == sample_record());
    }
}

TEST_CASE("log emission and parsing round trip") {
    std::vector<TestRecord> records;
    for (int i = 0; i < 7; ++i) {
        TestRecord r = sample_record();
        r.walk_id = i;
        r.outcome = i % 2 == 0 ? TestOutcome::Pass : TestOutcome::Fail;
        r.error_message = r.outcome == TestOutcome::Pass ? "" : "boom " + std::to_string(i);
        records.push_back(r);
    }
    const std::string path = temp_path("roundtrip");
    emit_log(records, path);

    CHECK(parse_log(path) == records);

    // Every line carries the same run id and an ISO-8601 UTC timestamp.
    std::ifstream in(path);
    std::string line;
    std::set<std::string> run_ids;
    size_t lines = 0;
    while (std::getline(in, line)) {
        const Json doc = Json::parse(line);
        run_ids.insert(doc.at("runId").get<std::string>());
        const std::string ts = doc.at("timestamp").get<std::string>();
        REQUIRE(ts.size() == 20);
        CHECK(ts[4] == '-');
        CHECK(ts[10] == 'T');
        CHECK(ts[19] == 'Z');
        ++lines;
    }
    CHECK(lines == 7);
    CHECK(run_ids.size() == 1);
    std::remove(path.c_str());
}

TEST_CASE("log parsing failures") {
    SUBCASE("unreadable file") {
        CHECK_THROWS_WITH_AS(parse_log("/nonexistent/log.jsonl"),
                             doctest::Contains("cannot read log file"), ConfigError);
    }
    SUBCASE("malformed line is reported 1-based") {
        const std::string path = temp_path("badline");
        {
            std::ofstream out(path);
            out << record_to_json(sample_record()).dump() << "\n";
            out << "{broken\n";
        }
        CHECK_THROWS_WITH_AS(parse_log(path), doctest::Contains("log line 2"), ConfigError);
        std::remove(path.c_str());
    }
    SUBCASE("blank lines are skipped") {
        const std::string path = temp_path("blanks");
        {
            std::ofstream out(path);
            out << record_to_json(sample_record()).dump() << "\n\n";
            out << record_to_json(sample_record()).dump() << "\n";
        }
        CHECK(parse_log(path).size() == 2);
        std::remove(path.c_str());
    }
}

TEST_CASE("execute_node reports template failures as CONFIG records") {
    ScenarioNode node;
    node.resource = "student";
    node.method = HttpMethod::Get;
    node.outcome_case = OutcomeCase::Positive;
    node.url_template = "/student/{resource:ghost}";
    node.expected.status = {200};

    HttpClient client("http://127.0.0.1:9", std::chrono::milliseconds(200));
    const TestRecord record = execute_node(node, dummy_instance(), client);
    CHECK(record.outcome == TestOutcome::Fail);
    CHECK(record.error_message.substr(0, 8) == "CONFIG: ");
}

TEST_CASE("full run against the in-process mock") {
    MockServer server("student", "id", {});
    server.start();

    RunConfig config;
    config.base_url = server.base_url();
    config.steps = 1;
    config.iterations = 2;
    config.setup_instances = 4;
    config.seed = 21;

    const auto records = run(config, {student_setup()});
    // walks of length 1 = one per node; 10 nodes, two iterations.
    REQUIRE(records.size() == 20);
    for (const auto& record : records) {
        CHECK(record.outcome == TestOutcome::Pass);
        CHECK(record.error_message.empty());
    }
    CHECK(records.front().iteration == 1);
    CHECK(records.back().iteration == 2);
    // Walk ids keep counting across iterations; step index stays 0.
    CHECK(records.back().walk_id == 19);
    CHECK(records.back().step_index == 0);
    // API-level cleanup leaves the store empty.
    CHECK(server.stored_count() == 0);
}

TEST_CASE("identical seeds give identical records") {
    MockServer server("student", "id", {});
    server.start();

    RunConfig config;
    config.base_url = server.base_url();
    config.steps = 2;
    config.iterations = 1;
    config.setup_instances = 3;
    config.seed = 99;

    const auto first = run(config, {student_setup()});
    server.reset();
    const auto second = run(config, {student_setup()});
    CHECK(first == second);

    config.seed = 100;
    server.reset();
    const auto third = run(config, {student_setup()});
    CHECK(first != third);
}

TEST_CASE("unreachable base url fails every record with a transport error") {
    RunConfig config;
    config.base_url = "http://127.0.0.1:9"; // discard port, nothing listens
    config.steps = 1;
    config.iterations = 1;
    config.setup_instances = 2;
    config.request_timeout = std::chrono::milliseconds(500);

    const auto records = run(config, {student_setup()});
    REQUIRE(records.size() == 10);
    for (const auto& record : records) {
        CHECK(record.outcome == TestOutcome::Fail);
        CHECK(record.error_message.substr(0, 11) == "transport: ");
    }
}

TEST_CASE("fail fast stops after the first failure") {
    RunConfig config;
    config.base_url = "http://127.0.0.1:9";
    config.steps = 3;
    config.iterations = 5;
    config.setup_instances = 2;
    config.fail_fast = true;
    config.request_timeout = std::chrono::milliseconds(500);

    const auto records = run(config, {student_setup()});
    REQUIRE(records.size() == 1);
    CHECK(records[0].outcome == TestOutcome::Fail);
}

TEST_CASE("a setup hook that always fails aborts the whole run") {
    RunConfig config;
    config.base_url = "http://127.0.0.1:9";
    config.steps = 1;
    config.iterations = 2;
    config.setup_instances = 2;
    config.setup_hook = "exit 4";
    config.request_timeout = std::chrono::milliseconds(500);

    CHECK_THROWS_WITH_AS(run(config, {student_setup()}),
                         doctest::Contains("every iteration aborted"), SetupError);
}

TEST_CASE("hooks replace the api-level seeding and cleanup") {
    MockServer server("student", "id", {});
    server.start();

    const std::string sink = temp_path("hook_sink");
    RunConfig config;
    config.base_url = server.base_url();
    config.steps = 1;
    config.iterations = 1;
    config.setup_instances = 3;
    config.seed = 5;
    config.setup_hook = "cat > " + sink;
    config.cleanup_hook = "cat > /dev/null";

    // The hook does not reach the mock, so EXISTS-preconditioned requests
    // miss: the server never saw the pool instances.
    const auto records = run(config, {student_setup()});
    size_t failed = 0;
    for (const auto& record : records) {
        if (record.outcome == TestOutcome::Fail) ++failed;
    }
    CHECK(failed > 0);

    std::ifstream in(sink);
    REQUIRE(in.good());
    Json payload;
    in >> payload;
    CHECK(payload.size() == 3);
    std::remove(sink.c_str());
}
