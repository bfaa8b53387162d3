#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nirikshak/analysis.hpp"
#include "nirikshak/graph.hpp"
#include "nirikshak/pool.hpp"
#include "nirikshak/runner_types.hpp"

namespace nirikshak {

struct RunConfig {
    std::string base_url;
    int steps = 3;
    int iterations = 5;
    int setup_instances = 10;
    int max_steps = kDefaultMaxSteps;
    uint64_t seed = 1;
    std::optional<std::string> setup_hook;
    std::optional<std::string> cleanup_hook;
    std::chrono::milliseconds request_timeout{10000};
    bool fail_fast = false;
    AnalysisParams analysis;

    /// Throws ConfigError when steps/iterations/setup_instances leave range.
    void validate() const;
};

/// One resource's parsed inputs, as the runner consumes them.
struct ResourceSetup {
    ResourceSchema schema;
    std::vector<EndpointDescription> endpoints;
};

/// Captured HTTP response, or the transport failure that prevented one.
struct HttpResponse {
    int status = 0;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::optional<std::string> transport_kind; // set iff no response arrived

    std::optional<std::string> header(const std::string& name) const;
};

/// Thin synchronous HTTP/1.1 client bound to one base URL.
class HttpClient {
public:
    HttpClient(std::string base_url, std::chrono::milliseconds timeout);
    ~HttpClient();
    HttpClient(HttpClient&&) noexcept;
    HttpClient& operator=(HttpClient&&) noexcept;

    HttpResponse send(HttpMethod method, const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& headers,
                      const std::optional<std::string>& body);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Pass, or the canonical single-line failure reason:
///   "expected status in {S}, got T" | "missing field F" |
///   "field F: expected X, got Y"   | "transport: <kind>"
std::optional<std::string> assert_response(const HttpResponse& response,
                                           const CaseExpected& expected,
                                           const ResourceInstance& instance);

/// Populate the node's templates with the instance, issue the request,
/// assert the response. Template errors fail the record with a
/// "CONFIG: "-prefixed message instead of throwing.
TestRecord execute_node(const ScenarioNode& node, const ResourceInstance& instance,
                        HttpClient& client);

/// Execute the full flow: per iteration, set up the pool, enumerate walks,
/// run each walk over a single instance, clean up. Record order is
/// deterministic given the seed.
std::vector<TestRecord> run(const RunConfig& config, const std::vector<ResourceSetup>& resources);

/// JSON Lines: one object per record, plus runId and ISO-8601 timestamp.
/// Throws IoError when the path is unwritable.
void emit_log(const std::vector<TestRecord>& records, const std::string& path);

Json record_to_json(const TestRecord& record);
TestRecord record_from_json(const Json& line);

/// Parse a JSONL log back into records. Throws ConfigError naming the
/// 1-based line number of the first malformed line.
std::vector<TestRecord> parse_log(const std::string& path);

} // namespace nirikshak
