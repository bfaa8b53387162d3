#include "nirikshak/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>

#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (const unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

std::string transport_kind_of(httplib::Error error) {
    switch (error) {
    case httplib::Error::Connection:
    case httplib::Error::ProxyConnection:
    case httplib::Error::BindIPAddress:
        return "connection";
    case httplib::Error::ConnectionTimeout:
        return "timeout";
    case httplib::Error::Read:
        return "read";
    case httplib::Error::Write:
        return "write";
    case httplib::Error::SSLConnection:
    case httplib::Error::SSLLoadingCerts:
    case httplib::Error::SSLServerVerification:
        return "ssl";
    default:
        return "error";
    }
}

std::string format_status_set(const std::set<int>& status) {
    std::string out = "{";
    for (const int code : status) {
        if (out.size() > 1) out += ',';
        out += std::to_string(code);
    }
    out += '}';
    return out;
}

std::string path_label(const std::string& path) { return path.empty() ? "$" : path; }

// subset match: every expected key/element must be present and equal
std::optional<std::string> subset_match(const Json& want, const Json& got,
                                        const std::string& path) {
    if (want.is_object()) {
        if (!got.is_object()) {
            return "field " + path_label(path) + ": expected " + want.dump() + ", got " +
                   got.dump();
        }
        for (const auto& item : want.items()) {
            const std::string child = path.empty() ? item.key() : path + "." + item.key();
            if (!got.contains(item.key())) return "missing field " + child;
            if (auto failure = subset_match(item.value(), got[item.key()], child)) return failure;
        }
        return std::nullopt;
    }
    if (want.is_array()) {
        if (!got.is_array()) {
            return "field " + path_label(path) + ": expected " + want.dump() + ", got " +
                   got.dump();
        }
        for (size_t i = 0; i < want.size(); ++i) {
            const std::string child = path_label(path) + "[" + std::to_string(i) + "]";
            if (i >= got.size()) return "missing field " + child;
            if (auto failure = subset_match(want[i], got[i], child)) return failure;
        }
        return std::nullopt;
    }
    if (want != got) {
        return "field " + path_label(path) + ": expected " + want.dump() + ", got " + got.dump();
    }
    return std::nullopt;
}

struct PreparedRequest {
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    std::optional<std::string> body;
};

PreparedRequest build_request(const ScenarioNode& node, const ResourceInstance& instance) {
    PreparedRequest out;
    out.path = stringify_value(populate_template(node.url_template, instance));
    std::string query;
    for (const auto& [name, tmpl] : node.input.query) {
        query += query.empty() ? '?' : '&';
        query += url_encode(name) + "=" +
                 url_encode(stringify_value(populate_template(tmpl, instance)));
    }
    out.path += query;
    for (const auto& [name, tmpl] : node.input.headers) {
        out.headers.emplace_back(name, stringify_value(populate_template(tmpl, instance)));
    }
    if (node.input.body) {
        const Json body = populate_template(*node.input.body, instance);
        // string bodies go out raw so intentionally broken payloads survive
        out.body = body.is_string() ? body.get<std::string>() : body.dump();
    }
    return out;
}

std::string make_run_id() {
    std::random_device rd;
    std::mt19937_64 engine((static_cast<uint64_t>(rd()) << 32) ^ rd() ^
                           static_cast<uint64_t>(std::time(nullptr)));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(engine()));
    return buf;
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

} // namespace

std::string to_string(TestOutcome outcome) {
    return outcome == TestOutcome::Pass ? "pass" : "fail";
}

void RunConfig::validate() const {
    if (base_url.empty()) throw ConfigError("baseUrl must not be empty");
    if (max_steps < 1) throw ConfigError("maxSteps must be at least 1");
    if (steps < 1 || steps > max_steps) {
        throw ConfigError("steps must be in [1, " + std::to_string(max_steps) + "], got " +
                          std::to_string(steps));
    }
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (setup_instances < 1) throw ConfigError("setupInstances must be at least 1");
    if (request_timeout.count() <= 0) throw ConfigError("requestTimeout must be positive");
    analysis.validate();
}

std::optional<std::string> HttpResponse::header(const std::string& name) const {
    for (const auto& [key, value] : headers) {
        if (iequals(key, name)) return value;
    }
    return std::nullopt;
}

struct HttpClient::Impl {
    httplib::Client client;
    explicit Impl(const std::string& base_url) : client(base_url) {}
};

HttpClient::HttpClient(std::string base_url, std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>(base_url)) {
    impl_->client.set_connection_timeout(timeout);
    impl_->client.set_read_timeout(timeout);
    impl_->client.set_write_timeout(timeout);
    impl_->client.set_keep_alive(true);
    impl_->client.set_tcp_nodelay(true); // loopback latency dies without it
}

HttpClient::~HttpClient() = default;
HttpClient::HttpClient(HttpClient&&) noexcept = default;
HttpClient& HttpClient::operator=(HttpClient&&) noexcept = default;

HttpResponse HttpClient::send(HttpMethod method, const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>& headers,
                              const std::optional<std::string>& body) {
    httplib::Headers request_headers;
    std::string content_type = "application/json";
    for (const auto& [name, value] : headers) {
        if (iequals(name, "Content-Type")) {
            content_type = value;
            continue;
        }
        request_headers.emplace(name, value);
    }

    const auto result = [&]() -> httplib::Result {
        switch (method) {
        case HttpMethod::Get:
            return impl_->client.Get(path, request_headers);
        case HttpMethod::Post:
            return impl_->client.Post(path, request_headers, body.value_or(""), content_type);
        case HttpMethod::Put:
            return impl_->client.Put(path, request_headers, body.value_or(""), content_type);
        case HttpMethod::Patch:
            return impl_->client.Patch(path, request_headers, body.value_or(""), content_type);
        case HttpMethod::Delete:
            if (body) return impl_->client.Delete(path, request_headers, *body, content_type);
            return impl_->client.Delete(path, request_headers);
        }
        return impl_->client.Get(path, request_headers);
    }();

    HttpResponse response;
    if (!result) {
        response.transport_kind = transport_kind_of(result.error());
        return response;
    }
    response.status = result->status;
    for (const auto& [name, value] : result->headers) response.headers.emplace_back(name, value);
    response.body = result->body;
    return response;
}

std::optional<std::string> assert_response(const HttpResponse& response,
                                           const CaseExpected& expected,
                                           const ResourceInstance& instance) {
    if (response.transport_kind) return "transport: " + *response.transport_kind;
    if (expected.status.count(response.status) == 0) {
        return "expected status in " + format_status_set(expected.status) + ", got " +
               std::to_string(response.status);
    }
    for (const auto& [name, tmpl] : expected.headers) {
        const auto want = stringify_value(populate_template(tmpl, instance));
        const auto got = response.header(name);
        if (!got) return "missing field " + name;
        if (*got != want) return "field " + name + ": expected " + want + ", got " + *got;
    }
    if (expected.body) {
        const Json want = populate_template(*expected.body, instance);
        const Json got = Json::parse(response.body, nullptr, false);
        if (got.is_discarded()) return "field $: expected json, got text";
        return subset_match(want, got, "");
    }
    return std::nullopt;
}

TestRecord execute_node(const ScenarioNode& node, const ResourceInstance& instance,
                        HttpClient& client) {
    TestRecord record;
    record.resource = node.resource;
    record.method = node.method;
    record.method_index = node.method_index;
    record.outcome_case = node.outcome_case;
    try {
        const auto prepared = build_request(node, instance);
        record.url = prepared.path;
        const auto response = client.send(node.method, prepared.path, prepared.headers,
                                          prepared.body);
        if (auto failure = assert_response(response, node.expected, instance)) {
            record.outcome = TestOutcome::Fail;
            record.error_message = std::move(*failure);
        }
    } catch (const TemplateError& e) {
        record.outcome = TestOutcome::Fail;
        record.error_message = std::string("CONFIG: ") + e.what();
        if (record.url.empty()) {
            record.url = node.url_template.is_string() ? node.url_template.get<std::string>()
                                                       : node.url_template.dump();
        }
    }
    return record;
}

namespace {

struct PreparedResource {
    const ResourceSetup* setup = nullptr;
    ScenarioGraph graph;
    std::vector<Walk> walks;
    int post_positive = -1;   // node index used for API-side seeding
    int delete_positive = -1; // node index used for API-side cleanup
};

void send_ignoring_result(HttpClient& client, const ScenarioNode& node,
                          const ResourceInstance& instance) {
    try {
        const auto prepared = build_request(node, instance);
        client.send(node.method, prepared.path, prepared.headers, prepared.body);
    } catch (const TemplateError&) {
        // surfaced later by the recorded tests themselves
    }
}

void seed_via_api(ResourcePool& pool, const PreparedResource& prepared, HttpClient& client) {
    if (prepared.post_positive < 0) {
        std::fprintf(stderr,
                     "warning: resource '%s' has no POST positive endpoint, assuming the "
                     "setup instances already exist in the API\n",
                     pool.schema().name.c_str());
        return;
    }
    const auto& node = prepared.graph.nodes[static_cast<size_t>(prepared.post_positive)];
    for (const auto& [id, instance] : pool.existing()) {
        send_ignoring_result(client, node, instance);
    }
}

void replenish_via_api(ResourcePool& pool, const PreparedResource& prepared, HttpClient& client,
                       Rng& rng) {
    auto instance = generate_fresh_instance(pool, rng);
    if (prepared.post_positive >= 0) {
        const auto& node = prepared.graph.nodes[static_cast<size_t>(prepared.post_positive)];
        send_ignoring_result(client, node, instance);
    } else {
        std::fprintf(stderr,
                     "warning: resource '%s' pool ran dry and there is no POST positive "
                     "endpoint to refill it through the API\n",
                     pool.schema().name.c_str());
    }
    pool.insert(instance);
}

void cleanup_via_api(ResourcePool& pool, const PreparedResource& prepared, HttpClient& client) {
    if (prepared.delete_positive >= 0) {
        const auto& node = prepared.graph.nodes[static_cast<size_t>(prepared.delete_positive)];
        for (const auto& [id, instance] : pool.existing()) {
            send_ignoring_result(client, node, instance);
        }
    }
    std::vector<std::string> ids;
    ids.reserve(pool.size());
    for (const auto& [id, instance] : pool.existing()) ids.push_back(id);
    for (const auto& id : ids) pool.erase(id);
}

} // namespace

std::vector<TestRecord> run(const RunConfig& config, const std::vector<ResourceSetup>& resources) {
    config.validate();

    std::vector<PreparedResource> prepared;
    for (const auto& resource : resources) {
        PreparedResource p;
        p.setup = &resource;
        p.graph = build_graph(enumerate_nodes(resource.endpoints));
        p.walks = enumerate_walks(p.graph, config.steps, config.max_steps);
        for (size_t i = 0; i < p.graph.nodes.size(); ++i) {
            const auto& node = p.graph.nodes[i];
            if (node.outcome_case != OutcomeCase::Positive) continue;
            if (node.method == HttpMethod::Post && p.post_positive < 0) {
                p.post_positive = static_cast<int>(i);
            }
            if (node.method == HttpMethod::Delete && p.delete_positive < 0) {
                p.delete_positive = static_cast<int>(i);
            }
        }
        prepared.push_back(std::move(p));
    }

    Rng rng(config.seed);
    HttpClient client(config.base_url, config.request_timeout);
    std::vector<TestRecord> records;
    int64_t walk_counter = 0;
    int aborted_iterations = 0;
    bool stop = false;

    for (int iteration = 1; iteration <= config.iterations && !stop; ++iteration) {
        try {
            for (const auto& p : prepared) {
                ResourcePool pool =
                    setup_pool(p.setup->schema, config.setup_instances, rng, config.setup_hook);
                if (!config.setup_hook) seed_via_api(pool, p, client);

                for (const auto& walk : p.walks) {
                    const auto first_pre =
                        node_transition(p.graph.nodes[static_cast<size_t>(walk.front())].method,
                                        p.graph.nodes[static_cast<size_t>(walk.front())].outcome_case)
                            .pre;
                    if (first_pre == ExistenceState::Exists && pool.empty()) {
                        replenish_via_api(pool, p, client, rng);
                    }
                    const ResourceInstance instance = select_resource(pool, first_pre, rng);

                    for (size_t step = 0; step < walk.size(); ++step) {
                        const auto& node = p.graph.nodes[static_cast<size_t>(walk[step])];
                        TestRecord record = execute_node(node, instance, client);
                        record.iteration = iteration;
                        record.walk_id = walk_counter;
                        record.step_index = static_cast<int>(step);
                        const bool failed = record.outcome == TestOutcome::Fail;
                        records.push_back(std::move(record));
                        apply_transition(pool, instance,
                                         node_transition(node.method, node.outcome_case).post);
                        if (config.fail_fast && failed) {
                            stop = true;
                            break;
                        }
                    }
                    ++walk_counter;
                    if (stop) break;
                }

                if (config.cleanup_hook) {
                    cleanup_pool(pool, config.cleanup_hook);
                } else {
                    cleanup_via_api(pool, p, client);
                }
                if (stop) break;
            }
        } catch (const SetupError& e) {
            std::fprintf(stderr, "warning: iteration %d aborted: %s\n", iteration, e.what());
            ++aborted_iterations;
        }
    }

    if (config.iterations > 0 && aborted_iterations == config.iterations) {
        throw SetupError("every iteration aborted during setup");
    }
    return records;
}

Json record_to_json(const TestRecord& record) {
    return Json{
        {"outcome", to_string(record.outcome)},
        {"resource", record.resource},
        {"method", to_string(record.method)},
        {"methodIndex", record.method_index},
        {"outcomeCase", to_string(record.outcome_case)},
        {"url", record.url},
        {"iteration", record.iteration},
        {"errorMessage", record.error_message},
        {"walkId", record.walk_id},
        {"stepIndex", record.step_index},
    };
}

TestRecord record_from_json(const Json& line) {
    if (!line.is_object()) throw ConfigError("record must be an object");
    const auto require = [&](const char* key) -> const Json& {
        if (!line.contains(key)) throw ConfigError(std::string("record is missing '") + key + "'");
        return line[key];
    };
    TestRecord record;

    const auto& outcome = require("outcome");
    if (!outcome.is_string() ||
        (outcome.get<std::string>() != "pass" && outcome.get<std::string>() != "fail")) {
        throw ConfigError("record 'outcome' must be \"pass\" or \"fail\"");
    }
    record.outcome = outcome.get<std::string>() == "pass" ? TestOutcome::Pass : TestOutcome::Fail;

    const auto& resource = require("resource");
    if (!resource.is_string()) throw ConfigError("record 'resource' must be a string");
    record.resource = resource.get<std::string>();

    const auto& method = require("method");
    if (!method.is_string()) throw ConfigError("record 'method' must be a string");
    const auto parsed_method = method_from_string(method.get<std::string>());
    if (!parsed_method) {
        throw ConfigError("record 'method' is unknown: " + method.get<std::string>());
    }
    record.method = *parsed_method;

    const auto& method_index = require("methodIndex");
    if (!method_index.is_number_integer() || method_index.get<int>() < 0) {
        throw ConfigError("record 'methodIndex' must be a non-negative integer");
    }
    record.method_index = method_index.get<int>();

    const auto& outcome_case = require("outcomeCase");
    if (!outcome_case.is_string()) throw ConfigError("record 'outcomeCase' must be a string");
    const auto parsed_case = outcome_from_string(outcome_case.get<std::string>());
    if (!parsed_case) {
        throw ConfigError("record 'outcomeCase' is unknown: " + outcome_case.get<std::string>());
    }
    record.outcome_case = *parsed_case;

    const auto& url = require("url");
    if (!url.is_string()) throw ConfigError("record 'url' must be a string");
    record.url = url.get<std::string>();

    const auto& iteration = require("iteration");
    if (!iteration.is_number_integer() || iteration.get<int>() < 1) {
        throw ConfigError("record 'iteration' must be a positive integer");
    }
    record.iteration = iteration.get<int>();

    const auto& error_message = require("errorMessage");
    if (!error_message.is_string()) throw ConfigError("record 'errorMessage' must be a string");
    record.error_message = error_message.get<std::string>();

    const auto& walk_id = require("walkId");
    if (!walk_id.is_number_integer()) throw ConfigError("record 'walkId' must be an integer");
    record.walk_id = walk_id.get<int64_t>();

    const auto& step_index = require("stepIndex");
    if (!step_index.is_number_integer() || step_index.get<int>() < 0) {
        throw ConfigError("record 'stepIndex' must be a non-negative integer");
    }
    record.step_index = step_index.get<int>();

    if ((record.outcome == TestOutcome::Pass) != record.error_message.empty()) {
        throw ConfigError("record 'errorMessage' must be empty exactly when outcome is pass");
    }
    return record;
}

void emit_log(const std::vector<TestRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write log file: " + path);
    const auto run_id = make_run_id();
    const auto timestamp = iso8601_now();
    for (const auto& record : records) {
        Json line = record_to_json(record);
        line["runId"] = run_id;
        line["timestamp"] = timestamp;
        out << line.dump() << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed while writing log file: " + path);
}

std::vector<TestRecord> parse_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read log file: " + path);
    std::vector<TestRecord> records;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const Json parsed = Json::parse(line);
            records.push_back(record_from_json(parsed));
        } catch (const std::exception& e) {
            throw ConfigError("log line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return records;
}

} // namespace nirikshak
