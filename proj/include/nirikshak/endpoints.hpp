#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nirikshak/schema.hpp"

namespace nirikshak {

enum class HttpMethod { Get, Post, Put, Patch, Delete };
enum class OutcomeCase { Positive, Negative, Destructive };

std::string to_string(HttpMethod method);
std::string to_string(OutcomeCase outcome);
std::optional<HttpMethod> method_from_string(std::string_view s);
std::optional<OutcomeCase> outcome_from_string(std::string_view s);

/// Request-side templates for one outcome case.
struct CaseInput {
    std::map<std::string, Template> headers;
    std::map<std::string, Template> query;
    std::optional<Template> body;

    bool empty() const { return headers.empty() && query.empty() && !body.has_value(); }
};

/// Expected response for one outcome case.
struct CaseExpected {
    std::set<int> status;
    std::map<std::string, Template> headers;
    std::optional<Template> body;
};

struct CaseSpec {
    CaseInput input;
    CaseExpected expected;
};

/// One (method, URL) endpoint with its declared outcome cases.
struct EndpointDescription {
    std::string resource;
    HttpMethod method = HttpMethod::Get;
    Template url_template;
    std::map<OutcomeCase, CaseSpec> cases;
};

/// One testable request scenario: the graph's vertex. Self-contained copy
/// of the case templates so nodes outlive the endpoint list.
struct ScenarioNode {
    std::string resource;
    HttpMethod method = HttpMethod::Get;
    OutcomeCase outcome_case = OutcomeCase::Positive;
    int method_index = 0;
    Template url_template;
    CaseInput input;
    CaseExpected expected;

    /// Stable identifier, e.g. "student:GET:POSITIVE:0".
    std::string id() const;
};

/// Convenience defaults applied when the user omits an expected status set.
std::set<int> default_expected_status(HttpMethod method, OutcomeCase outcome);

/// Parse and validate an endpoints document against an already-parsed schema.
/// Throws ConfigError with endpoint identification on any violation.
std::vector<EndpointDescription> parse_endpoints(std::string_view document,
                                                 const ResourceSchema& schema);

/// One node per declared case. methodIndex is assigned by declaration order
/// within each (method, outcomeCase) group, starting at 0.
std::vector<ScenarioNode> enumerate_nodes(const std::vector<EndpointDescription>& endpoints);

} // namespace nirikshak
