#include "nirikshak/endpoints.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::map<std::string, Template> parse_template_map(const Json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    std::map<std::string, Template> out;
    for (const auto& item : obj.items()) {
        if (item.key().empty()) throw ConfigError(where + " has an empty key");
        out.emplace(item.key(), item.value());
    }
    return out;
}

CaseInput parse_case_input(const Json& j, const std::string& where) {
    CaseInput input;
    if (!j.is_object()) throw ConfigError(where + ": 'input' must be an object");
    for (const auto& item : j.items()) {
        if (item.key() == "headers") {
            input.headers = parse_template_map(item.value(), where + ": input headers");
        } else if (item.key() == "query") {
            input.query = parse_template_map(item.value(), where + ": input query");
        } else if (item.key() == "body") {
            input.body = item.value();
        } else {
            throw ConfigError(where + ": unknown input key '" + item.key() + "'");
        }
    }
    return input;
}

CaseExpected parse_case_expected(const Json& j, const std::string& where) {
    CaseExpected expected;
    if (!j.is_object()) throw ConfigError(where + ": 'expected' must be an object");
    for (const auto& item : j.items()) {
        if (item.key() == "status") {
            if (!item.value().is_array() || item.value().empty()) {
                throw ConfigError(where + ": expected status must be a non-empty array");
            }
            for (const auto& code : item.value()) {
                if (!code.is_number_integer()) {
                    throw ConfigError(where + ": expected status codes must be integers");
                }
                const auto v = code.get<int>();
                if (v < 100 || v > 599) {
                    throw ConfigError(where + ": status " + std::to_string(v) +
                                      " outside 100..599");
                }
                expected.status.insert(v);
            }
        } else if (item.key() == "headers") {
            expected.headers = parse_template_map(item.value(), where + ": expected headers");
        } else if (item.key() == "body") {
            expected.body = item.value();
        } else {
            throw ConfigError(where + ": unknown expected key '" + item.key() + "'");
        }
    }
    return expected;
}

void validate_case_templates(const CaseSpec& spec, const ResourceSchema& schema,
                             const std::string& where) {
    for (const auto& [name, tmpl] : spec.input.headers) {
        validate_template_against_schema(tmpl, schema, where + " input header '" + name + "'");
    }
    for (const auto& [name, tmpl] : spec.input.query) {
        validate_template_against_schema(tmpl, schema, where + " input query '" + name + "'");
    }
    if (spec.input.body) validate_template_against_schema(*spec.input.body, schema, where + " input body");
    for (const auto& [name, tmpl] : spec.expected.headers) {
        validate_template_against_schema(tmpl, schema, where + " expected header '" + name + "'");
    }
    if (spec.expected.body) {
        validate_template_against_schema(*spec.expected.body, schema, where + " expected body");
    }
}

} // namespace

std::string to_string(HttpMethod method) {
    switch (method) {
    case HttpMethod::Get: return "GET";
    case HttpMethod::Post: return "POST";
    case HttpMethod::Put: return "PUT";
    case HttpMethod::Patch: return "PATCH";
    case HttpMethod::Delete: return "DELETE";
    }
    return "GET";
}

std::string to_string(OutcomeCase outcome) {
    switch (outcome) {
    case OutcomeCase::Positive: return "POSITIVE";
    case OutcomeCase::Negative: return "NEGATIVE";
    case OutcomeCase::Destructive: return "DESTRUCTIVE";
    }
    return "POSITIVE";
}

std::optional<HttpMethod> method_from_string(std::string_view s) {
    const auto u = upper(s);
    if (u == "GET") return HttpMethod::Get;
    if (u == "POST") return HttpMethod::Post;
    if (u == "PUT") return HttpMethod::Put;
    if (u == "PATCH") return HttpMethod::Patch;
    if (u == "DELETE") return HttpMethod::Delete;
    return std::nullopt;
}

std::optional<OutcomeCase> outcome_from_string(std::string_view s) {
    const auto u = upper(s);
    if (u == "POSITIVE") return OutcomeCase::Positive;
    if (u == "NEGATIVE") return OutcomeCase::Negative;
    if (u == "DESTRUCTIVE") return OutcomeCase::Destructive;
    return std::nullopt;
}

std::string ScenarioNode::id() const {
    return resource + ":" + to_string(method) + ":" + to_string(outcome_case) + ":" +
           std::to_string(method_index);
}

std::set<int> default_expected_status(HttpMethod method, OutcomeCase outcome) {
    switch (outcome) {
    case OutcomeCase::Negative:
        return {404};
    case OutcomeCase::Destructive:
        return {400, 422};
    case OutcomeCase::Positive:
        switch (method) {
        case HttpMethod::Get: return {200};
        case HttpMethod::Post: return {201};
        case HttpMethod::Put: return {200, 201};
        case HttpMethod::Patch: return {200};
        case HttpMethod::Delete: return {200, 204};
        }
    }
    return {200};
}

std::vector<EndpointDescription> parse_endpoints(std::string_view document,
                                                 const ResourceSchema& schema) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("endpoints: ") + e.what());
    }
    if (!doc.is_array()) throw ConfigError("endpoints: top-level value must be an array");

    std::vector<EndpointDescription> endpoints;
    for (size_t i = 0; i < doc.size(); ++i) {
        const Json& entry = doc[i];
        std::string where = "endpoints[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ConfigError(where + " must be an object");
        for (const auto& item : entry.items()) {
            if (item.key() != "method" && item.key() != "url" && item.key() != "cases") {
                throw ConfigError(where + ": unknown key '" + item.key() + "'");
            }
        }
        if (!entry.contains("method") || !entry["method"].is_string()) {
            throw ConfigError(where + ": 'method' must be a string");
        }
        if (!entry.contains("url") || !entry["url"].is_string()) {
            throw ConfigError(where + ": 'url' must be a string");
        }

        EndpointDescription endpoint;
        endpoint.resource = schema.name;
        const auto method_name = entry["method"].get<std::string>();
        const auto method = method_from_string(method_name);
        if (!method) throw ConfigError(where + ": unknown method '" + method_name + "'");
        endpoint.method = *method;
        endpoint.url_template = entry["url"];
        where += " (" + to_string(*method) + " " + entry["url"].get<std::string>() + ")";
        validate_template_against_schema(endpoint.url_template, schema, where + " url");

        if (!entry.contains("cases") || !entry["cases"].is_object() || entry["cases"].empty()) {
            throw ConfigError(where + ": 'cases' must be a non-empty object");
        }
        for (const auto& item : entry["cases"].items()) {
            const auto outcome = outcome_from_string(item.key());
            if (!outcome) throw ConfigError(where + ": unknown case '" + item.key() + "'");
            const std::string case_where = where + " case " + item.key();
            if (!item.value().is_object()) throw ConfigError(case_where + " must be an object");
            for (const auto& part : item.value().items()) {
                if (part.key() != "input" && part.key() != "expected") {
                    throw ConfigError(case_where + ": unknown key '" + part.key() + "'");
                }
            }

            CaseSpec spec;
            if (item.value().contains("input")) {
                spec.input = parse_case_input(item.value()["input"], case_where);
            }
            if (item.value().contains("expected")) {
                spec.expected = parse_case_expected(item.value()["expected"], case_where);
            }
            if (spec.expected.status.empty()) {
                spec.expected.status = default_expected_status(*method, *outcome);
            }
            if (*outcome == OutcomeCase::Destructive && spec.input.empty()) {
                throw ConfigError(case_where +
                                  ": destructive case needs at least one malformed input template");
            }
            validate_case_templates(spec, schema, case_where);
            endpoint.cases.emplace(*outcome, std::move(spec));
        }
        endpoints.push_back(std::move(endpoint));
    }
    return endpoints;
}

std::vector<ScenarioNode> enumerate_nodes(const std::vector<EndpointDescription>& endpoints) {
    std::map<std::pair<HttpMethod, OutcomeCase>, int> next_index;
    std::vector<ScenarioNode> nodes;
    for (const auto& endpoint : endpoints) {
        for (const auto& [outcome, spec] : endpoint.cases) {
            ScenarioNode node;
            node.resource = endpoint.resource;
            node.method = endpoint.method;
            node.outcome_case = outcome;
            node.method_index = next_index[{endpoint.method, outcome}]++;
            node.url_template = endpoint.url_template;
            node.input = spec.input;
            node.expected = spec.expected;
            nodes.push_back(std::move(node));
        }
    }
    return nodes;
}

} // namespace nirikshak
