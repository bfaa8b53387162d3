#include "nirikshak/graph.hpp"

#include <algorithm>
#include <numeric>

#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

bool satisfies(ExistenceState post, ExistenceState pre) {
    return pre == ExistenceState::Any || post == pre;
}

} // namespace

std::string to_string(ExistenceState state) {
    switch (state) {
    case ExistenceState::Exists: return "EXISTS";
    case ExistenceState::Missing: return "MISSING";
    case ExistenceState::Any: return "ANY";
    }
    return "ANY";
}

Transition node_transition(HttpMethod method, OutcomeCase outcome) {
    using E = ExistenceState;
    switch (outcome) {
    case OutcomeCase::Destructive:
        // malformed request against an existing instance, state untouched
        return {E::Exists, E::Exists};
    case OutcomeCase::Positive:
        switch (method) {
        case HttpMethod::Get: return {E::Exists, E::Exists};
        case HttpMethod::Post: return {E::Missing, E::Exists};
        case HttpMethod::Put: return {E::Any, E::Exists};
        case HttpMethod::Patch: return {E::Exists, E::Exists};
        case HttpMethod::Delete: return {E::Exists, E::Missing};
        }
        break;
    case OutcomeCase::Negative:
        switch (method) {
        case HttpMethod::Get: return {E::Missing, E::Missing};
        case HttpMethod::Post: return {E::Exists, E::Exists};
        case HttpMethod::Put: return {E::Missing, E::Missing};
        case HttpMethod::Patch: return {E::Missing, E::Missing};
        case HttpMethod::Delete: return {E::Missing, E::Missing};
        }
        break;
    }
    return {E::Any, E::Exists};
}

bool edge_possible(const ScenarioNode& a, const ScenarioNode& b) {
    const auto post = node_transition(a.method, a.outcome_case).post;
    const auto pre = node_transition(b.method, b.outcome_case).pre;
    return satisfies(post, pre);
}

ScenarioGraph build_graph(std::vector<ScenarioNode> nodes) {
    ScenarioGraph graph;
    graph.nodes = std::move(nodes);
    const auto n = graph.nodes.size();
    graph.adjacency.resize(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (edge_possible(graph.nodes[i], graph.nodes[j])) {
                graph.adjacency[i].push_back(static_cast<int>(j));
            }
        }
    }
    return graph;
}

std::vector<Walk> enumerate_walks(const ScenarioGraph& graph, int steps, int max_steps) {
    if (steps < 1 || steps > max_steps) {
        throw ConfigError("steps must be in [1, " + std::to_string(max_steps) + "], got " +
                          std::to_string(steps));
    }
    const auto n = graph.nodes.size();

    // visit order that makes the output lexicographic by node id sequence
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        return graph.nodes[static_cast<size_t>(a)].id() < graph.nodes[static_cast<size_t>(b)].id();
    });

    std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i) {
        for (const int j : graph.adjacency[i]) edge[i][static_cast<size_t>(j)] = true;
    }
    std::vector<std::vector<int>> successors(n);
    for (size_t i = 0; i < n; ++i) {
        for (const int j : perm) {
            if (edge[i][static_cast<size_t>(j)]) successors[i].push_back(j);
        }
    }

    std::vector<Walk> walks;
    Walk path;
    const auto extend = [&](auto&& self, int node) -> void {
        path.push_back(node);
        if (path.size() == static_cast<size_t>(steps)) {
            walks.push_back(path);
        } else {
            for (const int next : successors[static_cast<size_t>(node)]) self(self, next);
        }
        path.pop_back();
    };
    for (const int start : perm) extend(extend, start);
    return walks;
}

Json graph_to_json(const ScenarioGraph& graph) {
    Json nodes = Json::array();
    for (const auto& node : graph.nodes) {
        const auto transition = node_transition(node.method, node.outcome_case);
        nodes.push_back(Json{
            {"id", node.id()},
            {"resource", node.resource},
            {"method", to_string(node.method)},
            {"outcomeCase", to_string(node.outcome_case)},
            {"methodIndex", node.method_index},
            {"url", node.url_template},
            {"pre", to_string(transition.pre)},
            {"post", to_string(transition.post)},
        });
    }
    Json edges = Json::array();
    for (size_t i = 0; i < graph.adjacency.size(); ++i) {
        for (const int j : graph.adjacency[i]) {
            edges.push_back(Json::array({static_cast<int>(i), j}));
        }
    }
    return Json{{"nodes", nodes}, {"edges", edges}};
}

} // namespace nirikshak
