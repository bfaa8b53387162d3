#pragma once

#include <vector>

#include "nirikshak/endpoints.hpp"

namespace nirikshak {

/// Whether the tracked resource instance is believed present in the API.
/// ANY appears only as a precondition.
enum class ExistenceState { Exists, Missing, Any };

std::string to_string(ExistenceState state);

struct Transition {
    ExistenceState pre;
    ExistenceState post;
};

/// The existence-state transition of one request kind. Fixed table derived
/// from REST semantics of the method crossed with the outcome case.
Transition node_transition(HttpMethod method, OutcomeCase outcome);

/// True iff running `a` leaves the instance in a state that satisfies `b`'s
/// precondition. Depends only on (method, outcomeCase) of either node.
bool edge_possible(const ScenarioNode& a, const ScenarioNode& b);

/// Directed graph over one resource's scenario nodes. adjacency[i] lists
/// target node indices; self-loops allowed.
struct ScenarioGraph {
    std::vector<ScenarioNode> nodes;
    std::vector<std::vector<int>> adjacency;
};

/// A walk is an ordered list of node indices; consecutive pairs are edges.
using Walk = std::vector<int>;

inline constexpr int kDefaultMaxSteps = 3;

/// All-pairs application of edge_possible (self-pairs included).
ScenarioGraph build_graph(std::vector<ScenarioNode> nodes);

/// Every directed walk with exactly `steps` vertices, ordered
/// lexicographically by node identifier sequence.
/// Throws ConfigError when steps is outside [1, max_steps].
std::vector<Walk> enumerate_walks(const ScenarioGraph& graph, int steps,
                                  int max_steps = kDefaultMaxSteps);

/// Debug export: {"nodes":[{...}], "edges":[[from,to],...]} with node ids.
Json graph_to_json(const ScenarioGraph& graph);

} // namespace nirikshak
