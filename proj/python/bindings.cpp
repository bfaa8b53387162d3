#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nirikshak/analysis.hpp"
#include "nirikshak/errors.hpp"
#include "nirikshak/mock_api.hpp"
#include "nirikshak/runner.hpp"

namespace py = pybind11;
using namespace nirikshak;

namespace {

py::object json_to_py(const Json& value) {
    switch (value.type()) {
    case Json::value_t::null:
        return py::none();
    case Json::value_t::boolean:
        return py::bool_(value.get<bool>());
    case Json::value_t::number_integer:
        return py::int_(value.get<int64_t>());
    case Json::value_t::number_unsigned:
        return py::int_(value.get<uint64_t>());
    case Json::value_t::number_float:
        return py::float_(value.get<double>());
    case Json::value_t::string:
        return py::str(value.get<std::string>());
    case Json::value_t::array: {
        py::list out;
        for (const auto& element : value) out.append(json_to_py(element));
        return out;
    }
    case Json::value_t::object: {
        py::dict out;
        for (const auto& item : value.items()) {
            out[py::str(item.key())] = json_to_py(item.value());
        }
        return out;
    }
    default:
        return py::none();
    }
}

Json py_to_json(py::handle value) {
    if (value.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(value)) return value.cast<bool>();
    if (py::isinstance<py::int_>(value)) return value.cast<int64_t>();
    if (py::isinstance<py::float_>(value)) return value.cast<double>();
    if (py::isinstance<py::str>(value)) return value.cast<std::string>();
    if (py::isinstance<py::dict>(value)) {
        Json out = Json::object();
        for (auto item : value.cast<py::dict>()) {
            out[item.first.cast<std::string>()] = py_to_json(item.second);
        }
        return out;
    }
    if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
        Json out = Json::array();
        for (auto element : value.cast<py::sequence>()) out.push_back(py_to_json(element));
        return out;
    }
    throw py::type_error("value is not JSON-representable");
}

struct SchemaHandle {
    ResourceSchema schema;
};

struct EndpointsHandle {
    std::vector<EndpointDescription> endpoints;
};

struct GraphHandle {
    ScenarioGraph graph;
};

ResourceInstance instance_of(const SchemaHandle& schema, py::handle values) {
    ResourceInstance instance;
    instance.resource = schema.schema.name;
    instance.values = py_to_json(values);
    return instance;
}

std::vector<TestRecord> records_of(py::handle records) {
    std::vector<TestRecord> out;
    for (auto item : records.cast<py::sequence>()) {
        out.push_back(record_from_json(py_to_json(item)));
    }
    return out;
}

py::list records_to_py(const std::vector<TestRecord>& records) {
    py::list out;
    for (const auto& record : records) out.append(json_to_py(record_to_json(record)));
    return out;
}

AnalysisParams params_of(double eps, int min_pts, size_t cluster_gate,
                         const std::optional<std::vector<double>>& weights) {
    AnalysisParams params;
    params.eps = eps;
    params.min_pts = min_pts;
    params.cluster_gate = cluster_gate;
    if (weights) {
        if (weights->size() != 5) {
            throw ConfigError("weights must have exactly 5 entries");
        }
        std::copy(weights->begin(), weights->end(), params.weights.begin());
    }
    params.validate();
    return params;
}

} // namespace

PYBIND11_MODULE(_nirikshak, m) {
    m.doc() = "Stateful REST API test engine: schema-driven request generation, "
              "scenario-graph walks, structured logs and failure analysis.";
    m.attr("__version__") = "0.1.0";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const TemplateError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const SetupError& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    py::class_<SchemaHandle>(m, "Schema")
        .def_property_readonly("name", [](const SchemaHandle& s) { return s.schema.name; })
        .def_property_readonly("id_field", [](const SchemaHandle& s) { return s.schema.id_field; })
        .def_property_readonly("field_names", [](const SchemaHandle& s) {
            std::vector<std::string> names;
            for (const auto& [name, spec] : s.schema.fields) names.push_back(name);
            return names;
        })
        .def("__repr__", [](const SchemaHandle& s) {
            return "<Schema '" + s.schema.name + "', " + std::to_string(s.schema.fields.size()) +
                   " fields>";
        });

    py::class_<EndpointsHandle>(m, "Endpoints")
        .def("__len__", [](const EndpointsHandle& e) { return e.endpoints.size(); });

    py::class_<GraphHandle>(m, "Graph")
        .def_property_readonly("node_count",
                               [](const GraphHandle& g) { return g.graph.nodes.size(); })
        .def_property_readonly("edge_count",
                               [](const GraphHandle& g) {
                                   size_t edges = 0;
                                   for (const auto& row : g.graph.adjacency) edges += row.size();
                                   return edges;
                               })
        .def_property_readonly("node_ids",
                               [](const GraphHandle& g) {
                                   std::vector<std::string> ids;
                                   for (const auto& node : g.graph.nodes) ids.push_back(node.id());
                                   return ids;
                               })
        .def("to_json", [](const GraphHandle& g) { return json_to_py(graph_to_json(g.graph)); });

    m.def(
        "parse_schema",
        [](const std::string& text) { return SchemaHandle{parse_resource_schema(text)}; },
        py::arg("text"), "Parse and validate a resource schema document.");

    m.def(
        "parse_endpoints",
        [](const std::string& text, const SchemaHandle& schema) {
            return EndpointsHandle{parse_endpoints(text, schema.schema)};
        },
        py::arg("text"), py::arg("schema"),
        "Parse and validate an endpoints document against a schema.");

    m.def(
        "generate_instance",
        [](const SchemaHandle& schema, uint64_t seed) {
            Rng rng(seed);
            return json_to_py(generate_instance(schema.schema, rng).values);
        },
        py::arg("schema"), py::arg("seed"),
        "Generate one schema-conforming instance; same seed, same instance.");

    m.def(
        "validate_instance",
        [](const SchemaHandle& schema, py::handle values) {
            validate_instance(schema.schema, instance_of(schema, values));
        },
        py::arg("schema"), py::arg("values"),
        "Raise ValueError when the values violate the schema.");

    m.def(
        "populate_template",
        [](py::handle tmpl, const SchemaHandle& schema, py::handle values) {
            return json_to_py(populate_template(py_to_json(tmpl), instance_of(schema, values)));
        },
        py::arg("template"), py::arg("schema"), py::arg("values"),
        "Replace {resource:FIELD} placeholders with instance values.");

    m.def(
        "build_graph",
        [](const EndpointsHandle& endpoints) {
            return GraphHandle{build_graph(enumerate_nodes(endpoints.endpoints))};
        },
        py::arg("endpoints"), "Build the scenario graph over one resource's cases.");

    m.def(
        "enumerate_walks",
        [](const GraphHandle& graph, int steps, int max_steps) {
            return enumerate_walks(graph.graph, steps, max_steps);
        },
        py::arg("graph"), py::arg("steps"), py::arg("max_steps") = kDefaultMaxSteps,
        "Every walk with exactly `steps` vertices, in lexicographic id order.");

    m.def(
        "combined_distance",
        [](py::handle a, py::handle b, const std::optional<std::vector<double>>& weights) {
            const auto params = params_of(0.4, 7, 100, weights);
            return combined_distance(record_from_json(py_to_json(a)),
                                     record_from_json(py_to_json(b)), params.weights);
        },
        py::arg("a"), py::arg("b"), py::arg("weights") = py::none(),
        "Weighted mean of the five per-attribute record distances.");

    m.def(
        "dbscan",
        [](py::handle records, double eps, int min_pts,
           const std::optional<std::vector<double>>& weights) {
            const auto params = params_of(eps, min_pts, 100, weights);
            return dbscan(records_of(records), params);
        },
        py::arg("records"), py::arg("eps") = 0.4, py::arg("min_pts") = 7,
        py::arg("weights") = py::none(),
        "Cluster records over the combined distance; -1 labels noise.");

    m.def(
        "analyze",
        [](py::handle records, double eps, int min_pts, size_t cluster_gate,
           const std::optional<std::vector<double>>& weights) {
            const auto params = params_of(eps, min_pts, cluster_gate, weights);
            return json_to_py(report_to_json(analyze(records_of(records), params)));
        },
        py::arg("records"), py::arg("eps") = 0.4, py::arg("min_pts") = 7,
        py::arg("cluster_gate") = 100, py::arg("weights") = py::none(),
        "Gated analysis: ratio, failure hierarchy, clusters when warranted.");

    m.def(
        "run_tests",
        [](const std::string& base_url, const SchemaHandle& schema,
           const EndpointsHandle& endpoints, int steps, int iterations, int setup_instances,
           uint64_t seed, const std::optional<std::string>& setup_hook,
           const std::optional<std::string>& cleanup_hook, int timeout_ms, bool fail_fast) {
            RunConfig config;
            config.base_url = base_url;
            config.steps = steps;
            config.iterations = iterations;
            config.setup_instances = setup_instances;
            config.seed = seed;
            config.setup_hook = setup_hook;
            config.cleanup_hook = cleanup_hook;
            config.request_timeout = std::chrono::milliseconds(timeout_ms);
            config.fail_fast = fail_fast;

            std::vector<ResourceSetup> resources(1);
            resources[0].schema = schema.schema;
            resources[0].endpoints = endpoints.endpoints;

            std::vector<TestRecord> records;
            {
                py::gil_scoped_release release;
                records = run(config, resources);
            }
            return records_to_py(records);
        },
        py::arg("base_url"), py::arg("schema"), py::arg("endpoints"), py::arg("steps") = 3,
        py::arg("iterations") = 5, py::arg("setup_instances") = 10, py::arg("seed") = 1,
        py::arg("setup_hook") = py::none(), py::arg("cleanup_hook") = py::none(),
        py::arg("timeout_ms") = 10000, py::arg("fail_fast") = false,
        "Execute the full engine flow and return the records as dicts.");

    m.def(
        "emit_log",
        [](py::handle records, const std::string& path) { emit_log(records_of(records), path); },
        py::arg("records"), py::arg("path"), "Write records as JSON Lines.");

    m.def(
        "parse_log",
        [](const std::string& path) { return records_to_py(parse_log(path)); },
        py::arg("path"), "Read a JSON Lines log back into record dicts.");

    py::class_<MockServer>(m, "MockServer")
        .def(py::init([](const std::string& resource, const std::string& id_field,
                         py::handle bugs) {
                 const BugFlags flags = bugs.is_none() ? BugFlags{}
                                                       : BugFlags::from_json(py_to_json(bugs));
                 return std::make_unique<MockServer>(resource, id_field, flags);
             }),
             py::arg("resource") = "student", py::arg("id_field") = "id",
             py::arg("bugs") = py::none())
        .def("start", &MockServer::start, py::call_guard<py::gil_scoped_release>())
        .def("stop", &MockServer::stop, py::call_guard<py::gil_scoped_release>())
        .def("reset", &MockServer::reset)
        .def_property_readonly("port", &MockServer::port)
        .def_property_readonly("base_url", &MockServer::base_url)
        .def_property_readonly("stored_count", &MockServer::stored_count)
        .def("has", &MockServer::has, py::arg("id"))
        .def("stored", [](const MockServer& s, const std::string& id) {
            return json_to_py(s.stored(id));
        }, py::arg("id"))
        .def("preload", [](MockServer& s, py::handle object) { s.preload(py_to_json(object)); },
             py::arg("object"))
        .def("__enter__", [](MockServer& s) -> MockServer& {
            s.start();
            return s;
        })
        .def("__exit__", [](MockServer& s, py::handle, py::handle, py::handle) {
            s.stop();
            return false;
        });
}
