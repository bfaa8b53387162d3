"""Stateful REST API test engine bindings."""

from ._nirikshak import (
    Endpoints,
    Graph,
    MockServer,
    Schema,
    __version__,
    analyze,
    build_graph,
    combined_distance,
    dbscan,
    emit_log,
    enumerate_walks,
    generate_instance,
    parse_endpoints,
    parse_log,
    parse_schema,
    populate_template,
    run_tests,
    validate_instance,
)

__all__ = [
    "Endpoints",
    "Graph",
    "MockServer",
    "Schema",
    "__version__",
    "analyze",
    "build_graph",
    "combined_distance",
    "dbscan",
    "emit_log",
    "enumerate_walks",
    "generate_instance",
    "parse_endpoints",
    "parse_log",
    "parse_schema",
    "populate_template",
    "run_tests",
    "validate_instance",
]
