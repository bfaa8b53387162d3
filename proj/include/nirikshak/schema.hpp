#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nirikshak/rng.hpp"

namespace nirikshak {

using Json = nlohmann::json;

/// A template is a JSON value whose strings may embed `{resource:FIELD}`
/// placeholders. Nested fields are addressed with dot paths
/// (`{resource:address.city}`).
using Template = Json;

enum class FieldKind {
    Name,
    Address,
    Email,
    Uuid,
    Integer,
    Float,
    Boolean,
    Date,
    Enum,
    Text,
    Object,
    Array,
};

std::string to_string(FieldKind kind);
std::optional<FieldKind> field_kind_from_string(std::string_view s);

/// One field of a resource schema. Constraints are kind-dependent.
struct FieldSpec {
    FieldKind kind = FieldKind::Text;
    bool optional = false;

    // integer
    int64_t min_int = 0;
    int64_t max_int = 1000000;
    // float
    double min_real = 0.0;
    double max_real = 1.0;
    // enum
    std::vector<std::string> choices;
    // array
    std::shared_ptr<FieldSpec> items;
    size_t min_len = 0;
    size_t max_len = 3;
    // object
    std::map<std::string, FieldSpec> fields;
};

/// A user-described resource: a named data model plus the field that
/// identifies instances.
struct ResourceSchema {
    std::string name;
    std::string id_field;
    std::map<std::string, FieldSpec> fields;

    /// Resolve a dot path ("address.city") against the field tree.
    /// Returns nullptr when any segment is missing.
    const FieldSpec* find(std::string_view dot_path) const;
};

/// A concrete resource generated from a schema.
struct ResourceInstance {
    std::string resource;
    Json values;

    /// The id field value rendered as a string; keys pools and URLs.
    std::string id_string(const ResourceSchema& schema) const;

    bool operator==(const ResourceInstance&) const = default;
};

/// Parse and validate a resource schema document.
/// Throws ConfigError on malformed JSON or any invariant violation.
ResourceSchema parse_resource_schema(std::string_view document);

/// Generate an instance satisfying every schema constraint. Deterministic:
/// the result is a pure function of the schema and the rng state.
ResourceInstance generate_instance(const ResourceSchema& schema, Rng& rng);

/// Check an instance against its schema; throws ConfigError on violation.
void validate_instance(const ResourceSchema& schema, const ResourceInstance& instance);

/// Replace every `{resource:FIELD}` placeholder with the instance's value.
/// A string that is exactly one placeholder takes the field's typed value;
/// placeholders embedded in longer strings are stringified in place.
/// Throws TemplateError when a placeholder names an absent field.
Json populate_template(const Template& tmpl, const ResourceInstance& instance);

/// All placeholder paths appearing anywhere in the template.
std::vector<std::string> template_placeholders(const Template& tmpl);

/// Throws ConfigError naming the offending placeholder when one does not
/// resolve against the schema. `context` prefixes the message.
void validate_template_against_schema(const Template& tmpl, const ResourceSchema& schema,
                                      const std::string& context);

/// Render a JSON value the way it appears inside URLs and headers:
/// strings bare, numbers/bools canonical, containers as compact JSON.
std::string stringify_value(const Json& value);

} // namespace nirikshak
