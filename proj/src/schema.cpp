#include "nirikshak/schema.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <set>

#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

constexpr std::array<const char*, 24> kFirstNames = {
    "Aarav", "Beth",   "Carlos", "Diya",   "Elena", "Farid",
    "Grace", "Hiro",   "Ines",   "Jonas",  "Kavya", "Liam",
    "Mira",  "Noel",   "Omar",   "Priya",  "Quinn", "Rohan",
    "Sara",  "Tomas",  "Uma",    "Viktor", "Wanda", "Yusuf",
};

constexpr std::array<const char*, 24> kLastNames = {
    "Adler",  "Banerjee", "Castro",  "Dvorak", "Eriksen",  "Fontaine",
    "Gupta",  "Haines",   "Iyer",    "Jensen", "Kowalski", "Lindqvist",
    "Moreau", "Nakamura", "Okafor",  "Patel",  "Quint",    "Rossi",
    "Sharma", "Takahashi", "Ueda",   "Varga",  "Weiss",    "Zhang",
};

constexpr std::array<const char*, 16> kStreets = {
    "Alder Street",   "Birch Avenue",  "Cedar Lane",    "Dover Road",
    "Elm Court",      "Fir Terrace",   "Grove Street",  "Hazel Drive",
    "Ivy Close",      "Juniper Way",   "Kings Road",    "Laurel Street",
    "Maple Avenue",   "Ninth Street",  "Oak Boulevard", "Pine Crescent",
};

constexpr std::array<const char*, 12> kCities = {
    "Arborfield", "Brookhaven", "Clearwater", "Dunmore",
    "Eastvale",   "Fernhill",   "Graymont",   "Harborview",
    "Ironbridge", "Juneport",   "Kingsford",  "Lakemoor",
};

constexpr std::array<const char*, 8> kEmailDomains = {
    "example.com", "example.org", "example.net", "mail.test",
    "inbox.test",  "post.test",   "campus.test", "labs.test",
};

constexpr std::array<const char*, 32> kWords = {
    "amber",  "basalt", "cobalt", "delta",  "ember",  "fathom", "garnet", "harbor",
    "indigo", "jasper", "krypton", "lumen", "marble", "nickel", "onyx",   "pewter",
    "quartz", "russet", "sienna", "topaz",  "umber",  "violet", "walnut", "xenon",
    "yarrow", "zephyr", "arbor",  "breeze", "cinder", "drift",  "echo",   "flint",
};

template <size_t N>
const char* pick_from(Rng& rng, const std::array<const char*, N>& items) {
    return items[static_cast<size_t>(rng.below(N))];
}

std::string gen_uuid(Rng& rng) {
    const uint64_t hi = rng.next_u64();
    const uint64_t lo = rng.next_u64();
    // version 4, variant 10xx
    const auto part1 = static_cast<unsigned long long>(hi >> 32);
    const auto part2 = static_cast<unsigned long long>((hi >> 16) & 0xffffULL);
    const auto part3 = static_cast<unsigned long long>(0x4000ULL | (hi & 0x0fffULL));
    const auto part4 = static_cast<unsigned long long>(0x8000ULL | ((lo >> 48) & 0x3fffULL));
    const auto part5 = static_cast<unsigned long long>(lo & 0xffffffffffffULL);
    char buf[37];
    std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx", part1, part2, part3,
                  part4, part5);
    return buf;
}

std::string gen_date(Rng& rng) {
    // days since 1970-01-01, up to the end of 2030
    int64_t z = rng.int_in(0, 22279);
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp < 10 ? mp + 3 : mp - 9;
    const auto year = static_cast<long long>(y + (month <= 2));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", year, month, day);
    return buf;
}

Json generate_value(const FieldSpec& spec, Rng& rng) {
    switch (spec.kind) {
    case FieldKind::Name: {
        std::string first = pick_from(rng, kFirstNames);
        std::string last = pick_from(rng, kLastNames);
        return first + " " + last;
    }
    case FieldKind::Address: {
        const auto number = rng.int_in(1, 999);
        std::string street = pick_from(rng, kStreets);
        std::string city = pick_from(rng, kCities);
        return std::to_string(number) + " " + street + ", " + city;
    }
    case FieldKind::Email: {
        std::string local = pick_from(rng, kWords);
        const auto tag = rng.int_in(0, 999);
        std::string domain = pick_from(rng, kEmailDomains);
        return local + std::to_string(tag) + "@" + domain;
    }
    case FieldKind::Uuid:
        return gen_uuid(rng);
    case FieldKind::Integer:
        return rng.int_in(spec.min_int, spec.max_int);
    case FieldKind::Float:
        return rng.real_in(spec.min_real, spec.max_real);
    case FieldKind::Boolean:
        return rng.coin();
    case FieldKind::Date:
        return gen_date(rng);
    case FieldKind::Enum:
        return spec.choices[static_cast<size_t>(rng.below(spec.choices.size()))];
    case FieldKind::Text: {
        const auto count = rng.int_in(2, 6);
        std::string out;
        for (int64_t i = 0; i < count; ++i) {
            if (!out.empty()) out += ' ';
            out += pick_from(rng, kWords);
        }
        return out;
    }
    case FieldKind::Object: {
        Json obj = Json::object();
        for (const auto& [name, child] : spec.fields) obj[name] = generate_value(child, rng);
        return obj;
    }
    case FieldKind::Array: {
        const auto count =
            rng.int_in(static_cast<int64_t>(spec.min_len), static_cast<int64_t>(spec.max_len));
        Json arr = Json::array();
        for (int64_t i = 0; i < count; ++i) arr.push_back(generate_value(*spec.items, rng));
        return arr;
    }
    }
    return nullptr; // unreachable
}

bool is_uuid_string(const std::string& s) {
    if (s.size() != 36) return false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (s[i] != '-') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

bool is_date_string(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    const int month = std::stoi(s.substr(5, 2));
    const int day = std::stoi(s.substr(8, 2));
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

void check_allowed_keys(const Json& obj, const std::set<std::string>& allowed,
                        const std::string& where) {
    for (const auto& item : obj.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ConfigError("schema: " + where + ": unknown key '" + item.key() + "'");
        }
    }
}

FieldSpec parse_field_spec(const std::string& path, const Json& j) {
    if (!j.is_object()) throw ConfigError("schema: field '" + path + "' must be an object");
    if (!j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("schema: field '" + path + "' is missing a string 'kind'");
    }
    const auto kind_name = j["kind"].get<std::string>();
    const auto kind = field_kind_from_string(kind_name);
    if (!kind) {
        throw ConfigError("schema: field '" + path + "': unknown kind '" + kind_name + "'");
    }

    FieldSpec spec;
    spec.kind = *kind;
    std::set<std::string> allowed = {"kind", "optional"};
    switch (spec.kind) {
    case FieldKind::Integer:
    case FieldKind::Float:
        allowed.insert("min");
        allowed.insert("max");
        break;
    case FieldKind::Enum:
        allowed.insert("choices");
        break;
    case FieldKind::Array:
        allowed.insert("items");
        allowed.insert("minLen");
        allowed.insert("maxLen");
        break;
    case FieldKind::Object:
        allowed.insert("fields");
        break;
    default:
        break;
    }
    check_allowed_keys(j, allowed, "field '" + path + "'");

    if (j.contains("optional")) {
        if (!j["optional"].is_boolean()) {
            throw ConfigError("schema: field '" + path + "': 'optional' must be a boolean");
        }
        spec.optional = j["optional"].get<bool>();
    }

    switch (spec.kind) {
    case FieldKind::Integer:
        if (j.contains("min")) spec.min_int = j["min"].get<int64_t>();
        if (j.contains("max")) spec.max_int = j["max"].get<int64_t>();
        if (spec.min_int > spec.max_int) {
            throw ConfigError("schema: field '" + path + "': min exceeds max");
        }
        break;
    case FieldKind::Float:
        if (j.contains("min")) spec.min_real = j["min"].get<double>();
        if (j.contains("max")) spec.max_real = j["max"].get<double>();
        if (spec.min_real > spec.max_real) {
            throw ConfigError("schema: field '" + path + "': min exceeds max");
        }
        break;
    case FieldKind::Enum: {
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
            throw ConfigError("schema: field '" + path + "': enum needs a non-empty choice list");
        }
        std::set<std::string> seen;
        for (const auto& c : j["choices"]) {
            if (!c.is_string()) {
                throw ConfigError("schema: field '" + path + "': choices must be strings");
            }
            if (!seen.insert(c.get<std::string>()).second) {
                throw ConfigError("schema: field '" + path + "': duplicate choice '" +
                                  c.get<std::string>() + "'");
            }
            spec.choices.push_back(c.get<std::string>());
        }
        break;
    }
    case FieldKind::Array: {
        if (!j.contains("items")) {
            throw ConfigError("schema: field '" + path + "': array needs 'items'");
        }
        spec.items = std::make_shared<FieldSpec>(parse_field_spec(path + "[]", j["items"]));
        if (j.contains("minLen")) spec.min_len = j["minLen"].get<size_t>();
        if (j.contains("maxLen")) spec.max_len = j["maxLen"].get<size_t>();
        if (j.contains("minLen") && j["minLen"].is_number() && j["minLen"].get<double>() < 0) {
            throw ConfigError("schema: field '" + path + "': minLen must be non-negative");
        }
        if (spec.min_len > spec.max_len) {
            throw ConfigError("schema: field '" + path + "': minLen exceeds maxLen");
        }
        break;
    }
    case FieldKind::Object: {
        if (!j.contains("fields") || !j["fields"].is_object()) {
            throw ConfigError("schema: field '" + path + "': object needs a 'fields' map");
        }
        for (const auto& item : j["fields"].items()) {
            if (item.key().empty()) {
                throw ConfigError("schema: field '" + path + "': empty child field name");
            }
            spec.fields.emplace(item.key(), parse_field_spec(path + "." + item.key(), item.value()));
        }
        break;
    }
    default:
        break;
    }
    return spec;
}

void validate_value(const std::string& path, const FieldSpec& spec, const Json& value) {
    const auto fail = [&](const std::string& why) {
        throw ConfigError("instance: field '" + path + "' " + why);
    };
    switch (spec.kind) {
    case FieldKind::Name:
    case FieldKind::Address:
    case FieldKind::Text:
        if (!value.is_string() || value.get<std::string>().empty()) fail("must be a non-empty string");
        break;
    case FieldKind::Email:
        if (!value.is_string() || value.get<std::string>().find('@') == std::string::npos) {
            fail("must be an email address");
        }
        break;
    case FieldKind::Uuid:
        if (!value.is_string() || !is_uuid_string(value.get<std::string>())) fail("must be a uuid");
        break;
    case FieldKind::Integer:
        if (!value.is_number_integer()) fail("must be an integer");
        if (value.get<int64_t>() < spec.min_int || value.get<int64_t>() > spec.max_int) {
            fail("is out of range");
        }
        break;
    case FieldKind::Float:
        if (!value.is_number()) fail("must be a number");
        if (value.get<double>() < spec.min_real || value.get<double>() > spec.max_real) {
            fail("is out of range");
        }
        break;
    case FieldKind::Boolean:
        if (!value.is_boolean()) fail("must be a boolean");
        break;
    case FieldKind::Date:
        if (!value.is_string() || !is_date_string(value.get<std::string>())) {
            fail("must be an ISO date (YYYY-MM-DD)");
        }
        break;
    case FieldKind::Enum:
        if (!value.is_string() ||
            std::find(spec.choices.begin(), spec.choices.end(), value.get<std::string>()) ==
                spec.choices.end()) {
            fail("is not one of the declared choices");
        }
        break;
    case FieldKind::Object: {
        if (!value.is_object()) fail("must be an object");
        for (const auto& [name, child] : spec.fields) {
            if (!value.contains(name)) {
                if (!child.optional) fail("is missing child '" + name + "'");
                continue;
            }
            validate_value(path + "." + name, child, value[name]);
        }
        for (const auto& item : value.items()) {
            if (spec.fields.count(item.key()) == 0) fail("has unknown child '" + item.key() + "'");
        }
        break;
    }
    case FieldKind::Array: {
        if (!value.is_array()) fail("must be an array");
        if (value.size() < spec.min_len || value.size() > spec.max_len) {
            fail("has an out-of-range length");
        }
        for (size_t i = 0; i < value.size(); ++i) {
            validate_value(path + "[" + std::to_string(i) + "]", *spec.items, value[i]);
        }
        break;
    }
    }
}

constexpr std::string_view kPlaceholderOpen = "{resource:";

bool placeholder_path_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

struct TextPart {
    bool is_placeholder;
    std::string text; // literal text or placeholder path
};

// "{resource:PATH}" spans parse into placeholder parts, everything else stays literal.
std::vector<TextPart> split_placeholders(const std::string& s) {
    std::vector<TextPart> parts;
    size_t pos = 0;
    while (pos < s.size()) {
        const size_t open = s.find(kPlaceholderOpen, pos);
        if (open == std::string::npos) {
            parts.push_back({false, s.substr(pos)});
            break;
        }
        size_t cursor = open + kPlaceholderOpen.size();
        size_t path_end = cursor;
        while (path_end < s.size() && placeholder_path_char(s[path_end])) ++path_end;
        if (path_end > cursor && path_end < s.size() && s[path_end] == '}') {
            if (open > pos) parts.push_back({false, s.substr(pos, open - pos)});
            parts.push_back({true, s.substr(cursor, path_end - cursor)});
            pos = path_end + 1;
        } else {
            // not a well-formed placeholder, keep the brace as literal text
            parts.push_back({false, s.substr(pos, open + 1 - pos)});
            pos = open + 1;
        }
    }
    if (parts.empty()) parts.push_back({false, ""});
    return parts;
}

const Json* lookup_path(const Json& values, const std::string& dot_path) {
    const Json* cur = &values;
    size_t pos = 0;
    while (true) {
        const size_t dot = dot_path.find('.', pos);
        const std::string key =
            dot == std::string::npos ? dot_path.substr(pos) : dot_path.substr(pos, dot - pos);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) return cur;
        pos = dot + 1;
    }
}

Json populate_string(const std::string& s, const ResourceInstance& instance) {
    const auto parts = split_placeholders(s);
    if (parts.size() == 1 && parts[0].is_placeholder) {
        const Json* value = lookup_path(instance.values, parts[0].text);
        if (!value) {
            throw TemplateError("placeholder {resource:" + parts[0].text + "} does not resolve");
        }
        return *value;
    }
    std::string out;
    for (const auto& part : parts) {
        if (!part.is_placeholder) {
            out += part.text;
            continue;
        }
        const Json* value = lookup_path(instance.values, part.text);
        if (!value) {
            throw TemplateError("placeholder {resource:" + part.text + "} does not resolve");
        }
        out += stringify_value(*value);
    }
    return out;
}

void collect_placeholders(const Json& node, std::vector<std::string>& out) {
    if (node.is_string()) {
        for (const auto& part : split_placeholders(node.get<std::string>())) {
            if (part.is_placeholder &&
                std::find(out.begin(), out.end(), part.text) == out.end()) {
                out.push_back(part.text);
            }
        }
    } else if (node.is_object()) {
        for (const auto& item : node.items()) collect_placeholders(item.value(), out);
    } else if (node.is_array()) {
        for (const auto& element : node) collect_placeholders(element, out);
    }
}

} // namespace

std::string to_string(FieldKind kind) {
    switch (kind) {
    case FieldKind::Name: return "name";
    case FieldKind::Address: return "address";
    case FieldKind::Email: return "email";
    case FieldKind::Uuid: return "uuid";
    case FieldKind::Integer: return "integer";
    case FieldKind::Float: return "float";
    case FieldKind::Boolean: return "boolean";
    case FieldKind::Date: return "date";
    case FieldKind::Enum: return "enum";
    case FieldKind::Text: return "text";
    case FieldKind::Object: return "object";
    case FieldKind::Array: return "array";
    }
    return "text";
}

std::optional<FieldKind> field_kind_from_string(std::string_view s) {
    static const std::map<std::string_view, FieldKind> table = {
        {"name", FieldKind::Name},       {"address", FieldKind::Address},
        {"email", FieldKind::Email},     {"uuid", FieldKind::Uuid},
        {"integer", FieldKind::Integer}, {"float", FieldKind::Float},
        {"boolean", FieldKind::Boolean}, {"date", FieldKind::Date},
        {"enum", FieldKind::Enum},       {"text", FieldKind::Text},
        {"object", FieldKind::Object},   {"array", FieldKind::Array},
    };
    const auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

const FieldSpec* ResourceSchema::find(std::string_view dot_path) const {
    const std::map<std::string, FieldSpec>* level = &fields;
    size_t pos = 0;
    while (true) {
        const size_t dot = dot_path.find('.', pos);
        const auto key = std::string(
            dot == std::string_view::npos ? dot_path.substr(pos) : dot_path.substr(pos, dot - pos));
        const auto it = level->find(key);
        if (it == level->end()) return nullptr;
        if (dot == std::string_view::npos) return &it->second;
        if (it->second.kind != FieldKind::Object) return nullptr;
        level = &it->second.fields;
        pos = dot + 1;
    }
}

std::string ResourceInstance::id_string(const ResourceSchema& schema) const {
    if (!values.is_object() || !values.contains(schema.id_field)) return "";
    return stringify_value(values[schema.id_field]);
}

ResourceSchema parse_resource_schema(std::string_view document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("schema: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("schema: top-level value must be an object");
    check_allowed_keys(doc, {"name", "idField", "fields"}, "document");

    if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
        throw ConfigError("schema: 'name' must be a non-empty string");
    }
    if (!doc.contains("idField") || !doc["idField"].is_string()) {
        throw ConfigError("schema: 'idField' must name a field");
    }
    if (!doc.contains("fields") || !doc["fields"].is_object() || doc["fields"].empty()) {
        throw ConfigError("schema: 'fields' must be a non-empty object");
    }

    ResourceSchema schema;
    schema.name = doc["name"].get<std::string>();
    schema.id_field = doc["idField"].get<std::string>();
    for (const auto& item : doc["fields"].items()) {
        if (item.key().empty()) throw ConfigError("schema: empty field name");
        schema.fields.emplace(item.key(), parse_field_spec(item.key(), item.value()));
    }

    const auto id_it = schema.fields.find(schema.id_field);
    if (id_it == schema.fields.end()) {
        throw ConfigError("schema: idField '" + schema.id_field + "' does not name a field");
    }
    if (id_it->second.kind != FieldKind::Uuid && id_it->second.kind != FieldKind::Integer) {
        throw ConfigError("schema: idField '" + schema.id_field + "' must be uuid or integer");
    }
    if (id_it->second.optional) {
        throw ConfigError("schema: idField '" + schema.id_field + "' cannot be optional");
    }
    return schema;
}

ResourceInstance generate_instance(const ResourceSchema& schema, Rng& rng) {
    ResourceInstance instance;
    instance.resource = schema.name;
    instance.values = Json::object();
    for (const auto& [name, spec] : schema.fields) {
        instance.values[name] = generate_value(spec, rng);
    }
    return instance;
}

void validate_instance(const ResourceSchema& schema, const ResourceInstance& instance) {
    if (instance.resource != schema.name) {
        throw ConfigError("instance: resource '" + instance.resource + "' does not match schema '" +
                          schema.name + "'");
    }
    if (!instance.values.is_object()) throw ConfigError("instance: values must be an object");
    for (const auto& [name, spec] : schema.fields) {
        if (!instance.values.contains(name)) {
            if (!spec.optional) throw ConfigError("instance: missing field '" + name + "'");
            continue;
        }
        validate_value(name, spec, instance.values[name]);
    }
    for (const auto& item : instance.values.items()) {
        if (schema.fields.count(item.key()) == 0) {
            throw ConfigError("instance: unknown field '" + item.key() + "'");
        }
    }
    if (instance.id_string(schema).empty()) {
        throw ConfigError("instance: empty idField value");
    }
}

Json populate_template(const Template& tmpl, const ResourceInstance& instance) {
    if (tmpl.is_string()) return populate_string(tmpl.get<std::string>(), instance);
    if (tmpl.is_object()) {
        Json out = Json::object();
        for (const auto& item : tmpl.items()) {
            out[item.key()] = populate_template(item.value(), instance);
        }
        return out;
    }
    if (tmpl.is_array()) {
        Json out = Json::array();
        for (const auto& element : tmpl) out.push_back(populate_template(element, instance));
        return out;
    }
    return tmpl;
}

std::vector<std::string> template_placeholders(const Template& tmpl) {
    std::vector<std::string> out;
    collect_placeholders(tmpl, out);
    return out;
}

void validate_template_against_schema(const Template& tmpl, const ResourceSchema& schema,
                                      const std::string& context) {
    for (const auto& path : template_placeholders(tmpl)) {
        if (schema.find(path) == nullptr) {
            throw ConfigError(context + ": placeholder {resource:" + path +
                              "} does not resolve against schema '" + schema.name + "'");
        }
    }
}

std::string stringify_value(const Json& value) {
    if (value.is_string()) return value.get<std::string>();
    return value.dump();
}

} // namespace nirikshak
