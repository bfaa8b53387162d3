#include "nirikshak/mock_api.hpp"

#include <thread>

#include <httplib.h>

#include "nirikshak/errors.hpp"

namespace nirikshak {

namespace {

constexpr const char* kFlagNames[] = {
    "getMissingReturns200", "deleteMissingReturns200", "postDuplicateCreates",
    "patchDropsField",      "putWrongStatus",
};

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

// student-shaped type checks; wrong types are the destructive-case trigger
std::optional<std::string> field_type_error(const Json& body) {
    if (body.contains("id") && !body["id"].is_string()) return "id must be a string";
    if (body.contains("name") && !body["name"].is_string()) return "name must be a string";
    if (body.contains("age") && !body["age"].is_number_integer()) return "age must be an integer";
    if (body.contains("branch") && !body["branch"].is_string()) return "branch must be a string";
    if (body.contains("address") && !body["address"].is_string()) {
        return "address must be a string";
    }
    return std::nullopt;
}

} // namespace

BugFlags BugFlags::from_json(const Json& flags) {
    if (!flags.is_object()) throw ConfigError("bug flags must be an object");
    BugFlags out;
    for (const auto& item : flags.items()) {
        bool known = false;
        for (const char* name : kFlagNames) {
            if (item.key() == name) known = true;
        }
        if (!known) throw ConfigError("unknown bug flag '" + item.key() + "'");
        if (!item.value().is_boolean()) {
            throw ConfigError("bug flag '" + item.key() + "' must be a boolean");
        }
    }
    const auto get = [&](const char* name) {
        return flags.contains(name) && flags[name].get<bool>();
    };
    out.get_missing_returns_200 = get("getMissingReturns200");
    out.delete_missing_returns_200 = get("deleteMissingReturns200");
    out.post_duplicate_creates = get("postDuplicateCreates");
    out.patch_drops_field = get("patchDropsField");
    out.put_wrong_status = get("putWrongStatus");
    return out;
}

Json BugFlags::to_json() const {
    return Json{
        {"getMissingReturns200", get_missing_returns_200},
        {"deleteMissingReturns200", delete_missing_returns_200},
        {"postDuplicateCreates", post_duplicate_creates},
        {"patchDropsField", patch_drops_field},
        {"putWrongStatus", put_wrong_status},
    };
}

struct MockServer::Impl {
    std::string resource;
    std::string id_field;
    BugFlags flags;

    httplib::Server server;
    std::thread thread;
    int port = 0;

    mutable std::mutex mutex;
    std::map<std::string, Json> store;

    std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
        Json body = Json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            send_json(res, 400, Json{{"error", "malformed body"}});
            return std::nullopt;
        }
        if (const auto why = field_type_error(body)) {
            send_json(res, 422, Json{{"error", *why}});
            return std::nullopt;
        }
        return body;
    }

    void route() {
        const std::string collection = "/" + resource;
        const std::string item = collection + "/([^/]+)";

        server.Post(collection, [this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req, res);
            if (!body) return;
            if (!body->contains(id_field) || !(*body)[id_field].is_string() ||
                (*body)[id_field].get<std::string>().empty()) {
                send_json(res, 422, Json{{"error", "missing " + id_field}});
                return;
            }
            const auto id = (*body)[id_field].get<std::string>();
            std::lock_guard<std::mutex> lock(mutex);
            if (store.count(id) && !flags.post_duplicate_creates) {
                send_json(res, 409, Json{{"error", "duplicate " + id_field}});
                return;
            }
            store[id] = *body;
            send_json(res, 201, store[id]);
        });

        server.Get(item, [this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.matches[1].str();
            std::lock_guard<std::mutex> lock(mutex);
            const auto it = store.find(id);
            if (it == store.end()) {
                if (flags.get_missing_returns_200) {
                    res.status = 200;
                    return;
                }
                send_json(res, 404, Json{{"error", "not found"}});
                return;
            }
            send_json(res, 200, it->second);
        });

        server.Put(item, [this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req, res);
            if (!body) return;
            const auto id = req.matches[1].str();
            if (body->contains(id_field) &&
                (!(*body)[id_field].is_string() || (*body)[id_field].get<std::string>() != id)) {
                send_json(res, 422, Json{{"error", id_field + " mismatch"}});
                return;
            }
            (*body)[id_field] = id;
            std::lock_guard<std::mutex> lock(mutex);
            const bool existed = store.count(id) > 0;
            store[id] = *body;
            if (flags.put_wrong_status) {
                res.status = 204;
                return;
            }
            send_json(res, existed ? 200 : 201, store[id]);
        });

        server.Patch(item, [this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.matches[1].str();
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (store.count(id) == 0) {
                    send_json(res, 404, Json{{"error", "not found"}});
                    return;
                }
            }
            auto body = parse_body(req, res);
            if (!body) return;
            if (body->contains(id_field) &&
                (!(*body)[id_field].is_string() || (*body)[id_field].get<std::string>() != id)) {
                send_json(res, 422, Json{{"error", id_field + " mismatch"}});
                return;
            }
            std::lock_guard<std::mutex> lock(mutex);
            Json& stored = store[id];
            for (const auto& member : body->items()) stored[member.key()] = member.value();
            Json view = stored;
            if (flags.patch_drops_field) view.erase("age");
            send_json(res, 200, view);
        });

        server.Delete(item, [this](const httplib::Request& req, httplib::Response& res) {
            const auto id = req.matches[1].str();
            std::lock_guard<std::mutex> lock(mutex);
            if (store.erase(id) > 0) {
                res.status = 204;
                return;
            }
            if (flags.delete_missing_returns_200) {
                res.status = 200;
                return;
            }
            send_json(res, 404, Json{{"error", "not found"}});
        });

        server.Post("/__admin/reset", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mutex);
            store.clear();
            res.status = 204;
        });
    }
};

MockServer::MockServer(std::string resource, std::string id_field, BugFlags flags)
    : impl_(std::make_unique<Impl>()) {
    impl_->resource = std::move(resource);
    impl_->id_field = std::move(id_field);
    impl_->flags = flags;
    impl_->route();
}

MockServer::~MockServer() { stop(); }

void MockServer::start() {
    impl_->server.set_tcp_nodelay(true);
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) throw SetupError("mock server could not bind a port");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockServer::stop() {
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

int MockServer::port() const { return impl_->port; }

std::string MockServer::base_url() const {
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void MockServer::reset() {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    impl_->store.clear();
}

size_t MockServer::stored_count() const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->store.size();
}

bool MockServer::has(const std::string& id) const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->store.count(id) > 0;
}

Json MockServer::stored(const std::string& id) const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    const auto it = impl_->store.find(id);
    return it == impl_->store.end() ? Json(nullptr) : it->second;
}

void MockServer::preload(const Json& object) {
    if (!object.is_object() || !object.contains(impl_->id_field)) {
        throw ConfigError("preload object needs the '" + impl_->id_field + "' field");
    }
    std::lock_guard<std::mutex> lock(impl_->mutex);
    impl_->store[object[impl_->id_field].get<std::string>()] = object;
}

} // namespace nirikshak
