#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "nirikshak/schema.hpp"

namespace nirikshak {

/// Seedable misbehaviours. Each one corrupts exactly one method/outcome
/// pair while leaving stored state consistent, so failures localize.
struct BugFlags {
    bool get_missing_returns_200 = false;
    bool delete_missing_returns_200 = false;
    bool post_duplicate_creates = false;
    bool patch_drops_field = false;
    bool put_wrong_status = false;

    static BugFlags from_json(const Json& flags);
    Json to_json() const;
};

/// In-process CRUD server for one resource, keyed by its id field.
/// Correct behaviour: GET 200/404, POST 201/409 on duplicate id,
/// PUT upsert 200/201, PATCH merge 200/404, DELETE 204/404.
class MockServer {
public:
    MockServer(std::string resource, std::string id_field, BugFlags flags);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    /// Binds to an ephemeral port on 127.0.0.1 and serves on a
    /// background thread. Throws SetupError when no port binds.
    void start();
    void stop();

    int port() const;
    std::string base_url() const;

    void reset();
    size_t stored_count() const;
    bool has(const std::string& id) const;
    Json stored(const std::string& id) const;
    void preload(const Json& object);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace nirikshak
