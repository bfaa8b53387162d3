#include "nirikshak/pool.hpp"

#include <csignal>
#include <cstdio>
#include <sys/wait.h>

#include "nirikshak/errors.hpp"

namespace nirikshak {

void ResourcePool::insert(const ResourceInstance& instance) {
    const auto id = instance.id_string(*schema_);
    existing_.insert_or_assign(id, instance);
    consumed_.insert(id);
}

void ResourcePool::erase(const std::string& id) { existing_.erase(id); }

bool ResourcePool::seen(const std::string& id) const { return consumed_.count(id) > 0; }

Json ResourcePool::to_json() const {
    Json arr = Json::array();
    for (const auto& [id, instance] : existing_) arr.push_back(instance.values);
    return arr;
}

int run_hook(const std::string& command, const Json& payload) {
    FILE* pipe = popen(command.c_str(), "w");
    if (!pipe) return -1;
    // A hook may exit without draining stdin; the resulting EPIPE must not
    // kill the engine.
    const auto previous = signal(SIGPIPE, SIG_IGN);
    const auto text = payload.dump();
    fwrite(text.data(), 1, text.size(), pipe);
    fputc('\n', pipe);
    const int status = pclose(pipe);
    signal(SIGPIPE, previous);
    if (status < 0) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
}

ResourceInstance generate_fresh_instance(const ResourcePool& pool, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto instance = generate_instance(pool.schema(), rng);
        if (!pool.seen(instance.id_string(pool.schema()))) return instance;
    }
    throw SetupError("could not generate a fresh '" + pool.schema().name +
                     "' id after 100 attempts");
}

ResourcePool setup_pool(const ResourceSchema& schema, int setup_instances, Rng& rng,
                        const std::optional<std::string>& hook) {
    if (setup_instances < 1) {
        throw ConfigError("setupInstances must be at least 1, got " +
                          std::to_string(setup_instances));
    }
    ResourcePool pool(schema);
    for (int i = 0; i < setup_instances; ++i) {
        pool.insert(generate_fresh_instance(pool, rng));
    }
    if (hook) {
        const int rc = run_hook(*hook, pool.to_json());
        if (rc != 0) {
            throw SetupError("setup hook exited with code " + std::to_string(rc));
        }
    }
    return pool;
}

ResourceInstance select_resource(ResourcePool& pool, ExistenceState pre, Rng& rng) {
    const auto pick_existing = [&]() {
        auto it = pool.existing().begin();
        std::advance(it, static_cast<long>(rng.below(pool.size())));
        return it->second;
    };
    const auto pick_missing = [&]() {
        auto instance = generate_fresh_instance(pool, rng);
        pool.mark_consumed(instance.id_string(pool.schema()));
        return instance;
    };
    switch (pre) {
    case ExistenceState::Exists:
        if (pool.empty()) {
            throw SetupError("resource pool for '" + pool.schema().name +
                             "' is empty, no existing instance to select");
        }
        return pick_existing();
    case ExistenceState::Missing:
        return pick_missing();
    case ExistenceState::Any:
        if (rng.coin() && !pool.empty()) return pick_existing();
        return pick_missing();
    }
    return pick_missing();
}

void apply_transition(ResourcePool& pool, const ResourceInstance& instance, ExistenceState post) {
    switch (post) {
    case ExistenceState::Exists:
        pool.insert(instance);
        break;
    case ExistenceState::Missing:
        pool.erase(instance.id_string(pool.schema()));
        break;
    case ExistenceState::Any:
        break; // post states are concrete, nothing to mirror
    }
}

void cleanup_pool(ResourcePool& pool, const std::optional<std::string>& hook) {
    if (hook) {
        const int rc = run_hook(*hook, pool.to_json());
        if (rc != 0) {
            std::fprintf(stderr, "warning: cleanup hook exited with code %d\n", rc);
        }
    }
    std::vector<std::string> ids;
    ids.reserve(pool.size());
    for (const auto& [id, instance] : pool.existing()) ids.push_back(id);
    for (const auto& id : ids) pool.erase(id);
}

} // namespace nirikshak
