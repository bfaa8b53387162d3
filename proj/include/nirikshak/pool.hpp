#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "nirikshak/graph.hpp"
#include "nirikshak/schema.hpp"

namespace nirikshak {

/// The local collection of instances believed to exist in the API, plus
/// every id ever handed out so MISSING selections stay fresh.
class ResourcePool {
public:
    explicit ResourcePool(const ResourceSchema& schema) : schema_(&schema) {}

    const ResourceSchema& schema() const { return *schema_; }
    const std::map<std::string, ResourceInstance>& existing() const { return existing_; }
    const std::set<std::string>& consumed_ids() const { return consumed_; }
    size_t size() const { return existing_.size(); }
    bool empty() const { return existing_.empty(); }

    void insert(const ResourceInstance& instance);
    void erase(const std::string& id);
    bool contains(const std::string& id) const { return existing_.count(id) > 0; }
    void mark_consumed(const std::string& id) { consumed_.insert(id); }
    bool seen(const std::string& id) const;

    /// All existing instances as a JSON array, in id order.
    Json to_json() const;

private:
    const ResourceSchema* schema_;
    std::map<std::string, ResourceInstance> existing_;
    std::set<std::string> consumed_;
};

/// Run an external hook command, feeding `payload` as JSON on its stdin.
/// Returns the command's exit code (non-zero also covers spawn failure).
int run_hook(const std::string& command, const Json& payload);

/// Generate an instance whose id collides with nothing the pool has seen.
/// Throws SetupError after 100 rejected attempts.
ResourceInstance generate_fresh_instance(const ResourcePool& pool, Rng& rng);

/// Build the pool with `setup_instances` distinct instances. When a hook is
/// configured the full collection is passed to it; a non-zero exit throws
/// SetupError.
ResourcePool setup_pool(const ResourceSchema& schema, int setup_instances, Rng& rng,
                        const std::optional<std::string>& hook);

/// Select an instance satisfying the precondition.
/// EXISTS: uniform member of the pool (throws SetupError if empty — callers
/// with an API-level creation route replenish first). MISSING: a fresh
/// instance with an unseen id. ANY: fair coin between the two.
ResourceInstance select_resource(ResourcePool& pool, ExistenceState pre, Rng& rng);

/// Mirror the expected post-state of a request into the pool.
void apply_transition(ResourcePool& pool, const ResourceInstance& instance,
                      ExistenceState post);

/// Hand the final collection to the cleanup hook (best-effort; a failing
/// hook only warns) and clear the pool.
void cleanup_pool(ResourcePool& pool, const std::optional<std::string>& hook);

} // namespace nirikshak
