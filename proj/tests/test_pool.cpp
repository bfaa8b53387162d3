#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "nirikshak/errors.hpp"
#include "nirikshak/pool.hpp"

using namespace nirikshak;

namespace {

ResourceSchema tiny_schema(int64_t max_id = 1000000) {
    const std::string doc = R"({
      "name": "ticket",
      "idField": "id",
      "fields": {
        "id": {"kind": "integer", "min": 1, "max": )" + std::to_string(max_id) + R"(},
        "label": {"kind": "text"}
      }
    })";
    return parse_resource_schema(doc);
}

std::string temp_path(const std::string& stem) {
    return "/tmp/nirikshak_pool_test_" + stem + "_" + std::to_string(getpid());
}

} // namespace

TEST_CASE("pool tracks existing and consumed ids separately") {
    const ResourceSchema schema = tiny_schema();
    ResourcePool pool(schema);
    Rng rng(1);

    const ResourceInstance a = generate_instance(schema, rng);
    const std::string id = a.id_string(schema);
    CHECK(pool.empty());
    CHECK(!pool.seen(id));

    pool.insert(a);
    CHECK(pool.contains(id));
    CHECK(pool.seen(id));
    CHECK(pool.size() == 1);

    pool.erase(id);
    CHECK(!pool.contains(id));
    CHECK(pool.seen(id)); // consumption outlives existence
    CHECK(pool.empty());
}

TEST_CASE("fresh instances never reuse a seen id") {
    const ResourceSchema schema = tiny_schema(50);
    ResourcePool pool(schema);
    Rng rng(7);
    std::set<std::string> ids;
    for (int i = 0; i < 30; ++i) {
        const ResourceInstance fresh = generate_fresh_instance(pool, rng);
        const std::string id = fresh.id_string(schema);
        CHECK(ids.insert(id).second);
        pool.insert(fresh);
    }
}

TEST_CASE("fresh instance generation gives up after the id space is exhausted") {
    const ResourceSchema schema = tiny_schema(3); // ids 1..3 only
    ResourcePool pool(schema);
    Rng rng(11);
    for (int i = 0; i < 3; ++i) pool.insert(generate_fresh_instance(pool, rng));
    CHECK_THROWS_WITH_AS(generate_fresh_instance(pool, rng), doctest::Contains("ticket"),
                         SetupError);
}

TEST_CASE("setup_pool builds the requested number of distinct instances") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(3);
    const ResourcePool pool = setup_pool(schema, 10, rng, std::nullopt);
    CHECK(pool.size() == 10);
    for (const auto& [id, instance] : pool.existing()) {
        CHECK_NOTHROW(validate_instance(schema, instance));
        CHECK(id == instance.id_string(schema));
    }
}

TEST_CASE("setup_pool rejects a non-positive instance count") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(3);
    CHECK_THROWS_AS(setup_pool(schema, 0, rng, std::nullopt), ConfigError);
}

TEST_CASE("setup hook receives the full collection on stdin") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(5);
    const std::string sink = temp_path("hook_payload");
    const ResourcePool pool = setup_pool(schema, 4, rng, "cat > " + sink);

    std::ifstream in(sink);
    REQUIRE(in.good());
    Json payload;
    in >> payload;
    REQUIRE(payload.is_array());
    CHECK(payload.size() == 4);
    for (const auto& item : payload) CHECK(item.contains("id"));
    std::remove(sink.c_str());
}

TEST_CASE("failing setup hook aborts with its exit code") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(5);
    CHECK_THROWS_WITH_AS(setup_pool(schema, 2, rng, "exit 7"),
                         doctest::Contains("setup hook exited with code 7"), SetupError);
}

TEST_CASE("run_hook reports the command exit code") {
    CHECK(run_hook("cat > /dev/null", Json::array()) == 0);
    CHECK(run_hook("cat > /dev/null; exit 9", Json::array()) == 9);
    CHECK(run_hook("no_such_binary_hopefully 2> /dev/null", Json::array()) != 0);
}

TEST_CASE("select_resource per precondition") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(13);
    ResourcePool pool = setup_pool(schema, 5, rng, std::nullopt);

    SUBCASE("EXISTS draws a pool member") {
        for (int i = 0; i < 20; ++i) {
            const ResourceInstance picked = select_resource(pool, ExistenceState::Exists, rng);
            CHECK(pool.contains(picked.id_string(schema)));
        }
    }
    SUBCASE("EXISTS on an empty pool refuses") {
        ResourcePool empty(schema);
        CHECK_THROWS_AS(select_resource(empty, ExistenceState::Exists, rng), SetupError);
    }
    SUBCASE("MISSING yields a fresh id and marks it consumed") {
        const ResourceInstance fresh = select_resource(pool, ExistenceState::Missing, rng);
        const std::string id = fresh.id_string(schema);
        CHECK(!pool.contains(id));
        CHECK(pool.seen(id));
        // A later MISSING selection cannot produce the same id.
        const ResourceInstance again = select_resource(pool, ExistenceState::Missing, rng);
        CHECK(again.id_string(schema) != id);
    }
    SUBCASE("ANY eventually picks both kinds") {
        bool saw_existing = false;
        bool saw_missing = false;
        for (int i = 0; i < 64 && !(saw_existing && saw_missing); ++i) {
            const ResourceInstance picked = select_resource(pool, ExistenceState::Any, rng);
            if (pool.contains(picked.id_string(schema))) saw_existing = true;
            else saw_missing = true;
        }
        CHECK(saw_existing);
        CHECK(saw_missing);
    }
}

TEST_CASE("apply_transition mirrors the expected post-state") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(17);
    ResourcePool pool(schema);
    const ResourceInstance instance = generate_instance(schema, rng);
    const std::string id = instance.id_string(schema);

    apply_transition(pool, instance, ExistenceState::Exists);
    CHECK(pool.contains(id));
    apply_transition(pool, instance, ExistenceState::Missing);
    CHECK(!pool.contains(id));
    apply_transition(pool, instance, ExistenceState::Any); // no-op
    CHECK(!pool.contains(id));
}

TEST_CASE("cleanup clears the pool and tolerates a failing hook") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(19);
    ResourcePool pool = setup_pool(schema, 3, rng, std::nullopt);
    CHECK_NOTHROW(cleanup_pool(pool, std::string("exit 3")));
    CHECK(pool.empty());

    ResourcePool pool2 = setup_pool(schema, 3, rng, std::nullopt);
    const std::string sink = temp_path("cleanup_payload");
    cleanup_pool(pool2, "cat > " + sink);
    CHECK(pool2.empty());
    std::ifstream in(sink);
    REQUIRE(in.good());
    Json payload;
    in >> payload;
    CHECK(payload.size() == 3);
    std::remove(sink.c_str());
}

TEST_CASE("pool export is an id-ordered array") {
    const ResourceSchema schema = tiny_schema();
    Rng rng(23);
    ResourcePool pool = setup_pool(schema, 6, rng, std::nullopt);
    const Json doc = pool.to_json();
    REQUIRE(doc.is_array());
    CHECK(doc.size() == 6);
    std::vector<std::string> ids;
    for (const auto& item : doc) ids.push_back(stringify_value(item.at("id")));
    CHECK(std::is_sorted(ids.begin(), ids.end()));
}
