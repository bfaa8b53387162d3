#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nirikshak/mock_api.hpp"

namespace {

std::atomic<bool> g_stop{false};

void handle_signal(int) { g_stop = true; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nirikshak-mock: CRUD server with seedable bugs"};

    std::string resource = "student";
    std::string id_field = "id";
    std::vector<std::string> bugs;
    app.add_option("--resource", resource, "resource name served under /<resource>");
    app.add_option("--id-field", id_field, "field identifying instances");
    app.add_option("--bug", bugs,
                   "bug flag to enable (repeatable): getMissingReturns200, "
                   "deleteMissingReturns200, postDuplicateCreates, patchDropsField, "
                   "putWrongStatus");

    CLI11_PARSE(app, argc, argv);

    nirikshak::Json flag_object = nirikshak::Json::object();
    for (const auto& bug : bugs) flag_object[bug] = true;
    nirikshak::BugFlags flags;
    try {
        flags = nirikshak::BugFlags::from_json(flag_object);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    nirikshak::MockServer server(resource, id_field, flags);
    try {
        server.start();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }

    std::printf("listening on %s\n", server.base_url().c_str());
    std::fflush(stdout);

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
}
