#pragma once

#include <cstdint>
#include <string>

#include "nirikshak/endpoints.hpp"

namespace nirikshak {

enum class TestOutcome { Pass, Fail };

std::string to_string(TestOutcome outcome);

/// One structured log line per executed test.
struct TestRecord {
    TestOutcome outcome = TestOutcome::Pass;
    std::string resource;
    HttpMethod method = HttpMethod::Get;
    int method_index = 0;
    OutcomeCase outcome_case = OutcomeCase::Positive;
    std::string url;
    int iteration = 1;
    std::string error_message; // empty iff outcome == Pass
    int64_t walk_id = 0;
    int step_index = 0;

    bool operator==(const TestRecord&) const = default;
};

} // namespace nirikshak
