#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rgw {

enum class VerifyLevel { Quick, Full };

struct VerifyCheck {
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    bool passed = false;
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::Quick;
    std::uint64_t seed = 42;
    std::vector<VerifyCheck> checks;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Runs the cross-module oracle checks. Quick finishes well under a minute;
/// Full adds the million-step urn runs and full-size Monte Carlo campaigns.
VerifyReport verify_suite(VerifyLevel level, std::uint64_t seed);

} // namespace rgw
