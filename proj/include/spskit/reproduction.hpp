#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spskit/scenario.hpp"

// Recomputes the reference numbers of the device model from a configuration
// and compares each against its target.
namespace spskit::reproduction {

struct Check
{
    std::string id;        // "1a", "5b", ...
    std::string quantity;
    double computed = 0.0;
    std::string target;
    std::string tolerance;
    bool pass = false;
    std::string note;
};

struct Options
{
    std::uint64_t seed = 20240517;
    int draws = 100;
};

struct Report
{
    std::vector<Check> checks;

    bool all_pass() const;
    // Fixed-width pass/fail table.
    std::string table() const;
    nlohmann::json to_json() const;
};

Report run(const scenario::Config& config, const Options& options = {});

}  // namespace spskit::reproduction
