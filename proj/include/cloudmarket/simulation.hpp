#pragma once

#include <cstdint>
#include <string>

#include "cloudmarket/scenario.hpp"
#include "cloudmarket/summary.hpp"

namespace cloudmarket {

struct RunResult {
    std::string trace_csv;
    SummaryReport summary;
    EnergyReport energy;
};

// Executes one replication of the scenario to its horizon and returns the
// trace and summary. Same scenario and seed give a byte-identical trace.
RunResult run_simulation(const Scenario& scenario, std::uint64_t seed, int replication = 0);

}  // namespace cloudmarket
