#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cloudmarket/ids.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

// One MI of cloudlet length is 10^12 progress units; one unit is what one
// micro-MIPS executes in one microsecond, so progress arithmetic is exact.
inline constexpr std::uint64_t kUnitsPerMi = 1'000'000'000'000ull;

enum class CloudletState { created, queued, running, done };

struct Cloudlet {
    CloudletId id;
    std::uint64_t length_mi = 0;  // per-PE instructions, millions
    int pes = 1;
    double input_mb = 0.0;
    double output_mb = 0.0;
    BrokerId owner;
    CloudletState state = CloudletState::created;
    std::map<std::string, std::string> params;  // sweep binding, if any
};

struct Workflow {
    std::set<CloudletId> nodes;
    std::vector<std::pair<CloudletId, CloudletId>> edges;  // from must finish before to
};

struct ParamSweepSpec {
    Cloudlet template_cloudlet;
    // Ordered: the last domain varies fastest in the expansion.
    std::vector<std::pair<std::string, std::vector<std::string>>> domains;
};

// Cross-product expansion; ids are assigned sequentially from first_id in
// lexicographic domain order. Throws EmptyDomainError.
std::vector<Cloudlet> expand_param_sweep(const ParamSweepSpec& spec, std::uint32_t first_id);

struct CycleReport {
    std::vector<CloudletId> cycle_nodes;  // nonempty iff a cycle exists
    bool ok() const { return cycle_nodes.empty(); }
};

// Kahn-style peeling; on failure names at least one node lying on a cycle.
CycleReport validate_dag(const Workflow& wf);

// Nodes not yet done whose predecessors are all done.
std::set<CloudletId> ready_tasks(const Workflow& wf, const std::set<CloudletId>& done);

// start + ceil_us(length / rate). rate is in micro-MIPS. Throws ZeroRateError.
SimTime finish_time_estimate(std::uint64_t length_mi, std::int64_t rate_umips, SimTime start);

// Ceil of work / rate in microseconds; work in progress units (see kUnitsPerMi).
SimTime exec_duration(unsigned __int128 work_units, std::int64_t rate_umips);

}  // namespace cloudmarket
