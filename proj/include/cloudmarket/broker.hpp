#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cloudmarket/ids.hpp"
#include "cloudmarket/infrastructure.hpp"
#include "cloudmarket/market.hpp"
#include "cloudmarket/qos.hpp"

namespace cloudmarket {

// Published VM template; the mips figure is per PE.
struct VmClassSpec {
    std::string name;
    int pes = 1;
    std::int64_t mips_per_pe = 0;
    std::int64_t ram_mb = 0;
    SchedulerMode scheduler = SchedulerMode::space_shared;
};

// Current asks for a class, region-filtered, sorted by (price, provider id).
std::vector<Ask> discover(const Exchange& exchange, const std::string& vm_class,
                          const std::optional<std::string>& region);

struct MatchRequest {
    std::uint64_t total_length_mi = 0;
    int vm_count = 1;  // VMs the broker wants to procure
    QosRequirement qos;
};

struct MatchResult {
    DatacenterId provider;
    Money est_cost;
    SimTime est_makespan;
    int quantity = 1;  // usable VMs at that provider
};

// Feasibility screen over discovered asks: the work is treated as evenly
// divisible over the usable VMs of each ask. Keeps offers meeting deadline,
// budget and min-mips; returns the cheapest (ties: faster, then lower
// provider id), or nullopt when no provider qualifies.
std::optional<MatchResult> match(const MatchRequest& request, std::span<const Ask> asks,
                                 const VmClassSpec& vm_class);

struct TaskForMap {
    CloudletId id;
    std::uint64_t length_mi = 0;
};

struct VmForMap {
    VmId id;
    std::int64_t pe_rate_umips = 0;
    SimTime ready;
};

// Min-completion-time greedy: tasks by descending length (ties: ascending
// id) each go to the VM finishing them earliest given prior assignments
// (ties: lowest VM id). Returns, per input task, the index into `vms`.
std::vector<std::size_t> map_tasks(std::span<const TaskForMap> tasks,
                                   std::span<const VmForMap> vms);

}  // namespace cloudmarket
