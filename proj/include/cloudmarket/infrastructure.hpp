#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cloudmarket/energy.hpp"
#include "cloudmarket/ids.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

enum class SchedulerMode { space_shared, time_shared };
enum class PlacementPolicy { first_fit, best_fit_ram };

struct HostSpec {
    HostId id;
    int pe_count = 1;
    std::int64_t mips_per_pe = 0;
    std::int64_t ram_mb = 0;
    std::int64_t storage_gb = 0;
    std::int64_t bw_mbps = 0;
    std::vector<VoltageLevel> voltage_levels;  // ascending fraction, contains 1.0
    PowerModel power;
    std::size_t initial_level = 0;
    bool initially_active = true;
};

// Placement-relevant shape of a VM.
struct VmShape {
    VmId id;
    int pes = 1;
    std::int64_t mips_req = 0;  // demanded MIPS per PE
    std::int64_t ram_mb = 0;
    SchedulerMode mode = SchedulerMode::space_shared;
};

// One VM's holding on a host. total_share_umips spans all of the VM's PEs.
// A frozen holding (a VM mid-migration) keeps its share carved out of the
// host until the copy finishes; reallocation never touches it.
struct HostAllocation {
    std::int64_t total_share_umips = 0;
    int pes = 1;
    std::int64_t ram_mb = 0;
    std::int64_t mips_req = 0;
    SchedulerMode mode = SchedulerMode::space_shared;
    bool frozen = false;
};

struct HostState {
    HostSpec spec;
    bool active = true;
    std::size_t level_idx = 0;
    std::map<VmId, HostAllocation> allocations;

    double speed_fraction() const { return spec.voltage_levels[level_idx].fraction; }
    std::int64_t speed_ppm() const { return spec.voltage_levels[level_idx].ppm(); }
    // Capacity of one PE in micro-MIPS at the current level.
    std::int64_t per_pe_cap_umips() const { return spec.mips_per_pe * speed_ppm(); }

    int used_pes() const;  // PEs exclusively held by space-shared VMs
    std::int64_t used_ram() const;
    int free_pes() const { return spec.pe_count - used_pes(); }
    std::int64_t free_ram() const { return spec.ram_mb - used_ram(); }
    double ram_utilization() const;
};

// free ram >= vm.ram and, for space-shared, enough free PEs; time-shared
// only requires the VM to fit the PE count (MIPS may oversubscribe).
bool host_feasible(const HostState& host, const VmShape& vm);

// Chooses a host among `hosts` per policy; nullopt means no capacity.
// first_fit: lowest id that fits. best_fit_ram: max ram remaining after
// placement, ties to the lowest id.
std::optional<HostId> place_vm(const VmShape& vm, std::span<const HostState> hosts,
                               PlacementPolicy policy);

// Adds/removes a holding and recomputes every granted share on the host.
void host_add_vm(HostState& host, const VmShape& vm);
void host_remove_vm(HostState& host, VmId vm);

// Grants space-shared VMs min(mips_req, per-PE cap) on each PE and splits
// the remaining aggregate capacity max-min among time-shared VMs.
void reallocate_host(HostState& host);

// Max-min fair (water-filling) split of capacity among demands, all in
// micro-MIPS. Sum of the result is min(capacity, sum of demands); every
// share is within one unit of the exact fair level.
std::vector<std::int64_t> share_mips_max_min(std::span<const std::int64_t> demands_umips,
                                             std::int64_t capacity_umips);

struct DispatchItem {
    std::uint64_t length_mi = 0;
    int pes = 1;
};
struct DispatchSlot {
    SimTime start;
    SimTime finish;
};

// Strict-FIFO gang schedule of cloudlets over `total_pes` PEs running at
// per_pe_rate_umips each; the queue head blocks until its PEs are free.
std::vector<DispatchSlot> space_shared_dispatch(std::span<const DispatchItem> queue,
                                                int total_pes, std::int64_t per_pe_rate_umips,
                                                SimTime t0);

// Pause-and-copy cost: ram is pushed over the destination link.
SimTime migration_duration(std::int64_t ram_mb, std::int64_t bw_mbps);

struct ConsolidationPlan {
    std::vector<std::pair<VmId, HostId>> moves;
    std::vector<HostId> deactivate;
};

// First-fit-decreasing repack: tries to fully evacuate the least ram-loaded
// active hosts into the more loaded ones; a host is deactivated only when
// the plan (or prior departures) leaves it empty. Every move is feasible at
// plan time with earlier planned moves reserved.
ConsolidationPlan plan_consolidation(std::span<const HostState> hosts);

// Fraction of the host's current MIPS capacity that is granted out.
double host_utilization(const HostState& host);

}  // namespace cloudmarket
