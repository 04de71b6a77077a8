#include "cloudmarket/infrastructure.hpp"

#include <algorithm>
#include <numeric>

#include "cloudmarket/errors.hpp"
#include "cloudmarket/workload.hpp"

namespace cloudmarket {

int HostState::used_pes() const {
    int used = 0;
    for (const auto& [vm, alloc] : allocations) {
        if (alloc.mode == SchedulerMode::space_shared) {
            used += alloc.pes;
        }
    }
    return used;
}

std::int64_t HostState::used_ram() const {
    std::int64_t used = 0;
    for (const auto& [vm, alloc] : allocations) {
        used += alloc.ram_mb;
    }
    return used;
}

double HostState::ram_utilization() const {
    if (spec.ram_mb == 0) {
        return 0.0;
    }
    return static_cast<double>(used_ram()) / static_cast<double>(spec.ram_mb);
}

bool host_feasible(const HostState& host, const VmShape& vm) {
    if (host.free_ram() < vm.ram_mb) {
        return false;
    }
    if (vm.mode == SchedulerMode::space_shared) {
        return host.free_pes() >= vm.pes;
    }
    return vm.pes <= host.spec.pe_count;
}

std::optional<HostId> place_vm(const VmShape& vm, std::span<const HostState> hosts,
                               PlacementPolicy policy) {
    std::optional<HostId> best;
    std::int64_t best_remaining = -1;
    std::vector<const HostState*> ordered;
    ordered.reserve(hosts.size());
    for (const HostState& h : hosts) {
        ordered.push_back(&h);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const HostState* a, const HostState* b) { return a->spec.id < b->spec.id; });
    for (const HostState* h : ordered) {
        if (!host_feasible(*h, vm)) {
            continue;
        }
        if (policy == PlacementPolicy::first_fit) {
            return h->spec.id;
        }
        const std::int64_t remaining = h->free_ram() - vm.ram_mb;
        if (remaining > best_remaining) {
            best_remaining = remaining;
            best = h->spec.id;
        }
    }
    return best;
}

std::vector<std::int64_t> share_mips_max_min(std::span<const std::int64_t> demands,
                                             std::int64_t capacity) {
    std::vector<std::int64_t> alloc(demands.size(), 0);
    std::vector<std::size_t> order(demands.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(demands[a], a) < std::pair(demands[b], b);
    });
    std::int64_t remaining = capacity;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::int64_t fair = remaining / static_cast<std::int64_t>(order.size() - k);
        if (demands[order[k]] <= fair) {
            alloc[order[k]] = demands[order[k]];
            remaining -= demands[order[k]];
            continue;
        }
        // Everyone left wants more than the fair share: split the remainder
        // evenly, handing the leftover units out one by one.
        const std::int64_t n = static_cast<std::int64_t>(order.size() - k);
        const std::int64_t base = remaining / n;
        std::int64_t extra = remaining % n;
        for (std::size_t j = k; j < order.size(); ++j) {
            alloc[order[j]] = base + (extra > 0 ? 1 : 0);
            if (extra > 0) {
                --extra;
            }
        }
        remaining = 0;
        break;
    }
    return alloc;
}

void reallocate_host(HostState& host) {
    const std::int64_t per_pe_cap = host.per_pe_cap_umips();
    std::int64_t reserved_total = 0;
    std::vector<VmId> shared;
    std::vector<std::int64_t> shared_demands;
    for (auto& [vm, alloc] : host.allocations) {
        if (alloc.frozen) {
            reserved_total += alloc.total_share_umips;
            continue;
        }
        const std::int64_t capped = std::min(alloc.mips_req * 1'000'000, per_pe_cap);
        if (alloc.mode == SchedulerMode::space_shared) {
            alloc.total_share_umips = capped * alloc.pes;
            reserved_total += alloc.total_share_umips;
        } else {
            shared.push_back(vm);
            shared_demands.push_back(capped * alloc.pes);
        }
    }
    if (shared.empty()) {
        return;
    }
    const std::int64_t pool =
        std::max<std::int64_t>(0, per_pe_cap * host.spec.pe_count - reserved_total);
    const std::vector<std::int64_t> shares = share_mips_max_min(shared_demands, pool);
    for (std::size_t i = 0; i < shared.size(); ++i) {
        host.allocations.at(shared[i]).total_share_umips = shares[i];
    }
}

void host_add_vm(HostState& host, const VmShape& vm) {
    host.allocations[vm.id] =
        HostAllocation{0, vm.pes, vm.ram_mb, vm.mips_req, vm.mode};
    reallocate_host(host);
}

void host_remove_vm(HostState& host, VmId vm) {
    host.allocations.erase(vm);
    reallocate_host(host);
}

std::vector<DispatchSlot> space_shared_dispatch(std::span<const DispatchItem> queue,
                                                int total_pes, std::int64_t per_pe_rate_umips,
                                                SimTime t0) {
    std::vector<DispatchSlot> out;
    out.reserve(queue.size());
    // (finish, pes) of running cloudlets, earliest finish first.
    std::vector<std::pair<SimTime, int>> running;
    int free = total_pes;
    SimTime now = t0;
    for (const DispatchItem& item : queue) {
        if (item.pes > total_pes) {
            throw SimError("space_shared_dispatch: cloudlet needs more PEs than the host has");
        }
        while (free < item.pes) {
            auto next = std::min_element(running.begin(), running.end());
            now = next->first;
            free += next->second;
            running.erase(next);
        }
        const unsigned __int128 work =
            static_cast<unsigned __int128>(item.length_mi) * kUnitsPerMi;
        const SimTime finish = now + exec_duration(work, per_pe_rate_umips);
        out.push_back(DispatchSlot{now, finish});
        running.emplace_back(finish, item.pes);
        free -= item.pes;
    }
    return out;
}

SimTime migration_duration(std::int64_t ram_mb, std::int64_t bw_mbps) {
    if (bw_mbps <= 0) {
        throw ZeroRateError("migration_duration: bandwidth must be positive");
    }
    const unsigned __int128 bits_us =
        static_cast<unsigned __int128>(ram_mb) * 8u * 1'000'000u;
    const auto bw = static_cast<unsigned __int128>(bw_mbps);
    return SimTime::micros(static_cast<std::uint64_t>((bits_us + bw - 1) / bw));
}

namespace {

struct WorkingHost {
    const HostState* state;
    std::int64_t free_ram;
    int free_pes;
    bool closing = false;  // planned for deactivation, not a valid target
};

bool working_feasible(const WorkingHost& h, const HostAllocation& vm) {
    if (h.free_ram < vm.ram_mb) {
        return false;
    }
    if (vm.mode == SchedulerMode::space_shared) {
        return h.free_pes >= vm.pes;
    }
    return vm.pes <= h.state->spec.pe_count;
}

}  // namespace

ConsolidationPlan plan_consolidation(std::span<const HostState> hosts) {
    ConsolidationPlan plan;
    std::map<HostId, WorkingHost> working;
    for (const HostState& h : hosts) {
        if (!h.active) {
            continue;
        }
        if (h.allocations.empty()) {
            plan.deactivate.push_back(h.spec.id);
            continue;
        }
        working[h.spec.id] = WorkingHost{&h, h.free_ram(), h.free_pes(), false};
    }
    // Sources: emptiest first. Targets: fullest first. Both by ram use.
    std::vector<HostId> sources;
    std::vector<HostId> targets;
    for (const auto& [id, w] : working) {
        sources.push_back(id);
        targets.push_back(id);
    }
    auto util_of = [&](HostId id) { return working.at(id).state->ram_utilization(); };
    std::sort(sources.begin(), sources.end(), [&](HostId a, HostId b) {
        return std::pair(util_of(a), a) < std::pair(util_of(b), b);
    });
    std::sort(targets.begin(), targets.end(), [&](HostId a, HostId b) {
        return std::pair(-util_of(a), a.value) < std::pair(-util_of(b), b.value);
    });

    std::set<HostId> received;  // move targets stay on
    for (const HostId src : sources) {
        if (working.at(src).closing || received.count(src)) {
            continue;
        }
        // All of the source's VMs, largest ram first.
        std::vector<std::pair<VmId, HostAllocation>> vms(
            working.at(src).state->allocations.begin(),
            working.at(src).state->allocations.end());
        std::sort(vms.begin(), vms.end(), [](const auto& a, const auto& b) {
            return std::pair(-a.second.ram_mb, a.first) < std::pair(-b.second.ram_mb, b.first);
        });
        std::vector<std::pair<VmId, HostId>> tentative;
        std::map<HostId, std::pair<std::int64_t, int>> reserved;  // ram, pes
        bool evacuated = true;
        for (const auto& [vm, alloc] : vms) {
            bool placed = false;
            for (const HostId dst : targets) {
                if (dst == src || working.at(dst).closing) {
                    continue;
                }
                WorkingHost probe = working.at(dst);
                probe.free_ram -= reserved[dst].first;
                probe.free_pes -= reserved[dst].second;
                if (!working_feasible(probe, alloc)) {
                    continue;
                }
                tentative.emplace_back(vm, dst);
                reserved[dst].first += alloc.ram_mb;
                if (alloc.mode == SchedulerMode::space_shared) {
                    reserved[dst].second += alloc.pes;
                }
                placed = true;
                break;
            }
            if (!placed) {
                evacuated = false;
                break;
            }
        }
        if (!evacuated) {
            continue;
        }
        for (const auto& [vm, dst] : tentative) {
            plan.moves.push_back({vm, dst});
            received.insert(dst);
            auto& w = working.at(dst);
            const HostAllocation& alloc = working.at(src).state->allocations.at(vm);
            w.free_ram -= alloc.ram_mb;
            if (alloc.mode == SchedulerMode::space_shared) {
                w.free_pes -= alloc.pes;
            }
        }
        working.at(src).closing = true;
        plan.deactivate.push_back(src);
    }
    std::sort(plan.deactivate.begin(), plan.deactivate.end());
    return plan;
}

double host_utilization(const HostState& host) {
    const std::int64_t cap = host.per_pe_cap_umips() * host.spec.pe_count;
    if (cap == 0) {
        return 0.0;
    }
    std::int64_t granted = 0;
    for (const auto& [vm, alloc] : host.allocations) {
        granted += alloc.total_share_umips;
    }
    return static_cast<double>(granted) / static_cast<double>(cap);
}

}  // namespace cloudmarket
