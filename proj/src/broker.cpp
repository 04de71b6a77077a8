#include "cloudmarket/broker.hpp"

#include <algorithm>

#include "cloudmarket/errors.hpp"
#include "cloudmarket/workload.hpp"

namespace cloudmarket {

std::vector<Ask> discover(const Exchange& exchange, const std::string& vm_class,
                          const std::optional<std::string>& region) {
    std::vector<Ask> asks;
    for (const Ask& ask : exchange.book(vm_class).asks) {
        if (region && ask.region != *region) {
            continue;
        }
        asks.push_back(ask);
    }
    std::sort(asks.begin(), asks.end(), [](const Ask& a, const Ask& b) {
        return std::pair(a.unit_price, a.provider) < std::pair(b.unit_price, b.provider);
    });
    return asks;
}

std::optional<MatchResult> match(const MatchRequest& request, std::span<const Ask> asks,
                                 const VmClassSpec& vm_class) {
    std::optional<MatchResult> best;
    if (vm_class.mips_per_pe < request.qos.min_mips) {
        return best;
    }
    const std::int64_t per_vm_umips = vm_class.mips_per_pe * 1'000'000 * vm_class.pes;
    for (const Ask& ask : asks) {
        const int usable = std::min(request.vm_count, ask.quantity);
        if (usable < 1) {
            continue;
        }
        const SimTime makespan =
            finish_time_estimate(request.total_length_mi, per_vm_umips * usable, SimTime{});
        if (makespan > request.qos.deadline) {
            continue;
        }
        const Money cost = compute_bill(SimTime{}, makespan, ask.unit_price) * usable;
        if (cost > request.qos.budget) {
            continue;
        }
        const bool better =
            !best || std::tuple(cost, makespan, ask.provider) <
                         std::tuple(best->est_cost, best->est_makespan, best->provider);
        if (better) {
            best = MatchResult{ask.provider, cost, makespan, usable};
        }
    }
    return best;
}

std::vector<std::size_t> map_tasks(std::span<const TaskForMap> tasks,
                                   std::span<const VmForMap> vms) {
    if (vms.empty()) {
        throw SimError("map_tasks: empty vm pool");
    }
    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (tasks[a].length_mi != tasks[b].length_mi) {
            return tasks[a].length_mi > tasks[b].length_mi;
        }
        return tasks[a].id < tasks[b].id;
    });
    std::vector<SimTime> ready(vms.size());
    for (std::size_t v = 0; v < vms.size(); ++v) {
        ready[v] = vms[v].ready;
    }
    std::vector<std::size_t> assignment(tasks.size());
    for (const std::size_t t : order) {
        std::size_t chosen = vms.size();
        SimTime chosen_finish;
        for (std::size_t v = 0; v < vms.size(); ++v) {
            const SimTime finish =
                finish_time_estimate(tasks[t].length_mi, vms[v].pe_rate_umips, ready[v]);
            const bool better = chosen == vms.size() ||
                                std::pair(finish, vms[v].id) < std::pair(chosen_finish, vms[chosen].id);
            if (better) {
                chosen = v;
                chosen_finish = finish;
            }
        }
        assignment[t] = chosen;
        ready[chosen] = chosen_finish;
    }
    return assignment;
}

}  // namespace cloudmarket
