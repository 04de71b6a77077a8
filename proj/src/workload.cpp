#include "cloudmarket/workload.hpp"

#include <algorithm>

#include "cloudmarket/errors.hpp"

namespace cloudmarket {

std::vector<Cloudlet> expand_param_sweep(const ParamSweepSpec& spec, std::uint32_t first_id) {
    if (spec.domains.empty()) {
        throw EmptyDomainError("param sweep: no domains");
    }
    std::size_t count = 1;
    for (const auto& [name, values] : spec.domains) {
        if (values.empty()) {
            throw EmptyDomainError("param sweep: domain '" + name + "' has no values");
        }
        count *= values.size();
    }
    std::vector<Cloudlet> out;
    out.reserve(count);
    std::vector<std::size_t> cursor(spec.domains.size(), 0);
    for (std::size_t k = 0; k < count; ++k) {
        Cloudlet c = spec.template_cloudlet;
        c.id = CloudletId{first_id + static_cast<std::uint32_t>(k)};
        for (std::size_t d = 0; d < spec.domains.size(); ++d) {
            c.params[spec.domains[d].first] = spec.domains[d].second[cursor[d]];
        }
        out.push_back(std::move(c));
        // Odometer increment, last domain fastest.
        for (std::size_t d = spec.domains.size(); d-- > 0;) {
            if (++cursor[d] < spec.domains[d].second.size()) {
                break;
            }
            cursor[d] = 0;
        }
    }
    return out;
}

CycleReport validate_dag(const Workflow& wf) {
    std::map<CloudletId, int> in_degree;
    std::map<CloudletId, std::vector<CloudletId>> succ;
    for (const CloudletId n : wf.nodes) {
        in_degree[n] = 0;
    }
    for (const auto& [from, to] : wf.edges) {
        succ[from].push_back(to);
        ++in_degree[to];
    }
    std::vector<CloudletId> frontier;
    for (const auto& [n, d] : in_degree) {
        if (d == 0) {
            frontier.push_back(n);
        }
    }
    std::size_t peeled = 0;
    while (!frontier.empty()) {
        const CloudletId n = frontier.back();
        frontier.pop_back();
        ++peeled;
        for (const CloudletId m : succ[n]) {
            if (--in_degree[m] == 0) {
                frontier.push_back(m);
            }
        }
    }
    CycleReport report;
    if (peeled == wf.nodes.size()) {
        return report;
    }
    // Every residual node has a residual predecessor; walking predecessors
    // long enough must revisit a node, and that node lies on a cycle.
    std::map<CloudletId, CloudletId> pred;
    for (const auto& [from, to] : wf.edges) {
        if (in_degree[from] > 0 && in_degree[to] > 0) {
            pred[to] = from;
        }
    }
    CloudletId walk = pred.begin()->first;
    std::set<CloudletId> seen;
    while (!seen.count(walk)) {
        seen.insert(walk);
        walk = pred.at(walk);
    }
    CloudletId on_cycle = walk;
    do {
        report.cycle_nodes.push_back(walk);
        walk = pred.at(walk);
    } while (walk != on_cycle);
    std::sort(report.cycle_nodes.begin(), report.cycle_nodes.end());
    return report;
}

std::set<CloudletId> ready_tasks(const Workflow& wf, const std::set<CloudletId>& done) {
    std::set<CloudletId> ready;
    for (const CloudletId n : wf.nodes) {
        if (!done.count(n)) {
            ready.insert(n);
        }
    }
    for (const auto& [from, to] : wf.edges) {
        if (!done.count(from)) {
            ready.erase(to);
        }
    }
    return ready;
}

SimTime exec_duration(unsigned __int128 work_units, std::int64_t rate_umips) {
    if (rate_umips <= 0) {
        throw ZeroRateError("exec_duration: rate must be positive");
    }
    const auto rate = static_cast<unsigned __int128>(rate_umips);
    const unsigned __int128 us = (work_units + rate - 1) / rate;
    // Durations beyond any plausible horizon saturate instead of wrapping.
    const unsigned __int128 cap = static_cast<unsigned __int128>(1) << 62;
    return SimTime::micros(static_cast<std::uint64_t>(us > cap ? cap : us));
}

SimTime finish_time_estimate(std::uint64_t length_mi, std::int64_t rate_umips, SimTime start) {
    const unsigned __int128 work = static_cast<unsigned __int128>(length_mi) * kUnitsPerMi;
    return start + exec_duration(work, rate_umips);
}

}  // namespace cloudmarket
