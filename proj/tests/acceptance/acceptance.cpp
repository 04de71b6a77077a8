// Acceptance suite: runs every release criterion and prints one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cloudmarket/broker.hpp"
#include "cloudmarket/energy.hpp"
#include "cloudmarket/errors.hpp"
#include "cloudmarket/infrastructure.hpp"
#include "cloudmarket/market.hpp"
#include "cloudmarket/rng.hpp"
#include "cloudmarket/scenario.hpp"
#include "cloudmarket/simulation.hpp"
#include "../oracles.hpp"

using namespace cloudmarket;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) {
        ++g_failures;
    }
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

Scenario load_scenario(const std::string& name) {
    const ParseResult result = parse_scenario(slurp(fs::path(SCENARIO_DIR) / name));
    if (!result.ok()) {
        for (const std::string& e : result.errors) {
            std::cerr << "scenario error: " << e << "\n";
        }
        std::exit(2);
    }
    return *result.scenario;
}

std::vector<std::string> bundled_scenarios() {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(SCENARIO_DIR)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

// --- trace parsing ---------------------------------------------------------

struct Row {
    std::uint64_t time = 0;
    std::string entity;
    std::string event;
    std::map<std::string, std::string> kv;
};

std::vector<Row> parse_trace(const std::string& csv) {
    std::vector<Row> rows;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        Row row;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        row.time = std::stoull(line.substr(0, c1));
        row.entity = line.substr(c1 + 1, c2 - c1 - 1);
        row.event = line.substr(c2 + 1, c3 - c2 - 1);
        std::string details = line.substr(c3 + 1);
        std::istringstream parts(details);
        std::string part;
        while (std::getline(parts, part, ';')) {
            const auto eq = part.find('=');
            if (eq != std::string::npos) {
                row.kv[part.substr(0, eq)] = part.substr(eq + 1);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// Replays a trace against host capacities and integrates cloudlet rates.
struct ReplayResult {
    bool capacity_ok = true;
    bool work_ok = true;
    std::int64_t cloudlets_checked = 0;
    std::string detail;
};

ReplayResult replay_trace(const Scenario& scenario, const std::string& csv) {
    ReplayResult out;
    struct HostCaps {
        std::int64_t ram_mb = 0;
        int pe_count = 0;
        std::int64_t mips_per_pe = 0;
        std::int64_t s_ppm = 1'000'000;
    };
    struct Holding {
        std::int64_t ram_mb = 0;
        int pes = 0;
        bool space = true;
        std::int64_t share_umips = 0;
    };
    std::map<std::pair<std::string, std::string>, HostCaps> hosts;
    std::map<std::pair<std::string, std::string>, std::map<std::string, Holding>> held;
    for (const DatacenterSpec& dc : scenario.datacenters) {
        for (const HostSpec& h : dc.hosts) {
            HostCaps caps;
            caps.ram_mb = h.ram_mb;
            caps.pe_count = h.pe_count;
            caps.mips_per_pe = h.mips_per_pe;
            caps.s_ppm = h.voltage_levels[h.initial_level].ppm();
            hosts[{"dc:" + std::to_string(dc.id.value), std::to_string(h.id.value)}] = caps;
        }
    }
    struct CloudletTrack {
        std::uint64_t length_mi = 0;
        int pes = 1;
        std::int64_t rate = 0;
        std::uint64_t since = 0;
        unsigned __int128 executed = 0;
        bool finished = false;
    };
    std::map<std::string, CloudletTrack> cloudlets;

    auto check_hosts = [&]() {
        for (const auto& [key, caps] : hosts) {
            std::int64_t ram = 0;
            int pes = 0;
            std::int64_t share = 0;
            const auto it = held.find(key);
            if (it == held.end()) {
                continue;
            }
            for (const auto& [vm, holding] : it->second) {
                ram += holding.ram_mb;
                if (holding.space) {
                    pes += holding.pes;
                }
                share += holding.share_umips;
                if (holding.share_umips >
                    static_cast<std::int64_t>(holding.pes) * caps.mips_per_pe * caps.s_ppm) {
                    out.capacity_ok = false;
                    out.detail = "per-vm share over PE capacity on " + key.first;
                }
            }
            if (ram > caps.ram_mb || pes > caps.pe_count ||
                share > caps.pe_count * caps.mips_per_pe * caps.s_ppm) {
                out.capacity_ok = false;
                out.detail = "capacity exceeded on " + key.first + " host " + key.second;
            }
        }
    };

    const std::vector<Row> rows = parse_trace(csv);
    std::uint64_t current_time = 0;
    for (const Row& row : rows) {
        if (row.time != current_time) {
            check_hosts();
            current_time = row.time;
        }
        const auto host_key = [&](const std::string& host) {
            return std::pair(row.entity, host);
        };
        if (row.event == "vm_place") {
            if (hosts.count(host_key(row.kv.at("host")))) {
                Holding h;
                h.ram_mb = std::stoll(row.kv.at("ram_mb"));
                h.pes = std::stoi(row.kv.at("pes"));
                h.space = row.kv.at("mode") == "space";
                held[host_key(row.kv.at("host"))][row.kv.at("vm")] = h;
            }
        } else if (row.event == "vm_share") {
            const auto key = host_key(row.kv.at("host"));
            if (hosts.count(key) && held[key].count(row.kv.at("vm"))) {
                held[key][row.kv.at("vm")].share_umips = std::stoll(row.kv.at("share_umips"));
            }
        } else if (row.event == "vm_release") {
            const auto key = host_key(row.kv.at("host"));
            if (hosts.count(key)) {
                held[key].erase(row.kv.at("vm"));
            }
        } else if (row.event == "host_speed") {
            const auto key = host_key(row.kv.at("host"));
            if (hosts.count(key)) {
                hosts[key].s_ppm = std::stoll(row.kv.at("s_ppm"));
            }
        } else if (row.event == "cloudlet_submit") {
            CloudletTrack track;
            track.length_mi = std::stoull(row.kv.at("length_mi"));
            track.pes = std::stoi(row.kv.at("pes"));
            cloudlets[row.kv.at("cloudlet")] = track;
        } else if (row.event == "cloudlet_rate") {
            CloudletTrack& track = cloudlets.at(row.kv.at("cloudlet"));
            if (track.rate > 0) {
                track.executed += static_cast<unsigned __int128>(track.rate) *
                                  static_cast<unsigned __int128>(row.time - track.since);
            }
            track.rate = std::stoll(row.kv.at("rate_umips"));
            track.since = row.time;
        } else if (row.event == "cloudlet_finish") {
            CloudletTrack& track = cloudlets.at(row.kv.at("cloudlet"));
            if (track.rate > 0) {
                track.executed += static_cast<unsigned __int128>(track.rate) *
                                  static_cast<unsigned __int128>(row.time - track.since);
            }
            track.rate = 0;
            track.finished = true;
        }
    }
    check_hosts();

    for (const auto& [name, track] : cloudlets) {
        if (!track.finished) {
            continue;
        }
        ++out.cloudlets_checked;
        const unsigned __int128 expected = static_cast<unsigned __int128>(track.length_mi) *
                                           kUnitsPerMi *
                                           static_cast<unsigned __int128>(track.pes);
        const unsigned __int128 tolerance =
            kUnitsPerMi * static_cast<unsigned __int128>(track.pes);  // one MI per PE
        const unsigned __int128 low = expected > tolerance ? expected - tolerance : 0;
        if (track.executed < low || track.executed > expected + tolerance) {
            out.work_ok = false;
            out.detail = "executed work diverges for cloudlet " + name;
        }
    }
    return out;
}

Money total_cost(const SummaryReport& s) {
    Money sum;
    for (const BrokerSummary& b : s.brokers) {
        sum += b.total_cost;
    }
    return sum;
}

int total_rejected(const SummaryReport& s) {
    int n = 0;
    for (const ProviderSummary& p : s.providers) {
        n += p.rejected_requests;
    }
    return n;
}

// --- criteria ---------------------------------------------------------------

void criterion_determinism() {
    const Scenario scenario = load_scenario("reference.json");
    const auto t0 = std::chrono::steady_clock::now();
    bool identical = true;
    for (std::uint64_t seed : {11ull, 22ull, 33ull, 44ull, 55ull}) {
        const RunResult a = run_simulation(scenario, seed);
        const RunResult b = run_simulation(scenario, seed);
        identical = identical && a.trace_csv == b.trace_csv;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, "determinism across 5 seeds x 2 runs", identical && elapsed < 60.0,
           "elapsed " + std::to_string(elapsed) + " s");
}

void criterion_money_conservation() {
    bool ok = true;
    std::string detail;
    for (const std::string& name : bundled_scenarios()) {
        const Scenario scenario = load_scenario(name);
        const RunResult result = run_simulation(scenario, scenario.run.seed);
        if (result.summary.ledger_balance_sum_millicents != 0) {
            ok = false;
            detail = name + ": ledger sum nonzero";
        }
        Money revenue;
        Money penalties;
        Money peering_paid;
        Money peering_received;
        for (const ProviderSummary& p : result.summary.providers) {
            revenue += p.revenue;
            penalties += p.penalties_paid;
            peering_paid += p.peering_paid;
            peering_received += p.peering_received;
        }
        if (revenue - penalties != total_cost(result.summary) ||
            peering_paid != peering_received) {
            ok = false;
            detail = name + ": summary does not reconcile with the journal";
        }
    }
    report(2, "money conservation and journal reconciliation", ok, detail);
}

void criterion_work_conservation() {
    bool ok = true;
    std::string detail;
    std::int64_t checked = 0;
    for (const std::string& name : bundled_scenarios()) {
        const Scenario scenario = load_scenario(name);
        const RunResult result = run_simulation(scenario, scenario.run.seed);
        const ReplayResult replay = replay_trace(scenario, result.trace_csv);
        checked += replay.cloudlets_checked;
        if (!replay.capacity_ok || !replay.work_ok) {
            ok = false;
            detail = name + ": " + replay.detail;
        }
    }
    report(3, "work conservation and capacity replay", ok,
           detail.empty() ? std::to_string(checked) + " cloudlets checked" : detail);
}

void criterion_scheduler_oracles() {
    Rng rng(0xC0FFEE);
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 200 && ok; ++round) {
        const int pes = static_cast<int>(rng.next_below(4)) + 1;
        const std::size_t n = rng.next_below(10) + 1;
        std::vector<DispatchItem> queue;
        for (std::size_t i = 0; i < n; ++i) {
            queue.push_back(
                DispatchItem{rng.next_below(10'000), static_cast<int>(rng.next_below(pes)) + 1});
        }
        const std::int64_t rate =
            (static_cast<std::int64_t>(rng.next_below(3000)) + 1) * 1'000'000;
        const auto got = space_shared_dispatch(queue, pes, rate, SimTime{});
        const auto expected = oracles::fifo_gang(queue, pes, rate, SimTime{});
        for (std::size_t i = 0; i < n; ++i) {
            if (got[i].start != expected[i].start || got[i].finish != expected[i].finish) {
                ok = false;
                detail = "space-shared divergence in round " + std::to_string(round);
            }
        }
    }
    for (int round = 0; round < 200 && ok; ++round) {
        const std::size_t n = rng.next_below(8) + 1;
        std::vector<std::int64_t> demands;
        for (std::size_t i = 0; i < n; ++i) {
            demands.push_back(static_cast<std::int64_t>(rng.next_below(5'000'000'000ull)) + 1);
        }
        const std::int64_t capacity =
            static_cast<std::int64_t>(rng.next_below(12'000'000'000ull)) + 1;
        if (!oracles::check_max_min(demands, capacity, share_mips_max_min(demands, capacity))) {
            ok = false;
            detail = "max-min divergence in round " + std::to_string(round);
        }
    }
    report(4, "space-shared and max-min scheduler oracles", ok, detail);
}

void criterion_auction_oracle() {
    Rng rng(0xA0C710);
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 2000 && ok; ++round) {
        const std::size_t nb = rng.next_below(6) + 1;
        const std::size_t na = rng.next_below(6) + 1;
        std::vector<Bid> bids;
        std::vector<Ask> asks;
        std::vector<std::int64_t> bid_prices;
        std::vector<std::int64_t> ask_prices;
        std::uint64_t seq = 0;
        for (std::size_t i = 0; i < nb; ++i) {
            const std::int64_t p = static_cast<std::int64_t>(rng.next_below(10)) + 1;
            Bid b;
            b.seq = ++seq;
            b.broker = BrokerId{static_cast<std::uint32_t>(i)};
            b.vm_class = "m";
            b.max_unit_price = Money::cents(p);
            b.quantity = 1;
            bids.push_back(b);
            bid_prices.push_back(p);
        }
        for (std::size_t i = 0; i < na; ++i) {
            const std::int64_t p = static_cast<std::int64_t>(rng.next_below(10)) + 1;
            Ask a;
            a.seq = ++seq;
            a.provider = DatacenterId{static_cast<std::uint32_t>(i)};
            a.vm_class = "m";
            a.unit_price = Money::cents(p);
            a.quantity = 1;
            asks.push_back(a);
            ask_prices.push_back(p);
        }
        std::vector<Bid> sorted_bids = bids;
        std::vector<Ask> sorted_asks = asks;
        std::sort(sorted_bids.begin(), sorted_bids.end(), [](const Bid& x, const Bid& y) {
            return x.max_unit_price > y.max_unit_price;
        });
        std::sort(sorted_asks.begin(), sorted_asks.end(), [](const Ask& x, const Ask& y) {
            return x.unit_price < y.unit_price;
        });
        std::uint64_t trade_seq = 0;
        const auto trades = clear_double_auction(bids, asks, SimTime{}, trade_seq);
        if (static_cast<int>(trades.size()) !=
            oracles::max_matching_pairs(bid_prices, ask_prices)) {
            ok = false;
            detail = "trade count mismatch in round " + std::to_string(round);
        }
        for (std::size_t k = 0; k < trades.size(); ++k) {
            if (trades[k].price < sorted_asks[k].unit_price ||
                trades[k].price > sorted_bids[k].max_unit_price) {
                ok = false;
                detail = "price outside the spread in round " + std::to_string(round);
            }
        }
    }
    report(5, "double auction against brute-force matching (2000 books)", ok, detail);
}

void criterion_dvfs() {
    Rng rng(0xD0F5);
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 500 && ok; ++round) {
        const std::size_t n_tasks = rng.next_below(10) + 1;
        std::vector<std::uint64_t> tasks;
        for (std::size_t i = 0; i < n_tasks; ++i) {
            tasks.push_back(rng.next_below(3000) + 1);
        }
        std::vector<VoltageLevel> levels;
        const std::size_t extra = rng.next_below(4) + 1;
        for (std::size_t i = 0; i < extra; ++i) {
            levels.push_back(VoltageLevel{
                "l" + std::to_string(i),
                0.15 + 0.8 * static_cast<double>(i) / static_cast<double>(extra)});
        }
        levels.push_back(VoltageLevel{"full", 1.0});
        const PowerModel model{static_cast<double>(rng.next_below(60)),
                               60.0 + static_cast<double>(rng.next_below(140))};
        const std::int64_t mips = static_cast<std::int64_t>(rng.next_below(2500)) + 200;
        const SimTime deadline = SimTime::micros(rng.next_below(30'000'000) + 1);
        const auto [feasible, best] =
            oracles::exhaustive_min_energy(tasks, deadline, levels, model, mips);
        if (!feasible) {
            try {
                select_level_bot(tasks, deadline, levels, model, mips);
                ok = false;
                detail = "selector accepted an infeasible deadline";
            } catch (const InfeasibleDeadlineError&) {
            }
            continue;
        }
        const std::size_t chosen = select_level_bot(tasks, deadline, levels, model, mips);
        double energy = 0.0;
        for (const std::uint64_t t : tasks) {
            energy += energy_joules(t, mips, model, levels[chosen].fraction);
        }
        if (energy != best) {
            ok = false;
            detail = "selected energy differs from the exhaustive minimum";
        }
    }
    const PowerModel pure{0.0, 100.0};
    const double ratio =
        energy_joules(1000, 1000, pure, 0.5) / energy_joules(1000, 1000, pure, 1.0);
    if (std::abs(ratio - 0.25) > 1e-9 * 0.25) {
        ok = false;
        detail = "cubic identity violated";
    }
    report(6, "DVFS level selection optimality (500 instances)", ok, detail);
}

void criterion_billing() {
    Rng rng(0xB111);
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 10'000 && ok; ++round) {
        const std::uint64_t us = rng.next_below(500'000'000'000ull);
        const Money price = Money::cents(static_cast<std::int64_t>(rng.next_below(100)) + 1);
        const Money bill = compute_bill(SimTime{}, SimTime::micros(us), price);
        // Independent exact ceiling: the smallest h with h * 3.6e9 us >= us.
        std::uint64_t hours = us / 3'600'000'000ull;
        if (hours * 3'600'000'000ull < us) {
            ++hours;
        }
        if (bill != price * static_cast<std::int64_t>(hours)) {
            ok = false;
            detail = "bill mismatch at " + std::to_string(us) + " us";
        }
        const Money longer = compute_bill(SimTime{}, SimTime::micros(us + 1'000'000), price);
        if (longer < bill) {
            ok = false;
            detail = "billing not monotone";
        }
    }
    {
        Sla sla;
        sla.agreed_price = Money::cents(100);
        sla.penalty_rate_per_s = Money::cents(1);
        if (assess_penalty(sla, SimTime::seconds(10), SimTime::seconds(10)) != Money{}) {
            ok = false;
            detail = "zero lateness produced a penalty";
        }
        Sla capped;
        capped.agreed_price = Money::cents(100);
        capped.penalty_rate_per_s = Money::cents(1);
        if (assess_penalty(capped, SimTime::seconds(1000), SimTime::seconds(10)) !=
            Money::cents(100)) {
            ok = false;
            detail = "penalty cap violated";
        }
    }
    report(7, "billing ceiling and penalty properties (10000 durations)", ok, detail);
}

void criterion_federation() {
    const Scenario enabled = load_scenario("overload.json");
    const RunResult with_peering = run_simulation(enabled, enabled.run.seed);

    Scenario disabled = enabled;
    disabled.federation.enabled = false;
    const RunResult without = run_simulation(disabled, enabled.run.seed);

    Scenario zero_quota = enabled;
    for (PeeringAgreement& a : zero_quota.federation.agreements) {
        a.quota_vm_hours = 0;
    }
    const RunResult quota0 = run_simulation(zero_quota, enabled.run.seed);

    const bool fewer = total_rejected(with_peering.summary) < total_rejected(without.summary);
    const bool conservative = quota0.trace_csv == without.trace_csv;
    report(8, "federation lowers rejections and zero quota is conservative",
           fewer && conservative,
           "rejected " + std::to_string(total_rejected(with_peering.summary)) + " vs " +
               std::to_string(total_rejected(without.summary)));
}

void criterion_consolidation() {
    const Scenario scenario = load_scenario("consolidation.json");
    const RunResult on = run_simulation(scenario, scenario.run.seed);

    Scenario off = scenario;
    for (DatacenterSpec& dc : off.datacenters) {
        dc.consolidation = false;
    }
    const RunResult baseline = run_simulation(off, scenario.run.seed);

    // Active host count from the trace: initial actives minus net host_active
    // transitions.
    int active = 0;
    for (const DatacenterSpec& dc : scenario.datacenters) {
        for (const HostSpec& h : dc.hosts) {
            active += h.initially_active ? 1 : 0;
        }
    }
    const int before = active;
    for (const Row& row : parse_trace(on.trace_csv)) {
        if (row.event == "host_active") {
            active += row.kv.at("active") == "1" ? 1 : -1;
        }
    }
    const ReplayResult replay = replay_trace(scenario, on.trace_csv);
    const bool ok = active <= before && replay.capacity_ok && replay.work_ok &&
                    on.summary.total_energy_j < baseline.summary.total_energy_j;
    report(9, "consolidation reduces active hosts and energy", ok,
           "energy " + std::to_string(on.summary.total_energy_j) + " J vs " +
               std::to_string(baseline.summary.total_energy_j) + " J");
}

void criterion_broker() {
    Rng rng(0xB20C);
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 300 && ok; ++round) {
        const std::size_t n_tasks = rng.next_below(8) + 1;
        const std::size_t n_vms = rng.next_below(3) + 1;
        std::vector<TaskForMap> tasks;
        std::vector<std::uint64_t> lengths;
        for (std::size_t t = 0; t < n_tasks; ++t) {
            const std::uint64_t len = rng.next_below(200) + 1;
            tasks.push_back({CloudletId{static_cast<std::uint32_t>(t + 1)}, len});
            lengths.push_back(len);
        }
        std::vector<VmForMap> vms;
        for (std::size_t v = 0; v < n_vms; ++v) {
            vms.push_back({VmId{static_cast<std::uint32_t>(v + 1)}, 1'000'000, SimTime{}});
        }
        const auto assignment = map_tasks(tasks, vms);
        std::vector<std::uint64_t> load(n_vms, 0);
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            load[assignment[t]] += lengths[t] * 1'000'000;
        }
        const std::uint64_t greedy = *std::max_element(load.begin(), load.end());
        const std::uint64_t optimum = oracles::exhaustive_min_makespan(lengths, n_vms, 1'000'000);
        if (greedy > 2 * optimum) {
            ok = false;
            detail = "greedy exceeded twice the optimum in round " + std::to_string(round);
        }
    }
    for (int round = 0; round < 100 && ok; ++round) {
        std::vector<Ask> asks;
        const std::size_t n = rng.next_below(5) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            Ask a;
            a.seq = i;
            a.provider = DatacenterId{static_cast<std::uint32_t>(i + 1)};
            a.vm_class = "m";
            a.unit_price = Money::cents(static_cast<std::int64_t>(rng.next_below(30)) + 1);
            a.quantity = static_cast<int>(rng.next_below(4)) + 1;
            asks.push_back(a);
        }
        MatchRequest request;
        request.total_length_mi = rng.next_below(500'000) + 1;
        request.vm_count = static_cast<int>(rng.next_below(4)) + 1;
        request.qos =
            QosRequirement{SimTime::seconds(rng.next_below(7200) + 60), Money::cents(1'000'000), 0};
        const VmClassSpec cls{"m", 1, 1000, 512, SchedulerMode::space_shared};
        const auto base = match(request, asks, cls);
        std::vector<Ask> scaled = asks;
        for (Ask& a : scaled) {
            a.unit_price = a.unit_price * 7;
        }
        const auto rescaled = match(request, scaled, cls);
        if (base.has_value() != rescaled.has_value()) {
            ok = false;
            detail = "feasibility changed under scaling";
        } else if (base && base->provider != rescaled->provider) {
            ok = false;
            detail = "argmin changed under uniform scaling";
        }
    }
    report(10, "greedy mapping bound and match scale invariance", ok, detail);
}

}  // namespace

int main() {
    criterion_determinism();
    criterion_money_conservation();
    criterion_work_conservation();
    criterion_scheduler_oracles();
    criterion_auction_oracle();
    criterion_dvfs();
    criterion_billing();
    criterion_federation();
    criterion_consolidation();
    criterion_broker();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
