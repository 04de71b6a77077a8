#include <doctest.h>

#include <algorithm>

#include "cloudmarket/errors.hpp"
#include "cloudmarket/rng.hpp"
#include "cloudmarket/workload.hpp"
#include "oracles.hpp"

using namespace cloudmarket;

namespace {

Workflow diamond() {
    Workflow wf;
    for (std::uint32_t i = 1; i <= 4; ++i) {
        wf.nodes.insert(CloudletId{i});
    }
    wf.edges = {{CloudletId{1}, CloudletId{2}},
                {CloudletId{1}, CloudletId{3}},
                {CloudletId{2}, CloudletId{4}},
                {CloudletId{3}, CloudletId{4}}};
    return wf;
}

}  // namespace

TEST_CASE("param sweep expands the full cross product in domain order") {
    ParamSweepSpec spec;
    spec.domains = {{"a", {"1", "2", "3"}}, {"b", {"x", "y"}}};
    const auto cloudlets = expand_param_sweep(spec, 1);
    REQUIRE(cloudlets.size() == 6);
    CHECK(cloudlets[0].params == std::map<std::string, std::string>{{"a", "1"}, {"b", "x"}});
    CHECK(cloudlets[1].params == std::map<std::string, std::string>{{"a", "1"}, {"b", "y"}});
    CHECK(cloudlets[2].params == std::map<std::string, std::string>{{"a", "2"}, {"b", "x"}});
    CHECK(cloudlets[5].params == std::map<std::string, std::string>{{"a", "3"}, {"b", "y"}});
    for (std::uint32_t i = 0; i < 6; ++i) {
        CHECK(cloudlets[i].id == CloudletId{1 + i});
    }
}

TEST_CASE("single one-value domain expands to one cloudlet") {
    ParamSweepSpec spec;
    spec.domains = {{"only", {"v"}}};
    CHECK(expand_param_sweep(spec, 5).size() == 1);
}

TEST_CASE("an empty domain is an error") {
    ParamSweepSpec spec;
    spec.domains = {{"a", {}}};
    CHECK_THROWS_AS(expand_param_sweep(spec, 1), EmptyDomainError);
}

TEST_CASE("sweep cardinality is the product of domain sizes") {
    Rng rng(11);
    for (int round = 0; round < 20; ++round) {
        ParamSweepSpec spec;
        std::size_t expected = 1;
        const int domains = static_cast<int>(rng.next_below(3)) + 1;
        for (int d = 0; d < domains; ++d) {
            std::vector<std::string> values;
            const int n = static_cast<int>(rng.next_below(4)) + 1;
            for (int v = 0; v < n; ++v) {
                values.push_back(std::to_string(v));
            }
            expected *= values.size();
            spec.domains.emplace_back("d" + std::to_string(d), values);
        }
        CHECK(expand_param_sweep(spec, 1).size() == expected);
    }
}

TEST_CASE("diamond validates as acyclic") {
    CHECK(validate_dag(diamond()).ok());
}

TEST_CASE("two-cycle is reported with a node on the cycle") {
    Workflow wf;
    wf.nodes = {CloudletId{1}, CloudletId{2}};
    wf.edges = {{CloudletId{1}, CloudletId{2}}, {CloudletId{2}, CloudletId{1}}};
    const CycleReport report = validate_dag(wf);
    REQUIRE_FALSE(report.ok());
    for (const CloudletId n : report.cycle_nodes) {
        CHECK((n == CloudletId{1} || n == CloudletId{2}));
    }
}

TEST_CASE("empty workflow is vacuously valid") {
    CHECK(validate_dag(Workflow{}).ok());
}

TEST_CASE("ready set of the diamond") {
    const Workflow wf = diamond();
    CHECK(ready_tasks(wf, {}) == std::set<CloudletId>{CloudletId{1}});
    CHECK(ready_tasks(wf, {CloudletId{1}}) ==
          std::set<CloudletId>{CloudletId{2}, CloudletId{3}});
    CHECK(ready_tasks(wf, {CloudletId{1}, CloudletId{2}, CloudletId{3}, CloudletId{4}}).empty());
}

TEST_CASE("ready-driven execution is a topological order visiting each node once") {
    Rng rng(23);
    for (int round = 0; round < 40; ++round) {
        Workflow wf;
        const std::uint32_t n = static_cast<std::uint32_t>(rng.next_below(18)) + 2;
        for (std::uint32_t i = 1; i <= n; ++i) {
            wf.nodes.insert(CloudletId{i});
        }
        for (std::uint32_t i = 1; i <= n; ++i) {
            for (std::uint32_t j = i + 1; j <= n; ++j) {
                if (rng.next_below(100) < 25) {
                    wf.edges.emplace_back(CloudletId{i}, CloudletId{j});  // i<j keeps it acyclic
                }
            }
        }
        REQUIRE(validate_dag(wf).ok());
        std::map<CloudletId, std::size_t> position;
        std::set<CloudletId> done;
        std::size_t visits = 0;
        while (done.size() < wf.nodes.size()) {
            const std::set<CloudletId> ready = ready_tasks(wf, done);
            REQUIRE_FALSE(ready.empty());
            for (const CloudletId r : ready) {
                CHECK_FALSE(position.count(r));
                position[r] = visits++;
                done.insert(r);
            }
        }
        CHECK(visits == wf.nodes.size());
        for (const auto& [from, to] : wf.edges) {
            CHECK(position.at(from) < position.at(to));
        }
        CHECK_FALSE(oracles::toposort(wf).empty());
    }
}

TEST_CASE("finish time at unit rate") {
    CHECK(finish_time_estimate(1000, 1000 * 1'000'000, SimTime{}) == SimTime::seconds(1));
}

TEST_CASE("zero-length work finishes at its start") {
    CHECK(finish_time_estimate(0, 5'000'000, SimTime::micros(77)) == SimTime::micros(77));
}

TEST_CASE("fractional durations round up to the next microsecond") {
    // 1 MI at 3 MIPS is 1/3 s; the ceiling lands at 333334 us.
    CHECK(finish_time_estimate(1, 3 * 1'000'000, SimTime{}) == SimTime::micros(333'334));
}

TEST_CASE("a zero rate is rejected") {
    CHECK_THROWS_AS(finish_time_estimate(10, 0, SimTime{}), ZeroRateError);
}

TEST_CASE("finish time is monotone in rate and length") {
    Rng rng(31);
    for (int round = 0; round < 200; ++round) {
        const std::uint64_t len = rng.next_below(100'000) + 1;
        const std::int64_t rate = static_cast<std::int64_t>(rng.next_below(1'000'000'000)) + 1;
        const SimTime base = finish_time_estimate(len, rate, SimTime{});
        CHECK(finish_time_estimate(len + 17, rate, SimTime{}) >= base);
        CHECK(finish_time_estimate(len, rate + 5'000, SimTime{}) <= base);
    }
}
