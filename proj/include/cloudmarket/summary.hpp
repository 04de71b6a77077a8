#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudmarket/energy.hpp"
#include "cloudmarket/ids.hpp"
#include "cloudmarket/money.hpp"

namespace cloudmarket {

struct BrokerSummary {
    BrokerId id;
    double makespan_s = 0.0;       // latest completion minus earliest submit
    Money total_cost;              // SLA payments minus penalty refunds
    int sla_met = 0;
    int sla_violated = 0;
    int unmatched_requests = 0;    // no feasible provider at submit
    int budget_violations = 0;
};

struct ProviderSummary {
    DatacenterId id;
    Money revenue;        // SLA income
    Money penalties_paid;
    Money peering_paid;
    Money peering_received;
    double energy_j = 0.0;
    int rejected_requests = 0;
};

struct SummaryReport {
    int replication = 0;
    std::uint64_t seed = 0;
    double horizon_s = 0.0;
    std::vector<BrokerSummary> brokers;
    std::vector<ProviderSummary> providers;
    int trade_count = 0;
    double mean_price_millicents = 0.0;
    int offloaded_count = 0;
    std::int64_t cloudlets_completed = 0;
    std::int64_t total_mi_completed = 0;
    double total_energy_j = 0.0;
    std::int64_t ledger_balance_sum_millicents = 0;  // zero-sum check
};

nlohmann::ordered_json summary_to_json(const SummaryReport& summary);

// Scalar metrics used for cross-replication aggregation.
std::map<std::string, double> summary_metrics(const nlohmann::ordered_json& summary);

// mean/min/max per metric; input order does not matter.
nlohmann::ordered_json aggregate_summaries(const std::vector<nlohmann::ordered_json>& summaries);

}  // namespace cloudmarket
