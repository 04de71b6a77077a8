#include "cloudmarket/summary.hpp"

#include <algorithm>

namespace cloudmarket {

using nlohmann::ordered_json;

ordered_json summary_to_json(const SummaryReport& s) {
    ordered_json root;
    root["replication"] = s.replication;
    root["seed"] = s.seed;
    root["horizon_s"] = s.horizon_s;
    root["brokers"] = ordered_json::array();
    for (const BrokerSummary& b : s.brokers) {
        root["brokers"].push_back({{"id", b.id.value},
                                   {"makespan_s", b.makespan_s},
                                   {"total_cost_millicents", b.total_cost.millicents()},
                                   {"sla_met", b.sla_met},
                                   {"sla_violated", b.sla_violated},
                                   {"unmatched_requests", b.unmatched_requests},
                                   {"budget_violations", b.budget_violations}});
    }
    root["providers"] = ordered_json::array();
    for (const ProviderSummary& p : s.providers) {
        root["providers"].push_back(
            {{"id", p.id.value},
             {"revenue_millicents", p.revenue.millicents()},
             {"penalties_paid_millicents", p.penalties_paid.millicents()},
             {"peering_paid_millicents", p.peering_paid.millicents()},
             {"peering_received_millicents", p.peering_received.millicents()},
             {"energy_joules", p.energy_j},
             {"rejected_requests", p.rejected_requests}});
    }
    root["market"] = {{"trade_count", s.trade_count},
                      {"mean_price_millicents", s.mean_price_millicents}};
    root["federation"] = {{"offloaded_count", s.offloaded_count}};
    root["cloudlets_completed"] = s.cloudlets_completed;
    root["total_mi_completed"] = s.total_mi_completed;
    root["total_energy_joules"] = s.total_energy_j;
    root["ledger_balance_sum_millicents"] = s.ledger_balance_sum_millicents;
    return root;
}

std::map<std::string, double> summary_metrics(const ordered_json& j) {
    std::map<std::string, double> m;
    double cost = 0.0;
    double makespan = 0.0;
    double met = 0.0;
    double violated = 0.0;
    double unmatched = 0.0;
    for (const auto& b : j.at("brokers")) {
        cost += b.at("total_cost_millicents").get<double>();
        makespan = std::max(makespan, b.at("makespan_s").get<double>());
        met += b.at("sla_met").get<double>();
        violated += b.at("sla_violated").get<double>();
        unmatched += b.at("unmatched_requests").get<double>();
    }
    double revenue = 0.0;
    double penalties = 0.0;
    double rejected = 0.0;
    for (const auto& p : j.at("providers")) {
        revenue += p.at("revenue_millicents").get<double>();
        penalties += p.at("penalties_paid_millicents").get<double>();
        rejected += p.at("rejected_requests").get<double>();
    }
    m["broker_cost_millicents"] = cost;
    m["max_makespan_s"] = makespan;
    m["sla_met"] = met;
    m["sla_violated"] = violated;
    m["unmatched_requests"] = unmatched;
    m["provider_revenue_millicents"] = revenue;
    m["penalties_millicents"] = penalties;
    m["rejected_requests"] = rejected;
    m["trade_count"] = j.at("market").at("trade_count").get<double>();
    m["offloaded_count"] = j.at("federation").at("offloaded_count").get<double>();
    m["cloudlets_completed"] = j.at("cloudlets_completed").get<double>();
    m["total_mi_completed"] = j.at("total_mi_completed").get<double>();
    m["total_energy_joules"] = j.at("total_energy_joules").get<double>();
    return m;
}

ordered_json aggregate_summaries(const std::vector<ordered_json>& summaries) {
    // Sort by replication index so the aggregate is independent of the order
    // the files were listed in.
    std::vector<const ordered_json*> ordered;
    ordered.reserve(summaries.size());
    for (const auto& s : summaries) {
        ordered.push_back(&s);
    }
    std::sort(ordered.begin(), ordered.end(), [](const ordered_json* a, const ordered_json* b) {
        return a->at("replication").get<int>() < b->at("replication").get<int>();
    });
    ordered_json root;
    root["replications"] = static_cast<int>(ordered.size());
    ordered_json metrics;
    std::map<std::string, std::vector<double>> series;
    for (const ordered_json* s : ordered) {
        for (const auto& [name, value] : summary_metrics(*s)) {
            series[name].push_back(value);
        }
    }
    for (const auto& [name, values] : series) {
        double sum = 0.0;
        double lo = values.front();
        double hi = values.front();
        for (const double v : values) {
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        metrics[name] = {{"mean", sum / static_cast<double>(values.size())},
                         {"min", lo},
                         {"max", hi}};
    }
    root["metrics"] = std::move(metrics);
    return root;
}

}  // namespace cloudmarket
