#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cloudmarket/broker.hpp"
#include "cloudmarket/federation.hpp"
#include "cloudmarket/ids.hpp"
#include "cloudmarket/infrastructure.hpp"
#include "cloudmarket/market.hpp"
#include "cloudmarket/qos.hpp"
#include "cloudmarket/workload.hpp"

namespace cloudmarket {

struct TaskSpec {
    std::uint32_t id = 0;
    std::uint64_t length_mi = 0;
    int pes = 1;
    double input_mb = 0.0;
    double output_mb = 0.0;
};

struct SweepSpec {
    TaskSpec template_task;
    std::vector<std::pair<std::string, std::vector<std::string>>> domains;
};

struct WorkflowSpec {
    std::vector<TaskSpec> tasks;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

enum class AppModel { bag, sweep, workflow };

struct RequestSpec {
    std::uint32_t id = 0;
    AppModel app = AppModel::bag;
    SimTime submit;
    std::string vm_class;
    int vm_count = 1;
    Money max_unit_price;
    QosRequirement qos;
    Money penalty_rate_per_s;
    std::optional<std::string> region;
    std::vector<TaskSpec> tasks;       // bag
    std::optional<SweepSpec> sweep;    // sweep
    std::optional<WorkflowSpec> workflow;
};

struct PrivateVmSpec {
    std::string vm_class;
    int count = 0;
};

struct BrokerSpec {
    BrokerId id;
    std::vector<RequestSpec> requests;
    std::vector<PrivateVmSpec> private_vms;
};

struct AskSpec {
    std::string vm_class;
    Money unit_price;
    int quantity = 1;
};

struct DatacenterSpec {
    DatacenterId id;
    std::string region;
    Money price_per_vm_hour;
    bool consolidation = false;
    bool dvfs = false;
    PlacementPolicy placement = PlacementPolicy::first_fit;
    CoordinatorPolicy coordinator;
    std::vector<HostSpec> hosts;
    std::vector<AskSpec> asks;
};

struct MarketConfig {
    SimTime tick_period = SimTime::seconds(60);
    Exchange::Mechanism mechanism = Exchange::Mechanism::commodity;
};

struct FederationConfig {
    bool enabled = false;
    std::vector<PeeringAgreement> agreements;
};

struct RunConfig {
    std::uint64_t seed = 0;
    SimTime horizon;
    int replications = 1;
    SimTime transfer_per_mb;  // submit/completion delay per MB moved
};

struct Scenario {
    std::vector<DatacenterSpec> datacenters;
    std::vector<VmClassSpec> vm_classes;
    std::vector<BrokerSpec> brokers;
    MarketConfig market;
    FederationConfig federation;
    RunConfig run;

    const VmClassSpec* find_class(const std::string& name) const;
    const DatacenterSpec* find_datacenter(DatacenterId id) const;
};

struct ParseResult {
    std::optional<Scenario> scenario;
    std::vector<std::string> errors;  // every problem found, not just the first

    bool ok() const { return scenario.has_value() && errors.empty(); }
};

// Parses and fully validates a scenario document (format 1). Unknown keys,
// dangling references, duplicate ids and invariant breaches are all
// collected into `errors`.
ParseResult parse_scenario(const std::string& json_text);

nlohmann::ordered_json emit_scenario(const Scenario& scenario);

}  // namespace cloudmarket
