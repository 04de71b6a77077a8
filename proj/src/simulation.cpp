#include "cloudmarket/simulation.hpp"

#include <algorithm>
#include <variant>

#include "cloudmarket/broker.hpp"
#include "cloudmarket/energy.hpp"
#include "cloudmarket/federation.hpp"
#include "cloudmarket/infrastructure.hpp"
#include "cloudmarket/kernel.hpp"
#include "cloudmarket/market.hpp"
#include "cloudmarket/trace.hpp"
#include "cloudmarket/workload.hpp"

namespace cloudmarket {

namespace {

constexpr int kPrioResource = 0;
constexpr int kPrioMarket = 10;   // market clearing runs after resource events
constexpr int kPrioBilling = 20;  // consolidation runs after clearing
const SimTime kBillingPeriod = SimTime::seconds(3600);

struct EvPublishAsks {
    std::size_t dc;
};
struct EvSubmitRequest {
    RequestId request;
};
struct EvMarketTick {};
struct EvBillingTick {
    std::size_t dc;
};
struct EvProvision {
    std::size_t dc;
    RequestId request;
    int quantity = 0;
    Money price_qty_sum;  // sum over the bundle's trades of price * quantity
};
struct EvForward {
    std::size_t origin;
    std::size_t peer;
    std::size_t agreement;
    RequestId request;
    int quantity = 0;
    Money price_qty_sum;
    std::int64_t vm_hours = 0;
};
struct EvForwardDeclined {
    std::size_t origin;
    RequestId request;
};
struct EvVmsReady {
    RequestId request;
    std::vector<VmId> vms;
};
struct EvRequestRejected {
    RequestId request;
};
struct EvDispatch {
    CloudletId cloudlet;
    VmId vm;
};
struct EvFinish {
    CloudletId cloudlet;
};
struct EvDone {
    CloudletId cloudlet;
};
struct EvMigrationComplete {
    VmId vm;
};

using Payload = std::variant<EvPublishAsks, EvSubmitRequest, EvMarketTick, EvBillingTick,
                             EvProvision, EvForward, EvForwardDeclined, EvVmsReady,
                             EvRequestRejected, EvDispatch, EvDone, EvFinish,
                             EvMigrationComplete>;
using SimKernel = Kernel<Payload>;

enum class VmState { running, migrating, destroyed };

struct VmRuntime {
    VmId id;
    BrokerId owner;
    RequestId request;
    std::string vm_class;
    VmShape shape;
    std::size_t dc = 0;  // index into dcs_
    HostId host;
    VmState state = VmState::running;
    bool is_private = false;
    SimTime started_at;
    SimTime destroyed_at;
    std::int64_t last_share_umips = -1;
    std::vector<CloudletId> queue;    // space-shared FIFO backlog
    std::vector<CloudletId> running;
    HostId migrate_dst;
    std::optional<EventHandle> migration_event;
};

struct CloudletRuntime {
    CloudletId id;
    std::uint32_t scenario_id = 0;
    RequestId request;
    BrokerId owner;
    std::uint64_t length_mi = 0;
    int pes = 1;
    double input_mb = 0.0;
    double output_mb = 0.0;
    CloudletState state = CloudletState::created;
    VmId vm;
    unsigned __int128 remaining = 0;  // progress units across all PEs
    std::int64_t rate_umips = 0;
    SimTime rate_since;
    std::optional<EventHandle> finish_event;
};

struct OffloadRuntime {
    OffloadContract contract;
    std::vector<VmId> vms;
};

enum class RequestStatus { pending, bidding, active, completed, unmatched };

struct RequestRuntime {
    RequestId gid;  // run-wide id; scenario request ids are per-broker
    RequestSpec spec;
    BrokerId broker;
    RequestStatus status = RequestStatus::pending;
    std::vector<CloudletId> tasks;
    Workflow workflow;  // global ids; empty unless app == workflow
    std::set<CloudletId> done;
    std::set<CloudletId> dispatched;
    std::vector<VmId> pool;  // procured VMs plus the broker's private pool
    std::vector<Sla> slas;
    std::vector<OffloadRuntime> offloads;
    SimTime submitted_at;
    SimTime finished_at;
    std::uint64_t total_length_mi = 0;
    std::int64_t est_hours = 0;
    Money spent;
};

struct DcRuntime {
    DatacenterSpec spec;
    EntityId entity;
    std::string name;
    bool internal = false;  // broker-owned capacity, outside the market
    std::vector<HostState> hosts;
    std::vector<double> joules;
    std::vector<SimTime> accrued_to;
    std::set<HostId> deactivate_when_empty;
    int rejected_requests = 0;
};

struct BrokerRuntime {
    BrokerSpec spec;
    EntityId entity;
    std::string name;
    std::vector<VmId> private_pool;
    int unmatched_requests = 0;
    int budget_violations = 0;
    int sla_met = 0;
    int sla_violated = 0;
    SimTime min_submit_completed;
    SimTime max_finish;
    bool any_complete = false;
};

std::string money_str(Money m) { return std::to_string(m.millicents()); }
std::string id_str(std::uint32_t v) { return std::to_string(v); }

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed, int replication)
        : scenario_(scenario), seed_(seed), replication_(replication), kernel_(seed) {}

    RunResult run();

private:
    void build_entities();
    void build_private_infrastructure(BrokerRuntime& broker);
    void schedule_initial_events();

    void dispatch(const SimKernel::Event& ev);
    void on_publish_asks(std::size_t dc);
    void on_submit_request(RequestId id);
    void on_market_tick();
    void on_billing_tick(std::size_t dc);
    void on_provision(const EvProvision& ev);
    void on_forward(const EvForward& ev);
    void on_vms_ready(const EvVmsReady& ev);
    void on_dispatch(const EvDispatch& ev);
    void on_finish(CloudletId id);
    void on_done(CloudletId id);
    void on_migration_complete(VmId id);

    struct PlacementStep {
        HostId host;
        bool reactivate = false;
    };
    std::optional<std::vector<PlacementStep>> plan_bundle(const DcRuntime& dc,
                                                          const VmShape& shape,
                                                          int quantity) const;
    double mean_active_utilization(const DcRuntime& dc) const;
    double post_placement_utilization(const DcRuntime& dc, const VmShape& shape,
                                      const std::vector<PlacementStep>& steps) const;
    void place_bundle(std::size_t dc_index, RequestId request_id, int quantity,
                      Money price_qty_sum, const std::vector<PlacementStep>& steps,
                      std::optional<std::size_t> via_agreement);
    void reject_bundle(std::size_t dc_index, RequestId request_id, const std::string& reason);
    void dispatch_tasks(RequestRuntime& request, const std::vector<CloudletId>& ready);
    void start_queued(VmRuntime& vm);
    void refresh_host(std::size_t dc_index, HostId host);
    void refresh_vm_rates(VmRuntime& vm);
    void checkpoint_progress(CloudletRuntime& c);
    void set_cloudlet_rate(CloudletRuntime& c, std::int64_t rate);
    void start_migration(std::size_t dc_index, VmId vm, HostId dst);
    void destroy_vm(VmId id);
    void complete_request(RequestRuntime& request);
    void maybe_apply_dvfs(std::size_t dc_index, HostId host);
    void set_host_level(std::size_t dc_index, HostId host, std::size_t level);
    void set_host_active(std::size_t dc_index, HostId host, bool active);
    void accrue_energy(std::size_t dc_index, std::size_t host_index);
    VmId create_vm(BrokerId owner, RequestId request, const VmClassSpec& cls, std::size_t dc,
                   bool is_private);
    SimTime transfer_delay(double mb) const;

    void finalize_energy();
    SummaryReport build_summary() const;

    HostState& host_at(std::size_t dc_index, HostId id);
    std::size_t host_index_of(std::size_t dc_index, HostId id) const;
    std::size_t dc_index_of(DatacenterId id) const { return dc_by_id_.at(id); }
    void trace(const std::string& entity, const std::string& event,
               std::vector<std::pair<std::string, std::string>> details);

    const Scenario& scenario_;
    std::uint64_t seed_;
    int replication_;
    SimKernel kernel_;
    TraceLog log_;
    Ledger ledger_;
    std::optional<Exchange> exchange_;
    EntityId exchange_entity_;

    std::vector<DcRuntime> dcs_;
    std::vector<BrokerRuntime> brokers_;
    std::map<DatacenterId, std::size_t> dc_by_id_;
    std::map<BrokerId, std::size_t> broker_by_id_;
    std::vector<PeeringAgreement> agreements_;  // live quotas

    std::map<VmId, VmRuntime> vms_;
    std::map<CloudletId, CloudletRuntime> cloudlets_;
    std::map<RequestId, RequestRuntime> requests_;
    std::map<VmId, SimTime> est_ready_;  // broker-side mapping estimate

    std::uint32_t next_vm_id_ = 0;
    std::uint32_t next_cloudlet_id_ = 0;
    std::uint32_t next_request_id_ = 0;

    int trade_count_ = 0;
    std::int64_t trade_price_sum_mc_ = 0;
    int offloaded_count_ = 0;

    EnergyReport energy_;
};

// ---------------------------------------------------------------------------
// setup

void Simulation::build_entities() {
    auto handler = [this](SimKernel&, const SimKernel::Event& ev) { dispatch(ev); };
    std::set<std::string> class_names;
    for (const VmClassSpec& c : scenario_.vm_classes) {
        class_names.insert(c.name);
    }
    exchange_.emplace(class_names);
    agreements_ = scenario_.federation.agreements;
    for (const DatacenterSpec& spec : scenario_.datacenters) {
        DcRuntime dc;
        dc.spec = spec;
        dc.name = "dc:" + id_str(spec.id.value);
        dc.entity = kernel_.register_entity(dc.name, handler);
        for (const HostSpec& h : spec.hosts) {
            HostState state;
            state.spec = h;
            state.active = h.initially_active;
            state.level_idx = h.initial_level;
            dc.hosts.push_back(std::move(state));
            dc.joules.push_back(0.0);
            dc.accrued_to.push_back(SimTime{});
        }
        dc_by_id_[spec.id] = dcs_.size();
        dcs_.push_back(std::move(dc));
        ledger_.create_account("dc:" + id_str(spec.id.value));
    }
    exchange_entity_ = kernel_.register_entity("exchange", handler);
    for (const BrokerSpec& spec : scenario_.brokers) {
        BrokerRuntime broker;
        broker.spec = spec;
        broker.name = "broker:" + id_str(spec.id.value);
        broker.entity = kernel_.register_entity(broker.name, handler);
        broker_by_id_[spec.id] = brokers_.size();
        brokers_.push_back(std::move(broker));
        ledger_.create_account("broker:" + id_str(spec.id.value));
    }
    for (BrokerRuntime& broker : brokers_) {
        if (!broker.spec.private_vms.empty()) {
            build_private_infrastructure(broker);
        }
    }
}

// Broker-owned capacity is a datacenter outside the market: no asks, no
// ledger account, no energy accounting. One host is sized so every private
// VM always receives its full demanded rate.
void Simulation::build_private_infrastructure(BrokerRuntime& broker) {
    auto handler = [this](SimKernel&, const SimKernel::Event& ev) { dispatch(ev); };
    DcRuntime dc;
    dc.internal = true;
    dc.name = broker.name + ":private";
    dc.entity = kernel_.register_entity(dc.name, handler);
    dc.spec.id = DatacenterId{0};
    dc.spec.region = "private";

    HostSpec host;
    host.id = HostId{1};
    std::int64_t total_pes = 0;
    std::int64_t max_mips = 1;
    std::int64_t total_ram = 0;
    for (const PrivateVmSpec& pv : broker.spec.private_vms) {
        const VmClassSpec* cls = scenario_.find_class(pv.vm_class);
        total_pes += static_cast<std::int64_t>(cls->pes) * pv.count;
        max_mips = std::max(max_mips, cls->mips_per_pe);
        total_ram += cls->ram_mb * pv.count;
    }
    host.pe_count = static_cast<int>(total_pes);
    host.mips_per_pe = max_mips;
    host.ram_mb = total_ram;
    host.bw_mbps = 1024;
    host.voltage_levels.push_back(VoltageLevel{"full", 1.0});
    host.initial_level = 0;
    dc.hosts.push_back(HostState{host, true, 0, {}});
    dc.joules.push_back(0.0);
    dc.accrued_to.push_back(SimTime{});

    const std::size_t dc_index = dcs_.size();
    dcs_.push_back(std::move(dc));

    for (const PrivateVmSpec& pv : broker.spec.private_vms) {
        const VmClassSpec* cls = scenario_.find_class(pv.vm_class);
        for (int i = 0; i < pv.count; ++i) {
            const VmId vm = create_vm(broker.spec.id, RequestId{0}, *cls, dc_index, true);
            VmRuntime& rt = vms_.at(vm);
            rt.host = HostId{1};
            host_add_vm(dcs_[dc_index].hosts[0], rt.shape);
            broker.private_pool.push_back(vm);
            est_ready_[vm] = SimTime{};
        }
    }
    refresh_host(dc_index, HostId{1});
}

void Simulation::schedule_initial_events() {
    for (std::size_t i = 0; i < dcs_.size(); ++i) {
        if (!dcs_[i].internal && !dcs_[i].spec.asks.empty()) {
            kernel_.schedule(SimTime{}, dcs_[i].entity, EvPublishAsks{i}, kPrioResource);
        }
    }
    for (const BrokerRuntime& broker : brokers_) {
        for (const RequestSpec& r : broker.spec.requests) {
            RequestRuntime rt;
            rt.gid = RequestId{++next_request_id_};
            rt.spec = r;
            rt.broker = broker.spec.id;
            const RequestId id = rt.gid;
            requests_[id] = std::move(rt);
            kernel_.schedule(r.submit, broker.entity, EvSubmitRequest{id}, kPrioResource);
        }
    }
    kernel_.schedule(SimTime{}, exchange_entity_, EvMarketTick{}, kPrioMarket);
    for (std::size_t i = 0; i < dcs_.size(); ++i) {
        if (!dcs_[i].internal) {
            kernel_.schedule(kBillingPeriod, dcs_[i].entity, EvBillingTick{i}, kPrioBilling);
        }
    }
}

RunResult Simulation::run() {
    build_entities();
    schedule_initial_events();
    kernel_.run_until(scenario_.run.horizon);
    finalize_energy();
    RunResult result;
    result.summary = build_summary();
    result.energy = energy_;
    result.trace_csv = log_.to_csv();
    return result;
}

// ---------------------------------------------------------------------------
// handlers

void Simulation::dispatch(const SimKernel::Event& ev) {
    std::visit(
        [&](const auto& payload) {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, EvPublishAsks>) {
                on_publish_asks(payload.dc);
            } else if constexpr (std::is_same_v<T, EvSubmitRequest>) {
                on_submit_request(payload.request);
            } else if constexpr (std::is_same_v<T, EvMarketTick>) {
                on_market_tick();
            } else if constexpr (std::is_same_v<T, EvBillingTick>) {
                on_billing_tick(payload.dc);
            } else if constexpr (std::is_same_v<T, EvProvision>) {
                on_provision(payload);
            } else if constexpr (std::is_same_v<T, EvForward>) {
                on_forward(payload);
            } else if constexpr (std::is_same_v<T, EvForwardDeclined>) {
                reject_bundle(payload.origin, payload.request, "peer_declined");
            } else if constexpr (std::is_same_v<T, EvVmsReady>) {
                on_vms_ready(payload);
            } else if constexpr (std::is_same_v<T, EvRequestRejected>) {
                RequestRuntime& request = requests_.at(payload.request);
                if (request.pool.empty() && request.status == RequestStatus::bidding) {
                    request.status = RequestStatus::unmatched;
                }
            } else if constexpr (std::is_same_v<T, EvDispatch>) {
                on_dispatch(payload);
            } else if constexpr (std::is_same_v<T, EvFinish>) {
                on_finish(payload.cloudlet);
            } else if constexpr (std::is_same_v<T, EvDone>) {
                on_done(payload.cloudlet);
            } else if constexpr (std::is_same_v<T, EvMigrationComplete>) {
                on_migration_complete(payload.vm);
            }
        },
        ev.payload);
}

void Simulation::on_publish_asks(std::size_t dc_index) {
    DcRuntime& dc = dcs_[dc_index];
    const bool auction = scenario_.market.mechanism == Exchange::Mechanism::auction;
    for (const AskSpec& a : dc.spec.asks) {
        Ask ask;
        ask.provider = dc.spec.id;
        ask.vm_class = a.vm_class;
        ask.unit_price = a.unit_price;
        ask.region = dc.spec.region;
        if (auction) {
            // Auction rounds clear unit orders; multi-VM supply is split up
            // front.
            ask.quantity = 1;
            for (int i = 0; i < a.quantity; ++i) {
                exchange_->publish_ask(ask);
            }
        } else {
            ask.quantity = a.quantity;
            exchange_->publish_ask(ask);
        }
        trace(dc.name, "ask_published",
              {{"class", a.vm_class},
               {"price_mc", money_str(a.unit_price)},
               {"qty", std::to_string(a.quantity)}});
    }
}

void Simulation::on_submit_request(RequestId id) {
    RequestRuntime& request = requests_.at(id);
    BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    request.submitted_at = kernel_.now();

    // Materialize the task set.
    std::vector<TaskSpec> tasks;
    std::map<std::uint32_t, CloudletId> scenario_to_global;
    if (request.spec.app == AppModel::sweep) {
        ParamSweepSpec sweep;
        sweep.template_cloudlet.length_mi = request.spec.sweep->template_task.length_mi;
        sweep.template_cloudlet.pes = request.spec.sweep->template_task.pes;
        sweep.template_cloudlet.input_mb = request.spec.sweep->template_task.input_mb;
        sweep.template_cloudlet.output_mb = request.spec.sweep->template_task.output_mb;
        sweep.domains = request.spec.sweep->domains;
        for (const Cloudlet& c : expand_param_sweep(sweep, 1)) {
            TaskSpec t;
            t.id = c.id.value;
            t.length_mi = c.length_mi;
            t.pes = c.pes;
            t.input_mb = c.input_mb;
            t.output_mb = c.output_mb;
            tasks.push_back(t);
        }
    } else if (request.spec.app == AppModel::workflow) {
        tasks = request.spec.workflow->tasks;
    } else {
        tasks = request.spec.tasks;
    }
    for (const TaskSpec& t : tasks) {
        CloudletRuntime c;
        c.id = CloudletId{++next_cloudlet_id_};
        c.scenario_id = t.id;
        c.request = id;
        c.owner = request.broker;
        c.length_mi = t.length_mi;
        c.pes = t.pes;
        c.input_mb = t.input_mb;
        c.output_mb = t.output_mb;
        c.remaining = static_cast<unsigned __int128>(t.length_mi) * kUnitsPerMi *
                      static_cast<unsigned __int128>(t.pes);
        request.tasks.push_back(c.id);
        request.total_length_mi += t.length_mi;
        scenario_to_global[t.id] = c.id;
        cloudlets_[c.id] = std::move(c);
    }
    if (request.spec.app == AppModel::workflow) {
        for (const CloudletId c : request.tasks) {
            request.workflow.nodes.insert(c);
        }
        for (const auto& [from, to] : request.spec.workflow->edges) {
            request.workflow.edges.emplace_back(scenario_to_global.at(from),
                                                scenario_to_global.at(to));
        }
    }
    trace(broker.name, "request_submitted",
          {{"request", id_str(id.value)},
           {"app",
            request.spec.app == AppModel::bag      ? "bag"
            : request.spec.app == AppModel::sweep  ? "sweep"
                                                   : "workflow"},
           {"tasks", std::to_string(request.tasks.size())}});

    // Owned capacity first: when the private pool alone meets the deadline
    // there is nothing to procure.
    if (!broker.private_pool.empty()) {
        std::vector<TaskForMap> for_map;
        for (const CloudletId c : request.tasks) {
            for_map.push_back(TaskForMap{c, cloudlets_.at(c).length_mi});
        }
        std::vector<VmForMap> pool_map;
        for (const VmId vm : broker.private_pool) {
            const VmClassSpec* pcls = scenario_.find_class(vms_.at(vm).vm_class);
            pool_map.push_back(VmForMap{vm, pcls->mips_per_pe * 1'000'000,
                                        std::max(est_ready_.at(vm), kernel_.now())});
        }
        const std::vector<std::size_t> assignment = map_tasks(for_map, pool_map);
        std::vector<SimTime> vm_end(pool_map.size());
        for (std::size_t v = 0; v < pool_map.size(); ++v) {
            vm_end[v] = pool_map[v].ready;
        }
        for (std::size_t t = 0; t < for_map.size(); ++t) {
            const std::size_t v = assignment[t];
            vm_end[v] = finish_time_estimate(for_map[t].length_mi, pool_map[v].pe_rate_umips,
                                             vm_end[v]);
        }
        SimTime makespan_end = kernel_.now();
        for (const SimTime end : vm_end) {
            makespan_end = std::max(makespan_end, end);
        }
        if (makespan_end - kernel_.now() <= request.spec.qos.deadline) {
            request.status = RequestStatus::active;
            request.pool = broker.private_pool;
            std::vector<CloudletId> to_dispatch = request.tasks;
            if (request.spec.app == AppModel::workflow) {
                const std::set<CloudletId> ready_set = ready_tasks(request.workflow, {});
                to_dispatch.assign(ready_set.begin(), ready_set.end());
            }
            dispatch_tasks(request, to_dispatch);
            return;
        }
    }

    // Public procurement through the exchange. For the feasibility estimate
    // the book depth is aggregated per provider and price, so auction-mode
    // unit asks behave like one multi-VM offer.
    const VmClassSpec* cls = scenario_.find_class(request.spec.vm_class);
    std::vector<Ask> asks = discover(*exchange_, request.spec.vm_class, request.spec.region);
    {
        std::vector<Ask> merged;
        for (const Ask& a : asks) {
            if (!merged.empty() && merged.back().provider == a.provider &&
                merged.back().unit_price == a.unit_price) {
                merged.back().quantity += a.quantity;
            } else {
                merged.push_back(a);
            }
        }
        asks = std::move(merged);
    }
    MatchRequest mr;
    mr.total_length_mi = request.total_length_mi;
    mr.vm_count = request.spec.vm_count;
    mr.qos = request.spec.qos;
    const std::optional<MatchResult> matched = match(mr, asks, *cls);
    if (!matched) {
        request.status = RequestStatus::unmatched;
        ++broker.unmatched_requests;
        trace(broker.name, "request_rejected",
              {{"request", id_str(id.value)}, {"reason", "no_feasible_provider"}});
        return;
    }
    request.est_hours = static_cast<std::int64_t>(matched->est_makespan.ceil_hours());
    request.status = RequestStatus::bidding;

    Bid bid;
    bid.broker = request.broker;
    bid.request = id;
    bid.vm_class = request.spec.vm_class;
    bid.max_unit_price = request.spec.max_unit_price;
    bid.qos = request.spec.qos;
    if (scenario_.market.mechanism == Exchange::Mechanism::auction) {
        bid.quantity = 1;  // auction rounds clear unit orders
        for (int i = 0; i < request.spec.vm_count; ++i) {
            exchange_->submit_bid(bid);
        }
    } else {
        bid.quantity = request.spec.vm_count;
        exchange_->submit_bid(bid);
    }
    trace(broker.name, "bid_submitted",
          {{"request", id_str(id.value)},
           {"class", request.spec.vm_class},
           {"max_mc", money_str(bid.max_unit_price)},
           {"qty", std::to_string(request.spec.vm_count)}});
}

void Simulation::on_market_tick() {
    const Exchange::Mechanism mechanism = scenario_.market.mechanism;
    const std::vector<Trade> trades = exchange_->clear(mechanism, kernel_.now());
    trace("exchange", "market_tick",
          {{"mechanism", mechanism == Exchange::Mechanism::commodity ? "commodity" : "auction"},
           {"trades", std::to_string(trades.size())}});
    std::map<std::pair<RequestId, DatacenterId>, std::pair<int, Money>> bundles;
    for (const Trade& t : trades) {
        trace("exchange", "trade",
              {{"id", std::to_string(t.id)},
               {"buyer", id_str(t.buyer.value)},
               {"seller", id_str(t.seller.value)},
               {"class", t.vm_class},
               {"price_mc", money_str(t.price)},
               {"qty", std::to_string(t.quantity)},
               {"request", id_str(t.request.value)}});
        ++trade_count_;
        trade_price_sum_mc_ += t.price.millicents();
        auto& bundle = bundles[{t.request, t.seller}];
        bundle.first += t.quantity;
        bundle.second += t.price * t.quantity;
    }
    for (const auto& [key, bundle] : bundles) {
        const std::size_t dc = dc_index_of(key.second);
        kernel_.schedule(SimTime{}, dcs_[dc].entity,
                         EvProvision{dc, key.first, bundle.first, bundle.second}, kPrioResource);
    }
    kernel_.schedule(scenario_.market.tick_period, exchange_entity_, EvMarketTick{}, kPrioMarket);
}

void Simulation::on_provision(const EvProvision& ev) {
    DcRuntime& dc = dcs_[ev.dc];
    RequestRuntime& request = requests_.at(ev.request);
    if (request.status == RequestStatus::completed) {
        // A carried-over bid filled after the request already finished on
        // capacity procured earlier; the late bundle lapses unprovisioned.
        trace(dc.name, "bundle_expired", {{"request", id_str(ev.request.value)}});
        return;
    }
    const VmClassSpec* cls = scenario_.find_class(request.spec.vm_class);
    const VmShape shape{VmId{0}, cls->pes, cls->mips_per_pe, cls->ram_mb, cls->scheduler};

    const auto steps = plan_bundle(dc, shape, ev.quantity);
    const double util = mean_active_utilization(dc);
    const std::int64_t vm_hours = request.est_hours * ev.quantity;

    std::vector<PeeringAgreement> local_agreements;
    std::vector<std::size_t> agreement_index;
    if (scenario_.federation.enabled) {
        for (std::size_t i = 0; i < agreements_.size(); ++i) {
            if (agreements_[i].local == dc.spec.id) {
                local_agreements.push_back(agreements_[i]);
                agreement_index.push_back(i);
            }
        }
    }
    const OffloadDecision decision =
        decide_offload(steps.has_value(), util, dc.spec.coordinator, request.spec.max_unit_price,
                       vm_hours, local_agreements);

    if (decision.action == OffloadAction::serve_local) {
        place_bundle(ev.dc, ev.request, ev.quantity, ev.price_qty_sum, *steps, std::nullopt);
        return;
    }
    if (decision.action == OffloadAction::forward) {
        const std::size_t agreement = agreement_index[decision.agreement_index];
        const std::size_t peer = dc_index_of(agreements_[agreement].peer);
        trace(dc.name, "offload_forward",
              {{"request", id_str(ev.request.value)},
               {"peer", id_str(agreements_[agreement].peer.value)},
               {"qty", std::to_string(ev.quantity)},
               {"vm_hours", std::to_string(vm_hours)}});
        kernel_.schedule(agreements_[agreement].latency, dcs_[peer].entity,
                         EvForward{ev.dc, peer, agreement, ev.request, ev.quantity,
                                   ev.price_qty_sum, vm_hours},
                         kPrioResource);
        return;
    }
    reject_bundle(ev.dc, ev.request, "no_capacity");
}

void Simulation::on_forward(const EvForward& ev) {
    DcRuntime& peer = dcs_[ev.peer];
    RequestRuntime& request = requests_.at(ev.request);
    if (request.status == RequestStatus::completed) {
        trace(peer.name, "bundle_expired", {{"request", id_str(ev.request.value)}});
        return;
    }
    const VmClassSpec* cls = scenario_.find_class(request.spec.vm_class);
    const VmShape shape{VmId{0}, cls->pes, cls->mips_per_pe, cls->ram_mb, cls->scheduler};

    const auto steps = plan_bundle(peer, shape, ev.quantity);
    const double post_util = steps ? post_placement_utilization(peer, shape, *steps) : 1.0;
    PeeringAgreement& agreement = agreements_[ev.agreement];
    const bool accepted = accept_remote(steps.has_value(), post_util, peer.spec.coordinator,
                                        agreement, ev.vm_hours);
    if (!accepted) {
        trace(peer.name, "remote_decline",
              {{"request", id_str(ev.request.value)},
               {"origin", id_str(dcs_[ev.origin].spec.id.value)}});
        kernel_.schedule(SimTime{}, dcs_[ev.origin].entity,
                         EvForwardDeclined{ev.origin, ev.request}, kPrioResource);
        return;
    }
    ++offloaded_count_;
    trace(peer.name, "remote_accept",
          {{"request", id_str(ev.request.value)},
           {"origin", id_str(dcs_[ev.origin].spec.id.value)},
           {"quota_left", std::to_string(agreement.quota_vm_hours)}});
    place_bundle(ev.peer, ev.request, ev.quantity, ev.price_qty_sum, *steps, ev.agreement);
}

void Simulation::on_vms_ready(const EvVmsReady& ev) {
    RequestRuntime& request = requests_.at(ev.request);
    BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    request.status = RequestStatus::active;
    for (const VmId vm : ev.vms) {
        request.pool.push_back(vm);
        est_ready_[vm] = kernel_.now();
    }
    for (const VmId vm : broker.private_pool) {
        if (std::find(request.pool.begin(), request.pool.end(), vm) == request.pool.end()) {
            request.pool.push_back(vm);
        }
    }
    std::vector<CloudletId> pending;
    if (request.spec.app == AppModel::workflow) {
        for (const CloudletId c : ready_tasks(request.workflow, request.done)) {
            if (!request.dispatched.count(c)) {
                pending.push_back(c);
            }
        }
    } else {
        for (const CloudletId c : request.tasks) {
            if (!request.dispatched.count(c)) {
                pending.push_back(c);
            }
        }
    }
    dispatch_tasks(request, pending);
}

void Simulation::dispatch_tasks(RequestRuntime& request, const std::vector<CloudletId>& ready) {
    if (ready.empty() || request.pool.empty()) {
        return;
    }
    BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    std::vector<TaskForMap> tasks;
    for (const CloudletId c : ready) {
        tasks.push_back(TaskForMap{c, cloudlets_.at(c).length_mi});
    }
    std::vector<VmForMap> pool;
    for (const VmId vm : request.pool) {
        const VmRuntime& rt = vms_.at(vm);
        if (rt.state == VmState::destroyed) {
            continue;
        }
        const VmClassSpec* cls = scenario_.find_class(rt.vm_class);
        pool.push_back(VmForMap{vm, cls->mips_per_pe * 1'000'000,
                                std::max(est_ready_.at(vm), kernel_.now())});
    }
    if (pool.empty()) {
        return;
    }
    const std::vector<std::size_t> assignment = map_tasks(tasks, pool);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const VmId vm = pool[assignment[i]].id;
        CloudletRuntime& c = cloudlets_.at(tasks[i].id);
        c.state = CloudletState::queued;
        c.vm = vm;
        request.dispatched.insert(c.id);
        est_ready_[vm] = finish_time_estimate(c.length_mi, pool[assignment[i]].pe_rate_umips,
                                              std::max(est_ready_.at(vm), kernel_.now()));
        trace(broker.name, "cloudlet_submit",
              {{"cloudlet", id_str(c.id.value)},
               {"request", id_str(request.gid.value)},
               {"vm", id_str(vm.value)},
               {"length_mi", std::to_string(c.length_mi)},
               {"pes", std::to_string(c.pes)}});
        kernel_.schedule(transfer_delay(c.input_mb), dcs_[vms_.at(vm).dc].entity,
                         EvDispatch{c.id, vm}, kPrioResource);
    }
}

void Simulation::on_dispatch(const EvDispatch& ev) {
    VmRuntime& vm = vms_.at(ev.vm);
    CloudletRuntime& c = cloudlets_.at(ev.cloudlet);
    if (vm.state == VmState::destroyed) {
        return;  // horizon races: the request was torn down meanwhile
    }
    if (vm.shape.mode == SchedulerMode::space_shared) {
        vm.queue.push_back(c.id);
        start_queued(vm);
    } else {
        c.state = CloudletState::running;
        vm.running.push_back(c.id);
        trace(dcs_[vm.dc].name, "cloudlet_start",
              {{"cloudlet", id_str(c.id.value)}, {"vm", id_str(vm.id.value)}});
        refresh_vm_rates(vm);
    }
    maybe_apply_dvfs(vm.dc, vm.host);
}

void Simulation::start_queued(VmRuntime& vm) {
    int used = 0;
    for (const CloudletId id : vm.running) {
        used += cloudlets_.at(id).pes;
    }
    bool started = false;
    while (!vm.queue.empty()) {
        CloudletRuntime& head = cloudlets_.at(vm.queue.front());
        if (used + head.pes > vm.shape.pes) {
            break;
        }
        used += head.pes;
        head.state = CloudletState::running;
        vm.running.push_back(head.id);
        vm.queue.erase(vm.queue.begin());
        trace(dcs_[vm.dc].name, "cloudlet_start",
              {{"cloudlet", id_str(head.id.value)}, {"vm", id_str(vm.id.value)}});
        started = true;
    }
    if (started) {
        refresh_vm_rates(vm);
    }
}

void Simulation::on_finish(CloudletId id) {
    CloudletRuntime& c = cloudlets_.at(id);
    c.finish_event.reset();
    c.remaining = 0;
    c.state = CloudletState::done;
    c.rate_umips = 0;
    VmRuntime& vm = vms_.at(c.vm);
    vm.running.erase(std::find(vm.running.begin(), vm.running.end(), id));
    trace(dcs_[vm.dc].name, "cloudlet_finish",
          {{"cloudlet", id_str(id.value)},
           {"vm", id_str(vm.id.value)},
           {"request", id_str(c.request.value)}});
    if (vm.shape.mode == SchedulerMode::space_shared) {
        start_queued(vm);
    }
    refresh_vm_rates(vm);
    maybe_apply_dvfs(vm.dc, vm.host);
    const BrokerRuntime& broker = brokers_[broker_by_id_.at(c.owner)];
    kernel_.schedule(transfer_delay(c.output_mb), broker.entity, EvDone{id}, kPrioResource);
}

void Simulation::on_done(CloudletId id) {
    CloudletRuntime& c = cloudlets_.at(id);
    RequestRuntime& request = requests_.at(c.request);
    BrokerRuntime& broker = brokers_[broker_by_id_.at(c.owner)];
    request.done.insert(id);
    trace(broker.name, "cloudlet_done",
          {{"cloudlet", id_str(id.value)}, {"request", id_str(request.gid.value)}});
    if (request.spec.app == AppModel::workflow) {
        std::vector<CloudletId> newly_ready;
        for (const CloudletId r : ready_tasks(request.workflow, request.done)) {
            if (!request.dispatched.count(r)) {
                newly_ready.push_back(r);
            }
        }
        dispatch_tasks(request, newly_ready);
    }
    if (request.done.size() == request.tasks.size()) {
        complete_request(request);
    }
}

void Simulation::complete_request(RequestRuntime& request) {
    BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    request.status = RequestStatus::completed;
    request.finished_at = kernel_.now();
    if (!broker.any_complete || request.submitted_at < broker.min_submit_completed) {
        broker.min_submit_completed = broker.any_complete
                                          ? std::min(broker.min_submit_completed,
                                                     request.submitted_at)
                                          : request.submitted_at;
    }
    broker.any_complete = true;
    broker.max_finish = std::max(broker.max_finish, kernel_.now());
    trace(broker.name, "request_complete",
          {{"request", id_str(request.gid.value)},
           {"makespan_us", std::to_string((request.finished_at - request.submitted_at).us())}});

    const SimTime deadline = request.submitted_at + request.spec.qos.deadline;
    for (Sla& sla : request.slas) {
        const Money penalty = assess_penalty(sla, request.finished_at, deadline);
        trace(broker.name, sla.status == SlaStatus::met ? "sla_met" : "sla_violated",
              {{"request", id_str(request.gid.value)},
               {"provider", id_str(sla.provider.value)},
               {"penalty_mc", money_str(penalty)}});
        if (sla.status == SlaStatus::met) {
            ++broker.sla_met;
        } else {
            ++broker.sla_violated;
        }
        settle_sla(sla, ledger_, broker.name, "dc:" + id_str(sla.provider.value), kernel_.now());
        request.spent += sla.agreed_price;
        trace(broker.name, "sla_settled",
              {{"request", id_str(request.gid.value)},
               {"provider", id_str(sla.provider.value)},
               {"price_mc", money_str(sla.agreed_price)},
               {"penalty_mc", money_str(penalty)}});
    }
    if (request.spent > request.spec.qos.budget) {
        ++broker.budget_violations;
        trace(broker.name, "budget_exceeded",
              {{"request", id_str(request.gid.value)},
               {"cost_mc", money_str(request.spent)},
               {"budget_mc", money_str(request.spec.qos.budget)}});
    }
    // Tear down procured VMs; the private pool survives for later requests.
    for (const VmId vm : request.pool) {
        if (!vms_.at(vm).is_private && vms_.at(vm).state != VmState::destroyed) {
            destroy_vm(vm);
        }
    }
    for (OffloadRuntime& offload : request.offloads) {
        std::int64_t hours = 0;
        for (const VmId vm : offload.vms) {
            const VmRuntime& rt = vms_.at(vm);
            hours += static_cast<std::int64_t>((rt.destroyed_at - rt.started_at).ceil_hours());
        }
        settle_peering(offload.contract, hours, ledger_,
                       "dc:" + id_str(offload.contract.origin.value),
                       "dc:" + id_str(offload.contract.peer.value), kernel_.now());
        trace(dcs_[dc_index_of(offload.contract.peer)].name, "peering_settled",
              {{"request", id_str(request.gid.value)},
               {"origin", id_str(offload.contract.origin.value)},
               {"hours", std::to_string(hours)},
               {"amount_mc", money_str(offload.contract.transfer_unit_price * hours)}});
    }
}

// ---------------------------------------------------------------------------
// placement and federation mechanics

std::optional<std::vector<Simulation::PlacementStep>> Simulation::plan_bundle(
    const DcRuntime& dc, const VmShape& shape, int quantity) const {
    std::vector<HostState> working = dc.hosts;
    std::vector<PlacementStep> steps;
    for (int i = 0; i < quantity; ++i) {
        // Powered hosts are preferred; only when none fits is a sleeping
        // host woken up.
        auto pick = [&](bool want_active) {
            std::vector<HostState> candidates;
            for (const HostState& h : working) {
                if (h.active == want_active) {
                    candidates.push_back(h);
                }
            }
            return place_vm(shape, candidates, dc.spec.placement);
        };
        std::optional<HostId> chosen = pick(true);
        bool reactivate = false;
        if (!chosen) {
            chosen = pick(false);
            reactivate = chosen.has_value();
        }
        if (!chosen) {
            return std::nullopt;
        }
        for (HostState& h : working) {
            if (h.spec.id == *chosen) {
                h.active = true;
                VmShape probe = shape;
                probe.id = VmId{0xFFFF0000u + static_cast<std::uint32_t>(i)};
                host_add_vm(h, probe);
            }
        }
        steps.push_back(PlacementStep{*chosen, reactivate});
    }
    return steps;
}

double Simulation::mean_active_utilization(const DcRuntime& dc) const {
    double sum = 0.0;
    int active = 0;
    for (const HostState& h : dc.hosts) {
        if (h.active) {
            sum += host_utilization(h);
            ++active;
        }
    }
    return active == 0 ? 0.0 : sum / active;
}

double Simulation::post_placement_utilization(const DcRuntime& dc, const VmShape& shape,
                                              const std::vector<PlacementStep>& steps) const {
    std::vector<HostState> working = dc.hosts;
    std::uint32_t probe = 0xFFFF0000u;
    for (const PlacementStep& step : steps) {
        for (HostState& h : working) {
            if (h.spec.id == step.host) {
                h.active = true;
                VmShape tagged = shape;
                tagged.id = VmId{probe++};
                host_add_vm(h, tagged);
                break;
            }
        }
    }
    double sum = 0.0;
    int active = 0;
    for (const HostState& h : working) {
        if (h.active) {
            sum += host_utilization(h);
            ++active;
        }
    }
    return active == 0 ? 0.0 : sum / active;
}

void Simulation::place_bundle(std::size_t dc_index, RequestId request_id, int quantity,
                              Money price_qty_sum, const std::vector<PlacementStep>& steps,
                              std::optional<std::size_t> via_agreement) {
    DcRuntime& dc = dcs_[dc_index];
    RequestRuntime& request = requests_.at(request_id);
    const VmClassSpec* cls = scenario_.find_class(request.spec.vm_class);
    std::vector<VmId> created;
    for (int i = 0; i < quantity; ++i) {
        const PlacementStep& step = steps[static_cast<std::size_t>(i)];
        if (step.reactivate && !host_at(dc_index, step.host).active) {
            set_host_active(dc_index, step.host, true);
        }
        const VmId vm = create_vm(request.broker, request_id, *cls, dc_index, false);
        VmRuntime& rt = vms_.at(vm);
        rt.host = step.host;
        trace(dc.name, "vm_create",
              {{"vm", id_str(vm.value)},
               {"class", cls->name},
               {"request", id_str(request_id.value)},
               {"owner", id_str(request.broker.value)}});
        host_add_vm(host_at(dc_index, step.host), rt.shape);
        trace(dc.name, "vm_place",
              {{"vm", id_str(vm.value)},
               {"host", id_str(step.host.value)},
               {"ram_mb", std::to_string(rt.shape.ram_mb)},
               {"pes", std::to_string(rt.shape.pes)},
               {"mode", rt.shape.mode == SchedulerMode::space_shared ? "space" : "time"}});
        refresh_host(dc_index, step.host);
        maybe_apply_dvfs(dc_index, step.host);
        created.push_back(vm);
    }
    const Money agreed = price_qty_sum * request.est_hours;
    Sla sla;
    sla.consumer = request.broker;
    sla.provider = via_agreement ? agreements_[*via_agreement].local : dc.spec.id;
    sla.request = request_id;
    sla.deadline = request.submitted_at + request.spec.qos.deadline;
    sla.min_mips = request.spec.qos.min_mips;
    sla.agreed_price = agreed;
    sla.penalty_rate_per_s = request.spec.penalty_rate_per_s;
    request.slas.push_back(sla);
    trace(dc.name, "sla_created",
          {{"request", id_str(request_id.value)},
           {"consumer", id_str(request.broker.value)},
           {"provider", id_str(sla.provider.value)},
           {"price_mc", money_str(agreed)},
           {"deadline_us", std::to_string(sla.deadline.us())}});
    if (via_agreement) {
        OffloadRuntime offload;
        offload.contract.request = request_id;
        offload.contract.origin = agreements_[*via_agreement].local;
        offload.contract.peer = agreements_[*via_agreement].peer;
        offload.contract.transfer_unit_price = agreements_[*via_agreement].transfer_unit_price;
        offload.vms = created;
        request.offloads.push_back(std::move(offload));
    }
    const BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    kernel_.schedule(SimTime{}, broker.entity, EvVmsReady{request_id, created}, kPrioResource);
}

void Simulation::reject_bundle(std::size_t dc_index, RequestId request_id,
                               const std::string& reason) {
    DcRuntime& dc = dcs_[dc_index];
    RequestRuntime& request = requests_.at(request_id);
    ++dc.rejected_requests;
    trace(dc.name, "request_rejected",
          {{"request", id_str(request_id.value)}, {"reason", reason}});
    const BrokerRuntime& broker = brokers_[broker_by_id_.at(request.broker)];
    kernel_.schedule(SimTime{}, broker.entity, EvRequestRejected{request_id}, kPrioResource);
}

// ---------------------------------------------------------------------------
// rates, migration, energy

void Simulation::refresh_host(std::size_t dc_index, HostId host_id) {
    HostState& host = host_at(dc_index, host_id);
    reallocate_host(host);
    for (const auto& [vm_id, alloc] : host.allocations) {
        auto it = vms_.find(vm_id);
        if (it == vms_.end()) {
            continue;
        }
        VmRuntime& vm = it->second;
        if (vm.state == VmState::migrating && vm.migrate_dst != host_id) {
            continue;  // frozen source holding, nothing to report
        }
        if (vm.last_share_umips != alloc.total_share_umips) {
            vm.last_share_umips = alloc.total_share_umips;
            trace(dcs_[dc_index].name, "vm_share",
                  {{"vm", id_str(vm_id.value)},
                   {"host", id_str(host_id.value)},
                   {"share_umips", std::to_string(alloc.total_share_umips)}});
        }
        if (vm.state == VmState::running && vm.host == host_id) {
            refresh_vm_rates(vm);
        }
    }
}

void Simulation::refresh_vm_rates(VmRuntime& vm) {
    if (vm.state != VmState::running) {
        return;
    }
    const HostState& host = host_at(vm.dc, vm.host);
    auto alloc_it = host.allocations.find(vm.id);
    if (alloc_it == host.allocations.end()) {
        return;
    }
    const std::int64_t per_pe = alloc_it->second.total_share_umips / vm.shape.pes;
    std::vector<std::int64_t> rates;
    if (vm.shape.mode == SchedulerMode::space_shared) {
        for (const CloudletId id : vm.running) {
            rates.push_back(per_pe * cloudlets_.at(id).pes);
        }
    } else {
        std::vector<std::int64_t> demands;
        for (const CloudletId id : vm.running) {
            demands.push_back(per_pe * cloudlets_.at(id).pes);
        }
        rates = share_mips_max_min(demands, per_pe * vm.shape.pes);
    }
    for (std::size_t i = 0; i < vm.running.size(); ++i) {
        set_cloudlet_rate(cloudlets_.at(vm.running[i]), rates[i]);
    }
}

void Simulation::checkpoint_progress(CloudletRuntime& c) {
    if (c.rate_umips > 0) {
        const unsigned __int128 executed =
            static_cast<unsigned __int128>(c.rate_umips) *
            static_cast<unsigned __int128>((kernel_.now() - c.rate_since).us());
        c.remaining = executed >= c.remaining ? 0 : c.remaining - executed;
    }
    c.rate_since = kernel_.now();
}

void Simulation::set_cloudlet_rate(CloudletRuntime& c, std::int64_t rate) {
    if (c.state != CloudletState::running || rate == c.rate_umips) {
        return;
    }
    checkpoint_progress(c);
    c.rate_umips = rate;
    if (c.finish_event) {
        kernel_.cancel(*c.finish_event);
        c.finish_event.reset();
    }
    trace(dcs_[vms_.at(c.vm).dc].name, "cloudlet_rate",
          {{"cloudlet", id_str(c.id.value)},
           {"vm", id_str(c.vm.value)},
           {"rate_umips", std::to_string(rate)},
           {"pes", std::to_string(c.pes)}});
    if (rate > 0) {
        const VmRuntime& vm = vms_.at(c.vm);
        c.finish_event = kernel_.schedule(exec_duration(c.remaining, rate), dcs_[vm.dc].entity,
                                          EvFinish{c.id}, kPrioResource);
    }
}

void Simulation::start_migration(std::size_t dc_index, VmId vm_id, HostId dst) {
    VmRuntime& vm = vms_.at(vm_id);
    HostState& dst_host = host_at(dc_index, dst);
    if (vm.state != VmState::running || !host_feasible(dst_host, vm.shape)) {
        throw InfeasibleDestinationError("migrate: destination cannot take the vm");
    }
    for (const CloudletId id : vm.running) {
        set_cloudlet_rate(cloudlets_.at(id), 0);  // paused for the copy
    }
    HostState& src_host = host_at(dc_index, vm.host);
    src_host.allocations.at(vm_id).frozen = true;
    vm.state = VmState::migrating;
    vm.migrate_dst = dst;
    vm.last_share_umips = -1;  // the destination share is always reported
    host_add_vm(dst_host, vm.shape);
    trace(dcs_[dc_index].name, "vm_place",
          {{"vm", id_str(vm_id.value)},
           {"host", id_str(dst.value)},
           {"ram_mb", std::to_string(vm.shape.ram_mb)},
           {"pes", std::to_string(vm.shape.pes)},
           {"mode", vm.shape.mode == SchedulerMode::space_shared ? "space" : "time"}});
    refresh_host(dc_index, dst);
    const SimTime duration = migration_duration(vm.shape.ram_mb, dst_host.spec.bw_mbps);
    trace(dcs_[dc_index].name, "migrate_start",
          {{"vm", id_str(vm_id.value)},
           {"src", id_str(vm.host.value)},
           {"dst", id_str(dst.value)},
           {"duration_us", std::to_string(duration.us())}});
    vm.migration_event = kernel_.schedule(duration, dcs_[dc_index].entity,
                                          EvMigrationComplete{vm_id}, kPrioResource);
    maybe_apply_dvfs(dc_index, dst);
}

void Simulation::on_migration_complete(VmId vm_id) {
    VmRuntime& vm = vms_.at(vm_id);
    vm.migration_event.reset();
    const HostId src = vm.host;
    const std::size_t dc_index = vm.dc;
    host_remove_vm(host_at(dc_index, src), vm_id);
    trace(dcs_[dc_index].name, "vm_release",
          {{"vm", id_str(vm_id.value)}, {"host", id_str(src.value)}});
    vm.host = vm.migrate_dst;
    vm.state = VmState::running;
    trace(dcs_[dc_index].name, "migration_complete",
          {{"vm", id_str(vm_id.value)}, {"dst", id_str(vm.host.value)}});
    refresh_host(dc_index, src);
    refresh_host(dc_index, vm.host);
    maybe_apply_dvfs(dc_index, src);
    maybe_apply_dvfs(dc_index, vm.host);
    DcRuntime& dc = dcs_[dc_index];
    if (dc.deactivate_when_empty.count(src) && host_at(dc_index, src).allocations.empty()) {
        dc.deactivate_when_empty.erase(src);
        set_host_active(dc_index, src, false);
    }
}

void Simulation::destroy_vm(VmId vm_id) {
    VmRuntime& vm = vms_.at(vm_id);
    const std::size_t dc_index = vm.dc;
    for (const CloudletId id : vm.running) {
        set_cloudlet_rate(cloudlets_.at(id), 0);  // horizon races die with the vm
    }
    if (vm.state == VmState::migrating) {
        if (vm.migration_event) {
            kernel_.cancel(*vm.migration_event);
            vm.migration_event.reset();
        }
        host_remove_vm(host_at(dc_index, vm.migrate_dst), vm_id);
        trace(dcs_[dc_index].name, "vm_release",
              {{"vm", id_str(vm_id.value)}, {"host", id_str(vm.migrate_dst.value)}});
        refresh_host(dc_index, vm.migrate_dst);
    }
    host_remove_vm(host_at(dc_index, vm.host), vm_id);
    trace(dcs_[dc_index].name, "vm_release",
          {{"vm", id_str(vm_id.value)}, {"host", id_str(vm.host.value)}});
    trace(dcs_[dc_index].name, "vm_destroy",
          {{"vm", id_str(vm_id.value)}, {"host", id_str(vm.host.value)}});
    vm.state = VmState::destroyed;
    vm.destroyed_at = kernel_.now();
    refresh_host(dc_index, vm.host);
    maybe_apply_dvfs(dc_index, vm.host);
    DcRuntime& dc = dcs_[dc_index];
    if (dc.deactivate_when_empty.count(vm.host) &&
        host_at(dc_index, vm.host).allocations.empty()) {
        dc.deactivate_when_empty.erase(vm.host);
        set_host_active(dc_index, vm.host, false);
    }
}

void Simulation::on_billing_tick(std::size_t dc_index) {
    DcRuntime& dc = dcs_[dc_index];
    trace(dc.name, "billing_tick", {});
    if (dc.spec.consolidation) {
        bool migrations_in_flight = false;
        for (const auto& [vm_id, vm] : vms_) {
            if (vm.dc == dc_index && vm.state == VmState::migrating) {
                migrations_in_flight = true;
            }
        }
        // A tick that lands mid-migration skips planning rather than reason
        // about half-moved state; the next tick picks it up.
        ConsolidationPlan plan;
        if (!migrations_in_flight) {
            plan = plan_consolidation(dc.hosts);
        }
        trace(dc.name, "consolidation_plan",
              {{"moves", std::to_string(plan.moves.size())},
               {"deactivate", std::to_string(plan.deactivate.size())}});
        for (const HostId host : plan.deactivate) {
            if (host_at(dc_index, host).allocations.empty()) {
                set_host_active(dc_index, host, false);
            } else {
                dc.deactivate_when_empty.insert(host);
            }
        }
        for (const auto& [vm, dst] : plan.moves) {
            start_migration(dc_index, vm, dst);
        }
    }
    kernel_.schedule(kBillingPeriod, dc.entity, EvBillingTick{dc_index}, kPrioBilling);
}

void Simulation::maybe_apply_dvfs(std::size_t dc_index, HostId host_id) {
    DcRuntime& dc = dcs_[dc_index];
    if (!dc.spec.dvfs) {
        return;
    }
    HostState& host = host_at(dc_index, host_id);
    if (!host.active) {
        return;
    }
    // Eligible only when the host is dedicated to a single 1-PE space-shared
    // VM with a deadline: its cloudlets then run sequentially on one PE,
    // the shape the level selector reasons about. Anything else runs at the
    // host's configured baseline.
    std::size_t target = host.spec.initial_level;
    if (host.allocations.size() == 1) {
        const VmId vm_id = host.allocations.begin()->first;
        auto it = vms_.find(vm_id);
        if (it != vms_.end() && it->second.state == VmState::running &&
            it->second.shape.pes == 1 &&
            it->second.shape.mode == SchedulerMode::space_shared && !it->second.is_private) {
            const VmRuntime& vm = it->second;
            const RequestRuntime& request = requests_.at(vm.request);
            if (request.spec.qos.deadline > SimTime{}) {
                std::vector<std::uint64_t> lengths;
                for (const CloudletId c : vm.running) {
                    lengths.push_back(cloudlets_.at(c).length_mi);
                }
                for (const CloudletId c : vm.queue) {
                    lengths.push_back(cloudlets_.at(c).length_mi);
                }
                const SimTime deadline = request.submitted_at + request.spec.qos.deadline;
                if (!lengths.empty() && deadline > kernel_.now()) {
                    // A microsecond of ceil rounding per task is charged
                    // against the budget so the chosen level cannot overrun.
                    SimTime budget = deadline - kernel_.now();
                    const SimTime guard = SimTime::micros(lengths.size());
                    budget = budget > guard ? budget - guard : SimTime{};
                    const std::int64_t mips = std::min(vm.shape.mips_req, host.spec.mips_per_pe);
                    try {
                        target = select_level_bot(lengths, budget, host.spec.voltage_levels,
                                                  host.spec.power, mips);
                    } catch (const InfeasibleDeadlineError&) {
                        target = host.spec.voltage_levels.size() - 1;  // race at full speed
                    }
                }
            }
        }
    }
    if (target != host.level_idx) {
        set_host_level(dc_index, host_id, target);
    }
}

void Simulation::set_host_level(std::size_t dc_index, HostId host_id, std::size_t level) {
    DcRuntime& dc = dcs_[dc_index];
    accrue_energy(dc_index, host_index_of(dc_index, host_id));
    HostState& host = host_at(dc_index, host_id);
    host.level_idx = level;
    trace(dc.name, "host_speed",
          {{"host", id_str(host_id.value)},
           {"s_ppm", std::to_string(host.speed_ppm())},
           {"level", host.spec.voltage_levels[level].label}});
    refresh_host(dc_index, host_id);
}

void Simulation::set_host_active(std::size_t dc_index, HostId host_id, bool active) {
    DcRuntime& dc = dcs_[dc_index];
    accrue_energy(dc_index, host_index_of(dc_index, host_id));
    host_at(dc_index, host_id).active = active;
    trace(dc.name, "host_active",
          {{"host", id_str(host_id.value)}, {"active", active ? "1" : "0"}});
}

void Simulation::accrue_energy(std::size_t dc_index, std::size_t host_index) {
    DcRuntime& dc = dcs_[dc_index];
    if (dc.internal) {
        return;
    }
    const HostState& host = dc.hosts[host_index];
    const SimTime elapsed = kernel_.now() - dc.accrued_to[host_index];
    if (elapsed > SimTime{} && host.active) {
        dc.joules[host_index] +=
            power_watts(host.spec.power, host.speed_fraction()) * elapsed.to_seconds();
    }
    dc.accrued_to[host_index] = kernel_.now();
}

VmId Simulation::create_vm(BrokerId owner, RequestId request, const VmClassSpec& cls,
                           std::size_t dc, bool is_private) {
    const VmId id{++next_vm_id_};
    VmRuntime vm;
    vm.id = id;
    vm.owner = owner;
    vm.request = request;
    vm.vm_class = cls.name;
    vm.shape = VmShape{id, cls.pes, cls.mips_per_pe, cls.ram_mb, cls.scheduler};
    vm.dc = dc;
    vm.is_private = is_private;
    vm.started_at = kernel_.now();
    vms_[id] = std::move(vm);
    return id;
}

SimTime Simulation::transfer_delay(double mb) const {
    return SimTime::micros(static_cast<std::uint64_t>(
        mb * static_cast<double>(scenario_.run.transfer_per_mb.us()) + 0.5));
}

// ---------------------------------------------------------------------------
// reporting

void Simulation::finalize_energy() {
    for (std::size_t d = 0; d < dcs_.size(); ++d) {
        DcRuntime& dc = dcs_[d];
        if (dc.internal) {
            continue;
        }
        for (std::size_t h = 0; h < dc.hosts.size(); ++h) {
            accrue_energy(d, h);
            const auto key = std::pair(dc.spec.id, dc.hosts[h].spec.id);
            energy_.per_host_j[key] = dc.joules[h];
            energy_.per_datacenter_j[dc.spec.id] += dc.joules[h];
            energy_.total_j += dc.joules[h];
        }
    }
}

SummaryReport Simulation::build_summary() const {
    SummaryReport s;
    s.replication = replication_;
    s.seed = seed_;
    s.horizon_s = scenario_.run.horizon.to_seconds();
    std::map<std::string, Money> inflow;
    std::map<std::string, Money> outflow;
    std::map<std::string, Money> sla_in;
    std::map<std::string, Money> penalties_out;
    std::map<std::string, Money> peering_in;
    std::map<std::string, Money> peering_out;
    for (const LedgerEntry& e : ledger_.journal()) {
        outflow[e.from] += e.amount;
        inflow[e.to] += e.amount;
        if (e.reason.find(":payment") != std::string::npos) {
            sla_in[e.to] += e.amount;
        } else if (e.reason.find(":penalty") != std::string::npos) {
            penalties_out[e.from] += e.amount;
        } else if (e.reason.rfind("peering:", 0) == 0) {
            peering_out[e.from] += e.amount;
            peering_in[e.to] += e.amount;
        }
    }
    for (const BrokerRuntime& b : brokers_) {
        BrokerSummary bs;
        bs.id = b.spec.id;
        bs.total_cost = outflow[b.name] - inflow[b.name];
        bs.sla_met = b.sla_met;
        bs.sla_violated = b.sla_violated;
        bs.unmatched_requests = b.unmatched_requests;
        bs.budget_violations = b.budget_violations;
        if (b.any_complete) {
            bs.makespan_s = (b.max_finish - b.min_submit_completed).to_seconds();
        }
        s.brokers.push_back(bs);
    }
    for (const DcRuntime& dc : dcs_) {
        if (dc.internal) {
            continue;
        }
        ProviderSummary ps;
        ps.id = dc.spec.id;
        ps.revenue = sla_in.count(dc.name) ? sla_in.at(dc.name) : Money{};
        ps.penalties_paid = penalties_out.count(dc.name) ? penalties_out.at(dc.name) : Money{};
        ps.peering_paid = peering_out.count(dc.name) ? peering_out.at(dc.name) : Money{};
        ps.peering_received = peering_in.count(dc.name) ? peering_in.at(dc.name) : Money{};
        auto it = energy_.per_datacenter_j.find(dc.spec.id);
        ps.energy_j = it == energy_.per_datacenter_j.end() ? 0.0 : it->second;
        ps.rejected_requests = dc.rejected_requests;
        s.providers.push_back(ps);
    }
    s.trade_count = trade_count_;
    s.mean_price_millicents =
        trade_count_ == 0 ? 0.0 : static_cast<double>(trade_price_sum_mc_) / trade_count_;
    s.offloaded_count = offloaded_count_;
    for (const auto& [id, c] : cloudlets_) {
        if (c.state == CloudletState::done) {
            ++s.cloudlets_completed;
            s.total_mi_completed += static_cast<std::int64_t>(c.length_mi);
        }
    }
    s.total_energy_j = energy_.total_j;
    s.ledger_balance_sum_millicents = ledger_.total().millicents();
    return s;
}

HostState& Simulation::host_at(std::size_t dc_index, HostId id) {
    for (HostState& h : dcs_[dc_index].hosts) {
        if (h.spec.id == id) {
            return h;
        }
    }
    throw SimError("host_at: unknown host");
}

std::size_t Simulation::host_index_of(std::size_t dc_index, HostId id) const {
    const DcRuntime& dc = dcs_[dc_index];
    for (std::size_t i = 0; i < dc.hosts.size(); ++i) {
        if (dc.hosts[i].spec.id == id) {
            return i;
        }
    }
    throw SimError("host_index_of: unknown host");
}

void Simulation::trace(const std::string& entity, const std::string& event,
                       std::vector<std::pair<std::string, std::string>> details) {
    log_.emit(kernel_.now(), entity, event, std::move(details));
}

}  // namespace

RunResult run_simulation(const Scenario& scenario, std::uint64_t seed, int replication) {
    Simulation sim(scenario, seed, replication);
    return sim.run();
}

}  // namespace cloudmarket
