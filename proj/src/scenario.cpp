#include "cloudmarket/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cloudmarket {

using nlohmann::ordered_json;

const VmClassSpec* Scenario::find_class(const std::string& name) const {
    for (const VmClassSpec& c : vm_classes) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

const DatacenterSpec* Scenario::find_datacenter(DatacenterId id) const {
    for (const DatacenterSpec& d : datacenters) {
        if (d.id == id) {
            return &d;
        }
    }
    return nullptr;
}

namespace {

class Parser {
public:
    std::vector<std::string> errors;

    void fail(const std::string& where, const std::string& what) {
        errors.push_back(where + ": " + what);
    }

    // Unknown keys are errors so a typo in an experiment file cannot pass
    // silently as a default.
    void check_keys(const ordered_json& obj, const std::string& where,
                    const std::set<std::string>& allowed, const std::set<std::string>& required) {
        if (!obj.is_object()) {
            fail(where, "expected an object");
            return;
        }
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.count(key)) {
                fail(where, "unknown key '" + key + "'");
            }
        }
        for (const std::string& key : required) {
            if (!obj.contains(key)) {
                fail(where, "missing key '" + key + "'");
            }
        }
    }

    std::int64_t get_int(const ordered_json& obj, const std::string& where, const std::string& key,
                         std::int64_t fallback = 0) {
        if (!obj.is_object() || !obj.contains(key)) {
            return fallback;
        }
        const auto& v = obj.at(key);
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
            fail(where, "'" + key + "' must be an integer");
            return fallback;
        }
        return v.get<std::int64_t>();
    }

    double get_num(const ordered_json& obj, const std::string& where, const std::string& key,
                   double fallback = 0.0) {
        if (!obj.is_object() || !obj.contains(key)) {
            return fallback;
        }
        const auto& v = obj.at(key);
        if (!v.is_number()) {
            fail(where, "'" + key + "' must be a number");
            return fallback;
        }
        return v.get<double>();
    }

    std::string get_str(const ordered_json& obj, const std::string& where, const std::string& key,
                        const std::string& fallback = "") {
        if (!obj.is_object() || !obj.contains(key)) {
            return fallback;
        }
        const auto& v = obj.at(key);
        if (!v.is_string()) {
            fail(where, "'" + key + "' must be a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    bool get_bool(const ordered_json& obj, const std::string& where, const std::string& key,
                  bool fallback) {
        if (!obj.is_object() || !obj.contains(key)) {
            return fallback;
        }
        const auto& v = obj.at(key);
        if (!v.is_boolean()) {
            fail(where, "'" + key + "' must be a boolean");
            return fallback;
        }
        return v.get<bool>();
    }

    SimTime get_seconds(const ordered_json& obj, const std::string& where, const std::string& key,
                        double fallback = 0.0) {
        const double s = get_num(obj, where, key, fallback);
        if (s < 0.0) {
            fail(where, "'" + key + "' must be non-negative");
            return SimTime{};
        }
        return SimTime::from_seconds(s);
    }

    Money get_cents(const ordered_json& obj, const std::string& where, const std::string& key,
                    std::int64_t fallback = 0) {
        const std::int64_t c = get_int(obj, where, key, fallback);
        if (c < 0) {
            fail(where, "'" + key + "' must be non-negative");
            return Money{};
        }
        return Money::cents(c);
    }
};

TaskSpec parse_task(Parser& p, const ordered_json& j, const std::string& where) {
    p.check_keys(j, where, {"id", "length_mi", "pes", "input_mb", "output_mb"},
                 {"id", "length_mi"});
    TaskSpec t;
    t.id = static_cast<std::uint32_t>(p.get_int(j, where, "id"));
    const std::int64_t len = p.get_int(j, where, "length_mi");
    if (len < 0) {
        p.fail(where, "length_mi must be non-negative");
    } else {
        t.length_mi = static_cast<std::uint64_t>(len);
    }
    t.pes = static_cast<int>(p.get_int(j, where, "pes", 1));
    if (t.pes < 1) {
        p.fail(where, "pes must be >= 1");
    }
    t.input_mb = p.get_num(j, where, "input_mb", 0.0);
    t.output_mb = p.get_num(j, where, "output_mb", 0.0);
    return t;
}

void parse_tasks(Parser& p, const ordered_json& j, const std::string& where,
                 std::vector<TaskSpec>& out) {
    if (!j.is_array()) {
        p.fail(where, "expected an array of tasks");
        return;
    }
    std::set<std::uint32_t> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        TaskSpec t = parse_task(p, j[i], where + ".tasks[" + std::to_string(i) + "]");
        if (!seen.insert(t.id).second) {
            p.fail(where, "duplicate task id " + std::to_string(t.id));
        }
        out.push_back(t);
    }
}

RequestSpec parse_request(Parser& p, const ordered_json& j, const std::string& where) {
    p.check_keys(j, where,
                 {"id", "app", "submit_s", "vm_class", "vm_count", "max_unit_price_cents", "qos",
                  "penalty_rate_cents_per_s", "region", "tasks", "sweep", "workflow"},
                 {"id", "app", "vm_class", "max_unit_price_cents", "qos"});
    RequestSpec r;
    r.id = static_cast<std::uint32_t>(p.get_int(j, where, "id"));
    const std::string app = p.get_str(j, where, "app");
    if (app == "bag") {
        r.app = AppModel::bag;
    } else if (app == "sweep") {
        r.app = AppModel::sweep;
    } else if (app == "workflow") {
        r.app = AppModel::workflow;
    } else {
        p.fail(where, "app must be one of bag, sweep, workflow");
    }
    r.submit = p.get_seconds(j, where, "submit_s");
    r.vm_class = p.get_str(j, where, "vm_class");
    r.vm_count = static_cast<int>(p.get_int(j, where, "vm_count", 1));
    if (r.vm_count < 1) {
        p.fail(where, "vm_count must be >= 1");
    }
    r.max_unit_price = p.get_cents(j, where, "max_unit_price_cents");
    if (j.contains("qos")) {
        const auto& q = j.at("qos");
        p.check_keys(q, where + ".qos", {"deadline_s", "budget_cents", "min_mips"},
                     {"deadline_s", "budget_cents"});
        r.qos.deadline = p.get_seconds(q, where + ".qos", "deadline_s");
        r.qos.budget = p.get_cents(q, where + ".qos", "budget_cents");
        r.qos.min_mips = p.get_int(q, where + ".qos", "min_mips", 0);
        if (r.qos.min_mips < 0) {
            p.fail(where, "min_mips must be non-negative");
        }
    }
    r.penalty_rate_per_s = p.get_cents(j, where, "penalty_rate_cents_per_s", 0);
    if (j.contains("region")) {
        r.region = p.get_str(j, where, "region");
    }

    if (r.app == AppModel::bag) {
        if (!j.contains("tasks")) {
            p.fail(where, "bag request needs 'tasks'");
        } else {
            parse_tasks(p, j.at("tasks"), where, r.tasks);
        }
    } else if (r.app == AppModel::sweep) {
        if (!j.contains("sweep")) {
            p.fail(where, "sweep request needs 'sweep'");
        } else {
            const auto& s = j.at("sweep");
            p.check_keys(s, where + ".sweep", {"template", "domains"}, {"template", "domains"});
            SweepSpec sweep;
            if (s.contains("template")) {
                sweep.template_task = parse_task(p, s.at("template"), where + ".sweep.template");
            }
            if (s.contains("domains")) {
                const auto& doms = s.at("domains");
                if (!doms.is_array() || doms.empty()) {
                    p.fail(where, "sweep domains must be a nonempty array");
                } else {
                    for (const auto& d : doms) {
                        if (!d.is_array() || d.size() != 2 || !d[0].is_string() ||
                            !d[1].is_array() || d[1].empty()) {
                            p.fail(where, "each domain must be [name, [values...]] and nonempty");
                            continue;
                        }
                        std::vector<std::string> values;
                        for (const auto& v : d[1]) {
                            values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                        }
                        sweep.domains.emplace_back(d[0].get<std::string>(), std::move(values));
                    }
                }
            }
            r.sweep = std::move(sweep);
        }
    } else if (r.app == AppModel::workflow) {
        if (!j.contains("workflow")) {
            p.fail(where, "workflow request needs 'workflow'");
        } else {
            const auto& w = j.at("workflow");
            p.check_keys(w, where + ".workflow", {"tasks", "edges"}, {"tasks", "edges"});
            WorkflowSpec wf;
            if (w.contains("tasks")) {
                parse_tasks(p, w.at("tasks"), where + ".workflow", wf.tasks);
            }
            if (w.contains("edges")) {
                const auto& edges = w.at("edges");
                if (!edges.is_array()) {
                    p.fail(where, "workflow edges must be an array");
                } else {
                    for (const auto& e : edges) {
                        if (!e.is_array() || e.size() != 2) {
                            p.fail(where, "each edge must be [from, to]");
                            continue;
                        }
                        wf.edges.emplace_back(e[0].get<std::uint32_t>(),
                                              e[1].get<std::uint32_t>());
                    }
                }
            }
            r.workflow = std::move(wf);
        }
    }
    return r;
}

HostSpec parse_host(Parser& p, const ordered_json& j, const std::string& where) {
    p.check_keys(j, where,
                 {"id", "pe_count", "mips_per_pe", "ram_mb", "storage_gb", "bw_mbps",
                  "voltage_levels", "power", "initial_level", "active"},
                 {"id", "pe_count", "mips_per_pe", "ram_mb", "bw_mbps"});
    HostSpec h;
    h.id = HostId{static_cast<std::uint32_t>(p.get_int(j, where, "id"))};
    h.pe_count = static_cast<int>(p.get_int(j, where, "pe_count"));
    if (h.pe_count < 1) {
        p.fail(where, "pe_count must be >= 1");
    }
    h.mips_per_pe = p.get_int(j, where, "mips_per_pe");
    if (h.mips_per_pe <= 0) {
        p.fail(where, "mips_per_pe must be positive");
    }
    h.ram_mb = p.get_int(j, where, "ram_mb");
    if (h.ram_mb < 0) {
        p.fail(where, "ram_mb must be non-negative");
    }
    h.storage_gb = p.get_int(j, where, "storage_gb", 0);
    h.bw_mbps = p.get_int(j, where, "bw_mbps");
    if (h.bw_mbps <= 0) {
        p.fail(where, "bw_mbps must be positive");
    }
    if (j.contains("voltage_levels")) {
        const auto& levels = j.at("voltage_levels");
        if (!levels.is_array() || levels.empty()) {
            p.fail(where, "voltage_levels must be a nonempty array");
        } else {
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const std::string lw = where + ".voltage_levels[" + std::to_string(i) + "]";
                p.check_keys(levels[i], lw, {"label", "speed_fraction"},
                             {"label", "speed_fraction"});
                VoltageLevel v;
                v.label = p.get_str(levels[i], lw, "label");
                v.fraction = p.get_num(levels[i], lw, "speed_fraction", 1.0);
                if (!(v.fraction > 0.0) || v.fraction > 1.0) {
                    p.fail(lw, "speed_fraction must be in (0, 1]");
                }
                h.voltage_levels.push_back(std::move(v));
            }
        }
    } else {
        h.voltage_levels.push_back(VoltageLevel{"full", 1.0});
    }
    for (std::size_t i = 0; i + 1 < h.voltage_levels.size(); ++i) {
        if (h.voltage_levels[i].fraction >= h.voltage_levels[i + 1].fraction) {
            p.fail(where, "voltage_levels must be strictly ascending in speed_fraction");
        }
    }
    if (!h.voltage_levels.empty() && h.voltage_levels.back().fraction != 1.0) {
        p.fail(where, "voltage_levels must contain speed_fraction 1.0");
    }
    if (j.contains("power")) {
        const auto& pw = j.at("power");
        p.check_keys(pw, where + ".power", {"p_idle_w", "p_max_w"}, {"p_idle_w", "p_max_w"});
        h.power.p_idle_w = p.get_num(pw, where + ".power", "p_idle_w");
        h.power.p_max_w = p.get_num(pw, where + ".power", "p_max_w");
        if (h.power.p_idle_w < 0 || h.power.p_idle_w > h.power.p_max_w) {
            p.fail(where, "power must satisfy 0 <= p_idle_w <= p_max_w");
        }
    }
    h.initial_level = h.voltage_levels.empty() ? 0 : h.voltage_levels.size() - 1;
    if (j.contains("initial_level")) {
        const std::string label = p.get_str(j, where, "initial_level");
        bool found = false;
        for (std::size_t i = 0; i < h.voltage_levels.size(); ++i) {
            if (h.voltage_levels[i].label == label) {
                h.initial_level = i;
                found = true;
            }
        }
        if (!found) {
            p.fail(where, "initial_level '" + label + "' is not a voltage level label");
        }
    }
    h.initially_active = p.get_bool(j, where, "active", true);
    return h;
}

DatacenterSpec parse_datacenter(Parser& p, const ordered_json& j, const std::string& where) {
    p.check_keys(j, where,
                 {"id", "region", "price_cents_per_vm_hour", "consolidation", "dvfs",
                  "placement", "coordinator", "hosts", "asks"},
                 {"id", "region", "price_cents_per_vm_hour", "hosts"});
    DatacenterSpec d;
    d.id = DatacenterId{static_cast<std::uint32_t>(p.get_int(j, where, "id"))};
    d.region = p.get_str(j, where, "region");
    d.price_per_vm_hour = p.get_cents(j, where, "price_cents_per_vm_hour");
    d.consolidation = p.get_bool(j, where, "consolidation", false);
    d.dvfs = p.get_bool(j, where, "dvfs", false);
    if (j.contains("placement")) {
        const std::string policy = p.get_str(j, where, "placement");
        if (policy == "first_fit") {
            d.placement = PlacementPolicy::first_fit;
        } else if (policy == "best_fit_ram") {
            d.placement = PlacementPolicy::best_fit_ram;
        } else {
            p.fail(where, "placement must be first_fit or best_fit_ram");
        }
    }
    if (j.contains("coordinator")) {
        const auto& c = j.at("coordinator");
        p.check_keys(c, where + ".coordinator", {"u_high", "u_max"}, {"u_high", "u_max"});
        d.coordinator.u_high = p.get_num(c, where + ".coordinator", "u_high", 1.0);
        d.coordinator.u_max = p.get_num(c, where + ".coordinator", "u_max", 1.0);
        for (const double u : {d.coordinator.u_high, d.coordinator.u_max}) {
            if (u < 0.0 || u > 1.0) {
                p.fail(where, "coordinator thresholds must be in [0, 1]");
            }
        }
        if (d.coordinator.u_high > d.coordinator.u_max) {
            p.fail(where, "u_high must not exceed u_max");
        }
    }
    if (j.contains("hosts") && j.at("hosts").is_array()) {
        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < j.at("hosts").size(); ++i) {
            HostSpec h = parse_host(p, j.at("hosts")[i], where + ".hosts[" + std::to_string(i) + "]");
            if (!ids.insert(h.id.value).second) {
                p.fail(where, "duplicate host id " + std::to_string(h.id.value));
            }
            d.hosts.push_back(std::move(h));
        }
    } else if (j.contains("hosts")) {
        p.fail(where, "'hosts' must be an array");
    }
    if (j.contains("asks")) {
        const auto& asks = j.at("asks");
        if (!asks.is_array()) {
            p.fail(where, "'asks' must be an array");
        } else {
            for (std::size_t i = 0; i < asks.size(); ++i) {
                const std::string aw = where + ".asks[" + std::to_string(i) + "]";
                p.check_keys(asks[i], aw, {"vm_class", "unit_price_cents", "quantity"},
                             {"vm_class", "unit_price_cents", "quantity"});
                AskSpec a;
                a.vm_class = p.get_str(asks[i], aw, "vm_class");
                a.unit_price = p.get_cents(asks[i], aw, "unit_price_cents");
                a.quantity = static_cast<int>(p.get_int(asks[i], aw, "quantity"));
                if (a.quantity < 1) {
                    p.fail(aw, "quantity must be >= 1");
                }
                d.asks.push_back(std::move(a));
            }
        }
    }
    return d;
}

}  // namespace

ParseResult parse_scenario(const std::string& json_text) {
    ParseResult result;
    ordered_json root = ordered_json::parse(json_text, nullptr, false);
    if (root.is_discarded()) {
        result.errors.push_back("document: malformed JSON");
        return result;
    }
    Parser p;
    p.check_keys(root, "document",
                 {"format", "datacenters", "vm_classes", "brokers", "market", "federation", "run"},
                 {"format", "datacenters", "vm_classes", "brokers", "market", "run"});
    if (p.get_int(root, "document", "format", -1) != 1) {
        p.fail("document", "format must be 1");
    }

    Scenario s;
    if (root.contains("datacenters") && root.at("datacenters").is_array()) {
        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < root.at("datacenters").size(); ++i) {
            DatacenterSpec d = parse_datacenter(p, root.at("datacenters")[i],
                                                "datacenters[" + std::to_string(i) + "]");
            if (!ids.insert(d.id.value).second) {
                p.fail("datacenters", "duplicate datacenter id " + std::to_string(d.id.value));
            }
            s.datacenters.push_back(std::move(d));
        }
    } else if (root.contains("datacenters")) {
        p.fail("document", "'datacenters' must be an array");
    }

    if (root.contains("vm_classes") && root.at("vm_classes").is_array()) {
        std::set<std::string> names;
        for (std::size_t i = 0; i < root.at("vm_classes").size(); ++i) {
            const std::string where = "vm_classes[" + std::to_string(i) + "]";
            const auto& j = root.at("vm_classes")[i];
            p.check_keys(j, where, {"name", "pes", "mips_per_pe", "ram_mb", "scheduler"},
                         {"name", "pes", "mips_per_pe", "ram_mb", "scheduler"});
            VmClassSpec c;
            c.name = p.get_str(j, where, "name");
            c.pes = static_cast<int>(p.get_int(j, where, "pes"));
            c.mips_per_pe = p.get_int(j, where, "mips_per_pe");
            c.ram_mb = p.get_int(j, where, "ram_mb");
            if (c.pes < 1 || c.mips_per_pe <= 0 || c.ram_mb < 0) {
                p.fail(where, "pes >= 1, mips_per_pe > 0 and ram_mb >= 0 required");
            }
            const std::string sched = p.get_str(j, where, "scheduler");
            if (sched == "space_shared") {
                c.scheduler = SchedulerMode::space_shared;
            } else if (sched == "time_shared") {
                c.scheduler = SchedulerMode::time_shared;
            } else {
                p.fail(where, "scheduler must be space_shared or time_shared");
            }
            if (!names.insert(c.name).second) {
                p.fail(where, "duplicate vm class '" + c.name + "'");
            }
            s.vm_classes.push_back(std::move(c));
        }
    } else if (root.contains("vm_classes")) {
        p.fail("document", "'vm_classes' must be an array");
    }

    if (root.contains("brokers") && root.at("brokers").is_array()) {
        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < root.at("brokers").size(); ++i) {
            const std::string where = "brokers[" + std::to_string(i) + "]";
            const auto& j = root.at("brokers")[i];
            p.check_keys(j, where, {"id", "requests", "private_vms"}, {"id", "requests"});
            BrokerSpec b;
            b.id = BrokerId{static_cast<std::uint32_t>(p.get_int(j, where, "id"))};
            if (!ids.insert(b.id.value).second) {
                p.fail(where, "duplicate broker id " + std::to_string(b.id.value));
            }
            if (j.contains("requests") && j.at("requests").is_array()) {
                std::set<std::uint32_t> request_ids;
                for (std::size_t k = 0; k < j.at("requests").size(); ++k) {
                    RequestSpec r = parse_request(
                        p, j.at("requests")[k], where + ".requests[" + std::to_string(k) + "]");
                    if (!request_ids.insert(r.id).second) {
                        p.fail(where, "duplicate request id " + std::to_string(r.id));
                    }
                    b.requests.push_back(std::move(r));
                }
            } else if (j.contains("requests")) {
                p.fail(where, "'requests' must be an array");
            }
            if (j.contains("private_vms")) {
                const auto& pv = j.at("private_vms");
                if (!pv.is_array()) {
                    p.fail(where, "'private_vms' must be an array");
                } else {
                    for (std::size_t k = 0; k < pv.size(); ++k) {
                        const std::string vw = where + ".private_vms[" + std::to_string(k) + "]";
                        p.check_keys(pv[k], vw, {"vm_class", "count"}, {"vm_class", "count"});
                        PrivateVmSpec v;
                        v.vm_class = p.get_str(pv[k], vw, "vm_class");
                        v.count = static_cast<int>(p.get_int(pv[k], vw, "count"));
                        if (v.count < 1) {
                            p.fail(vw, "count must be >= 1");
                        }
                        b.private_vms.push_back(std::move(v));
                    }
                }
            }
            s.brokers.push_back(std::move(b));
        }
    } else if (root.contains("brokers")) {
        p.fail("document", "'brokers' must be an array");
    }

    if (root.contains("market")) {
        const auto& m = root.at("market");
        p.check_keys(m, "market", {"tick_period_s", "mechanism"}, {"mechanism"});
        s.market.tick_period = m.contains("tick_period_s")
                                   ? p.get_seconds(m, "market", "tick_period_s", 60.0)
                                   : SimTime::seconds(60);
        if (s.market.tick_period == SimTime{}) {
            p.fail("market", "tick_period_s must be positive");
        }
        const std::string mech = p.get_str(m, "market", "mechanism");
        if (mech == "commodity") {
            s.market.mechanism = Exchange::Mechanism::commodity;
        } else if (mech == "auction") {
            s.market.mechanism = Exchange::Mechanism::auction;
        } else {
            p.fail("market", "mechanism must be commodity or auction");
        }
    }

    if (root.contains("federation")) {
        const auto& f = root.at("federation");
        p.check_keys(f, "federation", {"enabled", "agreements"}, {});
        s.federation.enabled = p.get_bool(f, "federation", "enabled", false);
        if (f.contains("agreements")) {
            const auto& ags = f.at("agreements");
            if (!ags.is_array()) {
                p.fail("federation", "'agreements' must be an array");
            } else {
                for (std::size_t i = 0; i < ags.size(); ++i) {
                    const std::string aw = "federation.agreements[" + std::to_string(i) + "]";
                    p.check_keys(ags[i], aw,
                                 {"local", "peer", "transfer_unit_price_cents", "quota_vm_hours",
                                  "latency_s"},
                                 {"local", "peer", "transfer_unit_price_cents", "quota_vm_hours"});
                    PeeringAgreement a;
                    a.local = DatacenterId{static_cast<std::uint32_t>(p.get_int(ags[i], aw, "local"))};
                    a.peer = DatacenterId{static_cast<std::uint32_t>(p.get_int(ags[i], aw, "peer"))};
                    a.transfer_unit_price = p.get_cents(ags[i], aw, "transfer_unit_price_cents");
                    a.quota_vm_hours = p.get_int(ags[i], aw, "quota_vm_hours");
                    if (a.quota_vm_hours < 0) {
                        p.fail(aw, "quota_vm_hours must be non-negative");
                    }
                    a.latency = p.get_seconds(ags[i], aw, "latency_s");
                    if (a.local == a.peer) {
                        p.fail(aw, "an agreement cannot peer a datacenter with itself");
                    }
                    s.federation.agreements.push_back(std::move(a));
                }
            }
        }
    }

    if (root.contains("run")) {
        const auto& r = root.at("run");
        p.check_keys(r, "run", {"seed", "horizon_s", "replications", "transfer_ms_per_mb"},
                     {"seed", "horizon_s"});
        s.run.seed = static_cast<std::uint64_t>(p.get_int(r, "run", "seed"));
        s.run.horizon = p.get_seconds(r, "run", "horizon_s");
        if (s.run.horizon == SimTime{}) {
            p.fail("run", "horizon_s must be positive");
        }
        s.run.replications = static_cast<int>(p.get_int(r, "run", "replications", 1));
        if (s.run.replications < 1) {
            p.fail("run", "replications must be >= 1");
        }
        const double ms = p.get_num(r, "run", "transfer_ms_per_mb", 0.0);
        if (ms < 0.0) {
            p.fail("run", "transfer_ms_per_mb must be non-negative");
        }
        s.run.transfer_per_mb = SimTime::micros(static_cast<std::uint64_t>(ms * 1000.0 + 0.5));
    }

    // Cross-reference checks.
    for (const DatacenterSpec& d : s.datacenters) {
        for (const AskSpec& a : d.asks) {
            if (s.find_class(a.vm_class) == nullptr) {
                p.fail("datacenters", "ask references unknown vm class '" + a.vm_class + "'");
            }
        }
    }
    for (const BrokerSpec& b : s.brokers) {
        for (const PrivateVmSpec& v : b.private_vms) {
            if (s.find_class(v.vm_class) == nullptr) {
                p.fail("brokers", "private vm references unknown vm class '" + v.vm_class + "'");
            }
        }
        for (const RequestSpec& r : b.requests) {
            const std::string where =
                "broker " + std::to_string(b.id.value) + " request " + std::to_string(r.id);
            if (s.find_class(r.vm_class) == nullptr) {
                p.fail(where, "unknown vm class '" + r.vm_class + "'");
            }
            std::size_t task_count = r.tasks.size();
            if (r.app == AppModel::sweep && r.sweep) {
                task_count = 1;
                for (const auto& [name, values] : r.sweep->domains) {
                    task_count *= values.size();
                }
            }
            if (r.app == AppModel::workflow && r.workflow) {
                task_count = r.workflow->tasks.size();
                std::set<std::uint32_t> node_ids;
                for (const TaskSpec& t : r.workflow->tasks) {
                    node_ids.insert(t.id);
                }
                Workflow wf;
                for (const std::uint32_t id : node_ids) {
                    wf.nodes.insert(CloudletId{id});
                }
                for (const auto& [from, to] : r.workflow->edges) {
                    if (!node_ids.count(from) || !node_ids.count(to)) {
                        p.fail(where, "workflow edge references unknown task");
                        continue;
                    }
                    wf.edges.emplace_back(CloudletId{from}, CloudletId{to});
                }
                if (!validate_dag(wf).ok()) {
                    p.fail(where, "workflow contains a cycle");
                }
            }
            if (task_count == 0) {
                p.fail(where, "request has no tasks");
            }
            if (static_cast<std::size_t>(r.vm_count) > task_count) {
                p.fail(where, "vm_count exceeds the number of tasks");
            }
        }
    }
    for (const PeeringAgreement& a : s.federation.agreements) {
        if (s.find_datacenter(a.local) == nullptr || s.find_datacenter(a.peer) == nullptr) {
            p.fail("federation", "agreement references unknown datacenter");
        }
    }

    result.errors = std::move(p.errors);
    if (result.errors.empty()) {
        result.scenario = std::move(s);
    }
    return result;
}

nlohmann::ordered_json emit_scenario(const Scenario& s) {
    ordered_json root;
    root["format"] = 1;
    root["datacenters"] = ordered_json::array();
    for (const DatacenterSpec& d : s.datacenters) {
        ordered_json jd;
        jd["id"] = d.id.value;
        jd["region"] = d.region;
        jd["price_cents_per_vm_hour"] = d.price_per_vm_hour.millicents() / 1000;
        jd["consolidation"] = d.consolidation;
        jd["dvfs"] = d.dvfs;
        jd["placement"] =
            d.placement == PlacementPolicy::first_fit ? "first_fit" : "best_fit_ram";
        jd["coordinator"] = {{"u_high", d.coordinator.u_high}, {"u_max", d.coordinator.u_max}};
        jd["hosts"] = ordered_json::array();
        for (const HostSpec& h : d.hosts) {
            ordered_json jh;
            jh["id"] = h.id.value;
            jh["pe_count"] = h.pe_count;
            jh["mips_per_pe"] = h.mips_per_pe;
            jh["ram_mb"] = h.ram_mb;
            jh["storage_gb"] = h.storage_gb;
            jh["bw_mbps"] = h.bw_mbps;
            jh["voltage_levels"] = ordered_json::array();
            for (const VoltageLevel& v : h.voltage_levels) {
                jh["voltage_levels"].push_back(
                    {{"label", v.label}, {"speed_fraction", v.fraction}});
            }
            jh["power"] = {{"p_idle_w", h.power.p_idle_w}, {"p_max_w", h.power.p_max_w}};
            jh["initial_level"] = h.voltage_levels[h.initial_level].label;
            jh["active"] = h.initially_active;
            jd["hosts"].push_back(std::move(jh));
        }
        jd["asks"] = ordered_json::array();
        for (const AskSpec& a : d.asks) {
            jd["asks"].push_back({{"vm_class", a.vm_class},
                                  {"unit_price_cents", a.unit_price.millicents() / 1000},
                                  {"quantity", a.quantity}});
        }
        root["datacenters"].push_back(std::move(jd));
    }
    root["vm_classes"] = ordered_json::array();
    for (const VmClassSpec& c : s.vm_classes) {
        root["vm_classes"].push_back(
            {{"name", c.name},
             {"pes", c.pes},
             {"mips_per_pe", c.mips_per_pe},
             {"ram_mb", c.ram_mb},
             {"scheduler",
              c.scheduler == SchedulerMode::space_shared ? "space_shared" : "time_shared"}});
    }
    root["brokers"] = ordered_json::array();
    for (const BrokerSpec& b : s.brokers) {
        ordered_json jb;
        jb["id"] = b.id.value;
        jb["requests"] = ordered_json::array();
        for (const RequestSpec& r : b.requests) {
            ordered_json jr;
            jr["id"] = r.id;
            jr["app"] = r.app == AppModel::bag      ? "bag"
                        : r.app == AppModel::sweep  ? "sweep"
                                                    : "workflow";
            jr["submit_s"] = r.submit.to_seconds();
            jr["vm_class"] = r.vm_class;
            jr["vm_count"] = r.vm_count;
            jr["max_unit_price_cents"] = r.max_unit_price.millicents() / 1000;
            jr["qos"] = {{"deadline_s", r.qos.deadline.to_seconds()},
                         {"budget_cents", r.qos.budget.millicents() / 1000},
                         {"min_mips", r.qos.min_mips}};
            jr["penalty_rate_cents_per_s"] = r.penalty_rate_per_s.millicents() / 1000;
            if (r.region) {
                jr["region"] = *r.region;
            }
            auto task_json = [](const TaskSpec& t) {
                return ordered_json{{"id", t.id},
                                    {"length_mi", t.length_mi},
                                    {"pes", t.pes},
                                    {"input_mb", t.input_mb},
                                    {"output_mb", t.output_mb}};
            };
            if (r.app == AppModel::bag) {
                jr["tasks"] = ordered_json::array();
                for (const TaskSpec& t : r.tasks) {
                    jr["tasks"].push_back(task_json(t));
                }
            } else if (r.app == AppModel::sweep && r.sweep) {
                ordered_json js;
                js["template"] = task_json(r.sweep->template_task);
                js["domains"] = ordered_json::array();
                for (const auto& [name, values] : r.sweep->domains) {
                    js["domains"].push_back(ordered_json::array({name, values}));
                }
                jr["sweep"] = std::move(js);
            } else if (r.app == AppModel::workflow && r.workflow) {
                ordered_json jw;
                jw["tasks"] = ordered_json::array();
                for (const TaskSpec& t : r.workflow->tasks) {
                    jw["tasks"].push_back(task_json(t));
                }
                jw["edges"] = ordered_json::array();
                for (const auto& [from, to] : r.workflow->edges) {
                    jw["edges"].push_back(ordered_json::array({from, to}));
                }
                jr["workflow"] = std::move(jw);
            }
            jb["requests"].push_back(std::move(jr));
        }
        if (!b.private_vms.empty()) {
            jb["private_vms"] = ordered_json::array();
            for (const PrivateVmSpec& v : b.private_vms) {
                jb["private_vms"].push_back({{"vm_class", v.vm_class}, {"count", v.count}});
            }
        }
        root["brokers"].push_back(std::move(jb));
    }
    root["market"] = {
        {"tick_period_s", s.market.tick_period.to_seconds()},
        {"mechanism",
         s.market.mechanism == Exchange::Mechanism::commodity ? "commodity" : "auction"}};
    root["federation"] = ordered_json::object();
    root["federation"]["enabled"] = s.federation.enabled;
    root["federation"]["agreements"] = ordered_json::array();
    for (const PeeringAgreement& a : s.federation.agreements) {
        root["federation"]["agreements"].push_back(
            {{"local", a.local.value},
             {"peer", a.peer.value},
             {"transfer_unit_price_cents", a.transfer_unit_price.millicents() / 1000},
             {"quota_vm_hours", a.quota_vm_hours},
             {"latency_s", a.latency.to_seconds()}});
    }
    root["run"] = {{"seed", s.run.seed},
                   {"horizon_s", s.run.horizon.to_seconds()},
                   {"replications", s.run.replications},
                   {"transfer_ms_per_mb", s.run.transfer_per_mb.us() / 1000.0}};
    return root;
}

}  // namespace cloudmarket
