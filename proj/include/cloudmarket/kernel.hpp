#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cloudmarket/errors.hpp"
#include "cloudmarket/rng.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

struct EntityId {
    std::uint32_t value = 0;
    constexpr auto operator<=>(const EntityId&) const = default;
};

// Identifies a pending event; valid for cancellation until it fires.
struct EventHandle {
    SimTime fire_at;
    int priority = 0;
    std::uint64_t seq = 0;
};

template <typename Payload>
struct SimEvent {
    SimTime fire_at;
    int priority = 0;
    std::uint64_t seq = 0;  // insertion order, the final tie-break
    EntityId target;
    Payload payload;
};

// Deterministic single-threaded discrete-event engine. Events are totally
// ordered by (fire_at, priority, seq); lower priority values fire first.
// One kernel instance per run; replications use independent instances.
template <typename Payload>
class Kernel {
public:
    using Event = SimEvent<Payload>;
    using Handler = std::function<void(Kernel&, const Event&)>;

    explicit Kernel(std::uint64_t rng_seed = 0) : seed_(rng_seed) {}

    EntityId register_entity(std::string name, Handler handler) {
        const EntityId id{static_cast<std::uint32_t>(entities_.size())};
        entities_.push_back({std::move(name), std::move(handler)});
        return id;
    }

    EventHandle schedule(SimTime delay, EntityId target, Payload payload, int priority = 0) {
        if (target.value >= entities_.size()) {
            throw UnknownEntityError("schedule: unregistered entity " + std::to_string(target.value));
        }
        Event ev{clock_ + delay, priority, ++seq_counter_, target, std::move(payload)};
        const EventHandle handle{ev.fire_at, ev.priority, ev.seq};
        queue_.insert(std::move(ev));
        return handle;
    }

    // True iff the event was still pending and is now removed.
    bool cancel(const EventHandle& handle) {
        auto it = queue_.find(handle);
        if (it == queue_.end()) {
            return false;
        }
        queue_.erase(it);
        return true;
    }

    // Pops and dispatches the minimum event; returns it, or nullopt when the
    // queue is empty (end of simulation, clock unchanged).
    std::optional<Event> step() {
        if (queue_.empty()) {
            return std::nullopt;
        }
        auto it = queue_.begin();
        Event ev = *it;
        queue_.erase(it);
        clock_ = ev.fire_at;
        entities_[ev.target.value].handler(*this, ev);
        return ev;
    }

    // Dispatches every event with fire_at <= t_end; the clock finishes at
    // t_end even if the queue drains early.
    std::size_t run_until(SimTime t_end) {
        if (t_end < clock_) {
            throw HorizonBeforeNowError("run_until: horizon precedes current clock");
        }
        std::size_t count = 0;
        while (!queue_.empty() && queue_.begin()->fire_at <= t_end) {
            step();
            ++count;
        }
        clock_ = t_end;
        return count;
    }

    SimTime now() const { return clock_; }
    std::size_t pending() const { return queue_.size(); }
    std::uint64_t seed() const { return seed_; }

    // Per-entity stream keyed on (seed, entity id): adding an entity does not
    // perturb the draws of any other entity.
    Rng rng_for(EntityId id) const { return Rng(seed_, id.value); }

    const std::string& entity_name(EntityId id) const { return entities_.at(id.value).name; }

private:
    struct EventOrder {
        using is_transparent = void;
        static std::tuple<SimTime, int, std::uint64_t> key(const Event& e) {
            return {e.fire_at, e.priority, e.seq};
        }
        static std::tuple<SimTime, int, std::uint64_t> key(const EventHandle& h) {
            return {h.fire_at, h.priority, h.seq};
        }
        template <typename A, typename B>
        bool operator()(const A& a, const B& b) const {
            return key(a) < key(b);
        }
    };

    struct EntityRecord {
        std::string name;
        Handler handler;
    };

    SimTime clock_;
    std::set<Event, EventOrder> queue_;
    std::uint64_t seq_counter_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<EntityRecord> entities_;
};

}  // namespace cloudmarket
