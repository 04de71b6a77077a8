#include <doctest.h>

#include <string>
#include <vector>

#include "cloudmarket/kernel.hpp"

using namespace cloudmarket;

namespace {

struct Note {
    std::string tag;
};
using TestKernel = Kernel<Note>;

struct Recorder {
    std::vector<std::string> seen;
    TestKernel::Handler handler() {
        return [this](TestKernel& k, const TestKernel::Event& ev) {
            seen.push_back(ev.payload.tag + "@" + std::to_string(k.now().us()));
        };
    }
};

}  // namespace

TEST_CASE("same-time same-priority events dispatch in schedule order") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime{}, e, Note{"A"});
    kernel.schedule(SimTime{}, e, Note{"B"});
    kernel.run_until(SimTime::seconds(1));
    CHECK(rec.seen == std::vector<std::string>{"A@0", "B@0"});
}

TEST_CASE("delay lands the event at clock plus delay") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime::micros(5'000'000), e, Note{"x"});
    kernel.run_until(SimTime::seconds(10));
    CHECK(rec.seen == std::vector<std::string>{"x@5000000"});
}

TEST_CASE("scheduling to an unregistered entity fails") {
    TestKernel kernel;
    CHECK_THROWS_AS(kernel.schedule(SimTime{}, EntityId{7}, Note{"x"}), UnknownEntityError);
}

TEST_CASE("earliest time wins regardless of insertion order") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime::micros(2), e, Note{"late"});
    kernel.schedule(SimTime::micros(1), e, Note{"early"});
    auto first = kernel.step();
    REQUIRE(first.has_value());
    CHECK(first->payload.tag == "early");
    CHECK(kernel.now() == SimTime::micros(1));
}

TEST_CASE("lower priority value fires first at equal times") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime::micros(1), e, Note{"p1"}, 1);
    kernel.schedule(SimTime::micros(1), e, Note{"p0"}, 0);
    kernel.run_until(SimTime::micros(1));
    CHECK(rec.seen == std::vector<std::string>{"p0@1", "p1@1"});
}

TEST_CASE("step on an empty queue reports the end without moving the clock") {
    TestKernel kernel;
    CHECK_FALSE(kernel.step().has_value());
    CHECK(kernel.now() == SimTime{});
}

TEST_CASE("cancel removes a pending event exactly once") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    const EventHandle h = kernel.schedule(SimTime::micros(3), e, Note{"doomed"});
    CHECK(kernel.cancel(h));
    CHECK_FALSE(kernel.cancel(h));
    kernel.run_until(SimTime::seconds(1));
    CHECK(rec.seen.empty());
}

TEST_CASE("cancel after the event fired returns false") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    const EventHandle h = kernel.schedule(SimTime::micros(3), e, Note{"ran"});
    kernel.run_until(SimTime::seconds(1));
    CHECK_FALSE(kernel.cancel(h));
    CHECK(rec.seen.size() == 1);
}

TEST_CASE("run_until stops at the horizon and leaves later events queued") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime::seconds(1), e, Note{"a"});
    kernel.schedule(SimTime::seconds(2), e, Note{"b"});
    kernel.schedule(SimTime::seconds(3), e, Note{"c"});
    CHECK(kernel.run_until(SimTime::seconds(2)) == 2);
    CHECK(kernel.pending() == 1);
    CHECK(kernel.now() == SimTime::seconds(2));
}

TEST_CASE("run_until on an empty queue still advances the clock") {
    TestKernel kernel;
    CHECK(kernel.run_until(SimTime::seconds(10)) == 0);
    CHECK(kernel.now() == SimTime::seconds(10));
}

TEST_CASE("run_until rejects a horizon in the past") {
    TestKernel kernel;
    Recorder rec;
    const EntityId e = kernel.register_entity("e", rec.handler());
    kernel.schedule(SimTime::seconds(5), e, Note{"x"});
    kernel.run_until(SimTime::seconds(5));
    CHECK_THROWS_AS(kernel.run_until(SimTime::seconds(4)), HorizonBeforeNowError);
}

TEST_CASE("dispatched timestamps never decrease") {
    TestKernel kernel;
    std::vector<std::uint64_t> stamps;
    const EntityId e = kernel.register_entity("e", [&](TestKernel& k, const TestKernel::Event&) {
        stamps.push_back(k.now().us());
    });
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        kernel.schedule(SimTime::micros(rng.next_below(1000)), e, Note{},
                        static_cast<int>(rng.next_below(3)));
    }
    kernel.run_until(SimTime::seconds(1));
    CHECK(stamps.size() == 200);
    CHECK(std::is_sorted(stamps.begin(), stamps.end()));
}

TEST_CASE("no two dispatched events share a (time, priority, seq) key") {
    TestKernel kernel;
    auto noop = [](TestKernel&, const TestKernel::Event&) {};
    const EntityId e = kernel.register_entity("e", noop);
    Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        kernel.schedule(SimTime::micros(rng.next_below(50)), e, Note{},
                        static_cast<int>(rng.next_below(2)));
    }
    std::set<std::tuple<std::uint64_t, int, std::uint64_t>> keys;
    while (auto ev = kernel.step()) {
        CHECK(keys.insert({ev->fire_at.us(), ev->priority, ev->seq}).second);
    }
    CHECK(keys.size() == 300);
}

TEST_CASE("per-entity rng streams are stable when entities are added") {
    TestKernel a(42);
    TestKernel b(42);
    auto noop = [](TestKernel&, const TestKernel::Event&) {};
    const EntityId a0 = a.register_entity("x", noop);
    const EntityId b0 = b.register_entity("x", noop);
    b.register_entity("extra", noop);
    Rng ra = a.rng_for(a0);
    Rng rb = b.rng_for(b0);
    for (int i = 0; i < 16; ++i) {
        CHECK(ra.next_u64() == rb.next_u64());
    }
}

TEST_CASE("rng streams differ across entities and seeds") {
    TestKernel kernel(7);
    auto noop = [](TestKernel&, const TestKernel::Event&) {};
    const EntityId e0 = kernel.register_entity("a", noop);
    const EntityId e1 = kernel.register_entity("b", noop);
    Rng r0 = kernel.rng_for(e0);
    Rng r1 = kernel.rng_for(e1);
    CHECK(r0.next_u64() != r1.next_u64());
}
