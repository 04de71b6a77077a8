#include <doctest.h>

#include "cloudmarket/energy.hpp"
#include "cloudmarket/errors.hpp"
#include "cloudmarket/rng.hpp"
#include "oracles.hpp"

using namespace cloudmarket;

namespace {

std::vector<VoltageLevel> levels_of(std::initializer_list<double> fractions) {
    std::vector<VoltageLevel> levels;
    int i = 0;
    for (const double f : fractions) {
        levels.push_back(VoltageLevel{"l" + std::to_string(i++), f});
    }
    return levels;
}

}  // namespace

TEST_CASE("power at full speed is p_max") {
    CHECK(power_watts(PowerModel{0.0, 100.0}, 1.0) == doctest::Approx(100.0));
}

TEST_CASE("cubic dynamic power at half speed") {
    CHECK(power_watts(PowerModel{0.0, 100.0}, 0.5) == doctest::Approx(12.5));
}

TEST_CASE("zero speed is invalid") {
    CHECK_THROWS_AS(power_watts(PowerModel{0.0, 100.0}, 0.0), InvalidSpeedError);
}

TEST_CASE("energy of a unit run at full speed") {
    CHECK(energy_joules(1000, 1000, PowerModel{0.0, 100.0}, 1.0) == doctest::Approx(100.0));
}

TEST_CASE("pure cubic energy at half speed is a quarter of full") {
    const PowerModel model{0.0, 100.0};
    const double full = energy_joules(1000, 1000, model, 1.0);
    const double half = energy_joules(1000, 1000, model, 0.5);
    CHECK(half / full == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("zero-length work takes no energy") {
    CHECK(energy_joules(0, 1000, PowerModel{0.0, 100.0}, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("the slowest feasible level wins with no idle floor") {
    const auto levels = levels_of({0.5, 0.8, 1.0});
    const PowerModel model{0.0, 100.0};
    const std::vector<std::uint64_t> tasks{1000};
    const std::size_t chosen =
        select_level_bot(tasks, SimTime::seconds(2), levels, model, 1000);
    CHECK(levels[chosen].fraction == doctest::Approx(0.5));
    double energy = 0.0;
    for (const std::uint64_t t : tasks) {
        energy += energy_joules(t, 1000, model, levels[chosen].fraction);
    }
    CHECK(energy == doctest::Approx(25.0));
}

TEST_CASE("a tight deadline forces full speed") {
    const auto levels = levels_of({0.5, 0.8, 1.0});
    const std::vector<std::uint64_t> tasks{1000};
    const std::size_t chosen =
        select_level_bot(tasks, SimTime::seconds(1), levels, PowerModel{0.0, 100.0}, 1000);
    CHECK(levels[chosen].fraction == doctest::Approx(1.0));
}

TEST_CASE("an unreachable deadline is an error") {
    const auto levels = levels_of({0.5, 0.8, 1.0});
    const std::vector<std::uint64_t> tasks{1000};
    CHECK_THROWS_AS(
        select_level_bot(tasks, SimTime::millis(500), levels, PowerModel{0.0, 100.0}, 1000),
        InfeasibleDeadlineError);
}

TEST_CASE("selection matches exhaustive enumeration, idle floor included") {
    Rng rng(5);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n_tasks = rng.next_below(10) + 1;
        std::vector<std::uint64_t> tasks;
        for (std::size_t i = 0; i < n_tasks; ++i) {
            tasks.push_back(rng.next_below(2000) + 1);
        }
        const std::size_t n_levels = rng.next_below(4) + 1;
        std::vector<VoltageLevel> levels;
        for (std::size_t i = 0; i < n_levels; ++i) {
            levels.push_back(
                VoltageLevel{"l" + std::to_string(i),
                             0.2 + 0.8 * static_cast<double>(i) / static_cast<double>(n_levels)});
        }
        levels.push_back(VoltageLevel{"full", 1.0});
        const PowerModel model{static_cast<double>(rng.next_below(50)),
                               50.0 + static_cast<double>(rng.next_below(150))};
        const std::int64_t mips = static_cast<std::int64_t>(rng.next_below(2000)) + 100;
        const SimTime deadline = SimTime::micros(rng.next_below(40'000'000) + 1);
        const auto [feasible, best] =
            oracles::exhaustive_min_energy(tasks, deadline, levels, model, mips);
        if (!feasible) {
            CHECK_THROWS_AS(select_level_bot(tasks, deadline, levels, model, mips),
                            InfeasibleDeadlineError);
            continue;
        }
        const std::size_t chosen = select_level_bot(tasks, deadline, levels, model, mips);
        double energy = 0.0;
        for (const std::uint64_t t : tasks) {
            energy += energy_joules(t, mips, model, levels[chosen].fraction);
        }
        CHECK(energy == best);
    }
}

TEST_CASE("with no idle floor energy never decreases with speed among feasible levels") {
    const auto levels = levels_of({0.4, 0.6, 0.8, 1.0});
    const PowerModel model{0.0, 130.0};
    const std::vector<std::uint64_t> tasks{500, 700};
    double previous = 0.0;
    for (const auto& level : levels) {
        double energy = 0.0;
        for (const std::uint64_t t : tasks) {
            energy += energy_joules(t, 900, model, level.fraction);
        }
        CHECK(energy >= previous);
        previous = energy;
    }
}
