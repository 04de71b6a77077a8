#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cloudmarket/ids.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

// One DVFS operating point: the PE runs at fraction * mips_per_pe.
struct VoltageLevel {
    std::string label;
    double fraction = 1.0;  // in (0, 1]

    // Fraction in parts-per-million, for exact capacity arithmetic.
    std::int64_t ppm() const { return static_cast<std::int64_t>(fraction * 1e6 + 0.5); }
};

// Host power draw: idle floor plus cubic dynamic term in the speed fraction
// (frequency tracks voltage, P ~ V^2 f). An inactive host draws nothing.
struct PowerModel {
    double p_idle_w = 0.0;
    double p_max_w = 0.0;
};

double power_watts(const PowerModel& model, double speed_fraction);

// Joules to execute length_mi at mips * s, busy time only.
double energy_joules(std::uint64_t length_mi, std::int64_t mips, const PowerModel& model,
                     double speed_fraction);

// Picks the level minimizing total energy for a sequential task set on one
// PE, subject to finishing within the deadline. Returns an index into
// `levels`. Throws InfeasibleDeadlineError when even full speed is too slow.
std::size_t select_level_bot(std::span<const std::uint64_t> task_lengths_mi, SimTime deadline,
                             std::span<const VoltageLevel> levels, const PowerModel& model,
                             std::int64_t mips);

// Exact feasibility of running the task set at mips * s within the deadline.
bool level_meets_deadline(std::span<const std::uint64_t> task_lengths_mi, SimTime deadline,
                          std::int64_t mips, std::int64_t s_ppm);

struct EnergyReport {
    std::map<std::pair<DatacenterId, HostId>, double> per_host_j;
    std::map<DatacenterId, double> per_datacenter_j;
    double total_j = 0.0;
};

}  // namespace cloudmarket
