#include "cloudmarket/energy.hpp"

#include <limits>

#include "cloudmarket/errors.hpp"

namespace cloudmarket {

double power_watts(const PowerModel& model, double s) {
    if (!(s > 0.0) || s > 1.0) {
        throw InvalidSpeedError("power: speed fraction must be in (0, 1]");
    }
    return model.p_idle_w + (model.p_max_w - model.p_idle_w) * s * s * s;
}

double energy_joules(std::uint64_t length_mi, std::int64_t mips, const PowerModel& model,
                     double s) {
    if (mips <= 0) {
        throw ZeroRateError("energy: mips must be positive");
    }
    const double watts = power_watts(model, s);
    const double seconds = static_cast<double>(length_mi) / (static_cast<double>(mips) * s);
    return watts * seconds;
}

bool level_meets_deadline(std::span<const std::uint64_t> lengths, SimTime deadline,
                          std::int64_t mips, std::int64_t s_ppm) {
    // sum(length) / (mips * s) <= deadline, cross-multiplied in integers:
    // sum(length_mi) * 1e12 <= deadline_us * mips * s_ppm
    unsigned __int128 work = 0;
    for (const std::uint64_t l : lengths) {
        work += static_cast<unsigned __int128>(l);
    }
    work *= 1'000'000'000'000ull;
    const unsigned __int128 budget = static_cast<unsigned __int128>(deadline.us()) *
                                     static_cast<unsigned __int128>(mips) *
                                     static_cast<unsigned __int128>(s_ppm);
    return work <= budget;
}

std::size_t select_level_bot(std::span<const std::uint64_t> lengths, SimTime deadline,
                             std::span<const VoltageLevel> levels, const PowerModel& model,
                             std::int64_t mips) {
    if (mips <= 0) {
        throw ZeroRateError("select_level_bot: mips must be positive");
    }
    // Level count is small: evaluate every feasible level. With p_idle = 0
    // the slowest feasible level wins, but a positive idle floor can favor
    // racing to finish, so no shortcut is taken.
    std::size_t best = levels.size();
    double best_energy = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!level_meets_deadline(lengths, deadline, mips, levels[i].ppm())) {
            continue;
        }
        double total = 0.0;
        for (const std::uint64_t l : lengths) {
            total += energy_joules(l, mips, model, levels[i].fraction);
        }
        if (total < best_energy) {
            best_energy = total;
            best = i;
        }
    }
    if (best == levels.size()) {
        throw InfeasibleDeadlineError("select_level_bot: deadline unreachable at full speed");
    }
    return best;
}

}  // namespace cloudmarket
