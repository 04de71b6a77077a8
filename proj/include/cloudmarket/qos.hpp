#pragma once

#include <cstdint>

#include "cloudmarket/money.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

// QoS terms a broker attaches to a request; deadline is relative to submit.
struct QosRequirement {
    SimTime deadline;
    Money budget;
    std::int64_t min_mips = 0;
};

}  // namespace cloudmarket
