#pragma once

#include <compare>
#include <cstdint>

namespace cloudmarket {

// Opaque typed identifier; Tag keeps host/vm/broker/... ids from mixing.
template <typename Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    constexpr auto operator<=>(const Id&) const = default;
};

using HostId = Id<struct HostIdTag>;
using VmId = Id<struct VmIdTag>;
using DatacenterId = Id<struct DatacenterIdTag>;
using BrokerId = Id<struct BrokerIdTag>;
using CloudletId = Id<struct CloudletIdTag>;
using RequestId = Id<struct RequestIdTag>;

}  // namespace cloudmarket
