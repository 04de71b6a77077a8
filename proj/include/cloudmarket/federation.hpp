#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cloudmarket/ids.hpp"
#include "cloudmarket/market.hpp"
#include "cloudmarket/money.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

// Directional peering contract: `local` may offload onto `peer` until the
// VM-hour quota runs dry, paying the transfer price per VM-hour.
struct PeeringAgreement {
    DatacenterId local;
    DatacenterId peer;
    Money transfer_unit_price;
    std::int64_t quota_vm_hours = 0;
    SimTime latency;  // forwarding delay before remote admission
};

struct CoordinatorPolicy {
    double u_high = 1.0;  // offload above this local utilization
    double u_max = 1.0;   // decline remote work above this
};

enum class OffloadAction { serve_local, forward, reject };

struct OffloadDecision {
    OffloadAction action = OffloadAction::reject;
    std::size_t agreement_index = 0;  // valid when action == forward
};

// Serve locally when placement fits and utilization is at or below u_high;
// otherwise forward to the cheapest peer whose quota covers the request and
// whose transfer price the bid tolerates (ties: lowest peer id).
OffloadDecision decide_offload(bool local_feasible, double local_util,
                               const CoordinatorPolicy& policy, Money bid_max_unit_price,
                               std::int64_t requested_vm_hours,
                               std::span<const PeeringAgreement> agreements);

// Remote admission: accept iff the placement fits and the post-placement
// utilization stays at or below u_max; acceptance burns quota.
bool accept_remote(bool placement_feasible, double post_util, const CoordinatorPolicy& policy,
                   PeeringAgreement& agreement, std::int64_t requested_vm_hours);

// Settlement of a completed offload: the originating provider pays the peer
// for the hours actually billed. The consumer side is settled separately
// through the SLA, so the origin's margin may be negative.
struct OffloadContract {
    RequestId request;
    DatacenterId origin;
    DatacenterId peer;
    Money transfer_unit_price;
    bool settled = false;
};

std::vector<LedgerEntry> settle_peering(OffloadContract& contract, std::int64_t billed_hours,
                                        Ledger& ledger, const std::string& origin_account,
                                        const std::string& peer_account, SimTime now);

}  // namespace cloudmarket
