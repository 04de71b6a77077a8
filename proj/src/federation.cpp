#include "cloudmarket/federation.hpp"

#include "cloudmarket/errors.hpp"

namespace cloudmarket {

OffloadDecision decide_offload(bool local_feasible, double local_util,
                               const CoordinatorPolicy& policy, Money bid_max_unit_price,
                               std::int64_t requested_vm_hours,
                               std::span<const PeeringAgreement> agreements) {
    if (local_feasible && local_util <= policy.u_high) {
        return OffloadDecision{OffloadAction::serve_local, 0};
    }
    std::size_t best = agreements.size();
    for (std::size_t i = 0; i < agreements.size(); ++i) {
        const PeeringAgreement& a = agreements[i];
        if (a.quota_vm_hours < requested_vm_hours || a.transfer_unit_price > bid_max_unit_price) {
            continue;
        }
        const bool better =
            best == agreements.size() ||
            std::pair(a.transfer_unit_price, a.peer) <
                std::pair(agreements[best].transfer_unit_price, agreements[best].peer);
        if (better) {
            best = i;
        }
    }
    if (best == agreements.size()) {
        return OffloadDecision{OffloadAction::reject, 0};
    }
    return OffloadDecision{OffloadAction::forward, best};
}

bool accept_remote(bool placement_feasible, double post_util, const CoordinatorPolicy& policy,
                   PeeringAgreement& agreement, std::int64_t requested_vm_hours) {
    if (!placement_feasible || post_util > policy.u_max) {
        return false;
    }
    if (agreement.quota_vm_hours < requested_vm_hours) {
        return false;
    }
    agreement.quota_vm_hours -= requested_vm_hours;
    return true;
}

std::vector<LedgerEntry> settle_peering(OffloadContract& contract, std::int64_t billed_hours,
                                        Ledger& ledger, const std::string& origin_account,
                                        const std::string& peer_account, SimTime now) {
    if (contract.settled) {
        throw DoubleSettlementError("settle_peering: contract already settled");
    }
    const Money amount = contract.transfer_unit_price * billed_hours;
    const std::string reason = "peering:r" + std::to_string(contract.request.value);
    ledger.transfer(origin_account, peer_account, amount, reason, now);
    contract.settled = true;
    return {ledger.journal().back()};
}

}  // namespace cloudmarket
