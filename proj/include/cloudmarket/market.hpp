#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cloudmarket/ids.hpp"
#include "cloudmarket/money.hpp"
#include "cloudmarket/qos.hpp"
#include "cloudmarket/time.hpp"

namespace cloudmarket {

struct Ask {
    std::uint64_t seq = 0;  // submission order, assigned by the exchange
    DatacenterId provider;
    std::string vm_class;
    Money unit_price;  // per VM-hour
    int quantity = 1;
    std::string region;
};

struct Bid {
    std::uint64_t seq = 0;
    BrokerId broker;
    RequestId request;
    std::string vm_class;
    Money max_unit_price;
    int quantity = 1;
    QosRequirement qos;
};

struct Trade {
    std::uint64_t id = 0;
    BrokerId buyer;
    DatacenterId seller;
    RequestId request;
    std::string vm_class;
    Money price;  // per VM-hour
    int quantity = 1;
    SimTime cleared_at;
};

enum class SlaStatus { active, met, violated, settled };

struct Sla {
    BrokerId consumer;
    DatacenterId provider;
    RequestId request;
    SimTime deadline;  // absolute
    std::int64_t min_mips = 0;
    Money agreed_price;
    Money penalty_rate_per_s;
    SlaStatus status = SlaStatus::active;
    Money penalty;
};

struct Book {
    std::vector<Ask> asks;  // submission order; quantities shrink as they fill
    std::vector<Bid> bids;  // unmatched bids carry over to the next tick
};

// Posted-price matching: bids in submission order, each filled greedily from
// the cheapest acceptable ask (ties to the earliest ask). Partial fills
// allowed; trades clear at the ask's posted price. Filled orders are removed
// from the book, unmatched bids stay queued.
std::vector<Trade> clear_commodity(Book& book, SimTime now, std::uint64_t& trade_seq);

// k = 0.5 sealed-bid double auction over unit orders: bids descending, asks
// ascending, k-th pair trades at the midpoint while bid >= ask. Quantities
// on the orders are ignored; callers split multi-unit orders beforehand.
std::vector<Trade> clear_double_auction(std::vector<Bid>& bids, std::vector<Ask>& asks,
                                        SimTime now, std::uint64_t& trade_seq);

// ceil(duration / 1h) * unit_price; a zero-length interval is free.
Money compute_bill(SimTime start, SimTime end, Money unit_price_per_hour);

// Lateness rounds up to whole seconds; the penalty is capped at the agreed
// price. Marks the SLA met or violated and records the penalty.
Money assess_penalty(Sla& sla, SimTime actual_finish, SimTime deadline);

struct LedgerEntry {
    std::string from;
    std::string to;
    Money amount;
    std::string reason;
    SimTime time;
};

// Double-entry accounts; balances may go negative (post-paid credit). The
// sum over all balances is invariant, and the journal replays to the
// current balances.
class Ledger {
public:
    void create_account(const std::string& owner);
    bool has_account(const std::string& owner) const;
    void transfer(const std::string& from, const std::string& to, Money amount,
                  const std::string& reason, SimTime time);
    Money balance(const std::string& owner) const;
    Money total() const;
    const std::vector<LedgerEntry>& journal() const { return journal_; }
    const std::map<std::string, Money>& accounts() const { return accounts_; }

private:
    std::map<std::string, Money> accounts_;
    std::vector<LedgerEntry> journal_;
};

// Consumer pays the agreed price; a violated SLA refunds the penalty.
// Throws DoubleSettlementError unless the SLA is met or violated.
std::vector<LedgerEntry> settle_sla(Sla& sla, Ledger& ledger, const std::string& consumer_account,
                                    const std::string& provider_account, SimTime now);

// Order books per VM class plus submission sequencing.
class Exchange {
public:
    explicit Exchange(std::set<std::string> vm_classes);

    std::uint64_t publish_ask(Ask ask);  // returns the assigned seq
    std::uint64_t submit_bid(Bid bid);

    // Clears every class book in name order with the given mechanism.
    enum class Mechanism { commodity, auction };
    std::vector<Trade> clear(Mechanism mechanism, SimTime now);

    const Book& book(const std::string& vm_class) const;
    std::size_t open_bids() const;

private:
    std::map<std::string, Book> books_;
    std::uint64_t order_seq_ = 0;
    std::uint64_t trade_seq_ = 0;
};

}  // namespace cloudmarket
