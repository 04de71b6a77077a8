#include "cloudmarket/market.hpp"

#include <algorithm>

#include "cloudmarket/errors.hpp"

namespace cloudmarket {

std::vector<Trade> clear_commodity(Book& book, SimTime now, std::uint64_t& trade_seq) {
    std::vector<Trade> trades;
    std::vector<Bid> carryover;
    for (Bid& bid : book.bids) {
        int wanted = bid.quantity;
        while (wanted > 0) {
            Ask* best = nullptr;
            for (Ask& ask : book.asks) {
                if (ask.quantity <= 0 || ask.unit_price > bid.max_unit_price) {
                    continue;
                }
                if (best == nullptr ||
                    std::pair(ask.unit_price, ask.seq) < std::pair(best->unit_price, best->seq)) {
                    best = &ask;
                }
            }
            if (best == nullptr) {
                break;
            }
            const int fill = std::min(wanted, best->quantity);
            trades.push_back(Trade{++trade_seq, bid.broker, best->provider, bid.request,
                                   bid.vm_class, best->unit_price, fill, now});
            best->quantity -= fill;
            wanted -= fill;
        }
        if (wanted > 0) {
            Bid rest = bid;
            rest.quantity = wanted;
            carryover.push_back(std::move(rest));
        }
    }
    book.bids = std::move(carryover);
    std::erase_if(book.asks, [](const Ask& a) { return a.quantity <= 0; });
    return trades;
}

std::vector<Trade> clear_double_auction(std::vector<Bid>& bids, std::vector<Ask>& asks,
                                        SimTime now, std::uint64_t& trade_seq) {
    std::vector<std::size_t> bid_order(bids.size());
    std::vector<std::size_t> ask_order(asks.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        bid_order[i] = i;
    }
    for (std::size_t i = 0; i < asks.size(); ++i) {
        ask_order[i] = i;
    }
    std::sort(bid_order.begin(), bid_order.end(), [&](std::size_t a, std::size_t b) {
        if (bids[a].max_unit_price != bids[b].max_unit_price) {
            return bids[a].max_unit_price > bids[b].max_unit_price;
        }
        return bids[a].seq < bids[b].seq;
    });
    std::sort(ask_order.begin(), ask_order.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(asks[a].unit_price, asks[a].seq) <
               std::pair(asks[b].unit_price, asks[b].seq);
    });
    std::vector<Trade> trades;
    std::set<std::size_t> matched_bids;
    std::set<std::size_t> matched_asks;
    const std::size_t pairs = std::min(bids.size(), asks.size());
    for (std::size_t k = 0; k < pairs; ++k) {
        const Bid& bid = bids[bid_order[k]];
        const Ask& ask = asks[ask_order[k]];
        if (bid.max_unit_price < ask.unit_price) {
            break;
        }
        const Money mid =
            Money::millicents((bid.max_unit_price.millicents() + ask.unit_price.millicents()) / 2);
        trades.push_back(
            Trade{++trade_seq, bid.broker, ask.provider, bid.request, bid.vm_class, mid, 1, now});
        matched_bids.insert(bid_order[k]);
        matched_asks.insert(ask_order[k]);
    }
    auto drop = [](auto& orders, const std::set<std::size_t>& gone) {
        std::size_t i = 0;
        std::erase_if(orders, [&](const auto&) { return gone.count(i++) > 0; });
    };
    drop(bids, matched_bids);
    drop(asks, matched_asks);
    return trades;
}

Money compute_bill(SimTime start, SimTime end, Money unit_price_per_hour) {
    if (end < start) {
        throw NegativeIntervalError("compute_bill: end precedes start");
    }
    const std::uint64_t hours = (end - start).ceil_hours();
    return unit_price_per_hour * static_cast<std::int64_t>(hours);
}

Money assess_penalty(Sla& sla, SimTime actual_finish, SimTime deadline) {
    if (sla.status != SlaStatus::active) {
        throw DoubleSettlementError("assess_penalty: SLA already assessed");
    }
    if (actual_finish <= deadline) {
        sla.status = SlaStatus::met;
        sla.penalty = Money{};
        return sla.penalty;
    }
    const std::int64_t late_s =
        static_cast<std::int64_t>((actual_finish - deadline).ceil_seconds());
    sla.status = SlaStatus::violated;
    sla.penalty = min(sla.agreed_price, sla.penalty_rate_per_s * late_s);
    return sla.penalty;
}

void Ledger::create_account(const std::string& owner) { accounts_.emplace(owner, Money{}); }

bool Ledger::has_account(const std::string& owner) const { return accounts_.count(owner) > 0; }

void Ledger::transfer(const std::string& from, const std::string& to, Money amount,
                      const std::string& reason, SimTime time) {
    if (amount < Money{}) {
        throw NegativeAmountError("ledger: negative transfer " + reason);
    }
    auto src = accounts_.find(from);
    auto dst = accounts_.find(to);
    if (src == accounts_.end() || dst == accounts_.end()) {
        throw UnknownAccountError("ledger: unknown account in transfer " + from + " -> " + to);
    }
    src->second -= amount;
    dst->second += amount;
    journal_.push_back(LedgerEntry{from, to, amount, reason, time});
}

Money Ledger::balance(const std::string& owner) const {
    auto it = accounts_.find(owner);
    if (it == accounts_.end()) {
        throw UnknownAccountError("ledger: unknown account " + owner);
    }
    return it->second;
}

Money Ledger::total() const {
    Money sum;
    for (const auto& [owner, bal] : accounts_) {
        sum += bal;
    }
    return sum;
}

std::vector<LedgerEntry> settle_sla(Sla& sla, Ledger& ledger, const std::string& consumer_account,
                                    const std::string& provider_account, SimTime now) {
    if (sla.status != SlaStatus::met && sla.status != SlaStatus::violated) {
        throw DoubleSettlementError("settle_sla: SLA not in a settleable state");
    }
    const std::string tag = "sla:r" + std::to_string(sla.request.value);
    std::vector<LedgerEntry> entries;
    ledger.transfer(consumer_account, provider_account, sla.agreed_price, tag + ":payment", now);
    entries.push_back(ledger.journal().back());
    if (sla.status == SlaStatus::violated) {
        ledger.transfer(provider_account, consumer_account, sla.penalty, tag + ":penalty", now);
        entries.push_back(ledger.journal().back());
    }
    sla.status = SlaStatus::settled;
    return entries;
}

Exchange::Exchange(std::set<std::string> vm_classes) {
    for (const std::string& name : vm_classes) {
        books_.emplace(name, Book{});
    }
}

std::uint64_t Exchange::publish_ask(Ask ask) {
    auto it = books_.find(ask.vm_class);
    if (it == books_.end()) {
        throw UnknownVmClassError("publish_ask: unknown vm class " + ask.vm_class);
    }
    ask.seq = ++order_seq_;
    it->second.asks.push_back(std::move(ask));
    return order_seq_;
}

std::uint64_t Exchange::submit_bid(Bid bid) {
    auto it = books_.find(bid.vm_class);
    if (it == books_.end()) {
        throw UnknownVmClassError("submit_bid: unknown vm class " + bid.vm_class);
    }
    bid.seq = ++order_seq_;
    it->second.bids.push_back(std::move(bid));
    return order_seq_;
}

std::vector<Trade> Exchange::clear(Mechanism mechanism, SimTime now) {
    std::vector<Trade> trades;
    for (auto& [name, book] : books_) {
        std::vector<Trade> cleared;
        if (mechanism == Mechanism::commodity) {
            cleared = clear_commodity(book, now, trade_seq_);
        } else {
            cleared = clear_double_auction(book.bids, book.asks, now, trade_seq_);
        }
        trades.insert(trades.end(), cleared.begin(), cleared.end());
    }
    return trades;
}

const Book& Exchange::book(const std::string& vm_class) const {
    auto it = books_.find(vm_class);
    if (it == books_.end()) {
        throw UnknownVmClassError("book: unknown vm class " + vm_class);
    }
    return it->second;
}

std::size_t Exchange::open_bids() const {
    std::size_t n = 0;
    for (const auto& [name, book] : books_) {
        n += book.bids.size();
    }
    return n;
}

}  // namespace cloudmarket
