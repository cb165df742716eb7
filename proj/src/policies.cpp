#include "aqsim/policies.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace aqsim {

std::string to_string(PolicyKind kind)
{
    switch (kind) {
        case PolicyKind::FIFO: return "FIFO";
        case PolicyKind::LIS: return "LIS";
        case PolicyKind::SIS: return "SIS";
        case PolicyKind::FTG: return "FTG";
        case PolicyKind::NTS: return "NTS";
    }
    return "?";
}

std::string to_string(LinkSelectorKind kind)
{
    switch (kind) {
        case LinkSelectorKind::OldestHeadOfLine: return "OldestHeadOfLine";
        case LinkSelectorKind::RoundRobinNonEmpty: return "RoundRobinNonEmpty";
        case LinkSelectorKind::LowestNeighborId: return "LowestNeighborId";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name)
{
    for (auto k : kAllPolicies) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown policy '" + name + "'");
}

LinkSelectorKind parse_selector(const std::string& name)
{
    for (auto k : kAllSelectors) {
        if (to_string(k) == name) return k;
    }
    throw std::invalid_argument("unknown selector '" + name + "'");
}

bool QueueState::has_eligible(Slot now) const
{
    return std::any_of(contents.begin(), contents.end(), [now](const Fragment& f) { return f.eligible_from <= now; });
}

Rational QueueState::total() const
{
    Rational sum;
    for (const auto& f : contents) sum += f.remaining;
    return sum;
}

namespace {

// Smaller key is served first.
std::tuple<int, Slot, PacketId> service_key(PolicyKind policy, const Fragment& f)
{
    const int started = f.started ? 0 : 1;
    switch (policy) {
        case PolicyKind::FIFO: return {started, f.arrived, f.packet};
        case PolicyKind::LIS: return {started, f.injected_at, f.packet};
        case PolicyKind::SIS: return {started, -f.injected_at, f.packet};
        case PolicyKind::FTG: return {started, -f.remaining_hops(), f.packet};
        case PolicyKind::NTS: return {started, f.hops_traversed(), f.packet};
    }
    return {started, 0, f.packet};
}

}  // namespace

std::vector<std::size_t> order_queue(PolicyKind policy, const QueueState& queue, Slot now)
{
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < queue.contents.size(); ++k) {
        if (queue.contents[k].eligible_from <= now) order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return service_key(policy, queue.contents[a]) < service_key(policy, queue.contents[b]);
    });
    return order;
}

std::optional<std::size_t> select_link(LinkSelectorKind selector, PolicyKind policy,
                                       std::span<const QueueState> queues, Slot now,
                                       const SelectorHistory& history)
{
    std::vector<std::size_t> busy;
    for (std::size_t k = 0; k < queues.size(); ++k) {
        if (queues[k].has_eligible(now)) busy.push_back(k);
    }
    if (busy.empty()) return std::nullopt;
    if (busy.size() == 1) return busy.front();

    switch (selector) {
        case LinkSelectorKind::LowestNeighborId: return busy.front();
        case LinkSelectorKind::RoundRobinNonEmpty: {
            if (!history.last_served) return busy.front();
            auto it = std::upper_bound(busy.begin(), busy.end(), *history.last_served);
            return it == busy.end() ? busy.front() : *it;
        }
        case LinkSelectorKind::OldestHeadOfLine: {
            std::optional<std::size_t> best;
            Slot best_injection = 0;
            for (std::size_t k : busy) {
                auto order = order_queue(policy, queues[k], now);
                Slot injected = queues[k].contents[order.front()].injected_at;
                if (!best || injected < best_injection) {
                    best = k;
                    best_injection = injected;
                }
            }
            return best;
        }
    }
    return busy.front();
}

}  // namespace aqsim
