// policies.hpp - Work-conserving queue disciplines and the per-node choice of
// the single outgoing link served in a slot.
//
// None of these decisions look at link rates: a node cannot observe them.

#ifndef AQSIM_POLICIES_HPP
#define AQSIM_POLICIES_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqsim/network.hpp"
#include "aqsim/rational.hpp"

namespace aqsim {

enum class PolicyKind { FIFO, LIS, SIS, FTG, NTS };
enum class LinkSelectorKind { OldestHeadOfLine, RoundRobinNonEmpty, LowestNeighborId };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::FIFO, PolicyKind::LIS, PolicyKind::SIS, PolicyKind::FTG,
                                              PolicyKind::NTS};
inline constexpr LinkSelectorKind kAllSelectors[] = {LinkSelectorKind::OldestHeadOfLine,
                                                     LinkSelectorKind::RoundRobinNonEmpty,
                                                     LinkSelectorKind::LowestNeighborId};

std::string to_string(PolicyKind kind);
std::string to_string(LinkSelectorKind kind);
PolicyKind parse_policy(const std::string& name);
LinkSelectorKind parse_selector(const std::string& name);

// The part of a packet sitting in one queue.
struct Fragment {
    PacketId packet = 0;
    Rational remaining;
    Slot arrived = 0;        // a_i^p at this queue
    Slot eligible_from = 0;  // first slot it may be served
    Slot injected_at = 0;
    int hop = 1;             // 1-based position of this queue on the path
    int path_hops = 1;       // d_p
    bool started = false;    // some of it already crossed this link

    int remaining_hops() const { return path_hops - hop + 1; }
    int hops_traversed() const { return hop - 1; }
};

struct QueueState {
    NodeId owner = 0;
    Link out_link;
    std::vector<Fragment> contents;

    bool has_eligible(Slot now) const;
    Rational total() const;
};

// Service order over the fragments eligible at `now`, as indices into
// queue.contents. A started fragment always comes first; the rest follow
// the policy key with ties broken by packet id.
std::vector<std::size_t> order_queue(PolicyKind policy, const QueueState& queue, Slot now);

// What a selector remembers between slots.
struct SelectorHistory {
    std::optional<std::size_t> last_served;  // index into the node's queues
};

// Index of the queue the node serves at `now`, or nullopt iff no queue has
// eligible data. `queues` are ordered by neighbor id.
std::optional<std::size_t> select_link(LinkSelectorKind selector, PolicyKind policy,
                                       std::span<const QueueState> queues, Slot now,
                                       const SelectorHistory& history);

}  // namespace aqsim

#endif  // AQSIM_POLICIES_HPP
