// engine.hpp - Slot-stepped simulation of the adversary against per-node
// work-conserving disciplines.
//
// Each slot runs, in order:
//   1. the adversary fixes r_ij(t) for every link;
//   2. this slot's injections enter their first queue (a_1 = t);
//   3. every node picks one queue (wireless) or all non-empty queues
//      (wireline) and sends up to r_ij(t) of fluid in policy order;
//   4. a packet whose last fragment crossed a link records f_i = t and
//      arrives downstream with a_{i+1} = t, eligible from t + 1;
//   5. the log receives the slot's records.

#ifndef AQSIM_ENGINE_HPP
#define AQSIM_ENGINE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "aqsim/adversary.hpp"
#include "aqsim/network.hpp"
#include "aqsim/policies.hpp"

namespace aqsim {

enum class LinkMode { Wireless, Wireline };
enum class InjectionEligibility { SameSlot, NextSlot };

std::string to_string(LinkMode mode);
std::string to_string(InjectionEligibility eligibility);
LinkMode parse_link_mode(const std::string& name);
InjectionEligibility parse_eligibility(const std::string& name);

struct NodeDiscipline {
    PolicyKind policy = PolicyKind::FIFO;
    LinkSelectorKind selector = LinkSelectorKind::OldestHeadOfLine;
};

struct SimConfig {
    Network network;
    RateSchedule schedule;
    InjectionTrace trace;
    std::vector<NodeDiscipline> disciplines;  // one per node
    Slot horizon = 0;
    LinkMode mode = LinkMode::Wireless;
    InjectionEligibility eligibility = InjectionEligibility::SameSlot;
    std::uint64_t seed = 0;

    // Throws std::invalid_argument on a malformed configuration.
    void validate() const;
};

struct HopRecord {
    Slot arrival = 0;
    std::optional<Slot> departure;
};

struct PacketState {
    Packet packet;
    std::vector<HopRecord> hops;  // one per hop reached so far
    bool delivered = false;
};

struct SimState {
    Slot slot = 0;
    std::vector<std::vector<QueueState>> queues;  // [node][neighbor index]
    std::vector<PacketState> packets;
    std::unordered_map<PacketId, std::size_t> packet_index;
    std::vector<SelectorHistory> selectors;
    std::size_t next_event = 0;

    // Amount of `packet` still held in queues (not yet delivered).
    Rational resident(PacketId packet) const;
};

enum class RecordKind { Inject, Send, HopDone, QLen };

std::string to_string(RecordKind kind);

// One CSV row. Field use per kind:
//   INJECT   node = source, peer = first next hop, amount = size, hop = d_p
//   SEND     node -> peer carried `amount` of `packet` at 1-based `hop`;
//            a selected link whose rate is 0 gets one SEND of amount 0
//   HOP_DONE last fragment of `packet` crossed hop `hop`; amount = size
//   QLEN     end-of-slot content of queue node -> peer (non-empty only);
//            packet = -1, hop = 0
struct LogRecord {
    Slot slot = 0;
    RecordKind kind = RecordKind::Inject;
    NodeId node = 0;
    NodeId peer = 0;
    PacketId packet = -1;
    Rational amount;
    int hop = 0;

    friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct EventLog {
    Slot horizon = 0;
    std::vector<LogRecord> records;  // append-only, slot order
};

SimState initial_state(const SimConfig& config);

// Advances `state` by one slot, appending that slot's records to `log`.
void step(SimState& state, const SimConfig& config, EventLog& log);

struct SimResult {
    EventLog log;
    SimState state;
};

SimResult run(const SimConfig& config);

struct LogDivergence {
    Slot slot = 0;
    std::size_t record = 0;  // index of the first differing record
};

// nullopt when both logs are identical record by record.
std::optional<LogDivergence> compare_logs(const EventLog& a, const EventLog& b);

void write_event_log(std::ostream& out, const EventLog& log);

// Independent checks recomputed from the log alone.
struct LogAudit {
    // Slots where a node had eligible data but logged no SEND.
    std::size_t idle_with_backlog = 0;
    // Slots where a node sent positive amounts on two or more links.
    std::size_t multi_link_sends = 0;
    // Link-slots whose total SEND amount exceeds r_ij(t).
    std::size_t capacity_violations = 0;
    // Hops whose SEND amounts do not add up to the packet size, or arrive
    // at a time other than the previous hop's departure.
    std::size_t broken_hops = 0;
    // Queue contents not explained by injections minus forwarded data.
    std::size_t conservation_errors = 0;

    bool clean(LinkMode mode) const
    {
        return idle_with_backlog == 0 && (mode == LinkMode::Wireline || multi_link_sends == 0) &&
               capacity_violations == 0 && broken_hops == 0 && conservation_errors == 0;
    }
};

LogAudit audit_log(const SimConfig& config, const EventLog& log);

}  // namespace aqsim

#endif  // AQSIM_ENGINE_HPP
