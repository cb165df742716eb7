// metrics.hpp - Per-hop delays, latency, busy periods and the closed-form
// stability/latency bounds, all computed from an EventLog.
//
// For a packet p at the i-th queue of its path, Q_i^p = f_i^p - a_i^p with
// a_1^p the injection slot and a_{i+1}^p = f_i^p. Hops still open at the end
// of the run count with delay horizon - a_i^p, a lower bound on their final
// delay.

#ifndef AQSIM_METRICS_HPP
#define AQSIM_METRICS_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqsim/adversary.hpp"
#include "aqsim/engine.hpp"

namespace aqsim {

struct PacketTimeline {
    PacketId packet = 0;
    int path_hops = 0;
    std::vector<NodeId> queue_nodes;  // node holding hop i (0-based index i-1)
    std::vector<HopRecord> hops;      // hops reached so far
    bool delivered() const { return static_cast<int>(hops.size()) == path_hops && hops.back().departure.has_value(); }
};

std::map<PacketId, PacketTimeline> packet_timelines(const EventLog& log);

struct HopDelay {
    PacketId packet = 0;
    int hop = 0;  // 1-based
    NodeId node = 0;
    Slot delay = 0;
    bool open = false;  // not departed by the end of the log
};

// Throws std::out_of_range when the packet never reached hop `hop`.
HopDelay per_hop_delay(const EventLog& log, PacketId packet, int hop);

struct MaxQueueing {
    Slot q = 0;
    std::optional<HopDelay> argmax;  // first hop attaining q
};

MaxQueueing max_queueing(const EventLog& log);

struct DelayStats {
    std::vector<HopDelay> hop_delays;
    MaxQueueing queueing;
    std::map<PacketId, Slot> latency;  // delivered packets: f_{d_p} - a_1
    Slot max_latency = 0;
    std::size_t undelivered = 0;
};

DelayStats delay_stats(const EventLog& log);

// Start t_B of the busy period of queue `link` containing slot t: the oldest
// slot before t such that the queue is non-empty in every slot of (t_B, t].
// A queue is non-empty in a slot when it sent something or held data at the
// slot's end. Returns -1 when the queue was busy since slot 0; throws
// std::invalid_argument when the queue is empty at t.
Slot busy_period_start(const EventLog& log, const Link& link, Slot t);

struct BoundUndefined : std::domain_error {
    BoundUndefined() : std::domain_error("bound undefined: stability not guaranteed for r >= 1/d") {}
};

struct TheoremBounds {
    Rational q_bound;        // (delta*b - r) / (1 - r*d)
    Rational latency_bound;  // d*b*delta / (1 - r*d)
};

// Throws BoundUndefined unless r < 1/d.
TheoremBounds theorem_bounds(int d, std::int64_t b, std::int64_t delta, const Rational& r);

// 1/(d-1) - 1/d, the distance between the rate below which every
// work-conserving network is stable and the rate above which some is not.
// Throws std::invalid_argument for d < 2.
Rational epsilon_gap(int d);

struct BoundReport {
    int d = 1;
    std::int64_t b = 1;
    std::int64_t delta = 0;
    Rational r;
    std::optional<TheoremBounds> bounds;  // present iff r < 1/d
    // (|N(i)|*b - r)/(1 - r*d) at the node attaining the empirical Q.
    std::optional<Rational> node_q_bound;
    Slot q_emp = 0;
    std::optional<HopDelay> q_argmax;
    Slot lat_emp = 0;
    bool compliant = false;  // meaningful only when bounds are present
    std::size_t delivered = 0;
    std::size_t undelivered = 0;
    // (prefix horizon, Q over that prefix) for T/4, T/2, T when r >= 1/d.
    std::vector<std::pair<Slot, Slot>> growth;
};

BoundReport stability_report(const EventLog& log, const Network& network, const AdversaryBudget& budget, int d);

// Flat `key = value` block.
void write_report(std::ostream& out, const BoundReport& report);
// d,b,delta,r_num/r_den,q_bound,latency_bound,q_emp,lat_emp,compliant,undelivered
std::string report_csv_header();
std::string report_csv_row(const BoundReport& report);

void write_delay_stats(std::ostream& out, const DelayStats& stats);

}  // namespace aqsim

#endif  // AQSIM_METRICS_HPP
