#include "aqsim/metrics.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

namespace aqsim {

std::map<PacketId, PacketTimeline> packet_timelines(const EventLog& log)
{
    std::map<PacketId, PacketTimeline> out;
    for (const auto& r : log.records) {
        if (r.kind == RecordKind::Inject) {
            PacketTimeline& tl = out[r.packet];
            tl.packet = r.packet;
            tl.path_hops = r.hop;
            tl.queue_nodes.push_back(r.node);
            tl.hops.push_back({r.slot, std::nullopt});
        } else if (r.kind == RecordKind::HopDone) {
            PacketTimeline& tl = out.at(r.packet);
            tl.hops.back().departure = r.slot;
            if (r.hop < tl.path_hops) {
                tl.queue_nodes.push_back(r.peer);
                tl.hops.push_back({r.slot, std::nullopt});
            }
        }
    }
    return out;
}

namespace {

HopDelay hop_delay(const PacketTimeline& tl, std::size_t index, Slot horizon)
{
    const HopRecord& h = tl.hops[index];
    HopDelay d;
    d.packet = tl.packet;
    d.hop = static_cast<int>(index) + 1;
    d.node = tl.queue_nodes[index];
    d.open = !h.departure.has_value();
    d.delay = (d.open ? horizon : *h.departure) - h.arrival;
    return d;
}

}  // namespace

HopDelay per_hop_delay(const EventLog& log, PacketId packet, int hop)
{
    auto timelines = packet_timelines(log);
    auto it = timelines.find(packet);
    if (it == timelines.end()) throw std::out_of_range("unknown packet " + std::to_string(packet));
    if (hop < 1 || static_cast<std::size_t>(hop) > it->second.hops.size()) {
        throw std::out_of_range("packet " + std::to_string(packet) + " never reached hop " + std::to_string(hop));
    }
    return hop_delay(it->second, static_cast<std::size_t>(hop - 1), log.horizon);
}

DelayStats delay_stats(const EventLog& log)
{
    DelayStats stats;
    for (const auto& [id, tl] : packet_timelines(log)) {
        for (std::size_t k = 0; k < tl.hops.size(); ++k) {
            HopDelay d = hop_delay(tl, k, log.horizon);
            if (!stats.queueing.argmax || d.delay > stats.queueing.q) {
                stats.queueing.q = d.delay;
                stats.queueing.argmax = d;
            }
            stats.hop_delays.push_back(d);
        }
        if (tl.delivered()) {
            Slot lat = *tl.hops.back().departure - tl.hops.front().arrival;
            stats.latency[id] = lat;
            stats.max_latency = std::max(stats.max_latency, lat);
        } else {
            ++stats.undelivered;
        }
    }
    return stats;
}

MaxQueueing max_queueing(const EventLog& log)
{
    return delay_stats(log).queueing;
}

Slot busy_period_start(const EventLog& log, const Link& link, Slot t)
{
    std::set<Slot> busy;
    for (const auto& r : log.records) {
        if (r.node != link.from || r.peer != link.to) continue;
        if ((r.kind == RecordKind::QLen || r.kind == RecordKind::Send) && r.amount.sign() > 0) busy.insert(r.slot);
    }
    if (busy.count(t) == 0) throw std::invalid_argument("queue empty at slot " + std::to_string(t));
    Slot s = t - 1;
    while (s >= 0 && busy.count(s) != 0) --s;
    return s;
}

TheoremBounds theorem_bounds(int d, std::int64_t b, std::int64_t delta, const Rational& r)
{
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    const Rational slack = Rational(1) - r * Rational(d);
    if (slack.sign() <= 0) throw BoundUndefined();
    return {(Rational(delta) * Rational(b) - r) / slack, Rational(d) * Rational(b) * Rational(delta) / slack};
}

Rational epsilon_gap(int d)
{
    if (d < 2) throw std::invalid_argument("epsilon gap needs d >= 2");
    return Rational(1, d - 1) - Rational(1, d);
}

namespace {

EventLog prefix(const EventLog& log, Slot horizon)
{
    EventLog out{horizon, {}};
    for (const auto& r : log.records) {
        if (r.slot >= horizon) break;
        out.records.push_back(r);
    }
    return out;
}

}  // namespace

BoundReport stability_report(const EventLog& log, const Network& network, const AdversaryBudget& budget, int d)
{
    BoundReport rep;
    rep.d = d;
    rep.b = budget.b;
    rep.delta = static_cast<std::int64_t>(max_degree(network));
    rep.r = budget.r;

    DelayStats stats = delay_stats(log);
    rep.q_emp = stats.queueing.q;
    rep.q_argmax = stats.queueing.argmax;
    rep.lat_emp = stats.max_latency;
    rep.delivered = stats.latency.size();
    rep.undelivered = stats.undelivered;

    try {
        rep.bounds = theorem_bounds(d, budget.b, rep.delta, budget.r);
    } catch (const BoundUndefined&) {
        rep.bounds.reset();
    }

    if (rep.bounds) {
        if (rep.q_argmax) {
            auto deg = static_cast<std::int64_t>(network.degree(rep.q_argmax->node));
            rep.node_q_bound = theorem_bounds(d, budget.b, deg, budget.r).q_bound;
        }
        bool ok = Rational(rep.q_emp) <= rep.bounds->q_bound;
        for (const auto& [id, lat] : stats.latency) ok = ok && Rational(lat) <= rep.bounds->latency_bound;
        rep.compliant = ok;
    } else {
        for (Slot p : {log.horizon / 4, log.horizon / 2, log.horizon}) {
            rep.growth.emplace_back(p, max_queueing(prefix(log, p)).q);
        }
    }
    return rep;
}

void write_report(std::ostream& out, const BoundReport& rep)
{
    out << "d = " << rep.d << "\n";
    out << "b = " << rep.b << "\n";
    out << "delta = " << rep.delta << "\n";
    out << "r = " << rep.r.str() << "\n";
    if (rep.bounds) {
        out << "q_bound = " << rep.bounds->q_bound.str() << "\n";
        out << "latency_bound = " << rep.bounds->latency_bound.str() << "\n";
    } else {
        out << "q_bound = undefined\n";
        out << "latency_bound = undefined\n";
    }
    if (rep.node_q_bound) out << "node_q_bound = " << rep.node_q_bound->str() << "\n";
    out << "q_emp = " << rep.q_emp << "\n";
    if (rep.q_argmax) {
        out << "q_argmax = packet " << rep.q_argmax->packet << " hop " << rep.q_argmax->hop << " node "
            << rep.q_argmax->node << (rep.q_argmax->open ? " open" : "") << "\n";
    }
    out << "lat_emp = " << rep.lat_emp << "\n";
    out << "compliant = " << (rep.bounds ? (rep.compliant ? "true" : "false") : "n/a") << "\n";
    out << "delivered = " << rep.delivered << "\n";
    out << "undelivered = " << rep.undelivered << "\n";
    for (const auto& [p, q] : rep.growth) out << "growth." << p << " = " << q << "\n";
}

std::string report_csv_header()
{
    return "d,b,delta,r,q_bound,latency_bound,q_emp,lat_emp,compliant,undelivered";
}

std::string report_csv_row(const BoundReport& rep)
{
    std::ostringstream os;
    os << rep.d << ',' << rep.b << ',' << rep.delta << ',' << rep.r.str() << ',';
    if (rep.bounds) {
        os << rep.bounds->q_bound.str() << ',' << rep.bounds->latency_bound.str() << ',';
    } else {
        os << "undefined,undefined,";
    }
    os << rep.q_emp << ',' << rep.lat_emp << ',' << (rep.bounds ? (rep.compliant ? "true" : "false") : "n/a") << ','
       << rep.undelivered;
    return os.str();
}

void write_delay_stats(std::ostream& out, const DelayStats& stats)
{
    out << "packet,hop,node,delay,open\n";
    for (const auto& d : stats.hop_delays) {
        out << d.packet << ',' << d.hop << ',' << d.node << ',' << d.delay << ',' << (d.open ? 1 : 0) << '\n';
    }
}

}  // namespace aqsim
