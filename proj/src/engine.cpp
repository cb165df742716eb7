#include "aqsim/engine.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace aqsim {

std::string to_string(LinkMode mode)
{
    return mode == LinkMode::Wireless ? "wireless" : "wireline";
}

std::string to_string(InjectionEligibility eligibility)
{
    return eligibility == InjectionEligibility::SameSlot ? "same-slot" : "next-slot";
}

LinkMode parse_link_mode(const std::string& name)
{
    if (name == "wireless") return LinkMode::Wireless;
    if (name == "wireline") return LinkMode::Wireline;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

InjectionEligibility parse_eligibility(const std::string& name)
{
    if (name == "same-slot") return InjectionEligibility::SameSlot;
    if (name == "next-slot") return InjectionEligibility::NextSlot;
    throw std::invalid_argument("unknown eligibility '" + name + "'");
}

std::string to_string(RecordKind kind)
{
    switch (kind) {
        case RecordKind::Inject: return "INJECT";
        case RecordKind::Send: return "SEND";
        case RecordKind::HopDone: return "HOP_DONE";
        case RecordKind::QLen: return "QLEN";
    }
    return "?";
}

void SimConfig::validate() const
{
    if (horizon < 0) throw std::invalid_argument("negative horizon");
    if (trace.horizon > horizon) throw std::invalid_argument("trace horizon exceeds simulation horizon");
    if (disciplines.size() != static_cast<std::size_t>(network.num_nodes())) {
        throw std::invalid_argument("need one policy/selector per node");
    }
    trace.validate(network);
    std::set<PacketId> ids;
    for (const auto& ev : trace.events) {
        if (!ids.insert(ev.packet.id).second) throw std::invalid_argument("duplicate packet id");
    }
}

Rational SimState::resident(PacketId packet) const
{
    Rational sum;
    for (const auto& node : queues) {
        for (const auto& q : node) {
            for (const auto& f : q.contents) {
                if (f.packet == packet) sum += f.remaining;
            }
        }
    }
    return sum;
}

SimState initial_state(const SimConfig& config)
{
    config.validate();
    const Network& net = config.network;
    SimState state;
    state.queues.resize(static_cast<std::size_t>(net.num_nodes()));
    for (NodeId i = 0; i < net.num_nodes(); ++i) {
        for (NodeId j : net.neighbors(i)) state.queues[static_cast<std::size_t>(i)].push_back(QueueState{i, {i, j}, {}});
    }
    state.selectors.resize(static_cast<std::size_t>(net.num_nodes()));
    return state;
}

namespace {

QueueState& queue_for(SimState& state, const Network& net, const Link& link)
{
    auto id = net.link_id(link.from, link.to);
    if (!id) throw std::logic_error("packet routed over a non-edge");
    return state.queues[static_cast<std::size_t>(link.from)][*id - net.first_link(link.from)];
}

struct Completion {
    PacketId packet;
    int hop;
    Link link;
};

// Sends up to `capacity` from `queue` in policy order; returns the hops completed.
void serve(QueueState& queue, PolicyKind policy, Rational capacity, Slot now, EventLog& log,
           std::vector<Completion>& completed)
{
    auto order = order_queue(policy, queue, now);
    if (order.empty()) return;
    bool logged = false;
    for (std::size_t k : order) {
        Fragment& f = queue.contents[k];
        if (capacity.is_zero()) {
            if (!logged) log.records.push_back({now, RecordKind::Send, queue.owner, queue.out_link.to, f.packet, Rational(0), f.hop});
            break;
        }
        Rational amount = min(capacity, f.remaining);
        f.remaining -= amount;
        capacity -= amount;
        f.started = true;
        log.records.push_back({now, RecordKind::Send, queue.owner, queue.out_link.to, f.packet, amount, f.hop});
        logged = true;
        if (f.remaining.is_zero()) completed.push_back({f.packet, f.hop, queue.out_link});
    }
    std::erase_if(queue.contents, [](const Fragment& f) { return f.remaining.is_zero(); });
}

}  // namespace

void step(SimState& state, const SimConfig& config, EventLog& log)
{
    const Network& net = config.network;
    const Slot t = state.slot;
    if (t >= config.horizon) throw std::logic_error("step past horizon");

    // Injections.
    const auto& events = config.trace.events;
    for (; state.next_event < events.size() && events[state.next_event].slot == t; ++state.next_event) {
        const Packet& p = events[state.next_event].packet;
        state.packet_index[p.id] = state.packets.size();
        state.packets.push_back(PacketState{p, {HopRecord{t, std::nullopt}}, false});
        Fragment f;
        f.packet = p.id;
        f.remaining = p.size;
        f.arrived = t;
        f.eligible_from = config.eligibility == InjectionEligibility::SameSlot ? t : t + 1;
        f.injected_at = t;
        f.hop = 1;
        f.path_hops = static_cast<int>(p.path.hops());
        queue_for(state, net, p.path.links.front()).contents.push_back(f);
        log.records.push_back({t, RecordKind::Inject, p.path.source(), p.path.links.front().to, p.id, p.size,
                               static_cast<int>(p.path.hops())});
    }

    // Transmissions. Forwarded data only becomes eligible next slot, so the
    // order in which nodes act does not matter.
    std::vector<Completion> completed;
    for (NodeId i = 0; i < net.num_nodes(); ++i) {
        auto& queues = state.queues[static_cast<std::size_t>(i)];
        if (queues.empty()) continue;
        const auto& discipline = config.disciplines[static_cast<std::size_t>(i)];
        const LinkId first = net.first_link(i);
        completed.clear();
        if (config.mode == LinkMode::Wireless) {
            auto& history = state.selectors[static_cast<std::size_t>(i)];
            auto pick = select_link(discipline.selector, discipline.policy, queues, t, history);
            if (pick) {
                history.last_served = *pick;
                serve(queues[*pick], discipline.policy, config.schedule.rate(first + *pick, t), t, log, completed);
            }
        } else {
            for (std::size_t k = 0; k < queues.size(); ++k) {
                if (!queues[k].has_eligible(t)) continue;
                serve(queues[k], discipline.policy, config.schedule.rate(first + k, t), t, log, completed);
            }
        }

        for (const auto& c : completed) {
            PacketState& ps = state.packets[state.packet_index.at(c.packet)];
            ps.hops.back().departure = t;
            log.records.push_back({t, RecordKind::HopDone, c.link.from, c.link.to, c.packet, ps.packet.size, c.hop});
            if (static_cast<std::size_t>(c.hop) == ps.packet.path.hops()) {
                ps.delivered = true;
                continue;
            }
            ps.hops.push_back(HopRecord{t, std::nullopt});
            Fragment f;
            f.packet = c.packet;
            f.remaining = ps.packet.size;
            f.arrived = t;
            f.eligible_from = t + 1;
            f.injected_at = ps.packet.injected_at;
            f.hop = c.hop + 1;
            f.path_hops = static_cast<int>(ps.packet.path.hops());
            queue_for(state, net, ps.packet.path.links[static_cast<std::size_t>(c.hop)]).contents.push_back(f);
        }
    }

    for (const auto& node : state.queues) {
        for (const auto& q : node) {
            if (q.contents.empty()) continue;
            log.records.push_back({t, RecordKind::QLen, q.owner, q.out_link.to, -1, q.total(), 0});
        }
    }
    ++state.slot;
}

SimResult run(const SimConfig& config)
{
    SimResult result{EventLog{config.horizon, {}}, initial_state(config)};
    while (result.state.slot < config.horizon) step(result.state, config, result.log);
    return result;
}

std::optional<LogDivergence> compare_logs(const EventLog& a, const EventLog& b)
{
    const std::size_t n = std::min(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (!(a.records[k] == b.records[k])) return LogDivergence{std::min(a.records[k].slot, b.records[k].slot), k};
    }
    if (a.records.size() != b.records.size()) {
        const auto& longer = a.records.size() > n ? a.records : b.records;
        return LogDivergence{longer[n].slot, n};
    }
    if (a.horizon != b.horizon) return LogDivergence{std::min(a.horizon, b.horizon), n};
    return std::nullopt;
}

void write_event_log(std::ostream& out, const EventLog& log)
{
    out << "slot,kind,node,peer,packet,amount,hop\n";
    for (const auto& r : log.records) {
        out << r.slot << ',' << to_string(r.kind) << ',' << r.node << ',' << r.peer << ',' << r.packet << ','
            << r.amount.str() << ',' << r.hop << '\n';
    }
}

LogAudit audit_log(const SimConfig& config, const EventLog& log)
{
    const Network& net = config.network;
    LogAudit audit;

    std::map<PacketId, const Packet*> packets;
    for (const auto& ev : config.trace.events) packets[ev.packet.id] = &ev.packet;

    std::map<std::pair<PacketId, int>, Rational> hop_sent;
    std::map<PacketId, std::pair<int, Slot>> last_done;  // (hop, slot)
    std::map<Link, Rational> prev_qlen;
    std::size_t k = 0;

    for (Slot t = 0; t < log.horizon; ++t) {
        std::map<Link, Rational> sent, injected, forwarded, qlen;
        std::set<NodeId> senders;
        for (; k < log.records.size() && log.records[k].slot == t; ++k) {
            const LogRecord& r = log.records[k];
            const Link link{r.node, r.peer};
            switch (r.kind) {
                case RecordKind::Inject: injected[link] += r.amount; break;
                case RecordKind::Send: {
                    sent[link] += r.amount;
                    senders.insert(r.node);
                    hop_sent[{r.packet, r.hop}] += r.amount;
                    // Hop i+1 may only be served after hop i completed in an earlier slot.
                    if (r.hop > 1) {
                        auto it = last_done.find(r.packet);
                        if (it == last_done.end() || it->second.first != r.hop - 1 || it->second.second >= t) {
                            ++audit.broken_hops;
                        }
                    }
                    break;
                }
                case RecordKind::HopDone: {
                    auto pk = packets.find(r.packet);
                    if (pk == packets.end()) {
                        ++audit.broken_hops;
                        break;
                    }
                    const Packet& p = *pk->second;
                    if (hop_sent[{r.packet, r.hop}] != p.size) ++audit.broken_hops;
                    if (r.hop > 1 && (last_done.count(r.packet) == 0 || last_done[r.packet].first != r.hop - 1)) {
                        ++audit.broken_hops;
                    }
                    last_done[r.packet] = {r.hop, t};
                    if (static_cast<std::size_t>(r.hop) < p.path.hops()) {
                        forwarded[p.path.links[static_cast<std::size_t>(r.hop)]] += p.size;
                    }
                    break;
                }
                case RecordKind::QLen: qlen[link] = r.amount; break;
            }
        }

        // Work conservation: everything carried over from t-1 is eligible
        // now, plus same-slot injections.
        std::set<NodeId> backlogged;
        for (const auto& [link, q] : prev_qlen) {
            if (q.sign() > 0) backlogged.insert(link.from);
        }
        if (config.eligibility == InjectionEligibility::SameSlot) {
            for (const auto& [link, q] : injected) backlogged.insert(link.from);
        }
        for (NodeId node : backlogged) {
            if (senders.count(node) == 0) ++audit.idle_with_backlog;
        }

        std::map<NodeId, int> positive_links;
        for (const auto& [link, amount] : sent) {
            auto id = net.link_id(link.from, link.to);
            if (!id || amount > config.schedule.rate(*id, t)) ++audit.capacity_violations;
            if (amount.sign() > 0) ++positive_links[link.from];
        }
        for (const auto& [node, count] : positive_links) {
            if (count > 1) ++audit.multi_link_sends;
        }

        // end content = previous + injected + forwarded in - sent, exactly.
        std::set<Link> touched;
        for (const auto* m : {&prev_qlen, &injected, &forwarded, &sent, &qlen}) {
            for (const auto& [link, q] : *m) touched.insert(link);
        }
        auto get = [](const std::map<Link, Rational>& m, const Link& l) {
            auto it = m.find(l);
            return it == m.end() ? Rational(0) : it->second;
        };
        for (const Link& link : touched) {
            Rational expect = get(prev_qlen, link) + get(injected, link) + get(forwarded, link) - get(sent, link);
            if (expect != get(qlen, link) || expect.sign() < 0) ++audit.conservation_errors;
        }
        prev_qlen = std::move(qlen);
    }
    return audit;
}

}  // namespace aqsim
