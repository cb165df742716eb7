// Small builders shared by the unit suites.

#ifndef AQSIM_TESTS_SUPPORT_HPP
#define AQSIM_TESTS_SUPPORT_HPP

#include <initializer_list>
#include <utility>
#include <vector>

#include "aqsim/adversary.hpp"
#include "aqsim/engine.hpp"
#include "aqsim/network.hpp"

namespace aqsim::testing {

inline Network line_network(NodeId n, int hops = 1)
{
    Network net(n, hops);
    for (NodeId i = 0; i + 1 < n; ++i) net.add_edge(i, i + 1);
    return net;
}

inline Network star_network(NodeId leaves)
{
    Network net(leaves + 1, 2);
    for (NodeId i = 1; i <= leaves; ++i) net.add_edge(0, i);
    return net;
}

inline InjectionEvent inject(Slot t, Rational size, std::vector<NodeId> nodes)
{
    return {t, Packet{0, Path::from_nodes(nodes), size, t}};
}

// Sorted by slot, ids in order.
inline InjectionTrace make_trace(Slot horizon, std::vector<InjectionEvent> events)
{
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.slot < b.slot; });
    for (std::size_t i = 0; i < events.size(); ++i) events[i].packet.id = static_cast<PacketId>(i);
    return {horizon, std::move(events)};
}

inline SimConfig make_config(const Network& net, InjectionTrace trace, Slot horizon,
                             RateSchedule schedule = {}, NodeDiscipline disc = {})
{
    SimConfig c;
    c.network = net;
    c.schedule = schedule.mode() == RateMode::ConstantOne ? RateSchedule::constant_one(net) : schedule;
    c.trace = std::move(trace);
    c.disciplines.assign(static_cast<std::size_t>(net.num_nodes()), disc);
    c.horizon = horizon;
    return c;
}

}  // namespace aqsim::testing

#endif  // AQSIM_TESTS_SUPPORT_HPP
