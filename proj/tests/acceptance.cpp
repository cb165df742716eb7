// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any gating
// criterion fails. Criterion 8 is informational only.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aqsim/adversary.hpp"
#include "aqsim/engine.hpp"
#include "aqsim/metrics.hpp"
#include "aqsim/scenarios.hpp"

using namespace aqsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

void report(int id, const char* title, const Outcome& o, bool gating = true)
{
    const char* verdict = gating ? (o.pass ? "PASS" : "FAIL") : (o.pass ? "INFO-YES" : "INFO-NO");
    std::printf("criterion %d %-8s %s: %s\n", id, verdict, title, o.detail.c_str());
    std::fflush(stdout);
}

// ---------------------------------------------------------------------------
// 1 + 4

struct ComplianceTally {
    int runs = 0;
    int compliant = 0;
    std::size_t packets = 0;
    Slot slots = 0;
    std::vector<std::string> failures;
};

struct AuditTally {
    std::size_t idle = 0;
    std::size_t multi = 0;
    std::size_t other = 0;
};

void criteria_1_and_4(int scenarios, Outcome& c1, Outcome& c4)
{
    static const char* const modes[] = {"constant-one", "uniform-random", "on-off"};
    std::map<std::string, ComplianceTally> by_mode;
    AuditTally audit;
    std::map<int, int> policy_seen, selector_seen;

    for (int s = 0; s < scenarios; ++s) {
        const std::uint64_t seed = 0xC0FFEEull + static_cast<std::uint64_t>(s);
        std::mt19937_64 rng(seed);
        const auto n = static_cast<NodeId>(std::uniform_int_distribution<int>(2, 30)(rng));
        const int d = std::uniform_int_distribution<int>(2, 6)(rng);
        const std::int64_t b = std::uniform_int_distribution<std::int64_t>(1, 5)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(1, 9)(rng);
        const Rational r(k, 10 * d);
        const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
        const std::int64_t extra = std::uniform_int_distribution<std::int64_t>(0, n / 4)(rng);
        const std::int64_t m = std::min(pairs, static_cast<std::int64_t>(n) - 1 + extra);
        const double density = static_cast<double>(m) / static_cast<double>(pairs);
        RandomScenarioOptions opts;
        opts.schedule_mode = modes[s % 3];
        const auto budget = AdversaryBudget::make(b, r);

        // Same seed, same network: probe it for the degree, then size the horizon.
        const auto probe = random_scenario(n, d, density, budget, seed, 0, opts);
        const auto delta = static_cast<std::int64_t>(max_degree(probe.network));
        const TheoremBounds bounds = theorem_bounds(d, b, delta, r);
        const Slot horizon = std::max<Slot>(200, 20 * bounds.latency_bound.ceil());

        const auto bundle = random_scenario(n, d, density, budget, seed, horizon, opts);
        for (const auto& disc : bundle.disciplines) {
            ++policy_seen[static_cast<int>(disc.policy)];
            ++selector_seen[static_cast<int>(disc.selector)];
        }
        const SimConfig config = make_sim_config(bundle, horizon);
        const auto result = run(config);
        const BoundReport rep = stability_report(result.log, bundle.network, budget, d);

        ComplianceTally& tally = by_mode[bundle.schedule_mode];
        ++tally.runs;
        tally.packets += bundle.trace.events.size();
        tally.slots += horizon;
        if (rep.compliant) {
            ++tally.compliant;
        } else if (tally.failures.size() < 3) {
            std::ostringstream os;
            os << "seed " << seed << " n=" << n << " d=" << d << " b=" << b << " r=" << r << " delta=" << delta
               << " q_emp=" << rep.q_emp << " q_bound=" << bounds.q_bound << " lat_emp=" << rep.lat_emp
               << " latency_bound=" << bounds.latency_bound;
            tally.failures.push_back(os.str());
        }

        const LogAudit a = audit_log(config, result.log);
        audit.idle += a.idle_with_backlog;
        audit.multi += a.multi_link_sends;
        audit.other += a.capacity_violations + a.broken_hops + a.conservation_errors;
    }

    std::ostringstream os;
    bool all = true;
    int total = 0;
    for (const auto& [mode, t] : by_mode) {
        os << mode << " " << t.compliant << "/" << t.runs << " (" << t.packets << " packets, " << t.slots
           << " slots); ";
        all = all && t.compliant == t.runs;
        total += t.runs;
    }
    const bool coverage = policy_seen.size() == std::size(kAllPolicies) && selector_seen.size() == std::size(kAllSelectors);
    os << "policies seen " << policy_seen.size() << "/5, selectors seen " << selector_seen.size() << "/3";
    for (const auto& [mode, t] : by_mode) {
        for (const auto& f : t.failures) os << "\n    " << mode << " counterexample: " << f;
    }
    c1.pass = all && coverage && total >= 500;
    c1.detail = os.str();

    std::ostringstream os4;
    os4 << "idle-with-backlog slots " << audit.idle << ", wireless multi-link slots " << audit.multi
        << ", other audit findings " << audit.other << " over " << total << " runs";
    c4.pass = audit.idle == 0 && audit.multi == 0 && audit.other == 0;
    c4.detail = os4.str();
}

// ---------------------------------------------------------------------------
// 2

Network small_network(std::mt19937_64& rng)
{
    const auto n = static_cast<NodeId>(std::uniform_int_distribution<int>(2, 5)(rng));
    Network net(n, 3);
    for (NodeId i = 1; i < n; ++i) net.add_edge(std::uniform_int_distribution<NodeId>(0, i - 1)(rng), i);
    for (int e = 0; e < 2; ++e) {
        NodeId i = std::uniform_int_distribution<NodeId>(0, n - 1)(rng);
        NodeId j = std::uniform_int_distribution<NodeId>(0, n - 1)(rng);
        if (i != j && !net.has_edge(i, j)) net.add_edge(i, j);
    }
    return net;
}

Outcome criterion_2(int tuples)
{
    int disagreements = 0, admissible = 0, fraction_cases = 0;
    for (int s = 0; s < tuples; ++s) {
        std::mt19937_64 rng(0xAD0000ull + static_cast<std::uint64_t>(s));
        const Network net = small_network(rng);
        const Slot T = std::uniform_int_distribution<Slot>(1, 30)(rng);

        std::map<std::pair<Slot, LinkId>, Rational> entries;
        for (Slot t = 0; t < T; ++t) {
            for (LinkId l = 0; l < net.num_links(); ++l) {
                entries[{t, l}] = Rational(std::uniform_int_distribution<std::int64_t>(0, 4)(rng), 4);
            }
        }
        const RateSchedule schedule = RateSchedule::table(net, entries);
        const auto budget = AdversaryBudget::make(std::uniform_int_distribution<std::int64_t>(1, 3)(rng),
                                                  Rational(std::uniform_int_distribution<std::int64_t>(0, 9)(rng), 10));

        AdmissibilityWitness w(net, T);
        const bool break_fractions = std::uniform_int_distribution<int>(0, 9)(rng) == 0;
        for (Slot t = 0; t < T; ++t) {
            for (NodeId i = 0; i < net.num_nodes(); ++i) {
                std::int64_t left = 6;
                for (std::size_t q = 0; q < net.degree(i); ++q) {
                    std::int64_t take = q + 1 == net.degree(i) ? left : std::uniform_int_distribution<std::int64_t>(0, left)(rng);
                    left -= take;
                    w.at(net.first_link(i) + q, t) = Rational(take, 6);
                }
            }
        }
        if (break_fractions) {
            ++fraction_cases;
            const Slot t = std::uniform_int_distribution<Slot>(0, T - 1)(rng);
            const LinkId l = std::uniform_int_distribution<LinkId>(0, net.num_links() - 1)(rng);
            w.at(l, t) = w.at(l, t) + Rational(1, 3);
        }

        InjectionTrace trace{T, {}};
        const int packets = std::uniform_int_distribution<int>(0, 12)(rng);
        for (int p = 0; p < packets; ++p) {
            std::vector<NodeId> nodes{std::uniform_int_distribution<NodeId>(0, net.num_nodes() - 1)(rng)};
            const int len = std::uniform_int_distribution<int>(1, 3)(rng);
            for (int h = 0; h < len; ++h) {
                const auto& nb = net.neighbors(nodes.back());
                NodeId next = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)];
                if (std::find(nodes.begin(), nodes.end(), next) != nodes.end()) break;
                nodes.push_back(next);
            }
            if (nodes.size() < 2) continue;
            const Slot t = std::uniform_int_distribution<Slot>(0, T - 1)(rng);
            trace.events.push_back({t, Packet{0, Path::from_nodes(nodes), Rational(std::uniform_int_distribution<std::int64_t>(1, 8)(rng), 4), t}});
        }
        std::stable_sort(trace.events.begin(), trace.events.end(),
                         [](const auto& a, const auto& b) { return a.slot < b.slot; });
        for (std::size_t i = 0; i < trace.events.size(); ++i) trace.events[i].packet.id = static_cast<PacketId>(i);

        const auto fast = verify_witness(net, trace, schedule, budget, w);
        const auto slow = verify_witness_bruteforce(net, trace, schedule, budget, w);
        if (fast.admissible) ++admissible;
        if (fast.admissible != slow.admissible || fast.violation != slow.violation) ++disagreements;
    }
    std::ostringstream os;
    os << disagreements << " disagreements over " << tuples << " tuples (" << admissible << " admissible, "
       << fraction_cases << " with broken fractions)";
    return {disagreements == 0 && tuples >= 1000, os.str()};
}

// ---------------------------------------------------------------------------
// 3

Outcome criterion_3(int seeds)
{
    static const char* const modes[] = {"constant-one", "uniform-random", "on-off"};
    int failures = 0;
    std::size_t packets = 0;
    for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 0x6E0000ull + static_cast<std::uint64_t>(s);
        std::mt19937_64 rng(seed);
        const Network net = small_network(rng);
        const RateSchedule schedule = generate_rate_schedule(net, seed, modes[s % 3], s % 3 == 2 ? "3" : "");
        const auto budget = AdversaryBudget::make(std::uniform_int_distribution<std::int64_t>(1, 5)(rng),
                                                  Rational(std::uniform_int_distribution<std::int64_t>(0, 19)(rng), 20));
        const Slot T = std::uniform_int_distribution<Slot>(1, 60)(rng);
        const auto pool = random_path_pool(net, 3, 6, rng());
        const auto gen = generate_admissible_trace(net, schedule, budget, seed, T, pool);
        packets += gen.trace.events.size();
        if (!verify_witness(net, gen.trace, schedule, budget, gen.witness).admissible) ++failures;
    }
    std::ostringstream os;
    os << (seeds - failures) << "/" << seeds << " generated traces verify (" << packets << " packets)";
    return {failures == 0 && seeds >= 1000, os.str()};
}

// ---------------------------------------------------------------------------
// 5

Outcome criterion_5()
{
    int ok = 0, total = 0;
    std::ostringstream bad;
    for (int h : {3, 4}) {
        for (int k : {1, 2}) {
            for (int J : {0, 1, 2}) {
                ++total;
                const GadgetNetwork g = build_gadget({h, k, J});
                std::ostringstream manifest;
                write_gadget_manifest(manifest, g);

                std::int64_t expected_blocks = 0, level = 1;
                for (int j = 0; j <= J; ++j) {
                    expected_blocks += level;
                    level *= static_cast<std::int64_t>(h - 1) * k * h;
                }
                std::int64_t blocks = 0, nodes = 0;
                std::istringstream in(manifest.str());
                std::string line;
                while (std::getline(in, line)) {
                    std::istringstream ls(line);
                    std::string tag;
                    ls >> tag;
                    if (tag != "block") continue;
                    ++blocks;
                    std::string word;
                    while (ls >> word && word != "nodes") {}
                    while (ls >> word) ++nodes;
                }
                const bool good = blocks == expected_blocks && nodes == expected_blocks * (h - 1) &&
                                  fact1_check(g.network);
                if (good) ++ok;
                else bad << " (h=" << h << ",k=" << k << ",J=" << J << ": " << blocks << " blocks, " << nodes << " nodes)";
            }
        }
    }
    std::ostringstream os;
    os << ok << "/" << total << " gadgets match block/node counts and pass fact1_check" << bad.str();
    return {ok == total, os.str()};
}

// ---------------------------------------------------------------------------
// 6

Outcome criterion_6(int traces, Slot horizon)
{
    int equal = 0, total = 0;
    std::size_t packets = 0;
    std::ostringstream bad;
    for (int h : {3, 4}) {
        for (int k : {1, 2}) {
            for (int J : {0, 1, 2}) {
                const GadgetNetwork g = build_gadget({h, k, J});
                for (int s = 0; s < traces; ++s) {
                    const auto budget = AdversaryBudget::make(1 + s % 3, Rational(1 + s % 4, 2 * h));
                    const auto gen = gadget_traffic(g, budget, 0x6AD6E7ull + static_cast<std::uint64_t>(s), horizon);
                    const auto bundle = wireless_simulation_bundle(g, budget, gen.trace, gen.witness);
                    packets += gen.trace.events.size();
                    const auto v = equivalence_check(bundle, horizon);
                    ++total;
                    if (v.fact1 && v.equal) ++equal;
                    else if (bad.tellp() < 200) bad << " (h=" << h << ",k=" << k << ",J=" << J << ",trace " << s << ")";
                }
            }
        }
    }
    std::ostringstream os;
    os << equal << "/" << total << " gadget bundles give identical wireless and wireline logs over " << horizon
       << " slots (" << packets << " packets)" << bad.str();
    return {equal == total, os.str()};
}

// ---------------------------------------------------------------------------
// 7

Outcome criterion_7()
{
    int failures = 0;
    Rational prev(0);
    for (int d = 2; d <= 100; ++d) {
        const Rational eps = epsilon_gap(d);
        if (eps * Rational(d) * Rational(d - 1) != Rational(1)) ++failures;
        const Rational scaled = Rational(d) * Rational(d) * eps;
        if (!(scaled < Rational(1)) || !(scaled > prev)) ++failures;
        prev = scaled;
    }
    std::ostringstream os;
    os << failures << " failures for d in 2..100; d^2 eps(d) at d=100 is " << prev;
    return {failures == 0, os.str()};
}

// ---------------------------------------------------------------------------
// 8

Outcome criterion_8(int seeds)
{
    // Six-node line in the gadget's feed orientation, d = 3, r = 1/2 = 1/(d-1).
    Network net(6, 3);
    for (NodeId i = 0; i + 1 < 6; ++i) net.add_edge(i, i + 1);
    const int d = 3;
    const auto budget = AdversaryBudget::make(1, Rational(1, 2));
    const Slot T = 60;
    std::vector<Path> pool;
    for (NodeId i = 0; i + 1 < 6; ++i) {
        for (int len = 1; len <= d && i + len < 6; ++len) {
            std::vector<NodeId> nodes;
            for (int q = 0; q <= len; ++q) nodes.push_back(i + q);
            pool.push_back(Path::from_nodes(nodes));
        }
    }
    SearchSetup setup;
    setup.schedule = RateSchedule::constant_one(net);
    setup.path_pool = pool;

    int grew = 0;
    std::ostringstream os;
    for (int s = 0; s < seeds; ++s) {
        const auto res = search_adversary(net, budget, d, 2 * T, 40, 0x5EA7C4ull + static_cast<std::uint64_t>(s), setup);
        SimConfig c;
        c.network = net;
        c.schedule = setup.schedule;
        c.disciplines.assign(6, NodeDiscipline{});
        c.trace = res.trace;
        c.horizon = 2 * T;
        const Slot q2 = max_queueing(run(c).log).q;
        c.horizon = T;
        c.trace.horizon = T;
        c.trace.events.clear();
        for (const auto& ev : res.trace.events) {
            if (ev.slot < T) c.trace.events.push_back(ev);
        }
        const Slot q1 = max_queueing(run(c).log).q;
        if (q2 > q1) ++grew;
        if (s < 5) os << "Q(" << T << ")=" << q1 << " Q(" << 2 * T << ")=" << q2 << "; ";
    }
    os << grew << "/" << seeds << " seeds grow from T to 2T";
    return {2 * grew > seeds, os.str()};
}

}  // namespace

int main(int argc, char** argv)
{
    // Optional argument scales criterion 1 for quick local runs.
    const int scenarios = argc > 1 ? std::stoi(argv[1]) : 500;
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    bool ok = true;
    Outcome c1, c4;
    criteria_1_and_4(scenarios, c1, c4);
    report(1, "bound compliance", c1);
    ok = ok && c1.pass;
    std::fprintf(stderr, "[%.1fs]\n", elapsed());

    Outcome c2 = criterion_2(1000);
    report(2, "admissibility oracle equivalence", c2);
    ok = ok && c2.pass;

    Outcome c3 = criterion_3(1000);
    report(3, "generator soundness", c3);
    ok = ok && c3.pass;

    report(4, "work-conservation audit", c4);
    ok = ok && c4.pass;

    Outcome c5 = criterion_5();
    report(5, "gadget structure", c5);
    ok = ok && c5.pass;
    std::fprintf(stderr, "[%.1fs]\n", elapsed());

    Outcome c6 = criterion_6(20, 1000);
    report(6, "wireless/wireline equivalence", c6);
    ok = ok && c6.pass;
    std::fprintf(stderr, "[%.1fs]\n", elapsed());

    Outcome c7 = criterion_7();
    report(7, "gap formula", c7);
    ok = ok && c7.pass;

    Outcome c8 = criterion_8(20);
    report(8, "instability probing (non-gating)", c8, false);
    std::fprintf(stderr, "[%.1fs]\n", elapsed());

    std::printf("acceptance %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
}
