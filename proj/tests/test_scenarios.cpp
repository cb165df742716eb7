#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "aqsim/metrics.hpp"
#include "aqsim/scenarios.hpp"
#include "support.hpp"

using namespace aqsim;
using namespace aqsim::testing;

TEST_SUITE("scenarios") {

TEST_CASE("gadget sizes")
{
    CHECK(gadget_block_count({3, 1, 0}) == 1);
    CHECK(gadget_block_count({3, 1, 1}) == 7);
    CHECK(gadget_block_count({4, 2, 1}) == 1 + 24);
    CHECK(gadget_block_count({3, 1, 2}) == 1 + 6 + 36);
    CHECK_THROWS_AS(gadget_block_count({2, 1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(gadget_block_count({3, 0, 0}), std::invalid_argument);

    GadgetNetwork g0 = build_gadget({3, 1, 0});
    CHECK(g0.gadget_node_count() == 2);
    CHECK(g0.network.num_nodes() == 3);

    GadgetNetwork g1 = build_gadget({3, 1, 1});
    CHECK(g1.blocks.size() == 7);
    CHECK(g1.gadget_node_count() == 14);
    CHECK(g1.sink == 14);
    CHECK(g1.network.num_edges() == 14);
}

TEST_CASE("gadget structure")
{
    GadgetNetwork g = build_gadget({4, 1, 1});
    const int chain = 3;
    std::vector<int> fed(static_cast<std::size_t>(g.network.num_nodes()), 0);
    for (const Link& l : g.network.feeds()) ++fed[static_cast<std::size_t>(l.to)];
    for (const auto& blk : g.blocks) {
        CHECK(blk.nodes.size() == static_cast<std::size_t>(chain));
        CHECK(blk.level == (blk.id == 0 ? 0 : 1));
        for (std::size_t p = 0; p < blk.nodes.size(); ++p) {
            NodeId n = blk.nodes[p];
            CHECK(n == static_cast<NodeId>(blk.id * chain + p));
            CHECK(g.input_count(n) == 4 + (p > 0 ? 1 : 0));
            // Declared feeds cover the internal input and, above the leaves, every child.
            int expected = (p > 0 ? 1 : 0) + (g.is_leaf_block(blk.id) ? 0 : 4);
            CHECK(fed[static_cast<std::size_t>(n)] == expected);
        }
    }
    CHECK(fed[static_cast<std::size_t>(g.sink)] == 1);
    CHECK(fact1_check(g.network));

    std::ostringstream os;
    write_gadget_manifest(os, g);
    CHECK(os.str().rfind("block 0 level 0 nodes 0 1 2\nblock 1 level 1 nodes 3 4 5\n", 0) == 0);
    CHECK(os.str().find("sink " + std::to_string(g.sink)) != std::string::npos);
}

TEST_CASE("fact1 fails on a star")
{
    CHECK_FALSE(fact1_check(star_network(3)));
    CHECK(fact1_check(line_network(5)));
}

TEST_CASE("gadget path classification")
{
    GadgetNetwork g = build_gadget({3, 1, 1});
    // Block 1 feeds node 0; its chain is 2 -> 3 -> 0, then onward 0 -> 1.
    CHECK(classify_gadget_path(g, Path::from_nodes({2, 3})) == GadgetPathKind::BlockInput);
    CHECK(classify_gadget_path(g, Path::from_nodes({2, 3, 0})) == GadgetPathKind::Transit);
    CHECK(classify_gadget_path(g, Path::from_nodes({2, 3, 0, 1})) == GadgetPathKind::TransitOnward);
    CHECK_FALSE(classify_gadget_path(g, Path::from_nodes({3, 0, 1})));
    CHECK_FALSE(classify_gadget_path(g, Path::from_nodes({3, 2})));
    CHECK_FALSE(classify_gadget_path(g, Path::from_nodes({14, 1})));
    for (const Path& p : gadget_path_pool(g)) CHECK(classify_gadget_path(g, p).has_value());
}

TEST_CASE("wireless and wireline logs agree on gadget traffic")
{
    for (auto params : {GadgetParams{3, 1, 0}, GadgetParams{3, 1, 1}, GadgetParams{4, 1, 1}, GadgetParams{3, 2, 1}}) {
        GadgetNetwork g = build_gadget(params);
        auto budget = AdversaryBudget::make(2, Rational(1, 2 * params.h));
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            GeneratedTrace gen = gadget_traffic(g, budget, seed, 120);
            ScenarioBundle b = wireless_simulation_bundle(g, budget, gen.trace, gen.witness);
            CHECK(b.d == params.h);
            EquivalenceVerdict v = equivalence_check(b, 200);
            CHECK(v.fact1);
            CHECK(v.equal);
        }
    }
}

TEST_CASE("an empty gadget trace is trivially equivalent")
{
    GadgetNetwork g = build_gadget({3, 1, 1});
    auto budget = AdversaryBudget::make(1, Rational(1, 6));
    InjectionTrace empty{10, {}};
    ScenarioBundle b = wireless_simulation_bundle(g, budget, empty, AdmissibilityWitness::uniform(g.network, 10));
    EquivalenceVerdict v = equivalence_check(b, 10);
    CHECK(v.equal);
}

TEST_CASE("the wireless bundle rejects foreign paths and bad witnesses")
{
    GadgetNetwork g = build_gadget({3, 1, 1});
    auto budget = AdversaryBudget::make(1, Rational(1, 6));
    auto stray = make_trace(4, {inject(0, Rational(1), {3, 0, 1})});
    CHECK_THROWS_AS(wireless_simulation_bundle(g, budget, stray, AdmissibilityWitness::uniform(g.network, 4)),
                    std::invalid_argument);
    auto heavy = make_trace(4, {inject(0, Rational(5), {2, 3})});
    CHECK_THROWS_AS(wireless_simulation_bundle(g, budget, heavy, AdmissibilityWitness::uniform(g.network, 4)),
                    std::invalid_argument);
}

TEST_CASE("random scenarios")
{
    auto budget = AdversaryBudget::make(3, Rational(1, 10));
    ScenarioBundle a = random_scenario(12, 4, 0.3, budget, 77, 80);
    ScenarioBundle b = random_scenario(12, 4, 0.3, budget, 77, 80);
    CHECK(a.network.num_edges() == static_cast<std::size_t>(std::llround(0.3 * 66)));
    CHECK(a.trace.events.size() == b.trace.events.size());
    for (std::size_t i = 0; i < a.trace.events.size(); ++i) {
        CHECK(a.trace.events[i].slot == b.trace.events[i].slot);
        CHECK(a.trace.events[i].packet.path == b.trace.events[i].packet.path);
        CHECK(a.trace.events[i].packet.size == b.trace.events[i].packet.size);
        CHECK(a.trace.events[i].packet.path.hops() <= 4);
    }
    CHECK(a.schedule_mode == b.schedule_mode);
    REQUIRE(a.witness);
    CHECK(verify_witness(a.network, a.trace, a.schedule, budget, *a.witness).admissible);
    CHECK_THROWS_AS(random_scenario(12, 4, 0.05, budget, 1, 10), ScenarioError);

    for (const Path& p : random_path_pool(a.network, 3, 50, 5)) {
        CHECK(validate_path(a.network, p).valid());
        CHECK(p.hops() <= 3);
        auto nodes = p.nodes();
        std::sort(nodes.begin(), nodes.end());
        CHECK(std::adjacent_find(nodes.begin(), nodes.end()) == nodes.end());
    }
}

TEST_CASE("adversary search")
{
    Network net = line_network(5, 3);
    auto budget = AdversaryBudget::make(2, Rational(1, 4));
    SearchSetup setup;
    setup.schedule = RateSchedule::constant_one(net);

    SearchResult none = search_adversary(net, budget, 3, 30, 0, 9, setup);
    CHECK(none.evaluations == 1);
    CHECK(none.accepted == 0);

    SearchResult found = search_adversary(net, budget, 3, 30, 150, 9, setup);
    CHECK(found.achieved_q >= none.achieved_q);
    CHECK(verify_witness(net, found.trace, setup.schedule, budget, found.witness).admissible);
    CHECK(found.evaluations <= 151);
    SimConfig cfg = make_config(net, found.trace, 30);
    CHECK(max_queueing(run(cfg).log).q == found.achieved_q);
}

TEST_CASE("bundle round trip")
{
    namespace fs = std::filesystem;
    auto budget = AdversaryBudget::make(2, Rational(1, 8));
    RandomScenarioOptions opts;
    opts.schedule_mode = "on-off";
    ScenarioBundle b = random_scenario(7, 3, 0.5, budget, 4242, 40, opts);
    fs::path dir = fs::temp_directory_path() / "aqsim_bundle_round_trip";
    fs::remove_all(dir);
    write_bundle(dir.string(), b, 60);
    KeyValues kv = load_key_values((dir / "config.txt").string());
    ScenarioBundle c = load_bundle(kv, dir.string());
    CHECK(c.network.feeds() == b.network.feeds());
    CHECK(c.d == b.d);
    CHECK(c.budget.b == b.budget.b);
    CHECK(c.budget.r == b.budget.r);
    CHECK(c.schedule_mode == "on-off");
    REQUIRE(c.witness);
    CHECK(*c.witness == *b.witness);
    for (std::size_t i = 0; i < b.disciplines.size(); ++i) {
        CHECK(c.disciplines[i].policy == b.disciplines[i].policy);
        CHECK(c.disciplines[i].selector == b.disciplines[i].selector);
    }
    auto la = run(make_sim_config(b, 60)).log;
    auto lb = run(make_sim_config(c, 60)).log;
    CHECK_FALSE(compare_logs(la, lb));
    fs::remove_all(dir);
}

}
