// scenarios.hpp - Experiment inputs: the building-block gadget, the wireless
// set-up that reproduces a wireline scenario on it, random scenarios and a
// small adversary search.

#ifndef AQSIM_SCENARIOS_HPP
#define AQSIM_SCENARIOS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aqsim/adversary.hpp"
#include "aqsim/engine.hpp"
#include "aqsim/network.hpp"
#include "aqsim/text_io.hpp"

namespace aqsim {

// ---------------------------------------------------------------------------
// Building-block gadget
//
// A block is a chain of h-1 nodes. Each node has k*h external inputs, fed by
// the outputs (last nodes) of child blocks one level down, or directly by the
// adversary at the deepest level. Blocks form a tree of depth J; the root
// block's output feeds a sink node. Block ids are breadth-first; node ids are
// block * (h-1) + position, and the sink comes last.

struct GadgetParams {
    int h = 3;      // max hops a packet traverses, >= 3
    int k = 1;      // >= 1
    int depth = 0;  // J >= 0

    void validate() const;
    std::int64_t children_per_block() const { return static_cast<std::int64_t>(h - 1) * k * h; }
    std::int64_t inputs_per_node() const { return static_cast<std::int64_t>(k) * h; }
};

// sum_{j=0..J} ((h-1) k h)^j
std::int64_t gadget_block_count(const GadgetParams& params);

struct GadgetBlock {
    std::size_t id = 0;
    int level = 0;
    std::optional<std::size_t> parent;
    NodeId output_target = -1;  // parent node fed by this block's output, or the sink
    std::vector<NodeId> nodes;  // in chain order
    std::vector<std::size_t> children;
};

struct GadgetNetwork {
    GadgetParams params;
    Network network;
    std::vector<GadgetBlock> blocks;
    NodeId sink = -1;
    std::vector<NodeId> successor;      // per node; -1 for the sink
    std::vector<std::size_t> block_of;  // per gadget node
    std::vector<int> position_of;       // per gadget node, 0-based

    std::size_t gadget_node_count() const { return block_of.size(); }
    // External inputs (child outputs or adversary injection points) plus the
    // internal input from the preceding node.
    std::int64_t input_count(NodeId node) const;
    bool is_leaf_block(std::size_t block) const { return blocks[block].children.empty(); }
};

GadgetNetwork build_gadget(const GadgetParams& params);

// `block <id> level <j> nodes <id...>` per block, then `sink <id>`.
void write_gadget_manifest(std::ostream& out, const GadgetNetwork& gadget);

// True iff every node feeds at most one node, taking each edge in its
// declared orientation.
bool fact1_check(const Network& network);

enum class GadgetPathKind { BlockInput, Transit, TransitOnward };

// Which gadget traffic pattern `path` follows, if any: a single hop from a
// node to its successor (block input, absorbed one node later), the chain of
// a block from its first node through its output (transit), or transit plus
// the following hop at the parent block.
std::optional<GadgetPathKind> classify_gadget_path(const GadgetNetwork& gadget, const Path& path);

// Every path of every kind above.
std::vector<Path> gadget_path_pool(const GadgetNetwork& gadget);

// ---------------------------------------------------------------------------
// Bundles

struct ScenarioBundle {
    Network network;
    RateSchedule schedule;
    std::string schedule_mode = "constant-one";  // how `schedule` was produced
    std::string schedule_argument;
    std::uint64_t schedule_seed = 0;
    InjectionTrace trace;
    std::optional<AdmissibilityWitness> witness;
    std::vector<NodeDiscipline> disciplines;
    AdversaryBudget budget;
    int d = 1;
    std::uint64_t seed = 0;
};

SimConfig make_sim_config(const ScenarioBundle& bundle, Slot horizon, LinkMode mode = LinkMode::Wireless,
                          InjectionEligibility eligibility = InjectionEligibility::SameSlot);

// Constant-one rates on the gadget's edges for a generated trace over the
// gadget traffic patterns.
GeneratedTrace gadget_traffic(const GadgetNetwork& gadget, const AdversaryBudget& budget, std::uint64_t seed,
                              Slot horizon);

// FIFO at every node, rate 1 on every edge in every slot, the gadget's own
// topology and the given trace. Throws std::invalid_argument when a path
// leaves the gadget traffic patterns or the witness does not certify the
// trace.
ScenarioBundle wireless_simulation_bundle(const GadgetNetwork& gadget, const AdversaryBudget& budget,
                                          const InjectionTrace& trace, const AdmissibilityWitness& witness);

struct EquivalenceVerdict {
    bool fact1 = false;
    bool equal = false;
    std::optional<LogDivergence> divergence;
};

// Runs the bundle once per link mode and compares the two logs.
EquivalenceVerdict equivalence_check(const ScenarioBundle& bundle, Slot horizon);

struct RandomScenarioOptions {
    // constant-one, uniform-random, on-off, or "mixed" (one of the three per seed).
    std::string schedule_mode = "mixed";
    std::size_t path_pool_size = 0;  // 0: 2n
    GeneratorOptions generator;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Connected random network with round(edge_density * n(n-1)/2) edges,
// random simple paths of at most d hops, per-node random disciplines and a
// generated admissible trace. Throws ScenarioError when the density cannot
// connect n nodes.
ScenarioBundle random_scenario(NodeId n, int d, double edge_density, const AdversaryBudget& budget,
                               std::uint64_t seed, Slot horizon, const RandomScenarioOptions& options = {});

// Random simple paths (no repeated node) of 1..d hops.
std::vector<Path> random_path_pool(const Network& network, int d, std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Adversary search

struct SearchSetup {
    RateSchedule schedule;
    std::vector<NodeDiscipline> disciplines;  // empty: FIFO/OldestHeadOfLine everywhere
    std::vector<Path> path_pool;              // empty: random simple paths
    GeneratorOptions generator;
};

struct SearchResult {
    InjectionTrace trace;
    AdmissibilityWitness witness;
    Slot achieved_q = 0;
    std::size_t evaluations = 0;
    std::size_t accepted = 0;
};

// Hill-climbs over admissible (trace, witness) pairs, mutating injection
// slots, sizes, paths and fractions, keeping only candidates that pass
// verify_witness, and maximizing the empirical Q of a run over `horizon`.
SearchResult search_adversary(const Network& network, const AdversaryBudget& budget, int d, Slot horizon,
                              std::size_t search_budget, std::uint64_t seed, const SearchSetup& setup);

// ---------------------------------------------------------------------------
// Bundle directories: network.txt, trace.txt, config.txt, witness.txt when a
// witness is present and, for table schedules, schedule.txt.

void write_bundle(const std::string& dir, const ScenarioBundle& bundle, Slot horizon);

// Reads a bundle from config keys. Relative paths resolve against base_dir.
// Keys: network, trace, witness, schedule.mode, schedule.arg, schedule.seed,
// budget.b, budget.r, d, seed, policy.default, policy.<node>,
// selector.default, selector.<node>.
ScenarioBundle load_bundle(const KeyValues& config, const std::string& base_dir);

}  // namespace aqsim

#endif  // AQSIM_SCENARIOS_HPP
