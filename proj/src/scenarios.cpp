#include "aqsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "aqsim/metrics.hpp"

namespace aqsim {

// ---------------------------------------------------------------------------
// Gadget

void GadgetParams::validate() const
{
    if (h < 3) throw std::invalid_argument("gadget needs h >= 3");
    if (k < 1) throw std::invalid_argument("gadget needs k >= 1");
    if (depth < 0) throw std::invalid_argument("gadget needs J >= 0");
}

std::int64_t gadget_block_count(const GadgetParams& params)
{
    params.validate();
    const std::int64_t fan = params.children_per_block();
    std::int64_t level = 1;
    std::int64_t total = 0;
    for (int j = 0; j <= params.depth; ++j) {
        total += level;
        if (total > (std::int64_t{1} << 40)) throw std::overflow_error("gadget too large");
        if (j < params.depth) {
            if (level > std::numeric_limits<std::int64_t>::max() / fan) throw std::overflow_error("gadget too large");
            level *= fan;
        }
    }
    return total;
}

std::int64_t GadgetNetwork::input_count(NodeId node) const
{
    const auto n = static_cast<std::size_t>(node);
    if (n >= block_of.size()) throw std::out_of_range("not a gadget node");
    return params.inputs_per_node() + (position_of[n] > 0 ? 1 : 0);
}

GadgetNetwork build_gadget(const GadgetParams& params)
{
    const std::int64_t count = gadget_block_count(params);
    const int chain = params.h - 1;
    if (count * chain > 2'000'000) throw std::invalid_argument("gadget too large to build");

    GadgetNetwork g;
    g.params = params;
    const auto num_blocks = static_cast<std::size_t>(count);
    g.blocks.reserve(num_blocks);
    g.sink = static_cast<NodeId>(count * chain);

    auto make_block = [&](int level, std::optional<std::size_t> parent, NodeId target) {
        GadgetBlock blk;
        blk.id = g.blocks.size();
        blk.level = level;
        blk.parent = parent;
        blk.output_target = target;
        for (int p = 0; p < chain; ++p) blk.nodes.push_back(static_cast<NodeId>(blk.id * chain + p));
        g.blocks.push_back(std::move(blk));
        return g.blocks.back().id;
    };

    make_block(0, std::nullopt, g.sink);
    for (std::size_t b = 0; b < g.blocks.size(); ++b) {
        if (g.blocks[b].level == params.depth) continue;
        for (int p = 0; p < chain; ++p) {
            for (std::int64_t q = 0; q < params.inputs_per_node(); ++q) {
                const NodeId target = g.blocks[b].nodes[static_cast<std::size_t>(p)];
                const std::size_t child = make_block(g.blocks[b].level + 1, b, target);
                g.blocks[b].children.push_back(child);
            }
        }
    }

    g.network = Network(g.sink + 1, params.h);
    g.successor.assign(static_cast<std::size_t>(g.sink) + 1, -1);
    g.block_of.resize(static_cast<std::size_t>(g.sink));
    g.position_of.resize(static_cast<std::size_t>(g.sink));
    for (const auto& blk : g.blocks) {
        for (int p = 0; p < chain; ++p) {
            const NodeId n = blk.nodes[static_cast<std::size_t>(p)];
            const NodeId next = p + 1 < chain ? blk.nodes[static_cast<std::size_t>(p + 1)] : blk.output_target;
            g.network.add_edge(n, next);
            g.successor[static_cast<std::size_t>(n)] = next;
            g.block_of[static_cast<std::size_t>(n)] = blk.id;
            g.position_of[static_cast<std::size_t>(n)] = p;
        }
    }
    return g;
}

void write_gadget_manifest(std::ostream& out, const GadgetNetwork& gadget)
{
    for (const auto& blk : gadget.blocks) {
        out << "block " << blk.id << " level " << blk.level << " nodes";
        for (NodeId n : blk.nodes) out << ' ' << n;
        out << '\n';
    }
    out << "sink " << gadget.sink << '\n';
}

bool fact1_check(const Network& network)
{
    std::vector<int> out_degree(static_cast<std::size_t>(network.num_nodes()), 0);
    for (const Link& l : network.feeds()) {
        if (++out_degree[static_cast<std::size_t>(l.from)] > 1) return false;
    }
    return true;
}

std::optional<GadgetPathKind> classify_gadget_path(const GadgetNetwork& gadget, const Path& path)
{
    if (!validate_path(gadget.network, path).valid()) return std::nullopt;
    for (const Link& l : path.links) {
        if (l.from == gadget.sink || gadget.successor[static_cast<std::size_t>(l.from)] != l.to) return std::nullopt;
    }
    if (path.hops() == 1) return GadgetPathKind::BlockInput;
    const auto src = static_cast<std::size_t>(path.source());
    if (gadget.position_of[src] != 0) return std::nullopt;
    const auto chain = static_cast<std::size_t>(gadget.params.h - 1);
    if (path.hops() == chain) return GadgetPathKind::Transit;
    if (path.hops() == chain + 1) return GadgetPathKind::TransitOnward;
    return std::nullopt;
}

std::vector<Path> gadget_path_pool(const GadgetNetwork& gadget)
{
    std::vector<Path> pool;
    for (NodeId n = 0; n < gadget.sink; ++n) pool.push_back(Path::from_nodes({n, gadget.successor[static_cast<std::size_t>(n)]}));
    for (const auto& blk : gadget.blocks) {
        std::vector<NodeId> nodes = blk.nodes;
        nodes.push_back(blk.output_target);
        pool.push_back(Path::from_nodes(nodes));
        if (blk.parent) {
            nodes.push_back(gadget.successor[static_cast<std::size_t>(blk.output_target)]);
            pool.push_back(Path::from_nodes(nodes));
        }
    }
    return pool;
}

// ---------------------------------------------------------------------------
// Bundles

SimConfig make_sim_config(const ScenarioBundle& bundle, Slot horizon, LinkMode mode, InjectionEligibility eligibility)
{
    SimConfig c;
    c.network = bundle.network;
    c.schedule = bundle.schedule;
    c.trace = bundle.trace;
    c.disciplines = bundle.disciplines;
    c.horizon = horizon;
    c.mode = mode;
    c.eligibility = eligibility;
    c.seed = bundle.seed;
    return c;
}

namespace {

// All weight on the successor link; the sink leans on its only neighbor.
AdmissibilityWitness successor_witness(const GadgetNetwork& gadget, Slot horizon)
{
    const Network& net = gadget.network;
    AdmissibilityWitness w(net, horizon);
    for (NodeId n = 0; n < net.num_nodes(); ++n) {
        if (net.degree(n) == 0) continue;
        const NodeId to = n == gadget.sink ? net.neighbors(n).front() : gadget.successor[static_cast<std::size_t>(n)];
        const LinkId l = *net.link_id(n, to);
        for (Slot t = 0; t < horizon; ++t) w.at(l, t) = Rational(1);
    }
    return w;
}

}  // namespace

GeneratedTrace gadget_traffic(const GadgetNetwork& gadget, const AdversaryBudget& budget, std::uint64_t seed,
                              Slot horizon)
{
    GeneratorOptions opts;
    opts.witness = successor_witness(gadget, horizon);
    return generate_admissible_trace(gadget.network, RateSchedule::constant_one(gadget.network), budget, seed, horizon,
                                     gadget_path_pool(gadget), opts);
}

ScenarioBundle wireless_simulation_bundle(const GadgetNetwork& gadget, const AdversaryBudget& budget,
                                          const InjectionTrace& trace, const AdmissibilityWitness& witness)
{
    budget.validate();
    trace.validate(gadget.network);
    for (const auto& ev : trace.events) {
        if (!classify_gadget_path(gadget, ev.packet.path)) {
            throw std::invalid_argument("packet " + std::to_string(ev.packet.id) + " leaves the gadget traffic patterns");
        }
    }
    ScenarioBundle b;
    b.network = gadget.network;
    b.schedule = RateSchedule::constant_one(gadget.network);
    b.schedule_mode = "constant-one";
    b.trace = trace;
    auto verdict = verify_witness(b.network, trace, b.schedule, budget, witness);
    if (!verdict.admissible) throw std::invalid_argument("witness rejected: " + verdict.describe());
    b.witness = witness;
    b.disciplines.assign(static_cast<std::size_t>(b.network.num_nodes()), NodeDiscipline{});
    b.budget = budget;
    b.d = gadget.params.h;
    return b;
}

EquivalenceVerdict equivalence_check(const ScenarioBundle& bundle, Slot horizon)
{
    EquivalenceVerdict v;
    v.fact1 = fact1_check(bundle.network);
    auto wireless = run(make_sim_config(bundle, horizon, LinkMode::Wireless));
    auto wireline = run(make_sim_config(bundle, horizon, LinkMode::Wireline));
    v.divergence = compare_logs(wireless.log, wireline.log);
    v.equal = !v.divergence.has_value();
    return v;
}

// ---------------------------------------------------------------------------
// Random scenarios

std::vector<Path> random_path_pool(const Network& network, int d, std::size_t count, std::uint64_t seed)
{
    if (d < 1) throw std::invalid_argument("d must be >= 1");
    std::vector<NodeId> starts;
    for (NodeId i = 0; i < network.num_nodes(); ++i) {
        if (network.degree(i) > 0) starts.push_back(i);
    }
    if (starts.empty()) throw std::invalid_argument("network has no edges");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_start(0, starts.size() - 1);
    std::uniform_int_distribution<int> pick_len(1, d);
    std::vector<Path> pool;
    std::vector<char> seen(static_cast<std::size_t>(network.num_nodes()), 0);
    std::vector<NodeId> options;
    while (pool.size() < count) {
        std::vector<NodeId> nodes{starts[pick_start(rng)]};
        std::fill(seen.begin(), seen.end(), 0);
        seen[static_cast<std::size_t>(nodes.back())] = 1;
        const int len = pick_len(rng);
        while (static_cast<int>(nodes.size()) <= len) {
            options.clear();
            for (NodeId nb : network.neighbors(nodes.back())) {
                if (!seen[static_cast<std::size_t>(nb)]) options.push_back(nb);
            }
            if (options.empty()) break;
            NodeId next = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
            seen[static_cast<std::size_t>(next)] = 1;
            nodes.push_back(next);
        }
        pool.push_back(Path::from_nodes(nodes));
    }
    return pool;
}

namespace {

Network random_network(NodeId n, double density, std::mt19937_64& rng)
{
    if (n < 2) throw ScenarioError("random scenario needs at least 2 nodes");
    if (!(density > 0.0 && density <= 1.0)) throw ScenarioError("edge density must be in (0, 1]");
    const std::int64_t pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;
    const auto m = static_cast<std::int64_t>(std::llround(density * static_cast<double>(pairs)));
    if (m < n - 1) {
        throw ScenarioError("edge density " + std::to_string(density) + " gives " + std::to_string(m) +
                            " edges, fewer than the " + std::to_string(n - 1) + " needed to connect " +
                            std::to_string(n) + " nodes");
    }

    Network net(n);
    std::vector<NodeId> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 1; k < order.size(); ++k) {
        NodeId parent = order[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
        net.add_edge(parent, order[k]);
    }
    std::vector<std::pair<NodeId, NodeId>> spare;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (!net.has_edge(i, j)) spare.emplace_back(i, j);
        }
    }
    std::shuffle(spare.begin(), spare.end(), rng);
    for (std::int64_t e = 0; e < m - (n - 1); ++e) net.add_edge(spare[static_cast<std::size_t>(e)].first, spare[static_cast<std::size_t>(e)].second);
    return net;
}

}  // namespace

ScenarioBundle random_scenario(NodeId n, int d, double edge_density, const AdversaryBudget& budget,
                               std::uint64_t seed, Slot horizon, const RandomScenarioOptions& options)
{
    budget.validate();
    if (d < 1) throw ScenarioError("d must be >= 1");
    std::mt19937_64 rng(seed);

    ScenarioBundle b;
    b.network = random_network(n, edge_density, rng);
    b.network.set_max_path_hops(d);
    b.budget = budget;
    b.d = d;
    b.seed = seed;

    std::string mode = options.schedule_mode;
    if (mode == "mixed") {
        static const char* const modes[] = {"constant-one", "uniform-random", "on-off"};
        mode = modes[std::uniform_int_distribution<int>(0, 2)(rng)];
    }
    b.schedule_mode = mode;
    b.schedule_seed = rng();
    if (mode == "uniform-random") b.schedule_argument = "4";
    if (mode == "on-off") b.schedule_argument = std::to_string(std::uniform_int_distribution<int>(2, 6)(rng));
    b.schedule = generate_rate_schedule(b.network, b.schedule_seed, mode, b.schedule_argument);

    std::uniform_int_distribution<std::size_t> pick_policy(0, std::size(kAllPolicies) - 1);
    std::uniform_int_distribution<std::size_t> pick_selector(0, std::size(kAllSelectors) - 1);
    for (NodeId i = 0; i < n; ++i) {
        const PolicyKind p = kAllPolicies[pick_policy(rng)];
        b.disciplines.push_back({p, kAllSelectors[pick_selector(rng)]});
    }

    const std::size_t pool_size = options.path_pool_size ? options.path_pool_size : 2 * static_cast<std::size_t>(n);
    auto pool = random_path_pool(b.network, d, pool_size, rng());
    auto gen = generate_admissible_trace(b.network, b.schedule, budget, rng(), horizon, pool, options.generator);
    b.trace = std::move(gen.trace);
    b.witness = std::move(gen.witness);
    return b;
}

// ---------------------------------------------------------------------------
// Adversary search

namespace {

void normalize(InjectionTrace& trace)
{
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const InjectionEvent& a, const InjectionEvent& b) { return a.slot < b.slot; });
    PacketId id = 0;
    for (auto& ev : trace.events) {
        ev.packet.id = id++;
        ev.packet.injected_at = ev.slot;
    }
}

struct Candidate {
    InjectionTrace trace;
    AdmissibilityWitness witness;
};

}  // namespace

SearchResult search_adversary(const Network& network, const AdversaryBudget& budget, int d, Slot horizon,
                              std::size_t search_budget, std::uint64_t seed, const SearchSetup& setup)
{
    budget.validate();
    if (horizon < 1) throw std::invalid_argument("search horizon must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<Path> pool = setup.path_pool;
    if (pool.empty()) pool = random_path_pool(network, d, 2 * static_cast<std::size_t>(network.num_nodes()), rng());
    std::vector<NodeDiscipline> disciplines = setup.disciplines;
    if (disciplines.empty()) disciplines.assign(static_cast<std::size_t>(network.num_nodes()), NodeDiscipline{});

    SimConfig config;
    config.network = network;
    config.schedule = setup.schedule;
    config.disciplines = disciplines;
    config.horizon = horizon;
    config.seed = seed;

    SearchResult result;
    auto evaluate = [&](const InjectionTrace& trace) {
        config.trace = trace;
        ++result.evaluations;
        return max_queueing(run(config).log).q;
    };

    auto initial = generate_admissible_trace(network, setup.schedule, budget, rng(), horizon, pool, setup.generator);
    Candidate best{std::move(initial.trace), std::move(initial.witness)};
    Slot best_q = evaluate(best.trace);

    const std::int64_t granularity = setup.generator.witness_granularity;
    const std::int64_t unit = budget.r.den() * setup.schedule.denominator_lcm() * granularity;
    std::uniform_int_distribution<int> pick_move(0, 7);
    std::uniform_int_distribution<Slot> pick_slot(0, horizon - 1);
    std::uniform_int_distribution<std::size_t> pick_path(0, pool.size() - 1);

    for (std::size_t iter = 0; iter < search_budget; ++iter) {
        Candidate cand = best;
        auto& events = cand.trace.events;
        const int move = pick_move(rng);
        auto pick_event = [&]() { return std::uniform_int_distribution<std::size_t>(0, events.size() - 1)(rng); };

        if (events.empty() || move == 4) {
            const Slot t = pick_slot(rng);
            const std::size_t p = pick_path(rng);
            Rational size(std::uniform_int_distribution<std::int64_t>(1, unit)(rng), unit);
            events.push_back({t, Packet{0, pool[p], size, t}});
        } else if (move == 0) {
            auto& ev = events[pick_event()];
            ev.slot = std::clamp<Slot>(ev.slot + std::uniform_int_distribution<Slot>(-3, 3)(rng), 0, horizon - 1);
        } else if (move == 1) {
            auto& ev = events[pick_event()];
            ev.packet.size += Rational(std::uniform_int_distribution<std::int64_t>(1, unit)(rng), unit);
        } else if (move == 2) {
            auto& ev = events[pick_event()];
            ev.packet.size = ev.packet.size * Rational(2);
        } else if (move == 3) {
            events[pick_event()].packet.path = pool[pick_path(rng)];
        } else if (move == 5) {
            if (events.size() > 1) events.erase(events.begin() + static_cast<std::ptrdiff_t>(pick_event()));
        } else if (move == 6) {
            events[pick_event()].slot = events[pick_event()].slot;
        } else {
            // Put all of one node's weight on a single neighbor for a short run of slots.
            const NodeId i = std::uniform_int_distribution<NodeId>(0, network.num_nodes() - 1)(rng);
            if (network.degree(i) == 0) continue;
            const std::size_t k = std::uniform_int_distribution<std::size_t>(0, network.degree(i) - 1)(rng);
            const Slot t0 = pick_slot(rng);
            const Slot t1 = std::min(horizon, t0 + std::uniform_int_distribution<Slot>(1, 8)(rng));
            for (Slot t = t0; t < t1; ++t) {
                for (std::size_t q = 0; q < network.degree(i); ++q) {
                    cand.witness.at(network.first_link(i) + q, t) = Rational(q == k ? 1 : 0);
                }
            }
        }
        normalize(cand.trace);

        if (!verify_witness(network, cand.trace, setup.schedule, budget, cand.witness).admissible) continue;
        const Slot q = evaluate(cand.trace);
        if (q >= best_q) {
            best_q = q;
            best = std::move(cand);
            ++result.accepted;
        }
    }

    result.trace = std::move(best.trace);
    result.witness = std::move(best.witness);
    result.achieved_q = best_q;
    return result;
}

// ---------------------------------------------------------------------------
// Bundle directories

void write_bundle(const std::string& dir, const ScenarioBundle& bundle, Slot horizon)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path root(dir);
    {
        auto out = open_output((root / "network.txt").string());
        write_network(out, bundle.network);
    }
    {
        auto out = open_output((root / "trace.txt").string());
        write_trace(out, bundle.trace);
    }
    if (bundle.witness) {
        auto out = open_output((root / "witness.txt").string());
        write_witness(out, bundle.network, *bundle.witness);
    }

    std::string mode = bundle.schedule_mode;
    std::string arg = bundle.schedule_argument;
    if (bundle.schedule.mode() == RateMode::Table) {
        auto out = open_output((root / "schedule.txt").string());
        write_schedule(out, bundle.network, bundle.schedule, horizon);
        mode = "from-file";
        arg = "schedule.txt";
    }

    auto out = open_output((root / "config.txt").string());
    out << "network = network.txt\n";
    out << "trace = trace.txt\n";
    if (bundle.witness) out << "witness = witness.txt\n";
    out << "schedule.mode = " << mode << "\n";
    if (!arg.empty()) out << "schedule.arg = " << arg << "\n";
    out << "schedule.seed = " << bundle.schedule_seed << "\n";
    out << "budget.b = " << bundle.budget.b << "\n";
    out << "budget.r = " << bundle.budget.r.str() << "\n";
    out << "d = " << bundle.d << "\n";
    out << "seed = " << bundle.seed << "\n";
    out << "horizon = " << horizon << "\n";
    for (std::size_t i = 0; i < bundle.disciplines.size(); ++i) {
        out << "policy." << i << " = " << to_string(bundle.disciplines[i].policy) << "\n";
        out << "selector." << i << " = " << to_string(bundle.disciplines[i].selector) << "\n";
    }
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& p)
{
    std::filesystem::path path(p);
    if (path.is_absolute() || base_dir.empty()) return path.string();
    return (std::filesystem::path(base_dir) / path).string();
}

const std::string* find_key(const KeyValues& kv, const std::string& key)
{
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
}

}  // namespace

ScenarioBundle load_bundle(const KeyValues& config, const std::string& base_dir)
{
    ScenarioBundle b;
    const std::string* net_path = find_key(config, "network");
    if (!net_path) throw std::invalid_argument("config has no 'network' key");
    b.network = load_network(resolve(base_dir, *net_path));

    if (auto v = find_key(config, "d")) {
        b.d = static_cast<int>(parse_integer(*v));
        b.network.set_max_path_hops(std::max(b.d, b.network.max_path_hops()));
    } else {
        b.d = b.network.max_path_hops();
    }

    if (auto v = find_key(config, "trace")) b.trace = load_trace(resolve(base_dir, *v), b.network);

    std::int64_t burst = 1;
    Rational rate(0);
    if (auto v = find_key(config, "budget.b")) burst = parse_integer(*v);
    if (auto v = find_key(config, "budget.r")) rate = Rational::parse(*v);
    b.budget = AdversaryBudget::make(burst, rate);

    if (auto v = find_key(config, "seed")) b.seed = parse_seed(*v);
    b.schedule_seed = b.seed;
    if (auto v = find_key(config, "schedule.seed")) b.schedule_seed = parse_seed(*v);
    if (auto v = find_key(config, "schedule.mode")) b.schedule_mode = *v;
    if (auto v = find_key(config, "schedule.arg")) b.schedule_argument = *v;
    std::string arg = b.schedule_argument;
    if (b.schedule_mode == "from-file") arg = resolve(base_dir, arg);
    b.schedule = generate_rate_schedule(b.network, b.schedule_seed, b.schedule_mode, arg);

    if (auto v = find_key(config, "witness")) {
        std::optional<Slot> h;
        if (find_key(config, "trace")) h = b.trace.horizon;
        b.witness = load_witness(resolve(base_dir, *v), b.network, h);
    }

    NodeDiscipline def;
    if (auto v = find_key(config, "policy.default")) def.policy = parse_policy(*v);
    if (auto v = find_key(config, "selector.default")) def.selector = parse_selector(*v);
    b.disciplines.assign(static_cast<std::size_t>(b.network.num_nodes()), def);
    for (const auto& [key, value] : config) {
        for (const std::string prefix : {"policy.", "selector."}) {
            if (key.rfind(prefix, 0) != 0 || key == prefix + "default") continue;
            const std::int64_t node = parse_integer(key.substr(prefix.size()));
            if (node < 0 || node >= b.network.num_nodes()) throw std::invalid_argument("config key '" + key + "' names no node");
            auto& disc = b.disciplines[static_cast<std::size_t>(node)];
            if (prefix == "policy.") disc.policy = parse_policy(value);
            else disc.selector = parse_selector(value);
        }
    }
    return b;
}

}  // namespace aqsim
