// aqsim - command-line front end.
//
//   aqsim run <config>        simulate one scenario, write log, delays, report
//   aqsim check ...           admissibility of a trace, with or without witness
//   aqsim sweep <config>      seeded trials over a list of injection rates
//   aqsim gadget ...          emit a building-block gadget and its bundle
//   aqsim search ...          hill-climb for high-delay admissible traces
//
// Exit codes: 0 ok, 1 input error, 2 bound violation or failed check,
// 3 inadmissible trace.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "aqsim/adversary.hpp"
#include "aqsim/engine.hpp"
#include "aqsim/metrics.hpp"
#include "aqsim/scenarios.hpp"
#include "aqsim/text_io.hpp"

using namespace aqsim;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kViolation = 2;
constexpr int kInadmissible = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<std::uint64_t> seed;
    std::optional<Slot> horizon;
    std::string out = "out";
    unsigned jobs = 1;
    bool assert_bounds = false;
    std::optional<std::string> eligibility;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--seed", c.seed, "64-bit seed (overrides config)");
    cmd->add_option("--horizon", c.horizon, "number of slots (overrides config)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    cmd->add_option("--jobs", c.jobs, "concurrent trials")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_flag("--assert-bounds", c.assert_bounds, "exit 2 when a run exceeds the closed-form bounds");
    cmd->add_option("--eligibility", c.eligibility, "injection eligibility")
        ->check(CLI::IsMember({"same-slot", "next-slot"}));
}

std::string dir_of(const std::string& path)
{
    return fs::path(path).parent_path().string();
}

std::optional<std::string> key(const KeyValues& kv, const std::string& k)
{
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
}

// Keys a run or sweep config may carry.
void check_keys(const KeyValues& kv)
{
    static const std::vector<std::string> plain = {
        "network", "trace", "witness", "schedule.mode", "schedule.arg", "schedule.seed", "budget.b", "budget.r",
        "d", "seed", "horizon", "mode", "eligibility", "eligibility.injection", "generate.n", "generate.density",
        "sweep.r", "sweep.trials", "policy.default", "selector.default"};
    for (const auto& [k, v] : kv) {
        if (std::find(plain.begin(), plain.end(), k) != plain.end()) continue;
        if (k.rfind("policy.", 0) == 0 || k.rfind("selector.", 0) == 0) continue;
        throw InputError("unknown config key '" + k + "'");
    }
}

struct RunSetup {
    ScenarioBundle bundle;
    Slot horizon = 0;
    LinkMode mode = LinkMode::Wireless;
    InjectionEligibility eligibility = InjectionEligibility::SameSlot;
};

InjectionEligibility eligibility_of(const KeyValues& kv, const Common& common)
{
    if (common.eligibility) return parse_eligibility(*common.eligibility);
    if (auto v = key(kv, "eligibility.injection")) return parse_eligibility(*v);
    if (auto v = key(kv, "eligibility")) return parse_eligibility(*v);
    return InjectionEligibility::SameSlot;
}

// Scenario from files, or from generate.* keys through random_scenario.
ScenarioBundle bundle_from_config(const KeyValues& kv, const std::string& base, std::uint64_t seed, Slot horizon,
                                  std::optional<Rational> rate_override = std::nullopt)
{
    if (auto n = key(kv, "generate.n")) {
        const auto nodes = static_cast<NodeId>(parse_integer(*n));
        const int d = static_cast<int>(parse_integer(key(kv, "d").value_or("2")));
        const double density = std::stod(key(kv, "generate.density").value_or("0.3"));
        const std::int64_t b = parse_integer(key(kv, "budget.b").value_or("1"));
        const Rational r = rate_override ? *rate_override : Rational::parse(key(kv, "budget.r").value_or("0"));
        RandomScenarioOptions opts;
        opts.schedule_mode = key(kv, "schedule.mode").value_or("constant-one");
        ScenarioBundle bundle = random_scenario(nodes, d, density, AdversaryBudget::make(b, r), seed, horizon, opts);
        // Explicit discipline keys override the random draw.
        for (const auto& [k, v] : kv) {
            for (const std::string prefix : {"policy.", "selector."}) {
                if (k.rfind(prefix, 0) != 0) continue;
                const std::string who = k.substr(prefix.size());
                std::vector<std::size_t> targets;
                if (who == "default") {
                    for (std::size_t i = 0; i < bundle.disciplines.size(); ++i) targets.push_back(i);
                } else {
                    const auto node = parse_integer(who);
                    if (node < 0 || node >= nodes) throw InputError("config key '" + k + "' names no node");
                    targets.push_back(static_cast<std::size_t>(node));
                }
                for (std::size_t i : targets) {
                    if (prefix == "policy.") bundle.disciplines[i].policy = parse_policy(v);
                    else bundle.disciplines[i].selector = parse_selector(v);
                }
            }
        }
        return bundle;
    }
    KeyValues copy = kv;
    copy["seed"] = std::to_string(seed);
    if (rate_override) copy["budget.r"] = rate_override->str();
    return load_bundle(copy, base);
}

RunSetup run_setup(const std::string& config_path, const Common& common)
{
    const KeyValues kv = load_key_values(config_path);
    check_keys(kv);
    RunSetup s;
    std::uint64_t seed = common.seed.value_or(0);
    if (!common.seed) {
        if (auto v = key(kv, "seed")) seed = parse_seed(*v);
    }
    Slot horizon = -1;
    if (common.horizon) horizon = *common.horizon;
    else if (auto v = key(kv, "horizon")) horizon = parse_integer(*v);

    if (key(kv, "generate.n") && horizon < 0) throw InputError("generated scenarios need a horizon");
    s.bundle = bundle_from_config(kv, dir_of(config_path), seed, horizon);
    if (horizon < 0) horizon = s.bundle.trace.horizon;
    if (horizon < s.bundle.trace.horizon) throw InputError("horizon is shorter than the trace");
    s.horizon = horizon;
    if (auto v = key(kv, "mode")) s.mode = parse_link_mode(*v);
    s.eligibility = eligibility_of(kv, common);
    return s;
}

void write_seed_line(std::ostream& out, std::uint64_t seed)
{
    out << "# seed " << seed << "\n";
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& config_path, const Common& common)
{
    RunSetup s = run_setup(config_path, common);
    const ScenarioBundle& b = s.bundle;
    if (b.witness) {
        auto verdict = verify_witness(b.network, b.trace, b.schedule, b.budget, *b.witness);
        if (!verdict.admissible) {
            std::cerr << "trace is not certified by its witness: " << verdict.describe() << "\n";
            return kInadmissible;
        }
    }

    const SimConfig config = make_sim_config(b, s.horizon, s.mode, s.eligibility);
    const SimResult result = run(config);
    const BoundReport rep = stability_report(result.log, b.network, b.budget, b.d);

    fs::create_directories(common.out);
    const fs::path out(common.out);
    {
        auto f = open_output((out / "events.csv").string());
        write_seed_line(f, b.seed);
        write_event_log(f, result.log);
    }
    {
        auto f = open_output((out / "delays.csv").string());
        write_seed_line(f, b.seed);
        write_delay_stats(f, delay_stats(result.log));
    }
    {
        auto f = open_output((out / "report.txt").string());
        f << "seed = " << b.seed << "\n";
        f << "horizon = " << s.horizon << "\n";
        f << "mode = " << to_string(s.mode) << "\n";
        f << "eligibility = " << to_string(s.eligibility) << "\n";
        write_report(f, rep);
    }
    write_report(std::cout, rep);

    if (common.assert_bounds) {
        if (!rep.bounds) {
            std::cerr << "note: r >= 1/d, no bound to assert\n";
        } else if (!rep.compliant) {
            std::cerr << "bound violated: q_emp " << rep.q_emp << " vs q_bound " << rep.bounds->q_bound
                      << ", lat_emp " << rep.lat_emp << " vs latency_bound " << rep.bounds->latency_bound << "\n";
            return kViolation;
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------

struct CheckArgs {
    std::string network;
    std::string trace;
    std::optional<std::string> schedule;
    std::string schedule_mode = "constant-one";
    std::string schedule_arg;
    std::optional<std::string> witness;
    std::int64_t b = 1;
    std::string r = "0";
};

int cmd_check(const CheckArgs& a, const Common& common)
{
    const Network net = load_network(a.network);
    const InjectionTrace trace = load_trace(a.trace, net);
    const RateSchedule schedule = a.schedule ? load_schedule(*a.schedule, net)
                                             : generate_rate_schedule(net, common.seed.value_or(0), a.schedule_mode,
                                                                      a.schedule_arg);
    const AdversaryBudget budget = AdversaryBudget::make(a.b, Rational::parse(a.r));

    if (a.witness) {
        const AdmissibilityWitness w = load_witness(*a.witness, net, trace.horizon);
        const auto verdict = verify_witness(net, trace, schedule, budget, w);
        std::cout << verdict.describe() << "\n";
        return verdict.admissible ? kOk : kInadmissible;
    }

    if (auto w = find_witness(net, trace, schedule, budget)) {
        fs::create_directories(common.out);
        const std::string path = (fs::path(common.out) / "witness.txt").string();
        auto f = open_output(path);
        write_witness(f, net, *w);
        std::cout << "admissible; witness written to " << path << "\n";
        return kOk;
    }
    std::cout << "inadmissible: no fractions satisfy every window\n";
    if (auto v = single_link_certificate(net, trace, schedule, budget)) {
        std::cout << "violated window: link " << v->link.from << "->" << v->link.to << " start " << v->start
                  << " length " << v->length << " load " << v->lhs << " > " << v->rhs
                  << " even with x = 1 on that link\n";
    } else {
        std::cout << "every link passes on its own; the fractions cannot be shared within some node\n";
    }
    return kInadmissible;
}

// ---------------------------------------------------------------------------

struct SweepRow {
    std::string r;
    int trial = 0;
    std::uint64_t seed = 0;
    bool theorem_region = false;
    bool optimistic_region = false;
    std::optional<BoundReport> report;
    std::string error;
};

std::vector<Rational> parse_rates(const std::string& list)
{
    std::vector<Rational> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(Rational::parse(item));
    }
    if (out.empty()) throw InputError("no r values given");
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i - 1] < out[i])) throw InputError("r values must be strictly increasing");
    }
    return out;
}

int cmd_sweep(const std::string& config_path, std::optional<std::string> rates_flag, std::optional<int> trials_flag,
              const Common& common)
{
    const KeyValues kv = load_key_values(config_path);
    check_keys(kv);
    const std::string rates_text = rates_flag ? *rates_flag : key(kv, "sweep.r").value_or("");
    const std::vector<Rational> rates = parse_rates(rates_text);
    const int trials = trials_flag ? *trials_flag : static_cast<int>(parse_integer(key(kv, "sweep.trials").value_or("1")));
    if (trials < 1) throw InputError("trials must be >= 1");
    std::uint64_t base_seed = common.seed.value_or(0);
    if (!common.seed) {
        if (auto v = key(kv, "seed")) base_seed = parse_seed(*v);
    }
    Slot horizon = 500;
    if (common.horizon) horizon = *common.horizon;
    else if (auto v = key(kv, "horizon")) horizon = parse_integer(*v);
    const int d = static_cast<int>(parse_integer(key(kv, "d").value_or("2")));
    LinkMode mode = LinkMode::Wireless;
    if (auto v = key(kv, "mode")) mode = parse_link_mode(*v);
    const InjectionEligibility elig = eligibility_of(kv, common);
    const std::string base = dir_of(config_path);

    std::vector<SweepRow> rows;
    for (const Rational& r : rates) {
        for (int k = 0; k < trials; ++k) {
            SweepRow row;
            row.r = r.str();
            row.trial = k;
            // Same seeds for every r, so rows differ only in the rate.
            row.seed = base_seed + static_cast<std::uint64_t>(k);
            row.theorem_region = r * Rational(d) < Rational(1);
            row.optimistic_region = d < 2 || r * Rational(d - 1) <= Rational(1);
            rows.push_back(row);
        }
    }

    fs::create_directories(common.out);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            SweepRow& row = rows[i];
            const std::size_t ri = i / static_cast<std::size_t>(trials);
            try {
                const Rational r = rates[ri];
                ScenarioBundle bundle = bundle_from_config(kv, base, row.seed, horizon, r);
                const Slot h = std::max(horizon, bundle.trace.horizon);
                const SimResult res = run(make_sim_config(bundle, h, mode, elig));
                row.report = stability_report(res.log, bundle.network, bundle.budget, bundle.d);
                const fs::path dir = fs::path(common.out) / ("r" + std::to_string(ri) + "_trial" + std::to_string(row.trial));
                fs::create_directories(dir);
                auto f = open_output((dir / "report.txt").string());
                f << "seed = " << row.seed << "\n";
                f << "horizon = " << h << "\n";
                write_report(f, *row.report);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(common.jobs, static_cast<unsigned>(rows.size())));
    for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    auto csv = open_output((fs::path(common.out) / "sweep.csv").string());
    csv << "r,trial,seed,theorem_region,optimistic_region," << report_csv_header() << ",error\n";
    bool violated = false;
    for (const auto& row : rows) {
        csv << row.r << ',' << row.trial << ',' << row.seed << ',' << (row.theorem_region ? 1 : 0) << ','
            << (row.optimistic_region ? 1 : 0) << ',';
        if (row.report) {
            csv << report_csv_row(*row.report) << ',';
            if (row.theorem_region && !row.report->compliant) violated = true;
        } else {
            csv << ",,,,,,,,,,";
        }
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        csv << err << '\n';
    }

    for (std::size_t ri = 0; ri < rates.size(); ++ri) {
        Slot q = 0;
        int ok = 0, errors = 0;
        for (int k = 0; k < trials; ++k) {
            const auto& row = rows[ri * static_cast<std::size_t>(trials) + static_cast<std::size_t>(k)];
            if (!row.report) {
                ++errors;
                continue;
            }
            q = std::max(q, row.report->q_emp);
            if (row.report->compliant) ++ok;
        }
        const auto& first = rows[ri * static_cast<std::size_t>(trials)];
        std::cout << "r = " << first.r << (first.theorem_region ? " theorem-region" : "")
                  << (first.optimistic_region ? " optimistic-region" : "") << ": max q_emp " << q;
        if (first.theorem_region) std::cout << ", compliant " << ok << "/" << trials;
        if (errors) std::cout << ", errors " << errors;
        std::cout << "\n";
    }
    return common.assert_bounds && violated ? kViolation : kOk;
}

// ---------------------------------------------------------------------------

struct GadgetArgs {
    GadgetParams params;
    std::int64_t b = 1;
    std::optional<std::string> r;
    bool equivalence = false;
};

int cmd_gadget(const GadgetArgs& a, const Common& common)
{
    const GadgetNetwork g = build_gadget(a.params);
    const Slot horizon = common.horizon.value_or(1000);
    const std::uint64_t seed = common.seed.value_or(0);
    const Rational r = a.r ? Rational::parse(*a.r) : Rational(1, 2 * a.params.h);
    const AdversaryBudget budget = AdversaryBudget::make(a.b, r);

    const GeneratedTrace gen = gadget_traffic(g, budget, seed, horizon);
    ScenarioBundle bundle = wireless_simulation_bundle(g, budget, gen.trace, gen.witness);
    bundle.seed = seed;
    write_bundle(common.out, bundle, horizon);
    {
        auto f = open_output((fs::path(common.out) / "blocks.txt").string());
        write_gadget_manifest(f, g);
    }
    const bool fact1 = fact1_check(g.network);
    std::cout << "blocks " << g.blocks.size() << " gadget_nodes " << g.gadget_node_count() << " sink " << g.sink
              << " edges " << g.network.num_edges() << " fact1 " << (fact1 ? "pass" : "fail") << "\n";
    if (!a.equivalence) return fact1 ? kOk : kViolation;

    const EquivalenceVerdict v = equivalence_check(bundle, horizon);
    if (v.equal) {
        std::cout << "equivalence: wireless and wireline logs identical over " << horizon << " slots\n";
        return fact1 ? kOk : kViolation;
    }
    std::cout << "equivalence: logs diverge at slot " << v.divergence->slot << " (record " << v.divergence->record
              << ")\n";
    return kViolation;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
    std::optional<std::string> network;
    std::vector<int> gadget;  // h k J
    std::int64_t b = 1;
    std::string r = "0";
    std::optional<int> d;
    std::size_t budget = 100;
    std::string schedule_mode = "constant-one";
    std::string schedule_arg;
};

int cmd_search(const SearchArgs& a, const Common& common)
{
    Network net;
    std::vector<Path> pool;
    if (a.network) {
        net = load_network(*a.network);
    } else if (a.gadget.size() == 3) {
        GadgetNetwork g = build_gadget({a.gadget[0], a.gadget[1], a.gadget[2]});
        net = g.network;
        pool = gadget_path_pool(g);
    } else {
        throw InputError("search needs --network or --gadget h k J");
    }
    const int d = a.d.value_or(net.max_path_hops());
    if (net.max_path_hops() < d) net.set_max_path_hops(d);
    const std::uint64_t seed = common.seed.value_or(0);
    const Slot horizon = common.horizon.value_or(100);
    const AdversaryBudget budget = AdversaryBudget::make(a.b, Rational::parse(a.r));

    SearchSetup setup;
    setup.schedule = generate_rate_schedule(net, seed, a.schedule_mode, a.schedule_arg);
    setup.path_pool = pool;
    const SearchResult res = search_adversary(net, budget, d, horizon, a.budget, seed, setup);

    fs::create_directories(common.out);
    const fs::path out(common.out);
    {
        auto f = open_output((out / "trace.txt").string());
        write_trace(f, res.trace);
    }
    {
        auto f = open_output((out / "witness.txt").string());
        write_witness(f, net, res.witness);
    }
    {
        auto f = open_output((out / "network.txt").string());
        write_network(f, net);
    }
    std::ostringstream rep;
    rep << "seed = " << seed << "\n";
    rep << "horizon = " << horizon << "\n";
    rep << "achieved_q = " << res.achieved_q << "\n";
    rep << "evaluations = " << res.evaluations << "\n";
    rep << "accepted = " << res.accepted << "\n";
    rep << "packets = " << res.trace.events.size() << "\n";
    bool over = false;
    try {
        const TheoremBounds tb = theorem_bounds(d, budget.b, static_cast<std::int64_t>(max_degree(net)), budget.r);
        rep << "q_bound = " << tb.q_bound << "\n";
        over = Rational(res.achieved_q) > tb.q_bound;
    } catch (const BoundUndefined&) {
        rep << "q_bound = undefined\n";
    }
    auto f = open_output((out / "report.txt").string());
    f << rep.str();
    std::cout << rep.str();
    return common.assert_bounds && over ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Adversarial queueing simulator for collision-free wireless networks"};
    app.require_subcommand(1);

    Common run_c, check_c, sweep_c, gadget_c, search_c;

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
    run_cmd->add_option("config", run_config, "key = value scenario config")->required();
    add_common(run_cmd, run_c);

    CheckArgs check_a;
    auto* check_cmd = app.add_subcommand("check", "decide admissibility of a trace");
    check_cmd->add_option("--network", check_a.network)->required();
    check_cmd->add_option("--trace", check_a.trace)->required();
    check_cmd->add_option("--schedule", check_a.schedule, "rate file (overrides --schedule-mode)");
    check_cmd->add_option("--schedule-mode", check_a.schedule_mode)->capture_default_str();
    check_cmd->add_option("--schedule-arg", check_a.schedule_arg);
    check_cmd->add_option("--witness", check_a.witness);
    check_cmd->add_option("--b", check_a.b)->capture_default_str();
    check_cmd->add_option("--r", check_a.r)->capture_default_str();
    add_common(check_cmd, check_c);

    std::string sweep_config;
    std::optional<std::string> sweep_rates;
    std::optional<int> sweep_trials;
    auto* sweep_cmd = app.add_subcommand("sweep", "seeded trials over injection rates");
    sweep_cmd->add_option("config", sweep_config)->required();
    sweep_cmd->add_option("--r", sweep_rates, "comma-separated rates, strictly increasing");
    sweep_cmd->add_option("--trials", sweep_trials);
    add_common(sweep_cmd, sweep_c);

    GadgetArgs gadget_a;
    auto* gadget_cmd = app.add_subcommand("gadget", "emit a building-block gadget");
    gadget_cmd->add_option("--hops", gadget_a.params.h, "h, the longest path in hops")->capture_default_str();
    gadget_cmd->add_option("--k", gadget_a.params.k)->capture_default_str();
    gadget_cmd->add_option("--depth,-J", gadget_a.params.depth)->capture_default_str();
    gadget_cmd->add_option("--b", gadget_a.b)->capture_default_str();
    gadget_cmd->add_option("--r", gadget_a.r, "injection rate for the bundled trace (default 1/(2h))");
    gadget_cmd->add_flag("--equivalence", gadget_a.equivalence, "compare wireless and wireline runs");
    add_common(gadget_cmd, gadget_c);

    SearchArgs search_a;
    auto* search_cmd = app.add_subcommand("search", "look for high-delay admissible traces");
    search_cmd->add_option("--network", search_a.network);
    search_cmd->add_option("--gadget", search_a.gadget, "h k J")->expected(3);
    search_cmd->add_option("--b", search_a.b)->capture_default_str();
    search_cmd->add_option("--r", search_a.r)->capture_default_str();
    search_cmd->add_option("--d", search_a.d);
    search_cmd->add_option("--budget", search_a.budget, "mutations to try")->capture_default_str();
    search_cmd->add_option("--schedule-mode", search_a.schedule_mode)->capture_default_str();
    search_cmd->add_option("--schedule-arg", search_a.schedule_arg);
    add_common(search_cmd, search_c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*run_cmd) return cmd_run(run_config, run_c);
        if (*check_cmd) return cmd_check(check_a, check_c);
        if (*sweep_cmd) return cmd_sweep(sweep_config, sweep_rates, sweep_trials, sweep_c);
        if (*gadget_cmd) return cmd_gadget(gadget_a, gadget_c);
        if (*search_cmd) return cmd_search(search_a, search_c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
