#include "aqsim/adversary.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "aqsim/exact_lp.hpp"
#include "aqsim/text_io.hpp"

namespace aqsim {

AdversaryBudget AdversaryBudget::make(std::int64_t b, Rational r)
{
    AdversaryBudget budget{b, r};
    budget.validate();
    return budget;
}

void AdversaryBudget::validate() const
{
    if (b < 1) throw std::invalid_argument("burstiness b must be >= 1");
    if (r < Rational(0) || r >= Rational(1)) throw std::invalid_argument("injection rate r must satisfy 0 <= r < 1");
}

void InjectionTrace::validate(const Network& network) const
{
    Slot last = 0;
    for (const auto& ev : events) {
        if (ev.slot < 0 || ev.slot >= horizon) throw std::invalid_argument("event slot outside trace horizon");
        if (ev.slot < last) throw std::invalid_argument("events not ordered by slot");
        last = ev.slot;
        if (ev.packet.size <= Rational(0)) throw std::invalid_argument("packet size must be positive");
        if (ev.packet.injected_at != ev.slot) throw std::invalid_argument("packet injection slot mismatch");
        auto verdict = validate_path(network, ev.packet.path);
        if (!verdict.valid()) {
            throw std::invalid_argument("packet " + std::to_string(ev.packet.id) + ": " + verdict.describe());
        }
    }
}

// ---------------------------------------------------------------------------
// Rate schedules

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RateSchedule RateSchedule::constant_one(const Network& network)
{
    RateSchedule s;
    s.mode_ = RateMode::ConstantOne;
    s.num_links_ = network.num_links();
    return s;
}

RateSchedule RateSchedule::uniform_random(const Network& network, std::uint64_t seed, std::int64_t granularity)
{
    if (granularity < 1) throw std::invalid_argument("rate granularity must be >= 1");
    RateSchedule s;
    s.mode_ = RateMode::UniformRandom;
    s.num_links_ = network.num_links();
    s.seed_ = seed;
    s.granularity_ = granularity;
    return s;
}

RateSchedule RateSchedule::on_off(const Network& network, Slot period)
{
    if (period < 1) throw std::invalid_argument("on-off period must be >= 1");
    RateSchedule s;
    s.mode_ = RateMode::OnOff;
    s.num_links_ = network.num_links();
    s.period_ = period;
    return s;
}

RateSchedule RateSchedule::table(const Network& network, std::map<std::pair<Slot, LinkId>, Rational> entries)
{
    RateSchedule s;
    s.mode_ = RateMode::Table;
    s.num_links_ = network.num_links();
    for (const auto& [key, value] : entries) {
        if (key.second >= s.num_links_) throw std::invalid_argument("rate for unknown link");
        if (value < Rational(0) || value > Rational(1)) throw std::invalid_argument("rate outside [0, 1]");
    }
    s.entries_ = std::move(entries);
    return s;
}

Rational RateSchedule::rate(LinkId link, Slot t) const
{
    if (link >= num_links_) return Rational(0);
    switch (mode_) {
        case RateMode::ConstantOne: return Rational(1);
        case RateMode::UniformRandom: {
            std::uint64_t h = splitmix64(seed_ ^ splitmix64((static_cast<std::uint64_t>(t) << 20) ^ link));
            auto k = static_cast<std::int64_t>(h % static_cast<std::uint64_t>(granularity_ + 1));
            return Rational(k, granularity_);
        }
        case RateMode::OnOff: {
            Slot phase = t % period_;
            return phase < (period_ + 1) / 2 ? Rational(1) : Rational(0);
        }
        case RateMode::Table: {
            auto it = entries_.find({t, link});
            return it == entries_.end() ? Rational(0) : it->second;
        }
    }
    return Rational(0);
}

std::int64_t RateSchedule::denominator_lcm() const
{
    switch (mode_) {
        case RateMode::UniformRandom: return granularity_;
        case RateMode::Table: {
            std::int64_t l = 1;
            for (const auto& [key, value] : entries_) l = std::lcm(l, value.den());
            return l;
        }
        default: return 1;
    }
}

RateSchedule generate_rate_schedule(const Network& network, std::uint64_t seed, const std::string& mode,
                                    const std::string& argument)
{
    if (mode == "constant-one") return RateSchedule::constant_one(network);
    if (mode == "uniform-random") {
        return RateSchedule::uniform_random(network, seed, argument.empty() ? 4 : parse_integer(argument));
    }
    if (mode == "on-off") return RateSchedule::on_off(network, argument.empty() ? 2 : parse_integer(argument));
    if (mode == "from-file") {
        if (argument.empty()) throw std::invalid_argument("from-file schedule needs a path");
        return load_schedule(argument, network);
    }
    throw std::invalid_argument("unknown schedule mode '" + mode + "'");
}

// ---------------------------------------------------------------------------
// Witnesses and verdicts

AdmissibilityWitness::AdmissibilityWitness(const Network& network, Slot horizon)
    : horizon_(horizon),
      num_links_(network.num_links()),
      values_(static_cast<std::size_t>(std::max<Slot>(horizon, 0)) * network.num_links())
{
    if (horizon < 0) throw std::invalid_argument("negative witness horizon");
}

AdmissibilityWitness AdmissibilityWitness::uniform(const Network& network, Slot horizon)
{
    AdmissibilityWitness w(network, horizon);
    for (NodeId i = 0; i < network.num_nodes(); ++i) {
        auto m = static_cast<std::int64_t>(network.degree(i));
        if (m == 0) continue;
        Rational share(1, m);
        for (Slot t = 0; t < horizon; ++t) {
            for (std::size_t k = 0; k < network.degree(i); ++k) w.at(network.first_link(i) + k, t) = share;
        }
    }
    return w;
}

std::string AdmissibilityVerdict::describe() const
{
    if (admissible) return "admissible";
    if (!violation) return "inadmissible";
    std::ostringstream os;
    if (const auto* f = std::get_if<FractionViolation>(&*violation)) {
        if (f->kind == FractionViolation::Kind::OutOfRange) {
            os << "inadmissible: fraction x(" << f->node << "," << f->peer << ") at slot " << f->slot << " = "
               << f->value << " outside [0,1]";
        } else {
            os << "inadmissible: fractions of node " << f->node << " at slot " << f->slot << " sum to " << f->value
               << ", not 1";
        }
    } else {
        const auto& w = std::get<WindowViolation>(*violation);
        os << "inadmissible: link " << w.link << " window start " << w.start << " length " << w.length << " load "
           << w.lhs << " > " << w.rhs;
    }
    return os.str();
}

Rational aggregate_link_load(const InjectionTrace& trace, const Link& link, Slot t)
{
    Rational total;
    for (const auto& ev : trace.events) {
        if (ev.slot != t) continue;
        const auto& links = ev.packet.path.links;
        if (std::find(links.begin(), links.end(), link) != links.end()) total += ev.packet.size;
    }
    return total;
}

std::vector<Rational> link_load_table(const Network& network, const InjectionTrace& trace)
{
    const std::size_t links = network.num_links();
    std::vector<Rational> table(static_cast<std::size_t>(trace.horizon) * links);
    for (const auto& ev : trace.events) {
        if (ev.slot < 0 || ev.slot >= trace.horizon) throw std::invalid_argument("event slot outside trace horizon");
        for (const auto& l : ev.packet.path.links) {
            auto id = network.link_id(l.from, l.to);
            if (!id) throw std::invalid_argument("packet path uses a non-edge");
            table[static_cast<std::size_t>(ev.slot) * links + *id] += ev.packet.size;
        }
    }
    return table;
}

namespace {

void require_horizon(const InjectionTrace& trace, const AdmissibilityWitness& witness, const Network& network)
{
    if (witness.horizon() < trace.horizon) throw std::invalid_argument("witness shorter than trace horizon");
    if (witness.num_links() != network.num_links()) throw std::invalid_argument("witness built for another network");
}

std::optional<FractionViolation> check_fractions(const Network& network, const AdmissibilityWitness& witness,
                                                 Slot horizon)
{
    const Rational zero(0), one(1);
    for (Slot t = 0; t < horizon; ++t) {
        for (NodeId i = 0; i < network.num_nodes(); ++i) {
            const auto& nbrs = network.neighbors(i);
            if (nbrs.empty()) continue;
            Rational sum;
            for (std::size_t k = 0; k < nbrs.size(); ++k) {
                const Rational& x = witness.at(network.first_link(i) + k, t);
                if (x < zero || x > one) {
                    return FractionViolation{FractionViolation::Kind::OutOfRange, i, t, nbrs[k], x};
                }
                sum += x;
            }
            if (sum != one) return FractionViolation{FractionViolation::Kind::SumNotOne, i, t, -1, sum};
        }
    }
    return std::nullopt;
}

AdmissibilityVerdict accept(const AdmissibilityWitness& witness)
{
    AdmissibilityVerdict v;
    v.admissible = true;
    v.witness = witness;
    return v;
}

AdmissibilityVerdict reject(AdmissibilityViolation violation)
{
    AdmissibilityVerdict v;
    v.violation = std::move(violation);
    return v;
}

// Deficit recursion over every link, fractions taken as given.
std::optional<WindowViolation> scan_windows(const Network& network, const InjectionTrace& trace,
                                            const RateSchedule& schedule, const AdversaryBudget& budget,
                                            const AdmissibilityWitness& witness)
{
    const std::size_t links = network.num_links();
    const auto loads = link_load_table(network, trace);
    const Rational burst(budget.b);
    std::vector<Rational> deficit(links);
    std::vector<Slot> start(links, 0);

    for (Slot t = 0; t < trace.horizon; ++t) {
        for (LinkId l = 0; l < links; ++l) {
            // The maximal-excess window ending at t extends the one ending at
            // t-1 only while that one had strictly positive excess.
            if (deficit[l].sign() <= 0) start[l] = t;
            const Rational& load = loads[static_cast<std::size_t>(t) * links + l];
            Rational service = budget.r * schedule.rate(l, t) * witness.at(l, t);
            Rational next = deficit[l] + load - service;
            deficit[l] = next.sign() > 0 ? next : Rational(0);
            if (deficit[l] > burst) {
                WindowViolation w;
                w.link = network.link_at(l);
                w.start = start[l];
                w.length = t - start[l] + 1;
                Rational lhs, svc;
                for (Slot s = w.start; s <= t; ++s) {
                    lhs += loads[static_cast<std::size_t>(s) * links + l];
                    svc += schedule.rate(l, s) * witness.at(l, s);
                }
                w.lhs = lhs;
                w.rhs = budget.r * svc + burst;
                return w;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

AdmissibilityVerdict verify_witness(const Network& network, const InjectionTrace& trace,
                                    const RateSchedule& schedule, const AdversaryBudget& budget,
                                    const AdmissibilityWitness& witness)
{
    budget.validate();
    require_horizon(trace, witness, network);
    if (auto bad = check_fractions(network, witness, trace.horizon)) return reject(*bad);
    if (auto w = scan_windows(network, trace, schedule, budget, witness)) return reject(*w);
    return accept(witness);
}

std::optional<WindowViolation> single_link_certificate(const Network& network, const InjectionTrace& trace,
                                                       const RateSchedule& schedule, const AdversaryBudget& budget)
{
    budget.validate();
    AdmissibilityWitness all_in(network, trace.horizon);
    for (Slot t = 0; t < trace.horizon; ++t) {
        for (LinkId l = 0; l < network.num_links(); ++l) all_in.at(l, t) = Rational(1);
    }
    return scan_windows(network, trace, schedule, budget, all_in);
}

AdmissibilityVerdict verify_witness_bruteforce(const Network& network, const InjectionTrace& trace,
                                               const RateSchedule& schedule, const AdversaryBudget& budget,
                                               const AdmissibilityWitness& witness)
{
    budget.validate();
    require_horizon(trace, witness, network);

    // Fractions, straight from the definition.
    for (Slot t = 0; t < trace.horizon; ++t) {
        for (NodeId i = 0; i < network.num_nodes(); ++i) {
            if (network.degree(i) == 0) continue;
            Rational sum;
            for (NodeId j : network.neighbors(i)) {
                Rational x = witness.at(*network.link_id(i, j), t);
                if (x.sign() < 0 || x > Rational(1)) {
                    return reject(FractionViolation{FractionViolation::Kind::OutOfRange, i, t, j, x});
                }
                sum += x;
            }
            if (sum != Rational(1)) return reject(FractionViolation{FractionViolation::Kind::SumNotOne, i, t, -1, sum});
        }
    }

    std::vector<std::vector<Rational>> load(network.num_links());
    for (LinkId l = 0; l < network.num_links(); ++l) {
        for (Slot t = 0; t < trace.horizon; ++t) load[l].push_back(aggregate_link_load(trace, network.link_at(l), t));
    }

    // Every window [s, t], scanned by end slot, then link, then growing length.
    for (Slot t = 0; t < trace.horizon; ++t) {
        for (LinkId l = 0; l < network.num_links(); ++l) {
            const Link link = network.link_at(l);
            std::optional<WindowViolation> worst;
            Rational worst_excess;
            Rational lhs, svc;
            for (Slot s = t; s >= 0; --s) {
                lhs += load[l][static_cast<std::size_t>(s)];
                svc += schedule.rate(l, s) * witness.at(l, s);
                Rational rhs = budget.r * svc + Rational(budget.b);
                Rational excess = lhs - rhs;
                if (excess.sign() > 0 && (!worst || excess > worst_excess)) {
                    worst = WindowViolation{link, s, t - s + 1, lhs, rhs};
                    worst_excess = excess;
                }
            }
            if (worst) return reject(*worst);
        }
    }
    return accept(witness);
}

// ---------------------------------------------------------------------------
// Witness search

namespace {

lp::Exact to_exact(const Rational& q)
{
    return lp::Exact(q.num()) / lp::Exact(q.den());
}

Rational from_exact(const lp::Exact& q)
{
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    auto n = numerator(q);
    auto d = denominator(q);
    constexpr auto lo = std::numeric_limits<std::int64_t>::min();
    constexpr auto hi = std::numeric_limits<std::int64_t>::max();
    if (n < lo || n > hi || d > hi) throw std::overflow_error("witness fraction exceeds 64-bit rational range");
    return Rational(n.convert_to<std::int64_t>(), d.convert_to<std::int64_t>());
}

}  // namespace

std::optional<AdmissibilityWitness> find_witness(const Network& network, const InjectionTrace& trace,
                                                 const RateSchedule& schedule, const AdversaryBudget& budget)
{
    budget.validate();
    const Slot horizon = trace.horizon;
    const std::size_t links = network.num_links();
    const auto loads = link_load_table(network, trace);
    auto witness = AdmissibilityWitness::uniform(network, horizon);

    // Constraints never couple different nodes, so each node is its own system.
    for (NodeId i = 0; i < network.num_nodes(); ++i) {
        const std::size_t m = network.degree(i);
        if (m == 0) continue;
        const LinkId first = network.first_link(i);

        lp::FeasibilityProblem problem;
        problem.num_vars = m * static_cast<std::size_t>(horizon);
        auto var = [&](std::size_t k, Slot t) { return static_cast<std::size_t>(t) * m + k; };

        bool loaded = false;
        for (std::size_t k = 0; k < m; ++k) {
            const LinkId l = first + k;
            for (Slot s = 0; s < horizon; ++s) {
                Rational demand = -Rational(budget.b);
                for (Slot t = s; t < horizon; ++t) {
                    demand += loads[static_cast<std::size_t>(t) * links + l];
                    if (demand.sign() <= 0) continue;
                    // r * sum_{u in [s,t]} r_l(u) x_l(u) >= load - b
                    lp::Constraint c;
                    c.sense = lp::Sense::GreaterEq;
                    c.rhs = to_exact(demand);
                    for (Slot u = s; u <= t; ++u) {
                        Rational coef = budget.r * schedule.rate(l, u);
                        if (!coef.is_zero()) c.terms.emplace_back(var(k, u), to_exact(coef));
                    }
                    problem.constraints.push_back(std::move(c));
                    loaded = true;
                }
            }
        }
        if (!loaded) continue;

        for (Slot t = 0; t < horizon; ++t) {
            lp::Constraint c;
            c.sense = lp::Sense::Equal;
            c.rhs = 1;
            for (std::size_t k = 0; k < m; ++k) c.terms.emplace_back(var(k, t), lp::Exact(1));
            problem.constraints.push_back(std::move(c));
        }

        auto point = lp::find_feasible_point(problem);
        if (!point) return std::nullopt;
        for (Slot t = 0; t < horizon; ++t) {
            for (std::size_t k = 0; k < m; ++k) witness.at(first + k, t) = from_exact((*point)[var(k, t)]);
        }
    }

    if (!verify_witness(network, trace, schedule, budget, witness).admissible) {
        throw std::logic_error("find_witness produced a witness that does not verify");
    }
    return witness;
}

// ---------------------------------------------------------------------------
// Generator

GeneratedTrace generate_admissible_trace(const Network& network, const RateSchedule& schedule,
                                         const AdversaryBudget& budget, std::uint64_t seed, Slot horizon,
                                         const std::vector<Path>& path_pool, const GeneratorOptions& options)
{
    budget.validate();
    if (path_pool.empty()) throw std::invalid_argument("empty path pool");
    if (horizon < 0) throw std::invalid_argument("negative horizon");
    if (options.witness_granularity < 1) throw std::invalid_argument("witness granularity must be >= 1");
    if (options.witness && (options.witness->horizon() < horizon || options.witness->num_links() != network.num_links())) {
        throw std::invalid_argument("fixed witness does not cover the network and horizon");
    }
    std::vector<std::vector<LinkId>> pool_links;
    for (const auto& p : path_pool) {
        auto v = validate_path(network, p);
        if (!v.valid()) throw std::invalid_argument("path pool: " + v.describe());
        std::vector<LinkId> ids;
        for (const auto& l : p.links) ids.push_back(*network.link_id(l.from, l.to));
        pool_links.push_back(std::move(ids));
    }

    std::mt19937_64 rng(seed);
    std::int64_t granularity = options.witness_granularity;
    if (options.witness) {
        for (Slot t = 0; t < horizon; ++t) {
            for (LinkId l = 0; l < network.num_links(); ++l) granularity = std::lcm(granularity, options.witness->at(l, t).den());
        }
    }
    // Every refill r * r_ij(t) * x_ij(t) is a multiple of 1/unit, and so are
    // all injected sizes, which keeps denominators bounded.
    const std::int64_t unit = budget.r.den() * schedule.denominator_lcm() * granularity;
    const Rational burst(budget.b);

    GeneratedTrace out{InjectionTrace{horizon, {}}, AdmissibilityWitness(network, horizon)};
    std::vector<Rational> tokens(network.num_links(), burst);
    std::vector<std::int64_t> cuts;
    PacketId next_id = 0;

    for (Slot t = 0; t < horizon; ++t) {
        // Witness first: a random composition of `granularity` per node.
        for (NodeId i = 0; i < network.num_nodes(); ++i) {
            if (options.witness) {
                for (LinkId l = network.first_link(i); l < network.first_link(i) + network.degree(i); ++l) {
                    out.witness.at(l, t) = options.witness->at(l, t);
                    tokens[l] += budget.r * schedule.rate(l, t) * out.witness.at(l, t);
                }
                continue;
            }
            const std::size_t m = network.degree(i);
            if (m == 0) continue;
            cuts.assign(1, 0);
            std::uniform_int_distribution<std::int64_t> cut(0, granularity);
            for (std::size_t k = 1; k < m; ++k) cuts.push_back(cut(rng));
            cuts.push_back(granularity);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t k = 0; k < m; ++k) {
                const LinkId l = network.first_link(i) + k;
                Rational x(cuts[k + 1] - cuts[k], granularity);
                out.witness.at(l, t) = x;
                tokens[l] += budget.r * schedule.rate(l, t) * x;
            }
        }

        std::uniform_int_distribution<int> attempts_dist(0, options.max_attempts_per_slot);
        std::uniform_int_distribution<std::size_t> pick(0, path_pool.size() - 1);
        std::uniform_int_distribution<std::int64_t> divisor(1, 3);
        const int attempts = attempts_dist(rng);
        for (int a = 0; a < attempts; ++a) {
            const std::size_t p = pick(rng);
            Rational avail = tokens[pool_links[p].front()];
            for (LinkId l : pool_links[p]) avail = min(avail, tokens[l]);
            const std::int64_t units = (avail * Rational(unit)).floor() / divisor(rng);
            if (units <= 0) continue;
            Rational size(units, unit);
            for (LinkId l : pool_links[p]) tokens[l] -= size;
            out.trace.events.push_back({t, Packet{next_id++, path_pool[p], size, t}});
        }

        for (auto& tk : tokens) {
            if (tk > burst) tk = burst;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text formats

InjectionTrace read_trace(std::istream& in, const Network& network, const std::string& source)
{
    InjectionTrace trace;
    std::optional<Slot> declared;
    Slot max_slot = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize_line(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "horizon" && tok.size() == 2) {
                declared = parse_integer(tok[1]);
                if (*declared < 0) throw std::invalid_argument("negative horizon");
            } else if (tok[0] == "inject" && tok.size() >= 5) {
                InjectionEvent ev;
                ev.slot = parse_integer(tok[1]);
                if (ev.slot < 0) throw std::invalid_argument("negative slot");
                ev.packet.size = Rational::parse(tok[2]);
                if (ev.packet.size.sign() <= 0) throw std::invalid_argument("packet size must be positive");
                std::vector<NodeId> nodes;
                for (std::size_t k = 3; k < tok.size(); ++k) nodes.push_back(static_cast<NodeId>(parse_integer(tok[k])));
                ev.packet.path = Path::from_nodes(nodes);
                auto verdict = validate_path(network, ev.packet.path);
                if (!verdict.valid()) throw std::invalid_argument(verdict.describe());
                ev.packet.injected_at = ev.slot;
                max_slot = std::max(max_slot, ev.slot);
                trace.events.push_back(std::move(ev));
            } else {
                throw std::invalid_argument("unrecognized line");
            }
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const InjectionEvent& a, const InjectionEvent& b) { return a.slot < b.slot; });
    for (std::size_t k = 0; k < trace.events.size(); ++k) trace.events[k].packet.id = static_cast<PacketId>(k);
    trace.horizon = declared.value_or(max_slot + 1);
    if (max_slot >= trace.horizon) throw ParseError(source, lineno, "event beyond declared horizon");
    return trace;
}

InjectionTrace load_trace(const std::string& path, const Network& network)
{
    auto in = open_input(path);
    return read_trace(in, network, path);
}

void write_trace(std::ostream& out, const InjectionTrace& trace)
{
    out << "horizon " << trace.horizon << "\n";
    for (const auto& ev : trace.events) {
        out << "inject " << ev.slot << " " << ev.packet.size.str();
        for (NodeId n : ev.packet.path.nodes()) out << " " << n;
        out << "\n";
    }
}

namespace {

LinkId parse_link(const Network& network, const std::string& i, const std::string& j)
{
    auto from = static_cast<NodeId>(parse_integer(i));
    auto to = static_cast<NodeId>(parse_integer(j));
    auto id = network.link_id(from, to);
    if (!id) throw std::invalid_argument(i + " " + j + " is not an edge");
    return *id;
}

}  // namespace

RateSchedule read_schedule(std::istream& in, const Network& network, const std::string& source)
{
    std::map<std::pair<Slot, LinkId>, Rational> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize_line(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] != "rate" || tok.size() != 5) throw std::invalid_argument("expected 'rate <slot> <i> <j> <q>'");
            Slot t = parse_integer(tok[1]);
            if (t < 0) throw std::invalid_argument("negative slot");
            LinkId l = parse_link(network, tok[2], tok[3]);
            Rational q = Rational::parse(tok[4]);
            if (q.sign() < 0 || q > Rational(1)) throw std::invalid_argument("rate outside [0, 1]");
            entries[{t, l}] = q;
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return RateSchedule::table(network, std::move(entries));
}

RateSchedule load_schedule(const std::string& path, const Network& network)
{
    auto in = open_input(path);
    return read_schedule(in, network, path);
}

void write_schedule(std::ostream& out, const Network& network, const RateSchedule& schedule, Slot horizon)
{
    for (Slot t = 0; t < horizon; ++t) {
        for (LinkId l = 0; l < network.num_links(); ++l) {
            Rational q = schedule.rate(l, t);
            if (q.is_zero()) continue;
            Link link = network.link_at(l);
            out << "rate " << t << " " << link.from << " " << link.to << " " << q.str() << "\n";
        }
    }
}

AdmissibilityWitness read_witness(std::istream& in, const Network& network, std::optional<Slot> horizon,
                                  const std::string& source)
{
    struct Entry {
        Slot t;
        LinkId l;
        Rational q;
        std::size_t line;
    };
    std::vector<Entry> entries;
    Slot max_slot = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tok = tokenize_line(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] != "frac" || tok.size() != 5) throw std::invalid_argument("expected 'frac <slot> <i> <j> <q>'");
            Slot t = parse_integer(tok[1]);
            if (t < 0) throw std::invalid_argument("negative slot");
            entries.push_back({t, parse_link(network, tok[2], tok[3]), Rational::parse(tok[4]), lineno});
            max_slot = std::max(max_slot, t);
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    AdmissibilityWitness w(network, horizon.value_or(max_slot + 1));
    for (const auto& e : entries) {
        if (e.t >= w.horizon()) throw ParseError(source, e.line, "slot beyond witness horizon");
        w.at(e.l, e.t) = e.q;
    }
    return w;
}

AdmissibilityWitness load_witness(const std::string& path, const Network& network, std::optional<Slot> horizon)
{
    auto in = open_input(path);
    return read_witness(in, network, horizon, path);
}

void write_witness(std::ostream& out, const Network& network, const AdmissibilityWitness& witness)
{
    for (Slot t = 0; t < witness.horizon(); ++t) {
        for (LinkId l = 0; l < witness.num_links(); ++l) {
            const Rational& q = witness.at(l, t);
            if (q.is_zero()) continue;
            Link link = network.link_at(l);
            out << "frac " << t << " " << link.from << " " << link.to << " " << q.str() << "\n";
        }
    }
}

}  // namespace aqsim
