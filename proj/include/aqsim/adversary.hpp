// adversary.hpp - The (b, r)-adversary: per-slot link rates, injection traces,
// and the admissibility conditions that bound what it may inject.
//
// A trace is admissible for rate r and burst b when there are fractions
// x_ij(t) in [0, 1] with sum_j x_ij(t) = 1 for every node i and slot t, and
// for every directed link ij and every window W of consecutive slots
//
//     sum_{t in W} I_ij(t) <= r * sum_{t in W} r_ij(t) * x_ij(t) + b
//
// where I_ij(t) is the data injected at t whose path contains ij. Fractions
// are only carried for neighbors; non-neighbors implicitly get 0.

#ifndef AQSIM_ADVERSARY_HPP
#define AQSIM_ADVERSARY_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aqsim/network.hpp"
#include "aqsim/rational.hpp"

namespace aqsim {

struct AdversaryBudget {
    std::int64_t b = 1;  // burstiness, >= 1
    Rational r;          // injection rate, 0 <= r < 1

    // Throws std::invalid_argument unless b >= 1 and 0 <= r < 1.
    static AdversaryBudget make(std::int64_t b, Rational r);
    void validate() const;
};

// A fluid data unit bound to one path.
struct Packet {
    PacketId id = 0;
    Path path;
    Rational size;
    Slot injected_at = 0;
};

struct InjectionEvent {
    Slot slot = 0;
    Packet packet;
};

struct InjectionTrace {
    Slot horizon = 0;
    std::vector<InjectionEvent> events;  // ordered by slot

    // Throws std::invalid_argument on unsorted/out-of-horizon events,
    // non-positive sizes or invalid paths.
    void validate(const Network& network) const;
};

enum class RateMode { ConstantOne, UniformRandom, OnOff, Table };

// r_ij(t) for every directed link and slot. Generated modes are evaluated on
// demand, so the schedule has no horizon of its own; table entries that are
// missing read as 0.
class RateSchedule {
public:
    RateSchedule() = default;

    static RateSchedule constant_one(const Network& network);
    // Each (link, slot) draws k/granularity with k uniform in [0, granularity].
    static RateSchedule uniform_random(const Network& network, std::uint64_t seed, std::int64_t granularity = 4);
    // Rate 1 for the first ceil(period/2) slots of every period, then 0.
    static RateSchedule on_off(const Network& network, Slot period);
    static RateSchedule table(const Network& network, std::map<std::pair<Slot, LinkId>, Rational> entries);

    RateMode mode() const { return mode_; }
    Rational rate(LinkId link, Slot t) const;

    // Common denominator of every rate this schedule can return.
    std::int64_t denominator_lcm() const;

    const std::map<std::pair<Slot, LinkId>, Rational>& entries() const { return entries_; }

private:
    RateMode mode_ = RateMode::ConstantOne;
    std::size_t num_links_ = 0;
    std::uint64_t seed_ = 0;
    std::int64_t granularity_ = 1;
    Slot period_ = 2;
    std::map<std::pair<Slot, LinkId>, Rational> entries_;
};

// mode is one of constant-one, uniform-random, on-off, from-file.
// `argument` is the on-off period or the from-file path.
RateSchedule generate_rate_schedule(const Network& network, std::uint64_t seed, const std::string& mode,
                                    const std::string& argument = {});

// Fractions x_ij(t) for t in [0, horizon), stored per directed link.
class AdmissibilityWitness {
public:
    AdmissibilityWitness() = default;
    AdmissibilityWitness(const Network& network, Slot horizon);

    // x_ij(t) = 1/|N(i)| everywhere.
    static AdmissibilityWitness uniform(const Network& network, Slot horizon);

    Slot horizon() const { return horizon_; }
    std::size_t num_links() const { return num_links_; }

    const Rational& at(LinkId link, Slot t) const { return values_[index(link, t)]; }
    Rational& at(LinkId link, Slot t) { return values_[index(link, t)]; }

    friend bool operator==(const AdmissibilityWitness&, const AdmissibilityWitness&) = default;

private:
    std::size_t index(LinkId link, Slot t) const { return static_cast<std::size_t>(t) * num_links_ + link; }

    Slot horizon_ = 0;
    std::size_t num_links_ = 0;
    std::vector<Rational> values_;
};

// A fraction outside [0, 1], or a node/slot whose fractions do not sum to 1.
struct FractionViolation {
    enum class Kind { OutOfRange, SumNotOne };
    Kind kind = Kind::SumNotOne;
    NodeId node = 0;
    Slot slot = 0;
    NodeId peer = -1;  // OutOfRange only
    Rational value;    // offending fraction or the sum

    friend bool operator==(const FractionViolation&, const FractionViolation&) = default;
};

// A window [start, start + length) on which the injected load exceeds
// r * (available service) + b. Among violated windows we report the one
// with the earliest end slot (ties: lowest link id) and, for that end, the
// largest excess (ties: shortest window).
struct WindowViolation {
    Link link;
    Slot start = 0;
    Slot length = 0;
    Rational lhs;  // injected load
    Rational rhs;  // r * service + b

    friend bool operator==(const WindowViolation&, const WindowViolation&) = default;
};

using AdmissibilityViolation = std::variant<FractionViolation, WindowViolation>;

struct AdmissibilityVerdict {
    bool admissible = false;
    std::optional<AdmissibilityViolation> violation;
    std::optional<AdmissibilityWitness> witness;

    std::string describe() const;
};

// I_ij(t): total size of packets injected at t whose path contains `link`.
Rational aggregate_link_load(const InjectionTrace& trace, const Link& link, Slot t);

// I_ij(t) for every link id and t < trace.horizon, laid out [t * num_links + link].
std::vector<Rational> link_load_table(const Network& network, const InjectionTrace& trace);

// Deficit recursion D(t) = max(0, D(t-1) + I(t) - r r_ij(t) x_ij(t)),
// accepting iff D(t) <= b on every link and slot. O(T * links).
AdmissibilityVerdict verify_witness(const Network& network, const InjectionTrace& trace,
                                    const RateSchedule& schedule, const AdversaryBudget& budget,
                                    const AdmissibilityWitness& witness);

// Same verdict by enumerating every window. O(T^2 * links); test oracle.
AdmissibilityVerdict verify_witness_bruteforce(const Network& network, const InjectionTrace& trace,
                                               const RateSchedule& schedule, const AdversaryBudget& budget,
                                               const AdmissibilityWitness& witness);

// A window that fails even when every fraction on its link is 1. Such a
// window proves that no witness exists; the converse does not hold, since
// fractions also have to share each node's unit.
std::optional<WindowViolation> single_link_certificate(const Network& network, const InjectionTrace& trace,
                                                       const RateSchedule& schedule, const AdversaryBudget& budget);

// Exact feasibility search over the fractions; nullopt iff no witness exists.
std::optional<AdmissibilityWitness> find_witness(const Network& network, const InjectionTrace& trace,
                                                 const RateSchedule& schedule, const AdversaryBudget& budget);

struct GeneratorOptions {
    // Fractions are drawn as random compositions of this integer.
    std::int64_t witness_granularity = 12;
    // Injection attempts per slot are uniform in [0, max_attempts_per_slot].
    int max_attempts_per_slot = 3;
    // Use these fractions instead of drawing them; must cover the horizon.
    std::optional<AdmissibilityWitness> witness;
};

struct GeneratedTrace {
    InjectionTrace trace;
    AdmissibilityWitness witness;
};

// Draws the witness first, then injects greedily against a per-link token
// bucket (cap b, refilled by r * r_ij(t) * x_ij(t) each slot), so the result
// always passes verify_witness with the emitted witness.
GeneratedTrace generate_admissible_trace(const Network& network, const RateSchedule& schedule,
                                         const AdversaryBudget& budget, std::uint64_t seed, Slot horizon,
                                         const std::vector<Path>& path_pool, const GeneratorOptions& options = {});

// Trace file: `horizon <T>` (optional) and
//   inject <slot> <num>/<den> <node0> <node1> ... <nodek>
// Packet ids follow file order.
InjectionTrace read_trace(std::istream& in, const Network& network, const std::string& source = "trace");
InjectionTrace load_trace(const std::string& path, const Network& network);
void write_trace(std::ostream& out, const InjectionTrace& trace);

// Schedule file: `rate <slot> <i> <j> <num>/<den>`; missing entries are 0.
RateSchedule read_schedule(std::istream& in, const Network& network, const std::string& source = "schedule");
RateSchedule load_schedule(const std::string& path, const Network& network);
// Writes every nonzero rate for t < horizon.
void write_schedule(std::ostream& out, const Network& network, const RateSchedule& schedule, Slot horizon);

// Witness file: `frac <slot> <i> <j> <num>/<den>`; missing entries are 0.
// Horizon is `horizon` when given, otherwise the largest slot + 1.
AdmissibilityWitness read_witness(std::istream& in, const Network& network, std::optional<Slot> horizon = {},
                                  const std::string& source = "witness");
AdmissibilityWitness load_witness(const std::string& path, const Network& network, std::optional<Slot> horizon = {});
void write_witness(std::ostream& out, const Network& network, const AdmissibilityWitness& witness);

}  // namespace aqsim

#endif  // AQSIM_ADVERSARY_HPP
