// exact_lp.hpp - Exact rational feasibility for small linear systems.
//
// Phase-one simplex over GMP rationals with Bland's pivoting rule, so it
// always terminates and never rounds. Dense tableau; meant for systems with
// at most a few hundred rows.

#ifndef AQSIM_EXACT_LP_HPP
#define AQSIM_EXACT_LP_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace aqsim::lp {

using Exact = boost::multiprecision::mpq_rational;

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
    std::vector<std::pair<std::size_t, Exact>> terms;  // (variable, coefficient)
    Sense sense = Sense::Equal;
    Exact rhs;
};

struct FeasibilityProblem {
    std::size_t num_vars = 0;  // all variables are >= 0
    std::vector<Constraint> constraints;
};

// A point satisfying every constraint with all variables >= 0, or nullopt
// when the system is infeasible.
std::optional<std::vector<Exact>> find_feasible_point(const FeasibilityProblem& problem);

}  // namespace aqsim::lp

#endif  // AQSIM_EXACT_LP_HPP
