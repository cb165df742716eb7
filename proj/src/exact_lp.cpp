#include "aqsim/exact_lp.hpp"

#include <stdexcept>

namespace aqsim::lp {

namespace {

class Tableau {
public:
    explicit Tableau(const FeasibilityProblem& problem)
        : num_vars_(problem.num_vars)
    {
        const std::size_t m = problem.constraints.size();
        std::size_t num_slack = 0;
        for (const auto& c : problem.constraints) {
            if (c.sense != Sense::Equal) ++num_slack;
        }
        slack_begin_ = num_vars_;
        art_begin_ = slack_begin_ + num_slack;
        cols_ = art_begin_ + m;
        rows_.assign(m, std::vector<Exact>(cols_));
        rhs_.assign(m, Exact(0));
        basis_.assign(m, 0);
        dead_.assign(cols_, false);
        cost_.assign(cols_, Exact(0));

        std::size_t slack = slack_begin_;
        for (std::size_t r = 0; r < m; ++r) {
            const auto& c = problem.constraints[r];
            auto& row = rows_[r];
            for (const auto& [var, coef] : c.terms) {
                if (var >= num_vars_) throw std::out_of_range("constraint references unknown variable");
                row[var] += coef;
            }
            if (c.sense == Sense::LessEq) row[slack++] = 1;
            if (c.sense == Sense::GreaterEq) row[slack++] = -1;
            rhs_[r] = c.rhs;
            if (rhs_[r] < 0) {
                for (auto& v : row) v = -v;
                rhs_[r] = -rhs_[r];
            }
            row[art_begin_ + r] = 1;
            basis_[r] = art_begin_ + r;
        }

        // Phase-one objective: minimize the sum of artificials, expressed in
        // terms of the non-basic columns.
        objective_ = 0;
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t j = 0; j < art_begin_; ++j) {
                if (!rows_[r][j].is_zero()) cost_[j] -= rows_[r][j];
            }
            objective_ -= rhs_[r];
        }
    }

    bool solve()
    {
        for (;;) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!dead_[j] && cost_[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) break;

            std::size_t leave = rows_.size();
            Exact best_ratio;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                const Exact& a = rows_[r][enter];
                if (a <= 0) continue;
                Exact ratio = rhs_[r] / a;
                if (leave == rows_.size() || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            // Phase one is bounded below by 0, so an entering column always
            // has a positive entry.
            if (leave == rows_.size()) throw std::logic_error("phase-one simplex unbounded");
            pivot(leave, enter);
        }
        return objective_ == 0;
    }

    std::vector<Exact> solution() const
    {
        std::vector<Exact> x(num_vars_, Exact(0));
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (basis_[r] < num_vars_) x[basis_[r]] = rhs_[r];
        }
        return x;
    }

private:
    void pivot(std::size_t prow, std::size_t pcol)
    {
        auto& row = rows_[prow];
        const Exact inv = 1 / row[pcol];
        std::vector<std::size_t> nz;
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!row[j].is_zero()) {
                row[j] *= inv;
                nz.push_back(j);
            }
        }
        rhs_[prow] *= inv;

        auto eliminate = [&](std::vector<Exact>& target, Exact& target_rhs) {
            const Exact factor = target[pcol];
            if (factor.is_zero()) return;
            for (std::size_t j : nz) target[j] -= factor * row[j];
            target_rhs -= factor * rhs_[prow];
        };
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (r != prow) eliminate(rows_[r], rhs_[r]);
        }
        eliminate(cost_, objective_);

        // An artificial that leaves the basis is never needed again.
        if (basis_[prow] >= art_begin_) dead_[basis_[prow]] = true;
        basis_[prow] = pcol;
    }

    std::size_t num_vars_;
    std::size_t slack_begin_ = 0;
    std::size_t art_begin_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::vector<Exact>> rows_;
    std::vector<Exact> rhs_;
    std::vector<std::size_t> basis_;
    std::vector<bool> dead_;
    std::vector<Exact> cost_;
    Exact objective_;
};

}  // namespace

std::optional<std::vector<Exact>> find_feasible_point(const FeasibilityProblem& problem)
{
    Tableau tableau(problem);
    if (!tableau.solve()) return std::nullopt;
    return tableau.solution();
}

}  // namespace aqsim::lp
