#pragma once

// Dense two-phase tableau simplex with Bland's rule.
//
// Sized for the transport and Lipschitz programs in curvature.hpp: a few
// dozen variables and constraints. Bland's rule keeps the highly degenerate
// transportation polytopes from cycling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "ricci/error.hpp"

namespace ricci::lp {

enum class Relation { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline constexpr double kOptimalityTolerance = 1e-10;
inline constexpr double kPivotTolerance = 1e-12;

struct Term {
    std::size_t var;
    double coef;
};

/// minimize c·x subject to linear constraints; variables are ≥ 0 unless free.
class LinearProgram {
public:
    std::size_t add_variable(double cost, bool free = false) {
        cost_.push_back(cost);
        free_.push_back(free);
        return cost_.size() - 1;
    }

    void add_constraint(std::vector<Term> terms, Relation rel, double rhs) {
        rows_.push_back({std::move(terms), rel, rhs});
    }

    void set_constant(double c) { constant_ = c; }

    std::size_t num_variables() const { return cost_.size(); }
    std::size_t num_constraints() const { return rows_.size(); }

private:
    struct Row {
        std::vector<Term> terms;
        Relation rel;
        double rhs;
    };
    friend struct Solver;

    std::vector<double> cost_;
    std::vector<bool> free_;
    std::vector<Row> rows_;
    double constant_ = 0;
};

struct Solution {
    Status status = Status::infeasible;
    double objective = 0;
    std::vector<double> x;
};

struct Solver {
    explicit Solver(const LinearProgram& lp) : lp_(lp) {}

    Solution run() {
        build();
        Solution sol;

        // Phase 1: drive the artificial variables to zero.
        std::vector<double> phase1(ncols_, 0.0);
        for (std::size_t j = first_artificial_; j < ncols_; ++j) phase1[j] = 1.0;
        auto st = optimize(phase1);
        if (st != Status::optimal) {
            sol.status = st;
            return sol;
        }
        double infeas = 0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= first_artificial_) infeas += rhs(i);
        if (infeas > 1e-9 * (1.0 + scale_)) {
            sol.status = Status::infeasible;
            return sol;
        }
        purge_artificials();

        st = optimize(structural_cost_);
        sol.status = st;
        if (st != Status::optimal) return sol;

        std::vector<double> col_value(ncols_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) col_value[basis_[i]] = rhs(i);
        sol.x.assign(lp_.num_variables(), 0.0);
        double obj = lp_.constant_;
        for (std::size_t v = 0; v < lp_.num_variables(); ++v) {
            double val = col_value[pos_col_[v]];
            if (neg_col_[v] != kNone) val -= col_value[neg_col_[v]];
            sol.x[v] = val;
            obj += lp_.cost_[v] * val;
        }
        sol.objective = obj;
        return sol;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    double& at(std::size_t i, std::size_t j) { return tab_[i * (ncols_ + 1) + j]; }
    double& rhs(std::size_t i) { return tab_[i * (ncols_ + 1) + ncols_]; }
    // Row m_ holds the reduced costs of the current phase.
    double& reduced(std::size_t j) { return at(m_, j); }

    void build() {
        const auto nv = lp_.num_variables();
        pos_col_.assign(nv, kNone);
        neg_col_.assign(nv, kNone);
        std::size_t col = 0;
        for (std::size_t v = 0; v < nv; ++v) {
            pos_col_[v] = col++;
            if (lp_.free_[v]) neg_col_[v] = col++;
        }
        const auto nstruct = col;
        m_ = lp_.rows_.size();

        // Normalize rows to rhs ≥ 0 and decide slack/artificial layout.
        std::vector<int> sign(m_, 1);
        std::vector<Relation> rel(m_);
        std::size_t nslack = 0;
        std::size_t nart = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = lp_.rows_[i];
            rel[i] = row.rel;
            if (row.rhs < 0) {
                sign[i] = -1;
                if (rel[i] == Relation::less_equal)
                    rel[i] = Relation::greater_equal;
                else if (rel[i] == Relation::greater_equal)
                    rel[i] = Relation::less_equal;
            }
            if (rel[i] != Relation::equal) ++nslack;
            if (rel[i] != Relation::less_equal) ++nart;
        }
        first_artificial_ = nstruct + nslack;
        ncols_ = first_artificial_ + nart;
        tab_.assign((m_ + 1) * (ncols_ + 1), 0.0);
        basis_.assign(m_, kNone);
        scale_ = 0;

        std::size_t slack = nstruct;
        std::size_t art = first_artificial_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = lp_.rows_[i];
            for (const auto& t : row.terms) {
                at(i, pos_col_[t.var]) += sign[i] * t.coef;
                if (neg_col_[t.var] != kNone) at(i, neg_col_[t.var]) -= sign[i] * t.coef;
            }
            rhs(i) = sign[i] * row.rhs;
            scale_ = std::max(scale_, std::abs(rhs(i)));
            if (rel[i] == Relation::less_equal) {
                at(i, slack) = 1.0;
                basis_[i] = slack++;
            } else if (rel[i] == Relation::greater_equal) {
                at(i, slack++) = -1.0;
                at(i, art) = 1.0;
                basis_[i] = art++;
            } else {
                at(i, art) = 1.0;
                basis_[i] = art++;
            }
        }

        structural_cost_.assign(ncols_, 0.0);
        for (std::size_t v = 0; v < nv; ++v) {
            structural_cost_[pos_col_[v]] = lp_.cost_[v];
            if (neg_col_[v] != kNone) structural_cost_[neg_col_[v]] = -lp_.cost_[v];
        }
        blocked_.assign(ncols_, false);
    }

    void pivot(std::size_t r, std::size_t c) {
        const auto w = ncols_ + 1;
        const double p = at(r, c);
        double* prow = &tab_[r * w];
        for (std::size_t j = 0; j < w; ++j) prow[j] /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* row = &tab_[i * w];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < w; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
        }
        basis_[r] = c;
    }

    void load_objective(const std::vector<double>& cost) {
        for (std::size_t j = 0; j <= ncols_; ++j) {
            double r = j < ncols_ ? cost[j] : 0.0;
            for (std::size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * at(i, j);
            reduced(j) = r;
        }
    }

    Status optimize(const std::vector<double>& cost) {
        load_objective(cost);
        const std::size_t limit = 20000 + 50 * (m_ + ncols_);
        for (std::size_t iter = 0; iter < limit; ++iter) {
            // Bland: first improving column.
            std::size_t enter = kNone;
            for (std::size_t j = 0; j < ncols_; ++j) {
                if (!blocked_[j] && reduced(j) < -kOptimalityTolerance) {
                    enter = j;
                    break;
                }
            }
            if (enter == kNone) return Status::optimal;

            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                double a = at(i, enter);
                if (a > kPivotTolerance) best = std::min(best, rhs(i) / a);
            }
            std::size_t leave = kNone;
            if (best < std::numeric_limits<double>::infinity()) {
                const double slack = 1e-12 * (1.0 + std::abs(best));
                for (std::size_t i = 0; i < m_; ++i) {
                    double a = at(i, enter);
                    if (a <= kPivotTolerance || rhs(i) / a > best + slack) continue;
                    if (leave == kNone || basis_[i] < basis_[leave]) leave = i;
                }
            }
            if (leave == kNone) return Status::unbounded;
            pivot(leave, enter);
            for (std::size_t i = 0; i < m_; ++i)
                if (rhs(i) < 0 && rhs(i) > -1e-13) rhs(i) = 0;
        }
        return Status::iteration_limit;
    }

    // Pivot basic artificials out at zero level; rows where that is impossible
    // are linearly dependent and are dropped.
    void purge_artificials() {
        std::vector<std::size_t> drop;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < first_artificial_) continue;
            std::size_t col = kNone;
            double best = 1e-9;
            for (std::size_t j = 0; j < first_artificial_; ++j) {
                if (std::abs(at(i, j)) > best) {
                    best = std::abs(at(i, j));
                    col = j;
                }
            }
            if (col == kNone)
                drop.push_back(i);
            else
                pivot(i, col);
        }
        if (!drop.empty()) {
            const auto w = ncols_ + 1;
            std::vector<double> tab;
            std::vector<std::size_t> basis;
            for (std::size_t i = 0; i < m_; ++i) {
                if (std::find(drop.begin(), drop.end(), i) != drop.end()) continue;
                tab.insert(tab.end(), tab_.begin() + static_cast<std::ptrdiff_t>(i * w),
                           tab_.begin() + static_cast<std::ptrdiff_t>((i + 1) * w));
                basis.push_back(basis_[i]);
            }
            tab.resize(tab.size() + w, 0.0);
            tab_ = std::move(tab);
            basis_ = std::move(basis);
            m_ = basis_.size();
        }
        for (std::size_t j = first_artificial_; j < ncols_; ++j) blocked_[j] = true;
    }

    const LinearProgram& lp_;
    std::size_t m_ = 0;
    std::size_t ncols_ = 0;
    std::size_t first_artificial_ = 0;
    double scale_ = 0;
    std::vector<double> tab_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> pos_col_;
    std::vector<std::size_t> neg_col_;
    std::vector<double> structural_cost_;
    std::vector<bool> blocked_;
};

inline Solution solve(const LinearProgram& lp) { return Solver(lp).run(); }

}  // namespace ricci::lp
