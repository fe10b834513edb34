#pragma once

// Exhaustive MILP oracle: every 0/1 assignment of the free binaries (fixed
// ones keep their value), each followed by the reference tableau LP over the
// continuous columns. Partial assignments whose row activity bounds already
// rule out every completion are skipped.

#include <stdexcept>
#include <vector>

#include "blackstart/milp_model.hpp"
#include "reference_lp.hpp"

namespace enumeration {

inline std::size_t free_binaries(const blackstart::MilpModel& model) {
    std::size_t n = 0;
    for (const auto& v : model.variables()) n += v.kind == blackstart::VarKind::binary && v.lower < v.upper ? 1 : 0;
    return n;
}

namespace detail {

// True when some row cannot be met for any point in the box [lo, hi]; only
// provably empty boxes are pruned, so the search stays exhaustive.
inline bool box_infeasible(const blackstart::MilpModel& model, const std::vector<double>& lo,
                           const std::vector<double>& hi) {
    const double tol = 1e-9;
    for (const auto& c : model.constraints()) {
        double min_act = 0.0, max_act = 0.0;
        for (const auto& t : c.row) {
            const auto j = static_cast<std::size_t>(t.var);
            min_act += t.coef * (t.coef > 0 ? lo[j] : hi[j]);
            max_act += t.coef * (t.coef > 0 ? hi[j] : lo[j]);
        }
        if (c.sense != blackstart::RowSense::greater_equal && min_act > c.rhs + tol) return true;
        if (c.sense != blackstart::RowSense::less_equal && max_act < c.rhs - tol) return true;
    }
    return false;
}

}  // namespace detail

inline reference::LpOutcome solve(const blackstart::MilpModel& model, std::size_t max_binaries = 16) {
    std::vector<std::size_t> bins;
    for (std::size_t j = 0; j < model.num_variables(); ++j) {
        const auto& v = model.variables()[j];
        if (v.kind == blackstart::VarKind::binary && v.lower < v.upper) bins.push_back(j);
    }
    if (bins.size() > max_binaries) throw std::invalid_argument("too many binaries to enumerate");

    std::vector<double> lo(model.num_variables()), hi(model.num_variables());
    for (std::size_t j = 0; j < lo.size(); ++j) {
        lo[j] = model.variables()[j].lower;
        hi[j] = model.variables()[j].upper;
    }
    const bool maximize = model.objective_sense() == blackstart::ObjectiveSense::maximize;
    reference::LpOutcome best;
    // Depth-first over 0/1 values of each free binary.
    auto visit = [&](auto&& self, std::size_t depth) -> void {
        if (detail::box_infeasible(model, lo, hi)) return;
        if (depth == bins.size()) {
            const auto r = reference::solve(model, &lo, &hi);
            if (r.feasible && (!best.feasible || (maximize ? r.objective > best.objective : r.objective < best.objective)))
                best = r;
            return;
        }
        const std::size_t j = bins[depth];
        for (double v : {0.0, 1.0}) {
            lo[j] = hi[j] = v;
            self(self, depth + 1);
        }
        lo[j] = 0.0;
        hi[j] = 1.0;
    };
    visit(visit, 0);
    return best;
}

}  // namespace enumeration
