#pragma once

// Independent LP oracle for tests: textbook two-phase tableau simplex with
// Bland's rule on the standard form obtained by shifting every column to
// its lower bound. Slow and simple on purpose; shares no code with the
// library's dual simplex. Requires finite column bounds.

#include <cmath>
#include <limits>
#include <vector>

#include "blackstart/milp_model.hpp"

namespace reference {

struct LpOutcome {
    bool feasible = false;
    double objective = 0.0;  // in the model's own sense
    std::vector<double> values;
};

inline LpOutcome solve(const blackstart::MilpModel& model, const std::vector<double>* lower_override = nullptr,
                       const std::vector<double>* upper_override = nullptr) {
    using blackstart::RowSense;
    const std::size_t n = model.num_variables();
    std::vector<double> lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        lo[j] = lower_override ? (*lower_override)[j] : model.variables()[j].lower;
        hi[j] = upper_override ? (*upper_override)[j] : model.variables()[j].upper;
    }
    const double sgn = model.objective_sense() == blackstart::ObjectiveSense::minimize ? 1.0 : -1.0;

    // Rows: model rows in y = x - lo, then y_j <= hi_j - lo_j.
    struct Row {
        std::vector<double> a;
        RowSense sense;
        double rhs;
    };
    std::vector<Row> rows;
    for (const auto& c : model.constraints()) {
        Row r{std::vector<double>(n, 0.0), c.sense, c.rhs};
        for (const auto& t : c.row) {
            r.a[static_cast<std::size_t>(t.var)] += t.coef;
            r.rhs -= t.coef * lo[static_cast<std::size_t>(t.var)];
        }
        rows.push_back(std::move(r));
    }
    for (std::size_t j = 0; j < n; ++j) {
        Row r{std::vector<double>(n, 0.0), RowSense::less_equal, hi[j] - lo[j]};
        r.a[j] = 1.0;
        rows.push_back(std::move(r));
    }
    for (auto& r : rows)
        if (r.rhs < 0) {
            for (auto& v : r.a) v = -v;
            r.rhs = -r.rhs;
            if (r.sense == RowSense::less_equal)
                r.sense = RowSense::greater_equal;
            else if (r.sense == RowSense::greater_equal)
                r.sense = RowSense::less_equal;
        }

    const std::size_t m = rows.size();
    // Columns: y (n), one slack/surplus per inequality, one artificial per row.
    std::size_t n_slack = 0;
    for (const auto& r : rows) n_slack += r.sense != RowSense::equal ? 1 : 0;
    const std::size_t art0 = n + n_slack;
    const std::size_t cols = art0 + m;
    std::vector<std::vector<double>> T(m, std::vector<double>(cols + 1, 0.0));
    std::vector<std::size_t> basis(m);
    std::size_t s = n;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = rows[i].a[j];
        if (rows[i].sense == RowSense::less_equal) T[i][s++] = 1.0;
        if (rows[i].sense == RowSense::greater_equal) T[i][s++] = -1.0;
        T[i][art0 + i] = 1.0;
        T[i][cols] = rows[i].rhs;
        basis[i] = art0 + i;
    }

    const double eps = 1e-10;
    auto pivot = [&](std::size_t r, std::size_t c) {
        const double p = T[r][c];
        for (auto& v : T[r]) v /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || T[i][c] == 0.0) continue;
            const double f = T[i][c];
            for (std::size_t k = 0; k <= cols; ++k) T[i][k] -= f * T[r][k];
        }
        basis[r] = c;
    };
    // Minimizes cost over columns < limit; returns false if unbounded.
    auto run = [&](const std::vector<double>& cost, std::size_t limit) {
        for (int guard = 0; guard < 100000; ++guard) {
            std::size_t enter = cols;
            for (std::size_t j = 0; j < limit; ++j) {
                double d = cost[j];
                for (std::size_t i = 0; i < m; ++i) d -= cost[basis[i]] * T[i][j];
                if (d < -eps) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols) return true;
            std::size_t leave = m;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                if (T[i][enter] <= eps) continue;
                const double ratio = T[i][cols] / T[i][enter];
                if (ratio < best - eps || (std::abs(ratio - best) <= eps && leave < m && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
        return false;
    };

    std::vector<double> phase1(cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) phase1[art0 + i] = 1.0;
    run(phase1, cols);
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] >= art0) infeas += T[i][cols];
    LpOutcome out;
    if (infeas > 1e-7) return out;
    // Drive remaining (zero-valued) artificials out where possible.
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < art0) continue;
        for (std::size_t j = 0; j < art0; ++j)
            if (std::abs(T[i][j]) > 1e-9) {
                pivot(i, j);
                break;
            }
    }

    std::vector<double> phase2(cols, 0.0);
    for (const auto& t : model.objective()) phase2[static_cast<std::size_t>(t.var)] = sgn * t.coef;
    run(phase2, art0);

    out.feasible = true;
    out.values.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) out.values[basis[i]] = T[i][cols];
    for (std::size_t j = 0; j < n; ++j) out.values[j] += lo[j];
    out.objective = model.objective_value(out.values);
    return out;
}

}  // namespace reference
