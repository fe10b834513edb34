#include "blackstart/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "blackstart/errors.hpp"

namespace blackstart {

std::vector<Term> LinearExpr::merged() const {
    std::vector<Term> out = terms_;
    std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto& t : out) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const Term& t) { return t.coef == 0.0; }),
                 merged.end());
    return merged;
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
    double v = constant_;
    for (const auto& t : terms_) v += t.coef * values.at(static_cast<std::size_t>(t.var));
    return v;
}

int MilpModel::add_variable(double lower, double upper, VarKind kind, std::string name) {
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw ModelError("variable " + name + ": lower bound exceeds upper bound");
    if (kind == VarKind::binary) {
        lower = std::max(lower, 0.0);
        upper = std::min(upper, 1.0);
        if (lower > upper) throw ModelError("binary variable " + name + ": bounds outside [0,1]");
    }
    vars_.push_back({lower, upper, kind, std::move(name)});
    return static_cast<int>(vars_.size() - 1);
}

void MilpModel::check_var(int var) const {
    if (var < 0 || static_cast<std::size_t>(var) >= vars_.size())
        throw ModelError("reference to undeclared variable id " + std::to_string(var));
}

int MilpModel::add_constraint(const LinearExpr& expr, RowSense sense, double rhs, std::string name) {
    for (const auto& t : expr.terms()) check_var(t.var);
    if (!std::isfinite(rhs - expr.constant())) throw ModelError("constraint " + name + ": non-finite rhs");
    rows_.push_back({expr.merged(), sense, rhs - expr.constant(), std::move(name)});
    return static_cast<int>(rows_.size() - 1);
}

void MilpModel::set_objective(ObjectiveSense sense, const LinearExpr& expr) {
    for (const auto& t : expr.terms()) check_var(t.var);
    sense_ = sense;
    objective_ = expr.merged();
    objective_constant_ = expr.constant();
}

void MilpModel::set_bounds(int var, double lower, double upper) {
    check_var(var);
    if (lower > upper) throw ModelError("variable " + vars_[var].name + ": lower bound exceeds upper bound");
    vars_[var].lower = lower;
    vars_[var].upper = upper;
}

std::size_t MilpModel::num_binaries() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

double MilpModel::objective_value(const std::vector<double>& values) const {
    double v = objective_constant_;
    for (const auto& t : objective_) v += t.coef * values.at(static_cast<std::size_t>(t.var));
    return v;
}

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration-limit";
        case SolveStatus::numerical_failure: return "numerical-failure";
    }
    return "unknown";
}

std::string FeasibilityReport::summary(std::size_t max_items) const {
    if (violations.empty()) return "feasible";
    std::ostringstream out;
    out << violations.size() << " violation(s):";
    for (std::size_t i = 0; i < violations.size() && i < max_items; ++i) {
        const auto& v = violations[i];
        const char* kind = v.kind == Violation::Kind::row           ? "row"
                           : v.kind == Violation::Kind::integrality ? "integrality"
                           : v.kind == Violation::Kind::lower_bound ? "lower bound"
                                                                    : "upper bound";
        out << "\n  " << kind << " " << v.name << " residual " << v.residual;
    }
    return out.str();
}

FeasibilityReport check_feasible(const MilpModel& model, const std::vector<double>& values, double feas_tol,
                                 double int_tol) {
    if (values.size() != model.num_variables())
        throw ModelError("assignment has " + std::to_string(values.size()) + " entries, model has " +
                         std::to_string(model.num_variables()) + " variables");
    FeasibilityReport report;
    const auto& vars = model.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const double x = values[j];
        const int id = static_cast<int>(j);
        if (x < vars[j].lower - feas_tol)
            report.violations.push_back({Violation::Kind::lower_bound, id, vars[j].name, vars[j].lower - x});
        if (x > vars[j].upper + feas_tol)
            report.violations.push_back({Violation::Kind::upper_bound, id, vars[j].name, x - vars[j].upper});
        if (vars[j].kind == VarKind::binary && std::abs(x - std::round(x)) > int_tol)
            report.violations.push_back({Violation::Kind::integrality, id, vars[j].name, std::abs(x - std::round(x))});
    }
    const auto& rows = model.constraints();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double activity = 0.0;
        for (const auto& t : rows[i].row) activity += t.coef * values[static_cast<std::size_t>(t.var)];
        double residual = 0.0;
        switch (rows[i].sense) {
            case RowSense::less_equal: residual = activity - rows[i].rhs; break;
            case RowSense::greater_equal: residual = rows[i].rhs - activity; break;
            case RowSense::equal: residual = std::abs(activity - rows[i].rhs); break;
        }
        if (residual > feas_tol)
            report.violations.push_back({Violation::Kind::row, static_cast<int>(i), rows[i].name, residual});
    }
    return report;
}

namespace {

// Widest %g rendering that fits a 12-character MPS value field.
std::string mps_number(double v) {
    char buf[64];
    for (int prec = 12; prec >= 1; --prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::char_traits<char>::length(buf) <= 12) return buf;
    }
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

// Fields at columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61.
std::string mps_line(const std::string& f1, const std::string& f2, const std::string& f3 = "",
                     const std::string& f4 = "") {
    std::string line = " " + pad(f1, 2) + " " + pad(f2, 8);
    if (!f3.empty() || !f4.empty()) line += "  " + pad(f3, 8) + "  " + f4;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
}

std::string col_name(std::size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "C%07zu", j + 1);
    return buf;
}

std::string row_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "R%07zu", i + 1);
    return buf;
}

}  // namespace

std::string export_mps(const MilpModel& model) {
    std::ostringstream out;
    const auto& vars = model.variables();
    const auto& rows = model.constraints();

    out << "* " << model.name() << ": " << vars.size() << " columns, " << rows.size() << " rows, "
        << model.num_binaries() << " binaries\n";
    out << "NAME          " << (model.name().empty() ? "MODEL" : model.name().substr(0, 8)) << "\n";
    if (model.objective_sense() == ObjectiveSense::maximize) out << "OBJSENSE\n    MAX\n";
    out << "ROWS\n";
    out << mps_line("N", "OBJ");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const char* type = rows[i].sense == RowSense::less_equal ? "L" : rows[i].sense == RowSense::equal ? "E" : "G";
        out << mps_line(type, row_name(i));
    }

    // Column-major view of the rows.
    std::vector<std::vector<std::pair<std::size_t, double>>> columns(vars.size());
    for (const auto& t : model.objective()) columns[t.var].push_back({std::size_t(-1), t.coef});
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& t : rows[i].row) columns[t.var].push_back({i, t.coef});

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const bool is_int = vars[j].kind == VarKind::binary;
        if (is_int != in_int) {
            char mname[16];
            std::snprintf(mname, sizeof mname, "M%07d", marker++);
            out << "    " << pad(mname, 8) << "  'MARKER'                 " << (is_int ? "'INTORG'" : "'INTEND'")
                << "\n";
            in_int = is_int;
        }
        if (columns[j].empty()) out << mps_line("", col_name(j), "OBJ", "0");
        for (const auto& [row, coef] : columns[j])
            out << mps_line("", col_name(j), row == std::size_t(-1) ? "OBJ" : row_name(row), mps_number(coef));
    }
    if (in_int) {
        char mname[16];
        std::snprintf(mname, sizeof mname, "M%07d", marker++);
        out << "    " << pad(mname, 8) << "  'MARKER'                 'INTEND'\n";
    }

    out << "RHS\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].rhs != 0.0) out << mps_line("", "RHS", row_name(i), mps_number(rows[i].rhs));

    out << "BOUNDS\n";
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < vars.size(); ++j) {
        const auto& v = vars[j];
        const std::string c = col_name(j);
        if (v.lower == v.upper) {
            out << mps_line("FX", "BND", c, mps_number(v.lower));
            continue;
        }
        if (v.lower == -inf && v.upper == inf) {
            out << mps_line("FR", "BND", c);
            continue;
        }
        if (v.lower == -inf)
            out << mps_line("MI", "BND", c);
        else if (v.lower != 0.0)
            out << mps_line("LO", "BND", c, mps_number(v.lower));
        if (v.upper != inf) out << mps_line("UP", "BND", c, mps_number(v.upper));
    }
    out << "ENDATA\n";
    return out.str();
}

std::string dump_model_text(const MilpModel& model) {
    std::ostringstream out;
    out.precision(12);
    auto write_row = [&](const std::vector<Term>& row) {
        if (row.empty()) out << " 0";
        for (const auto& t : row)
            out << ' ' << (t.coef < 0 ? "- " : "+ ") << std::abs(t.coef) << ' ' << model.variable(t.var).name;
    };
    out << "\\ " << model.name() << "\n";
    out << (model.objective_sense() == ObjectiveSense::maximize ? "maximize" : "minimize") << "\n  obj:";
    write_row(model.objective());
    if (model.objective_constant() != 0.0) out << " + " << model.objective_constant();
    out << "\nsubject to\n";
    for (const auto& c : model.constraints()) {
        out << "  " << c.name << ":";
        write_row(c.row);
        out << (c.sense == RowSense::less_equal ? " <= " : c.sense == RowSense::equal ? " = " : " >= ") << c.rhs
            << "\n";
    }
    out << "bounds\n";
    for (const auto& v : model.variables()) out << "  " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
    out << "binaries\n";
    for (const auto& v : model.variables())
        if (v.kind == VarKind::binary) out << "  " << v.name << "\n";
    if (!model.big_m().empty()) {
        out << "\\ big-M by family:";
        for (const auto& [family, m] : model.big_m()) out << ' ' << family << '=' << m;
        out << "\n";
    }
    out << "end\n";
    return out.str();
}

}  // namespace blackstart
