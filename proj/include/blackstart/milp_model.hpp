#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace blackstart {

enum class VarKind { continuous, binary };
enum class RowSense { less_equal, equal, greater_equal };
enum class ObjectiveSense { maximize, minimize };

struct Term {
    int var = 0;
    double coef = 0.0;
};

/// Affine expression sum(coef * var) + constant. Used by model builders;
/// the constant is folded into the right-hand side when a row is added.
class LinearExpr {
public:
    LinearExpr() = default;
    explicit LinearExpr(double constant) : constant_(constant) {}

    static LinearExpr variable(int var, double coef = 1.0) {
        LinearExpr e;
        e.add(var, coef);
        return e;
    }

    LinearExpr& add(int var, double coef) {
        if (coef != 0.0) terms_.push_back({var, coef});
        return *this;
    }
    LinearExpr& add(const LinearExpr& other, double scale = 1.0) {
        for (const auto& t : other.terms_) add(t.var, t.coef * scale);
        constant_ += other.constant_ * scale;
        return *this;
    }
    LinearExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    LinearExpr& operator+=(const LinearExpr& other) { return add(other, 1.0); }
    LinearExpr& operator-=(const LinearExpr& other) { return add(other, -1.0); }
    friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
    friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
    friend LinearExpr operator*(double s, const LinearExpr& e) {
        LinearExpr r;
        r.add(e, s);
        return r;
    }

    const std::vector<Term>& terms() const { return terms_; }
    double constant() const { return constant_; }

    /// Terms merged by variable, zeros dropped, sorted by id.
    std::vector<Term> merged() const;

    double evaluate(const std::vector<double>& values) const;

private:
    std::vector<Term> terms_;
    double constant_ = 0.0;
};

struct Variable {
    double lower = 0.0;
    double upper = 0.0;
    VarKind kind = VarKind::continuous;
    std::string name;
};

struct Constraint {
    std::vector<Term> row;  // sorted by variable id, no duplicates
    RowSense sense = RowSense::less_equal;
    double rhs = 0.0;
    std::string name;
};

/// Mixed-binary linear program with sparse rows.
class MilpModel {
public:
    explicit MilpModel(std::string name = "model") : name_(std::move(name)) {}

    int add_variable(double lower, double upper, VarKind kind, std::string name);
    int add_binary(std::string name) { return add_variable(0.0, 1.0, VarKind::binary, std::move(name)); }

    /// Adds expr (sense) rhs; the expression constant moves to the rhs.
    int add_constraint(const LinearExpr& expr, RowSense sense, double rhs, std::string name);

    void set_objective(ObjectiveSense sense, const LinearExpr& expr);
    void set_bounds(int var, double lower, double upper);
    void fix(int var, double value) { set_bounds(var, value, value); }

    /// Big-M constants chosen by the builder, keyed by constraint family.
    void record_big_m(const std::string& family, double value) { big_m_[family] = value; }
    const std::map<std::string, double>& big_m() const { return big_m_; }

    const std::string& name() const { return name_; }
    std::size_t num_variables() const { return vars_.size(); }
    std::size_t num_constraints() const { return rows_.size(); }
    std::size_t num_binaries() const;
    const Variable& variable(int id) const { return vars_.at(static_cast<std::size_t>(id)); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Constraint& constraint(int id) const { return rows_.at(static_cast<std::size_t>(id)); }
    const std::vector<Constraint>& constraints() const { return rows_; }
    ObjectiveSense objective_sense() const { return sense_; }
    const std::vector<Term>& objective() const { return objective_; }
    double objective_constant() const { return objective_constant_; }

    double objective_value(const std::vector<double>& values) const;

private:
    void check_var(int var) const;

    std::string name_;
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    ObjectiveSense sense_ = ObjectiveSense::maximize;
    std::vector<Term> objective_;
    double objective_constant_ = 0.0;
    std::map<std::string, double> big_m_;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

const char* to_string(SolveStatus status);

struct MilpSolution {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> values;
    double objective = 0.0;
    double best_bound = 0.0;

    std::size_t nodes = 0;
    std::size_t lp_iterations = 0;
    // Global dual bound after each processed node.
    std::vector<double> bound_history;

    bool has_solution() const { return !values.empty(); }
};

struct Violation {
    enum class Kind { lower_bound, upper_bound, row, integrality } kind;
    int index = 0;  // variable or constraint id
    std::string name;
    double residual = 0.0;
};

struct FeasibilityReport {
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
    std::string summary(std::size_t max_items = 10) const;
};

inline constexpr double kDefaultFeasTol = 1e-6;
inline constexpr double kDefaultIntTol = 1e-6;

/// Residual-based check of bounds, rows and integrality.
FeasibilityReport check_feasible(const MilpModel& model, const std::vector<double>& values,
                                 double feas_tol = kDefaultFeasTol, double int_tol = kDefaultIntTol);

/// Fixed-format MPS (ROWS/COLUMNS/RHS/BOUNDS, INTORG/INTEND markers).
/// Columns and rows are named C0000001.. / R0000001.. to fit the 8-character
/// name fields; an OBJSENSE section records maximization.
std::string export_mps(const MilpModel& model);

/// Readable LP-style dump with the builder's variable and row names.
std::string dump_model_text(const MilpModel& model);

}  // namespace blackstart
