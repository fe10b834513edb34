#pragma once

#include <cstddef>
#include <vector>

#include "blackstart/milp_model.hpp"

namespace blackstart {

struct LpOptions {
    double primal_tol = 1e-9;
    double dual_tol = 1e-9;
    double pivot_tol = 1e-9;
    std::size_t refactor_interval = 100;
    std::size_t max_iterations = 0;  // 0: 50 * (rows + columns)
    std::size_t degenerate_before_bland = 200;
    double cost_perturbation = 1e-7;  // relative; 0 disables
};

/// Bounded-variable dual simplex over the LP relaxation of a MilpModel.
///
/// The problem is held as [A -I][x; s] = 0 with one slack per row. Slack
/// bounds come from the row sense and the activity range implied by the
/// column bounds, so every variable is boxed and any basis can be made dual
/// feasible by placing nonbasic variables at the bound matching the sign of
/// their reduced cost. That makes warm starts after arbitrary bound changes
/// (branch-and-bound) a plain dual simplex run from the current basis.
///
/// Costs are perturbed by small deterministic amounts while the dual simplex
/// runs (the restoration models are heavily dual degenerate); the true costs
/// are then restored and any remaining dual infeasibility is removed with
/// primal simplex pivots.
///
/// Only the structural kernel of the basis is inverted: with S the basic
/// structural columns and K the rows whose slack is nonbasic, B^-1 follows
/// from F^-1, F = A[K, S] (dense, |S| x |S|). Each pivot is a rank-one
/// update of F^-1 that replaces, adds or removes one of its rows/columns.
///
/// Column bounds may be tightened and relaxed between solves but must stay
/// within the bounds the model had at construction.
class LpSolver {
public:
    explicit LpSolver(const MilpModel& model, LpOptions options = {});

    SolveStatus solve();

    void set_bounds(int var, double lower, double upper);
    double lower(int var) const { return lo_[static_cast<std::size_t>(var)]; }
    double upper(int var) const { return hi_[static_cast<std::size_t>(var)]; }

    /// Objective in the model's own sense, including its constant.
    double objective() const;
    /// Structural column values.
    std::vector<double> values() const;
    double value(int var) const { return x_[static_cast<std::size_t>(var)]; }

    /// After an infeasible solve: row multipliers y with y^T (A x) = y^T s for
    /// every x, and no x, s within their boxes satisfying it.
    const std::vector<double>& infeasibility_certificate() const { return certificate_; }

    /// Slack box for each row, used to verify certificates.
    double slack_lower(std::size_t row) const { return lo_[n_ + row]; }
    double slack_upper(std::size_t row) const { return hi_[n_ + row]; }

    std::size_t iterations() const { return total_iterations_; }
    std::size_t num_rows() const { return m_; }
    std::size_t num_columns() const { return n_; }

private:
    enum class VarState : unsigned char { basic, at_lower, at_upper };

    void refactor();
    void compute_duals();
    void compute_primals();
    bool place_nonbasics();
    double column_dot(std::size_t j, const double* rho) const;
    void column_ftran(std::size_t j, std::vector<double>& out) const;
    void ftran(const std::vector<double>& rhs, std::vector<double>& out) const;
    void btran(std::size_t r, std::vector<double>& rho) const;
    double kernel_row_dot(std::size_t row, const std::vector<double>& xs) const;
    double& finv(std::size_t b, std::size_t k) { return finv_[b * cap_ + k]; }
    double finv(std::size_t b, std::size_t k) const { return finv_[b * cap_ + k]; }
    SolveStatus iterate();
    SolveStatus primal_cleanup();
    void update_basis(std::size_t r, std::size_t q, const std::vector<double>& alpha_col);
    void drop_kernel(std::size_t b, std::size_t k);
    void perturb_costs();
    bool artificial_bound_active() const;

    LpOptions opt_;
    std::size_t n_ = 0;  // structural columns
    std::size_t m_ = 0;  // rows
    double sign_ = 1.0;  // +1 minimize, -1 maximize (internal form minimizes)
    double obj_constant_ = 0.0;

    // CSC of A
    std::vector<std::size_t> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    // CSR of A
    std::vector<std::size_t> row_start_;
    std::vector<int> row_col_;
    std::vector<double> row_val_;

    std::vector<double> cost_;  // n + m, internal minimization costs (perturbed while iterating)
    std::vector<double> true_cost_;
    std::vector<double> perturbation_;  // magnitude per variable
    std::vector<double> lo_, hi_;
    std::vector<double> root_lo_, root_hi_;
    std::vector<char> artificial_lo_, artificial_hi_;

    std::vector<int> head_;        // basis position -> variable
    std::vector<int> position_;    // variable -> basis position or -1
    std::vector<VarState> state_;
    std::vector<double> x_;
    std::vector<double> d_;
    // Kernel inverse: finv_[b * cap_ + k] = (F^-1)[b][k], b over basic
    // structurals, k over kernel rows.
    std::size_t cap_ = 0;
    std::size_t s_ = 0;
    std::vector<double> finv_;
    std::vector<int> kcol_var_;     // b -> structural column
    std::vector<int> krow_;         // k -> constraint row
    std::vector<int> kcol_of_var_;  // structural column -> b or -1
    std::vector<int> krow_of_row_;  // constraint row -> k or -1
    std::vector<double> scratch_xs_, scratch_g_;
    std::size_t updates_since_refactor_ = 0;

    std::vector<double> certificate_;
    std::size_t total_iterations_ = 0;
    bool trivially_infeasible_ = false;
};

struct LpResult {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values;
    std::size_t iterations = 0;
};

/// Solves the LP relaxation (integrality dropped) from scratch.
LpResult solve_lp(const MilpModel& model, const LpOptions& options = {});

}  // namespace blackstart
