#include "blackstart/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "blackstart/errors.hpp"

namespace blackstart {

void SolverConfig::validate() const {
    if (!(rel_gap >= 0.0) || !(abs_gap >= 0.0)) throw ModelError("solver gap targets must be non-negative");
    if (node_limit == 0 || !(time_limit_s > 0.0)) throw ModelError("solver limits must be positive");
    if (!(int_tol > 0.0) || !(feas_tol > 0.0)) throw ModelError("solver tolerances must be positive");
}

namespace {

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    std::size_t id = 0;
    std::size_t depth = 0;
    double bound = -std::numeric_limits<double>::infinity();  // internal minimization
    std::vector<BoundChange> changes;                         // relative to the root
    // pseudo-cost bookkeeping for the branch that created this node
    int branch_var = -1;
    bool branch_up = false;
    double branch_frac = 0.0;
};

struct PseudoCost {
    double sum_down = 0.0, sum_up = 0.0;
    std::size_t n_down = 0, n_up = 0;
};

class BranchAndBound {
public:
    BranchAndBound(const MilpModel& model, const SolverConfig& config)
        : model_(model), cfg_(config), lp_(model, config.lp), polish_(model, config.lp) {
        sign_ = model.objective_sense() == ObjectiveSense::minimize ? 1.0 : -1.0;
        for (std::size_t j = 0; j < model.num_variables(); ++j)
            if (model.variables()[j].kind == VarKind::binary) binaries_.push_back(static_cast<int>(j));
        pseudo_.resize(model.num_variables());
    }

    MilpSolution run() {
        const auto start = std::chrono::steady_clock::now();
        MilpSolution out;

        std::vector<Node> open;
        open.push_back(Node{});
        next_id_ = 1;
        bool limit_hit = false;
        bool numerical = false;
        bool unbounded = false;
        double running_bound = -std::numeric_limits<double>::infinity();

        while (!open.empty()) {
            if (out.nodes >= cfg_.node_limit) {
                limit_hit = true;
                break;
            }
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (elapsed > cfg_.time_limit_s) {
                limit_hit = true;
                break;
            }

            const std::size_t pick = select(open);
            Node node = std::move(open[pick]);
            open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
            ++out.nodes;

            process(node, open, numerical, unbounded);
            if (unbounded) break;

            // Dual bound: least bound over open nodes and fathomed leaves.
            double global = closed_floor_;
            for (const auto& n : open) global = std::min(global, n.bound);
            if (open.empty() && has_incumbent_) global = std::min(global, incumbent_z_);
            if (std::isfinite(global)) running_bound = std::max(running_bound, global);
            out.bound_history.push_back(sign_ * running_bound);
        }

        out.lp_iterations = lp_.iterations() + polish_.iterations();
        if (unbounded) {
            out.status = SolveStatus::unbounded;
            return out;
        }
        if (has_incumbent_) {
            out.values = incumbent_;
            out.objective = model_.objective_value(incumbent_);
        }
        if (limit_hit) {
            out.status = SolveStatus::iteration_limit;
        } else if (has_incumbent_) {
            out.status = numerical ? SolveStatus::numerical_failure : SolveStatus::optimal;
        } else {
            out.status = numerical ? SolveStatus::numerical_failure : SolveStatus::infeasible;
        }
        out.best_bound = std::isfinite(running_bound) ? sign_ * running_bound : out.objective;
        if (out.has_solution()) {
            // The reported bound never sits on the wrong side of the incumbent.
            if (sign_ < 0)
                out.best_bound = std::max(out.best_bound, out.objective);
            else
                out.best_bound = std::min(out.best_bound, out.objective);
        }
        return out;
    }

private:
    std::size_t select(const std::vector<Node>& open) const {
        std::size_t best = 0;
        const bool dive = cfg_.node_order == NodeOrder::depth_first_then_best && !has_incumbent_;
        for (std::size_t i = 1; i < open.size(); ++i) {
            const Node& a = open[i];
            const Node& b = open[best];
            bool better;
            if (dive)
                better = a.depth > b.depth || (a.depth == b.depth && a.id < b.id);
            else
                better = a.bound < b.bound || (a.bound == b.bound && a.id < b.id);
            if (better) best = i;
        }
        return best;
    }

    double prune_threshold() const {
        if (!has_incumbent_) return std::numeric_limits<double>::infinity();
        return incumbent_z_ - std::max(cfg_.abs_gap, cfg_.rel_gap * std::abs(incumbent_z_));
    }

    void apply_bounds(const Node& node) {
        for (int v : touched_) {
            const auto& var = model_.variable(v);
            lp_.set_bounds(v, var.lower, var.upper);
        }
        touched_.clear();
        for (const auto& c : node.changes) {
            lp_.set_bounds(c.var, c.lower, c.upper);
            touched_.push_back(c.var);
        }
    }

    void process(const Node& node, std::vector<Node>& open, bool& numerical, bool& unbounded) {
        if (node.bound >= prune_threshold()) {
            closed_floor_ = std::min(closed_floor_, node.bound);
            return;
        }
        apply_bounds(node);
        SolveStatus st;
        try {
            st = lp_.solve();
        } catch (const NumericalError&) {
            st = SolveStatus::numerical_failure;
        }
        if (st == SolveStatus::infeasible) return;
        if (st == SolveStatus::unbounded) {
            unbounded = true;
            return;
        }
        if (st != SolveStatus::optimal) {
            numerical = true;
            closed_floor_ = std::min(closed_floor_, node.bound);
            return;
        }

        const double z = sign_ * lp_.objective();
        const double bound = std::max(z, node.bound);
        update_pseudo_cost(node, z);

        if (bound >= prune_threshold()) {
            closed_floor_ = std::min(closed_floor_, bound);
            return;
        }

        int branch = -1;
        double branch_frac = 0.0;
        double best_score = -1.0;
        for (int v : binaries_) {
            const double x = lp_.value(v);
            const double f = x - std::floor(x);
            if (f <= cfg_.int_tol || f >= 1.0 - cfg_.int_tol) continue;
            const double score = branch_score(v, f);
            if (score > best_score) {
                best_score = score;
                branch = v;
                branch_frac = f;
            }
        }

        if (branch < 0) {
            closed_floor_ = std::min(closed_floor_, bound);
            offer_incumbent();
            return;
        }

        const bool up_first = branch_frac >= 0.5;
        for (int pass = 0; pass < 2; ++pass) {
            const bool up = (pass == 0) == up_first;
            Node child;
            child.id = next_id_++;
            child.depth = node.depth + 1;
            child.bound = bound;
            child.changes = node.changes;
            child.changes.push_back({branch, up ? 1.0 : 0.0, up ? 1.0 : 0.0});
            child.branch_var = branch;
            child.branch_up = up;
            child.branch_frac = branch_frac;
            child_parent_z_.push_back(z);
            open.push_back(std::move(child));
        }
    }

    double branch_score(int v, double f) const {
        if (cfg_.branching == BranchingRule::most_fractional) return std::min(f, 1.0 - f);
        const auto& pc = pseudo_[static_cast<std::size_t>(v)];
        const double down = pc.n_down ? pc.sum_down / static_cast<double>(pc.n_down) : 1.0;
        const double up = pc.n_up ? pc.sum_up / static_cast<double>(pc.n_up) : 1.0;
        constexpr double eps = 1e-6;
        return std::max(down * f, eps) * std::max(up * (1.0 - f), eps);
    }

    void update_pseudo_cost(const Node& node, double z) {
        if (node.branch_var < 0 || node.id >= child_parent_z_.size() + 1) return;
        const double parent = child_parent_z_[node.id - 1];
        const double gain = std::max(0.0, z - parent);
        auto& pc = pseudo_[static_cast<std::size_t>(node.branch_var)];
        if (node.branch_up) {
            const double d = 1.0 - node.branch_frac;
            if (d > 0) {
                pc.sum_up += gain / d;
                ++pc.n_up;
            }
        } else if (node.branch_frac > 0) {
            pc.sum_down += gain / node.branch_frac;
            ++pc.n_down;
        }
    }

    void offer_incumbent() {
        std::vector<double> raw = lp_.values();
        for (int v : binaries_) raw[static_cast<std::size_t>(v)] = std::round(raw[static_cast<std::size_t>(v)]);

        // Re-solve the continuous part with the binaries pinned.
        std::vector<double> candidate;
        for (int v : binaries_) {
            const double b = raw[static_cast<std::size_t>(v)];
            polish_.set_bounds(v, b, b);
        }
        SolveStatus st;
        try {
            st = polish_.solve();
        } catch (const NumericalError&) {
            st = SolveStatus::numerical_failure;
        }
        if (st == SolveStatus::optimal) {
            candidate = polish_.values();
            for (int v : binaries_) candidate[static_cast<std::size_t>(v)] = raw[static_cast<std::size_t>(v)];
            if (!check_feasible(model_, candidate, cfg_.feas_tol, cfg_.int_tol).feasible()) candidate.clear();
        }
        if (candidate.empty() && check_feasible(model_, raw, cfg_.feas_tol, cfg_.int_tol).feasible()) candidate = raw;
        if (candidate.empty()) return;

        const double z = sign_ * model_.objective_value(candidate);
        if (!has_incumbent_ || z < incumbent_z_) {
            has_incumbent_ = true;
            incumbent_z_ = z;
            incumbent_ = std::move(candidate);
        }
    }

    const MilpModel& model_;
    SolverConfig cfg_;
    LpSolver lp_;
    LpSolver polish_;
    double sign_ = 1.0;
    std::vector<int> binaries_;
    std::vector<int> touched_;
    std::vector<PseudoCost> pseudo_;
    std::vector<double> child_parent_z_;  // indexed by child id - 1
    std::size_t next_id_ = 1;

    bool has_incumbent_ = false;
    double incumbent_z_ = std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_;
    double closed_floor_ = std::numeric_limits<double>::infinity();
};

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const SolverConfig& config) {
    config.validate();
    BranchAndBound bnb(model, config);
    return bnb.run();
}

}  // namespace blackstart
