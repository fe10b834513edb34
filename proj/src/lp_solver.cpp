#include "blackstart/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "blackstart/errors.hpp"

namespace blackstart {

namespace {

constexpr double kArtificialBox = 1e7;
constexpr double kSingularPivot = 1e-11;

// Deterministic value in [1, 2) per column (splitmix64 finalizer).
double jitter(std::size_t j) {
    std::uint64_t z = static_cast<std::uint64_t>(j) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return 1.0 + static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

LpSolver::LpSolver(const MilpModel& model, LpOptions options) : opt_(options) {
    n_ = model.num_variables();
    m_ = model.num_constraints();
    sign_ = model.objective_sense() == ObjectiveSense::minimize ? 1.0 : -1.0;
    obj_constant_ = model.objective_constant();
    if (opt_.max_iterations == 0) opt_.max_iterations = 50 * (n_ + m_) + 1000;

    const auto& rows = model.constraints();
    // CSR straight from the rows, CSC by counting.
    row_start_.assign(m_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i) row_start_[i + 1] = row_start_[i] + rows[i].row.size();
    row_col_.resize(row_start_[m_]);
    row_val_.resize(row_start_[m_]);
    std::vector<std::size_t> col_count(n_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i) {
        std::size_t k = row_start_[i];
        for (const auto& t : rows[i].row) {
            row_col_[k] = t.var;
            row_val_[k] = t.coef;
            ++k;
            ++col_count[static_cast<std::size_t>(t.var) + 1];
        }
    }
    col_start_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + col_count[j + 1];
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            const auto j = static_cast<std::size_t>(row_col_[k]);
            col_row_[fill[j]] = static_cast<int>(i);
            col_val_[fill[j]] = row_val_[k];
            ++fill[j];
        }

    const std::size_t total = n_ + m_;
    cost_.assign(total, 0.0);
    for (const auto& t : model.objective()) cost_[static_cast<std::size_t>(t.var)] = sign_ * t.coef;
    true_cost_ = cost_;
    perturbation_.assign(total, 0.0);
    if (opt_.cost_perturbation > 0.0) {
        double scale = 1.0;
        for (double c : cost_) scale = std::max(scale, std::abs(c));
        for (std::size_t j = 0; j < total; ++j)
            perturbation_[j] = opt_.cost_perturbation * (std::abs(cost_[j]) + 1e-3 * scale) * jitter(j);
    }

    lo_.assign(total, 0.0);
    hi_.assign(total, 0.0);
    artificial_lo_.assign(n_, 0);
    artificial_hi_.assign(n_, 0);
    const auto& vars = model.variables();
    for (std::size_t j = 0; j < n_; ++j) {
        lo_[j] = vars[j].lower;
        hi_[j] = vars[j].upper;
        if (!std::isfinite(lo_[j])) {
            lo_[j] = -kArtificialBox;
            artificial_lo_[j] = 1;
        }
        if (!std::isfinite(hi_[j])) {
            hi_[j] = kArtificialBox;
            artificial_hi_[j] = 1;
        }
    }
    for (std::size_t i = 0; i < m_; ++i) {
        double amin = 0.0, amax = 0.0;
        for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
            const auto j = static_cast<std::size_t>(row_col_[k]);
            const double a = row_val_[k];
            amin += a > 0 ? a * lo_[j] : a * hi_[j];
            amax += a > 0 ? a * hi_[j] : a * lo_[j];
        }
        double slo = 0.0, shi = 0.0;
        switch (rows[i].sense) {
            case RowSense::less_equal: slo = amin; shi = rows[i].rhs; break;
            case RowSense::greater_equal: slo = rows[i].rhs; shi = amax; break;
            case RowSense::equal: slo = shi = rows[i].rhs; break;
        }
        if (slo > shi) {
            if (slo - shi <= opt_.primal_tol * (1.0 + std::abs(shi))) {
                slo = shi;
            } else {
                trivially_infeasible_ = true;
                if (certificate_.empty()) {
                    certificate_.assign(m_, 0.0);
                    certificate_[i] = 1.0;
                }
            }
        }
        lo_[n_ + i] = slo;
        hi_[n_ + i] = shi;
    }
    root_lo_ = lo_;
    root_hi_ = hi_;

    head_.resize(m_);
    position_.assign(total, -1);
    state_.assign(total, VarState::at_lower);
    x_.assign(total, 0.0);
    d_.assign(total, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
        head_[r] = static_cast<int>(n_ + r);
        position_[n_ + r] = static_cast<int>(r);
        state_[n_ + r] = VarState::basic;
    }
    cap_ = std::min(n_, m_);
    finv_.assign(cap_ * cap_, 0.0);
    kcol_of_var_.assign(n_, -1);
    krow_of_row_.assign(m_, -1);
}

void LpSolver::set_bounds(int var, double lower, double upper) {
    const auto j = static_cast<std::size_t>(var);
    if (j >= n_) throw ModelError("LP bound change on unknown column " + std::to_string(var));
    lo_[j] = std::max(lower, root_lo_[j]);
    hi_[j] = std::min(upper, root_hi_[j]);
}

double LpSolver::column_dot(std::size_t j, const double* rho) const {
    if (j >= n_) return -rho[j - n_];
    double s = 0.0;
    for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) s += col_val_[k] * rho[col_row_[k]];
    return s;
}

double LpSolver::kernel_row_dot(std::size_t row, const std::vector<double>& xs) const {
    double s = 0.0;
    for (std::size_t k = row_start_[row]; k < row_start_[row + 1]; ++k) {
        const int b = kcol_of_var_[static_cast<std::size_t>(row_col_[k])];
        if (b >= 0) s += row_val_[k] * xs[static_cast<std::size_t>(b)];
    }
    return s;
}

// Solves B x = rhs (rhs by constraint row, result by basis position):
// x_S = F^-1 rhs_K, and each basic slack s_i = A[i, S] x_S - rhs_i.
void LpSolver::ftran(const std::vector<double>& rhs, std::vector<double>& out) const {
    std::vector<double> xs(s_, 0.0);
    for (std::size_t k = 0; k < s_; ++k) {
        const double v = rhs[static_cast<std::size_t>(krow_[k])];
        if (v == 0.0) continue;
        for (std::size_t b = 0; b < s_; ++b) xs[b] += finv(b, k) * v;
    }
    out.assign(m_, 0.0);
    for (std::size_t b = 0; b < s_; ++b) out[static_cast<std::size_t>(position_[static_cast<std::size_t>(kcol_var_[b])])] = xs[b];
    for (std::size_t i = 0; i < m_; ++i)
        if (krow_of_row_[i] < 0) out[static_cast<std::size_t>(position_[n_ + i])] = kernel_row_dot(i, xs) - rhs[i];
}

void LpSolver::column_ftran(std::size_t j, std::vector<double>& out) const {
    std::vector<double> rhs(m_, 0.0);
    if (j >= n_) {
        rhs[j - n_] = -1.0;
    } else {
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[static_cast<std::size_t>(col_row_[k])] = col_val_[k];
    }
    ftran(rhs, out);
}

// Row r of B^-1, indexed by constraint row.
void LpSolver::btran(std::size_t r, std::vector<double>& rho) const {
    rho.assign(m_, 0.0);
    const auto v = static_cast<std::size_t>(head_[r]);
    if (v < n_) {
        const auto b0 = static_cast<std::size_t>(kcol_of_var_[v]);
        for (std::size_t k = 0; k < s_; ++k) rho[static_cast<std::size_t>(krow_[k])] = finv(b0, k);
        return;
    }
    const std::size_t i0 = v - n_;
    rho[i0] = -1.0;
    for (std::size_t k = row_start_[i0]; k < row_start_[i0 + 1]; ++k) {
        const int b = kcol_of_var_[static_cast<std::size_t>(row_col_[k])];
        if (b < 0) continue;
        const double a = row_val_[k];
        for (std::size_t kk = 0; kk < s_; ++kk) rho[static_cast<std::size_t>(krow_[kk])] += a * finv(static_cast<std::size_t>(b), kk);
    }
}

void LpSolver::refactor() {
    for (;;) {
        std::vector<std::size_t> struct_pos;  // basis positions holding structurals
        std::vector<char> row_has_slack(m_, 0);
        for (std::size_t p = 0; p < m_; ++p) {
            const auto v = static_cast<std::size_t>(head_[p]);
            if (v < n_)
                struct_pos.push_back(p);
            else
                row_has_slack[v - n_] = 1;
        }
        std::vector<int> kernel_index(m_, -1);
        std::vector<std::size_t> kernel_rows;
        for (std::size_t i = 0; i < m_; ++i)
            if (!row_has_slack[i]) {
                kernel_index[i] = static_cast<int>(kernel_rows.size());
                kernel_rows.push_back(i);
            }
        const std::size_t s = struct_pos.size();
        if (kernel_rows.size() != s || s > cap_) throw NumericalError("basis bookkeeping is inconsistent");

        // Gauss-Jordan on [F | I], F = A[kernel_rows, basic structurals].
        const std::size_t w = 2 * s;
        std::vector<double> aug(s * w, 0.0);
        for (std::size_t b = 0; b < s; ++b) {
            const auto j = static_cast<std::size_t>(head_[struct_pos[b]]);
            for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
                const int ki = kernel_index[static_cast<std::size_t>(col_row_[k])];
                if (ki >= 0) aug[static_cast<std::size_t>(ki) * w + b] = col_val_[k];
            }
        }
        for (std::size_t a = 0; a < s; ++a) aug[a * w + s + a] = 1.0;

        std::vector<int> pivot_row_of_col(s, -1);
        std::vector<char> row_used(s, 0);
        std::vector<std::size_t> singular_cols;
        for (std::size_t b = 0; b < s; ++b) {
            std::size_t best = s;
            double best_val = kSingularPivot;
            for (std::size_t a = 0; a < s; ++a) {
                if (row_used[a]) continue;
                const double v = std::abs(aug[a * w + b]);
                if (v > best_val) {
                    best_val = v;
                    best = a;
                }
            }
            if (best == s) {
                singular_cols.push_back(b);
                continue;
            }
            row_used[best] = 1;
            pivot_row_of_col[b] = static_cast<int>(best);
            double* prow = &aug[best * w];
            const double inv = 1.0 / prow[b];
            for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
            for (std::size_t a = 0; a < s; ++a) {
                if (a == best) continue;
                const double f = aug[a * w + b];
                if (f == 0.0) continue;
                double* row = &aug[a * w];
                for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
            }
        }

        if (!singular_cols.empty()) {
            // Swap each dependent structural for the slack of an uncovered row.
            std::vector<std::size_t> free_rows;
            for (std::size_t a = 0; a < s; ++a)
                if (!row_used[a]) free_rows.push_back(kernel_rows[a]);
            for (std::size_t k = 0; k < singular_cols.size(); ++k) {
                const std::size_t p = struct_pos[singular_cols[k]];
                const auto j = static_cast<std::size_t>(head_[p]);
                const std::size_t slack = n_ + free_rows[k];
                position_[j] = -1;
                state_[j] = VarState::at_lower;
                x_[j] = lo_[j];
                head_[p] = static_cast<int>(slack);
                position_[slack] = static_cast<int>(p);
                state_[slack] = VarState::basic;
            }
            continue;
        }

        s_ = s;
        std::fill(kcol_of_var_.begin(), kcol_of_var_.end(), -1);
        std::fill(krow_of_row_.begin(), krow_of_row_.end(), -1);
        kcol_var_.assign(s, 0);
        krow_.assign(s, 0);
        for (std::size_t b = 0; b < s; ++b) {
            kcol_var_[b] = head_[struct_pos[b]];
            kcol_of_var_[static_cast<std::size_t>(kcol_var_[b])] = static_cast<int>(b);
        }
        for (std::size_t k = 0; k < s; ++k) {
            krow_[k] = static_cast<int>(kernel_rows[k]);
            krow_of_row_[kernel_rows[k]] = static_cast<int>(k);
        }
        for (std::size_t b = 0; b < s; ++b) {
            const auto a = static_cast<std::size_t>(pivot_row_of_col[b]);
            for (std::size_t c = 0; c < s; ++c) finv(b, c) = aug[a * w + s + c];
        }
        updates_since_refactor_ = 0;
        return;
    }
}

void LpSolver::compute_duals() {
    // y^T B = c_B: basic slack i gives y_i = -c_slack; the structurals then
    // fix y_K through F.
    std::vector<double> y(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
        if (krow_of_row_[i] < 0) y[i] = -cost_[n_ + i];
    std::vector<double> t(s_, 0.0);
    for (std::size_t b = 0; b < s_; ++b) {
        const auto j = static_cast<std::size_t>(kcol_var_[b]);
        double v = cost_[j];
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) {
            const auto i = static_cast<std::size_t>(col_row_[k]);
            if (krow_of_row_[i] < 0) v -= y[i] * col_val_[k];
        }
        t[b] = v;
    }
    for (std::size_t b = 0; b < s_; ++b) {
        if (t[b] == 0.0) continue;
        for (std::size_t k = 0; k < s_; ++k) y[static_cast<std::size_t>(krow_[k])] += t[b] * finv(b, k);
    }
    for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::basic) {
            d_[j] = 0.0;
            continue;
        }
        d_[j] = cost_[j] - column_dot(j, y.data());
    }
}

bool LpSolver::place_nonbasics() {
    bool flipped = false;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::basic) continue;
        VarState want = state_[j];
        if (lo_[j] == hi_[j])
            want = VarState::at_lower;
        else if (d_[j] > opt_.dual_tol)
            want = VarState::at_lower;
        else if (d_[j] < -opt_.dual_tol)
            want = VarState::at_upper;
        if (want != state_[j]) flipped = true;
        state_[j] = want;
        x_[j] = want == VarState::at_lower ? lo_[j] : hi_[j];
    }
    return flipped;
}

void LpSolver::compute_primals() {
    // B x_B = -(N x_N) over [A -I].
    std::vector<double> w(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] == VarState::basic || x_[j] == 0.0) continue;
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k) w[col_row_[k]] -= col_val_[k] * x_[j];
    }
    for (std::size_t i = 0; i < m_; ++i)
        if (state_[n_ + i] != VarState::basic) w[i] += x_[n_ + i];
    std::vector<double> xb;
    ftran(w, xb);
    for (std::size_t p = 0; p < m_; ++p) x_[static_cast<std::size_t>(head_[p])] = xb[p];
}

bool LpSolver::artificial_bound_active() const {
    for (std::size_t j = 0; j < n_; ++j) {
        if (artificial_lo_[j] && x_[j] <= lo_[j] + 1e-6) return true;
        if (artificial_hi_[j] && x_[j] >= hi_[j] - 1e-6) return true;
    }
    return false;
}

SolveStatus LpSolver::solve() {
    if (trivially_infeasible_) return SolveStatus::infeasible;
    for (std::size_t j = 0; j < n_; ++j)
        if (lo_[j] > hi_[j]) {
            certificate_.clear();
            return SolveStatus::infeasible;
        }
    if (updates_since_refactor_ >= opt_.refactor_interval / 2) refactor();
    perturb_costs();
    compute_duals();
    place_nonbasics();
    compute_primals();
    SolveStatus status = iterate();
    cost_ = true_cost_;
    if (status != SolveStatus::optimal) return status;
    compute_duals();
    status = primal_cleanup();
    if (status == SolveStatus::optimal && artificial_bound_active()) return SolveStatus::unbounded;
    return status;
}

void LpSolver::perturb_costs() {
    for (std::size_t j = 0; j < n_ + m_; ++j)
        cost_[j] = true_cost_[j] + (state_[j] == VarState::at_upper ? -perturbation_[j] : perturbation_[j]);
}

// Removes kernel column b and kernel row k by moving the last ones into
// their slots.
void LpSolver::drop_kernel(std::size_t b, std::size_t k) {
    const std::size_t last = s_ - 1;
    if (b != last) {
        for (std::size_t c = 0; c < s_; ++c) finv(b, c) = finv(last, c);
        kcol_var_[b] = kcol_var_[last];
        kcol_of_var_[static_cast<std::size_t>(kcol_var_[b])] = static_cast<int>(b);
    }
    if (k != last) {
        for (std::size_t r = 0; r < s_; ++r) finv(r, k) = finv(r, last);
        krow_[k] = krow_[last];
        krow_of_row_[static_cast<std::size_t>(krow_[k])] = static_cast<int>(k);
    }
    kcol_var_.pop_back();
    krow_.pop_back();
    --s_;
}

// Basis change at position r: q enters, head_[r] leaves. alpha_col is
// B^-1 times the entering column (by position).
void LpSolver::update_basis(std::size_t r, std::size_t q, const std::vector<double>& alpha_col) {
    const auto leaving = static_cast<std::size_t>(head_[r]);
    auto& xs = scratch_xs_;
    auto& g = scratch_g_;
    xs.assign(s_, 0.0);
    for (std::size_t b = 0; b < s_; ++b)
        xs[b] = alpha_col[static_cast<std::size_t>(position_[static_cast<std::size_t>(kcol_var_[b])])];

    if (leaving < n_ && q < n_) {
        // Column replacement.
        const auto b0 = static_cast<std::size_t>(kcol_of_var_[leaving]);
        const double inv = 1.0 / xs[b0];
        for (std::size_t k = 0; k < s_; ++k) finv(b0, k) *= inv;
        for (std::size_t b = 0; b < s_; ++b) {
            if (b == b0 || xs[b] == 0.0) continue;
            const double f = xs[b];
            for (std::size_t k = 0; k < s_; ++k) finv(b, k) -= f * finv(b0, k);
        }
        kcol_of_var_[leaving] = -1;
        kcol_var_[b0] = static_cast<int>(q);
        kcol_of_var_[q] = static_cast<int>(b0);
    } else if (leaving >= n_ && q < n_) {
        // Row i0 joins the kernel with column q: bordered inverse.
        const std::size_t i0 = leaving - n_;
        g.assign(s_, 0.0);
        double d = 0.0;
        for (std::size_t k = row_start_[i0]; k < row_start_[i0 + 1]; ++k) {
            const auto j = static_cast<std::size_t>(row_col_[k]);
            if (j == q) d = row_val_[k];
            const int b = kcol_of_var_[j];
            if (b < 0) continue;
            for (std::size_t kk = 0; kk < s_; ++kk) g[kk] += row_val_[k] * finv(static_cast<std::size_t>(b), kk);
        }
        const double sigma = d - [&] {
            double cx = 0.0;
            for (std::size_t k = row_start_[i0]; k < row_start_[i0 + 1]; ++k) {
                const int b = kcol_of_var_[static_cast<std::size_t>(row_col_[k])];
                if (b >= 0) cx += row_val_[k] * xs[static_cast<std::size_t>(b)];
            }
            return cx;
        }();
        const std::size_t n = s_;
        for (std::size_t b = 0; b < n; ++b) {
            const double f = xs[b] / sigma;
            if (f != 0.0)
                for (std::size_t k = 0; k < n; ++k) finv(b, k) += f * g[k];
            finv(b, n) = -f;
        }
        for (std::size_t k = 0; k < n; ++k) finv(n, k) = -g[k] / sigma;
        finv(n, n) = 1.0 / sigma;
        kcol_var_.push_back(static_cast<int>(q));
        kcol_of_var_[q] = static_cast<int>(n);
        krow_.push_back(static_cast<int>(i0));
        krow_of_row_[i0] = static_cast<int>(n);
        ++s_;
    } else if (leaving < n_ && q >= n_) {
        // Column of `leaving` and kernel row of q's slack drop out.
        const auto b0 = static_cast<std::size_t>(kcol_of_var_[leaving]);
        const auto k1 = static_cast<std::size_t>(krow_of_row_[q - n_]);
        const double h = finv(b0, k1);
        for (std::size_t b = 0; b < s_; ++b) {
            if (b == b0) continue;
            const double f = finv(b, k1) / h;
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < s_; ++k)
                if (k != k1) finv(b, k) -= f * finv(b0, k);
        }
        kcol_of_var_[leaving] = -1;
        krow_of_row_[q - n_] = -1;
        drop_kernel(b0, k1);
    } else {
        // Kernel row of q's slack is replaced by row i0.
        const std::size_t i0 = leaving - n_;
        const auto k1 = static_cast<std::size_t>(krow_of_row_[q - n_]);
        g.assign(s_, 0.0);
        for (std::size_t k = row_start_[i0]; k < row_start_[i0 + 1]; ++k) {
            const int b = kcol_of_var_[static_cast<std::size_t>(row_col_[k])];
            if (b < 0) continue;
            for (std::size_t kk = 0; kk < s_; ++kk) g[kk] += row_val_[k] * finv(static_cast<std::size_t>(b), kk);
        }
        const double denom = g[k1];
        g[k1] -= 1.0;
        for (std::size_t b = 0; b < s_; ++b) {
            const double f = finv(b, k1) / denom;
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < s_; ++k) finv(b, k) -= f * g[k];
        }
        krow_of_row_[q - n_] = -1;
        krow_[k1] = static_cast<int>(i0);
        krow_of_row_[i0] = static_cast<int>(k1);
    }

    head_[r] = static_cast<int>(q);
    position_[q] = static_cast<int>(r);
    position_[leaving] = -1;
    state_[q] = VarState::basic;
    ++total_iterations_;
    ++updates_since_refactor_;
}

SolveStatus LpSolver::primal_cleanup() {
    // Primal simplex from a primal feasible basis: Dantzig pricing, Bland
    // after a run of degenerate pivots.
    std::vector<double> alpha_col;
    std::size_t degenerate_run = 0;
    for (std::size_t iter = 0; iter < opt_.max_iterations; ++iter) {
        const bool bland = degenerate_run > opt_.degenerate_before_bland;
        std::size_t q = n_ + m_;
        double best = opt_.dual_tol;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            if (state_[j] == VarState::basic || lo_[j] == hi_[j]) continue;
            const double gain = state_[j] == VarState::at_lower ? -d_[j] : d_[j];
            if (gain <= opt_.dual_tol) continue;
            if (bland) {
                q = j;
                break;
            }
            if (gain > best) {
                best = gain;
                q = j;
            }
        }
        if (q == n_ + m_) return SolveStatus::optimal;

        const double dir = state_[q] == VarState::at_lower ? 1.0 : -1.0;
        column_ftran(q, alpha_col);
        double t = hi_[q] - lo_[q];
        std::size_t r = m_;
        bool to_lower = false;
        for (std::size_t p = 0; p < m_; ++p) {
            const double a = alpha_col[p] * dir;
            if (std::abs(a) < opt_.pivot_tol) continue;
            const auto v = static_cast<std::size_t>(head_[p]);
            const double room = std::max(0.0, a > 0 ? x_[v] - lo_[v] : hi_[v] - x_[v]);
            const double ratio = room / std::abs(a);
            if (ratio < t || (ratio == t && r < m_ && std::abs(a) > std::abs(alpha_col[r]))) {
                t = ratio;
                r = p;
                to_lower = a > 0;
            }
        }
        x_[q] += dir * t;
        for (std::size_t p = 0; p < m_; ++p)
            if (alpha_col[p] != 0.0) x_[static_cast<std::size_t>(head_[p])] -= alpha_col[p] * dir * t;
        degenerate_run = t < 1e-12 ? degenerate_run + 1 : 0;
        if (r == m_) {
            state_[q] = dir > 0 ? VarState::at_upper : VarState::at_lower;
            x_[q] = dir > 0 ? hi_[q] : lo_[q];
            continue;
        }
        const auto leaving = static_cast<std::size_t>(head_[r]);
        x_[leaving] = to_lower ? lo_[leaving] : hi_[leaving];
        update_basis(r, q, alpha_col);
        state_[leaving] = to_lower ? VarState::at_lower : VarState::at_upper;
        if (updates_since_refactor_ >= opt_.refactor_interval) {
            refactor();
            compute_primals();
        }
        compute_duals();
    }
    return SolveStatus::iteration_limit;
}

SolveStatus LpSolver::iterate() {
    const std::size_t total = n_ + m_;
    std::vector<double> alpha_row(total, 0.0);
    std::vector<double> alpha_col, rho_vec;
    std::size_t degenerate_run = 0;
    bool bland = false;
    bool fresh = updates_since_refactor_ == 0;

    for (std::size_t iter = 0; iter < opt_.max_iterations; ++iter) {
        // Leaving row: largest bound violation among basic variables.
        std::size_t r = m_;
        double worst = opt_.primal_tol;
        for (std::size_t p = 0; p < m_; ++p) {
            const auto v = static_cast<std::size_t>(head_[p]);
            const double viol = std::max(lo_[v] - x_[v], x_[v] - hi_[v]);
            if (viol <= opt_.primal_tol) continue;
            if (bland) {
                if (r == m_ || v < static_cast<std::size_t>(head_[r])) r = p;
            } else if (viol > worst) {
                worst = viol;
                r = p;
            }
        }
        if (r == m_) {
            if (fresh) return SolveStatus::optimal;
            // Confirm on a fresh factorization; repair dual signs by flipping.
            refactor();
            compute_duals();
            place_nonbasics();
            compute_primals();
            fresh = true;
            continue;
        }

        const auto leaving = static_cast<std::size_t>(head_[r]);
        const bool increase = x_[leaving] < lo_[leaving];
        const double dir = increase ? 1.0 : -1.0;
        btran(r, rho_vec);
        const double* rho = rho_vec.data();

        // Dual ratio test (Harris two-pass, or Bland).
        double theta_max = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < total; ++j) {
            if (state_[j] == VarState::basic || lo_[j] == hi_[j]) {
                alpha_row[j] = 0.0;
                continue;
            }
            const double a = column_dot(j, rho);
            alpha_row[j] = a;
            const bool eligible = state_[j] == VarState::at_lower ? dir * a < -opt_.pivot_tol
                                                                  : dir * a > opt_.pivot_tol;
            if (!eligible) continue;
            const double dj = state_[j] == VarState::at_lower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
            theta_max = std::min(theta_max, (dj + (bland ? 0.0 : opt_.dual_tol)) / std::abs(a));
        }
        if (!std::isfinite(theta_max)) {
            if (!fresh) {
                refactor();
                compute_duals();
                place_nonbasics();
                compute_primals();
                fresh = true;
                continue;
            }
            certificate_.assign(rho, rho + m_);
            return SolveStatus::infeasible;
        }
        std::size_t q = total;
        double best_alpha = 0.0;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < total; ++j) {
            const double a = alpha_row[j];
            if (a == 0.0 || state_[j] == VarState::basic) continue;
            const bool eligible = state_[j] == VarState::at_lower ? dir * a < -opt_.pivot_tol
                                                                  : dir * a > opt_.pivot_tol;
            if (!eligible) continue;
            const double dj = state_[j] == VarState::at_lower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
            const double ratio = dj / std::abs(a);
            if (bland) {
                if (ratio < best_ratio - 1e-12) {
                    best_ratio = ratio;
                    q = j;
                }
            } else if (ratio <= theta_max && std::abs(a) > best_alpha) {
                best_alpha = std::abs(a);
                q = j;
            }
        }
        if (q == total) throw NumericalError("dual ratio test selected no column");

        column_ftran(q, alpha_col);
        const double pivot = alpha_col[r];
        if (std::abs(pivot - alpha_row[q]) > 1e-7 * (1.0 + std::abs(pivot)) || std::abs(pivot) < opt_.pivot_tol) {
            if (fresh) throw NumericalError("unstable pivot in dual simplex");
            refactor();
            compute_duals();
            place_nonbasics();
            compute_primals();
            fresh = true;
            continue;
        }

        const double target = increase ? lo_[leaving] : hi_[leaving];
        const double step = (x_[leaving] - target) / pivot;
        for (std::size_t p = 0; p < m_; ++p)
            if (alpha_col[p] != 0.0) x_[static_cast<std::size_t>(head_[p])] -= alpha_col[p] * step;
        x_[q] += step;
        x_[leaving] = target;

        const double theta = d_[q] / pivot;
        if (theta != 0.0)
            for (std::size_t j = 0; j < total; ++j)
                if (alpha_row[j] != 0.0 && state_[j] != VarState::basic) d_[j] -= theta * alpha_row[j];
        d_[q] = 0.0;
        d_[leaving] = -theta;

        update_basis(r, q, alpha_col);
        state_[leaving] = increase ? VarState::at_lower : VarState::at_upper;
        fresh = false;

        if (std::abs(theta) < 1e-12) {
            if (++degenerate_run > opt_.degenerate_before_bland) bland = true;
        } else {
            degenerate_run = 0;
        }

        if (updates_since_refactor_ >= opt_.refactor_interval) {
            refactor();
            compute_duals();
            place_nonbasics();
            compute_primals();
            fresh = true;
        }
    }
    return SolveStatus::iteration_limit;
}

double LpSolver::objective() const {
    double v = 0.0;
    for (std::size_t j = 0; j < n_; ++j) v += cost_[j] * x_[j];
    return sign_ * v + obj_constant_;
}

std::vector<double> LpSolver::values() const { return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)}; }

LpResult solve_lp(const MilpModel& model, const LpOptions& options) {
    LpSolver lp(model, options);
    LpResult result;
    result.status = lp.solve();
    result.iterations = lp.iterations();
    if (result.status == SolveStatus::optimal) {
        result.objective = lp.objective();
        result.values = lp.values();
    }
    return result;
}

}  // namespace blackstart
