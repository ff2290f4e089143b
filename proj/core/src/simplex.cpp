#include "pobounds/simplex.hpp"

#include "pobounds/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pobounds {

namespace {

// Row-major dense tableau with a reduced-cost row. The last column holds the
// right-hand side; the last entry of the cost row holds minus the current
// objective value.
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0) {}

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    double& at(std::size_t i, std::size_t j) { return a_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double rhs(std::size_t i) const { return at(i, n_); }
    double& cost(std::size_t j) { return cost_[j]; }
    double objective() const { return -cost_[n_]; }
    std::vector<double>& cost_row() { return cost_; }

    void pivot(std::size_t r, std::size_t c) {
        const std::size_t width = n_ + 1;
        double* prow = &a_[r * width];
        const double inv = 1.0 / prow[c];
        for (std::size_t j = 0; j < width; ++j) prow[j] *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row = &a_[i * width];
            const double f = row[c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
            row[c] = 0.0;
            if (std::abs(row[n_]) < 1e-13) row[n_] = 0.0;
        }
        const double f = cost_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j < width; ++j) cost_[j] -= f * prow[j];
            cost_[c] = 0.0;
        }
    }

    void remove_rows(const std::vector<bool>& drop) {
        const std::size_t width = n_ + 1;
        std::size_t out = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (drop[i]) continue;
            if (out != i) std::copy_n(&a_[i * width], width, &a_[out * width]);
            ++out;
        }
        m_ = out;
        a_.resize(m_ * width);
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> a_;
    std::vector<double> cost_;
};

enum class RunResult { Optimal, Unbounded };

class Run {
public:
    Run(const LpProblem& problem, const SimplexOptions& options) : problem_(problem), opt_(options) {}

    LpSolution solve(bool phase1_only);

private:
    void build();
    RunResult iterate(std::size_t allowed_cols);
    [[noreturn]] void fail(const std::string& why) const;
    std::vector<double> recover_witness() const;
    std::vector<double> tableau_witness() const;

    const LpProblem& problem_;
    SimplexOptions opt_;

    std::size_t n_ = 0;       // original variables
    std::size_t slacks_ = 0;  // one per <= row
    std::size_t structural_ = 0;
    std::vector<double> dense_;  // normalized rows over structural columns
    std::vector<double> b_;
    std::vector<std::size_t> identity_col_;
    std::vector<std::size_t> row_origin_;
    std::vector<std::size_t> basis_;
    std::unique_ptr<Tableau> t_;
    std::size_t iterations_ = 0;
};

void Run::fail(const std::string& why) const {
    std::ostringstream out;
    out << "simplex breakdown: " << why << " (iteration " << iterations_ << ", " << t_->rows() << " rows, "
        << t_->cols() << " columns, basis [";
    for (std::size_t i = 0; i < basis_.size(); ++i) out << (i ? " " : "") << basis_[i];
    out << "])";
    throw SolverFailure(out.str());
}

void Run::build() {
    const auto& rows = problem_.constraints.rows;
    n_ = problem_.constraints.num_vars;
    slacks_ = 0;
    for (const auto& row : rows)
        if (row.kind == RowKind::LessEqual) ++slacks_;
    structural_ = n_ + slacks_;
    const std::size_t m = rows.size();

    dense_.assign(m * structural_, 0.0);
    b_.assign(m, 0.0);
    identity_col_.assign(m, 0);
    row_origin_.resize(m);

    // First pass: normalized structural part, count artificials.
    std::vector<bool> needs_artificial(m, true);
    std::size_t slack = n_;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = rows[i];
        row_origin_[i] = i;
        const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
        for (const auto& [j, v] : row.coeffs) dense_[i * structural_ + j] = sign * v;
        b_[i] = sign * row.rhs;
        if (row.kind == RowKind::LessEqual) {
            dense_[i * structural_ + slack] = sign;
            if (sign > 0.0) {
                needs_artificial[i] = false;
                identity_col_[i] = slack;
            }
            ++slack;
        }
    }
    std::size_t artificials = static_cast<std::size_t>(std::count(needs_artificial.begin(), needs_artificial.end(), true));

    t_ = std::make_unique<Tableau>(m, structural_ + artificials);
    basis_.assign(m, 0);
    std::size_t art = structural_;
    for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(&dense_[i * structural_], structural_, &t_->at(i, 0));
        t_->rhs(i) = b_[i];
        if (needs_artificial[i]) {
            t_->at(i, art) = 1.0;
            identity_col_[i] = art;
            ++art;
        }
        basis_[i] = identity_col_[i];
    }

    // Phase-1 costs: 1 on artificials, reduced by the artificial rows.
    auto& cost = t_->cost_row();
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = structural_; j < t_->cols(); ++j) cost[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (basis_[i] < structural_) continue;
        for (std::size_t j = 0; j <= t_->cols(); ++j) cost[j] -= t_->at(i, j);
    }
}

RunResult Run::iterate(std::size_t allowed_cols) {
    Tableau& t = *t_;
    while (true) {
        std::size_t enter = allowed_cols;
        for (std::size_t j = 0; j < allowed_cols; ++j) {
            if (t.cost(j) < -opt_.pivot_tolerance) {
                enter = j;
                break;
            }
        }
        if (enter == allowed_cols) return RunResult::Optimal;

        if (++iterations_ > opt_.max_iterations) fail("iteration limit reached");

        std::size_t leave = t.rows();
        double best = 0.0;
        bool tiny = false;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= opt_.pivot_tolerance) {
                if (a > opt_.zero_tolerance) tiny = true;
                continue;
            }
            const double ratio = std::max(t.rhs(i), 0.0) / a;
            const double slack = 1e-12 * (1.0 + best);
            if (leave == t.rows() || ratio < best - slack) {
                leave = i;
                best = ratio;
            } else if (ratio <= best + slack && basis_[i] < basis_[leave]) {
                leave = i;
            }
        }
        if (leave == t.rows()) {
            if (tiny) fail("only sub-tolerance pivot candidates in entering column " + std::to_string(enter));
            return RunResult::Unbounded;
        }
        t.pivot(leave, enter);
        basis_[leave] = enter;
    }
}

std::vector<double> Run::tableau_witness() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i] < n_) x[basis_[i]] = std::max(t_->rhs(i), 0.0);
    return x;
}

// Re-solves B x_B = b from the original normalized columns with partially
// pivoted LU to shed accumulated tableau rounding.
std::vector<double> Run::recover_witness() const {
    const std::size_t m = basis_.size();
    std::vector<double> lu(m * m, 0.0);
    std::vector<double> rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t orig = row_origin_[r];
        rhs[r] = b_[orig];
        for (std::size_t c = 0; c < m; ++c) lu[r * m + c] = dense_[orig * structural_ + basis_[c]];
    }
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t p = k;
        for (std::size_t r = k + 1; r < m; ++r)
            if (std::abs(lu[r * m + k]) > std::abs(lu[p * m + k])) p = r;
        if (std::abs(lu[p * m + k]) < opt_.zero_tolerance) return {};
        if (p != k) {
            for (std::size_t c = 0; c < m; ++c) std::swap(lu[k * m + c], lu[p * m + c]);
            std::swap(rhs[k], rhs[p]);
        }
        for (std::size_t r = k + 1; r < m; ++r) {
            const double f = lu[r * m + k] / lu[k * m + k];
            if (f == 0.0) continue;
            for (std::size_t c = k; c < m; ++c) lu[r * m + c] -= f * lu[k * m + c];
            rhs[r] -= f * rhs[k];
        }
    }
    std::vector<double> xb(m, 0.0);
    for (std::size_t k = m; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t c = k + 1; c < m; ++c) s -= lu[k * m + c] * xb[c];
        xb[k] = s / lu[k * m + k];
    }
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double v = xb[i];
        if (v < 0.0) {
            if (v < -opt_.feasibility_tolerance) return {};
            v = 0.0;
        }
        if (basis_[i] < n_) x[basis_[i]] = v;
    }
    return x;
}

LpSolution Run::solve(bool phase1_only) {
    if (!phase1_only && problem_.objective.size() != problem_.constraints.num_vars)
        throw ShapeError("objective has " + std::to_string(problem_.objective.size()) + " entries, expected " +
                         std::to_string(problem_.constraints.num_vars));
    problem_.constraints.validate();
    build();
    LpSolution solution;

    Tableau& t = *t_;
    iterate(t.cols());
    if (t.objective() > opt_.phase1_tolerance) {
        solution.status = LpStatus::Infeasible;
        solution.iterations = iterations_;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const std::size_t id = identity_col_[i];
            const double c = id >= structural_ ? 1.0 : 0.0;
            const double dual = c - t.cost(id);
            if (std::abs(dual) > opt_.pivot_tolerance) solution.certificate.push_back(problem_.constraints.rows[i].provenance);
        }
        return solution;
    }

    // Drive artificials out of the basis; rows where that is impossible are
    // linear combinations of the others.
    std::vector<bool> drop(t.rows(), false);
    bool any_drop = false;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        if (basis_[i] < structural_) continue;
        std::size_t col = structural_;
        for (std::size_t j = 0; j < structural_; ++j) {
            if (std::abs(t.at(i, j)) > opt_.pivot_tolerance) {
                col = j;
                break;
            }
        }
        if (col == structural_) {
            drop[i] = true;
            any_drop = true;
        } else {
            t.pivot(i, col);
            basis_[i] = col;
        }
    }
    if (any_drop) {
        t.remove_rows(drop);
        std::vector<std::size_t> kept_basis;
        std::vector<std::size_t> kept_origin;
        for (std::size_t i = 0; i < drop.size(); ++i) {
            if (drop[i]) continue;
            kept_basis.push_back(basis_[i]);
            kept_origin.push_back(row_origin_[i]);
        }
        basis_ = std::move(kept_basis);
        row_origin_ = std::move(kept_origin);
    }

    if (phase1_only) {
        solution.status = LpStatus::Optimal;
        solution.iterations = iterations_;
        solution.witness = recover_witness();
        if (solution.witness.empty()) solution.witness = tableau_witness();
        return solution;
    }

    const double sign = problem_.sense == Sense::Maximize ? -1.0 : 1.0;
    auto& cost = t.cost_row();
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = sign * problem_.objective[j];
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= t.cols(); ++j) cost[j] -= cb * t.at(i, j);
        cost[basis_[i]] = 0.0;
    }

    const RunResult result = iterate(structural_);
    solution.iterations = iterations_;
    if (result == RunResult::Unbounded) {
        solution.status = LpStatus::Unbounded;
        return solution;
    }
    solution.status = LpStatus::Optimal;

    std::vector<double> tab = tableau_witness();
    std::vector<double> refined = recover_witness();
    const auto& cons = problem_.constraints;
    if (!refined.empty() && cons.max_violation(refined) <= cons.max_violation(tab))
        solution.witness = std::move(refined);
    else
        solution.witness = std::move(tab);
    double value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) value += problem_.objective[j] * solution.witness[j];
    solution.value = value;
    return solution;
}

}  // namespace

const char* to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

LpSolution SimplexSolver::solve(const LpProblem& problem) {
    Run run(problem, options_);
    return run.solve(false);
}

std::unique_ptr<LpSolver> make_simplex_solver() { return std::make_unique<SimplexSolver>(); }

LpSolution solve(const LpProblem& problem) {
    SimplexSolver solver;
    return solver.solve(problem);
}

FeasibilityResult check_feasible(const ConstraintSet& constraints) {
    LpProblem problem;
    problem.constraints = constraints;
    Run run(problem, SimplexOptions{});
    LpSolution s = run.solve(true);
    FeasibilityResult result;
    result.feasible = s.status == LpStatus::Optimal;
    result.point = std::move(s.witness);
    result.certificate = std::move(s.certificate);
    return result;
}

}  // namespace pobounds
