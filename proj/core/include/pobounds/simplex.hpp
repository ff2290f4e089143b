#pragma once

#include "pobounds/compile.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace pobounds {

enum class Sense { Minimize, Maximize };

// All variables are implicitly >= 0.
struct LpProblem {
    std::vector<double> objective;
    ConstraintSet constraints;
    Sense sense = Sense::Minimize;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    std::vector<double> witness;
    std::size_t iterations = 0;
    // Rows with a nonzero phase-1 dual when infeasible, in row order.
    std::vector<Provenance> certificate;
};

struct SimplexOptions {
    double pivot_tolerance = 1e-9;
    double zero_tolerance = 1e-12;
    double feasibility_tolerance = 1e-8;
    double phase1_tolerance = 1e-9;
    std::size_t max_iterations = 200000;
};

class LpSolver {
public:
    virtual ~LpSolver() = default;
    virtual LpSolution solve(const LpProblem& problem) = 0;
    virtual std::string name() const = 0;
};

// Dense two-phase tableau simplex with Bland's rule. Throws SolverFailure on
// numerical breakdown or when the iteration limit is hit.
class SimplexSolver : public LpSolver {
public:
    SimplexSolver() = default;
    explicit SimplexSolver(SimplexOptions options) : options_(options) {}

    LpSolution solve(const LpProblem& problem) override;
    std::string name() const override { return "simplex"; }

    const SimplexOptions& options() const { return options_; }

private:
    SimplexOptions options_;
};

using SolverFactory = std::unique_ptr<LpSolver> (*)();

std::unique_ptr<LpSolver> make_simplex_solver();

LpSolution solve(const LpProblem& problem);

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> point;  // a feasible vertex when feasible
    std::vector<Provenance> certificate;
};

FeasibilityResult check_feasible(const ConstraintSet& constraints);

}  // namespace pobounds
