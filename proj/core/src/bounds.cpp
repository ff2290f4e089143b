#include "pobounds/bounds.hpp"

#include "pobounds/errors.hpp"

namespace pobounds {

const char* to_string(BoundStatus status) {
    switch (status) {
    case BoundStatus::Ok: return "ok";
    case BoundStatus::Infeasible: return "infeasible";
    case BoundStatus::Error: return "error";
    }
    return "error";
}

ConstraintSet compile_problem(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions,
                              const BoundOptions& options) {
    if (data.empty()) throw ConfigError("at least one of experimental or observational data is required");
    if (assumptions.exogeneity && !data.obs) throw ConfigError("exogeneity requires observational data");

    ConstraintSet set = compile_base(dims);
    if (data.exp) set.append(compile_experimental(dims, *data.exp));
    if (data.obs) set.append(compile_observational(dims, *data.obs));
    if (assumptions.exogeneity) set.append(compile_exogeneity(dims, *data.obs));
    set.append(compile_monotonicity(dims, assumptions));
    if (options.slack) set = relax_data_rows(set, *options.slack);
    return set;
}

BoundObjective bind_query(const QuerySpec& query, const DataSources& data) {
    if (query.condition) {
        if (!data.obs) throw ConfigError("conditional query requires observational data");
        return bind_condition(query, *data.obs);
    }
    return bind_unconditional(query);
}

namespace {

std::unique_ptr<LpSolver> make_solver(const BoundOptions& options) {
    return options.solver_factory ? options.solver_factory() : make_simplex_solver();
}

}  // namespace

BoundResult bound(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions, const QuerySpec& query,
                  const BoundOptions& options) {
    if (!(query.dims == dims)) throw ShapeError("query dims differ from problem dims");
    ConstraintSet constraints = compile_problem(dims, data, assumptions, options);
    BoundObjective objective = bind_query(query, data);

    BoundResult result;
    result.warnings = constraints.warnings;
    result.rows = constraints.rows.size();

    LpProblem problem{std::move(objective.coeffs), std::move(constraints), Sense::Minimize};
    auto solver = make_solver(options);
    LpSolution low = solver->solve(problem);
    if (low.status == LpStatus::Infeasible) {
        result.status = BoundStatus::Infeasible;
        result.diagnostics = std::move(low.certificate);
        if (result.diagnostics.empty()) result.diagnostics = check_feasible(problem.constraints).certificate;
        return result;
    }
    if (low.status == LpStatus::Unbounded) throw SolverFailure("bounding LP reported unbounded over a bounded polytope");

    problem.sense = Sense::Maximize;
    solver = make_solver(options);
    LpSolution high = solver->solve(problem);
    if (high.status != LpStatus::Optimal) throw SolverFailure("maximization failed after a feasible minimization");

    result.lower = low.value;
    result.upper = high.value;
    result.lower_witness = std::move(low.witness);
    result.upper_witness = std::move(high.witness);
    return result;
}

std::vector<BoundResult> bound_sweep(const Dims& dims, const DataSources& data,
                                     const std::vector<AssumptionSet>& grid, const QuerySpec& query,
                                     const BoundOptions& options) {
    std::vector<BoundResult> results;
    results.reserve(grid.size());
    for (const auto& assumptions : grid) {
        try {
            results.push_back(bound(dims, data, assumptions, query, options));
        } catch (const Error& e) {
            BoundResult failed;
            failed.status = BoundStatus::Error;
            failed.error = e.what();
            results.push_back(std::move(failed));
        }
    }
    return results;
}

}  // namespace pobounds
