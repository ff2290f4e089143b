#pragma once

#include "pobounds/compile.hpp"
#include "pobounds/model.hpp"
#include "pobounds/queries.hpp"
#include "pobounds/simplex.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pobounds {

struct BoundOptions {
    // Relaxes every data equality row to |row - rhs| <= slack when set.
    std::optional<double> slack;
    // Defaults to the built-in simplex.
    std::function<std::unique_ptr<LpSolver>()> solver_factory;
};

enum class BoundStatus { Ok, Infeasible, Error };

const char* to_string(BoundStatus status);

struct BoundResult {
    BoundStatus status = BoundStatus::Ok;
    double lower = 0.0;
    double upper = 0.0;
    ParamVector lower_witness;
    ParamVector upper_witness;
    // Provenance of the conflicting rows when infeasible.
    std::vector<Provenance> diagnostics;
    std::vector<std::string> warnings;
    // Set when status is Error (sweep points only).
    std::string error;
    std::size_t rows = 0;
};

// Base + available data rows + exogeneity (when flagged) + monotone rows,
// relaxed when options.slack is set. Throws ConfigError when no data source
// is given or exogeneity is requested without observational data.
ConstraintSet compile_problem(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions,
                              const BoundOptions& options = {});

// Objective for the LP; conditional queries need data.obs.
BoundObjective bind_query(const QuerySpec& query, const DataSources& data);

BoundResult bound(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions, const QuerySpec& query,
                  const BoundOptions& options = {});

// One result per grid point, in input order. Errors at a point are recorded
// in that point's result and do not stop the sweep.
std::vector<BoundResult> bound_sweep(const Dims& dims, const DataSources& data,
                                     const std::vector<AssumptionSet>& grid, const QuerySpec& query,
                                     const BoundOptions& options = {});

}  // namespace pobounds
