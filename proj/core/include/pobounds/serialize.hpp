#pragma once

// JSON forms of the library's inputs and results. Schemas are documented in
// docs/formats.md. Numbers may be given as JSON numbers or as "a/b" strings.

#include "pobounds/bounds.hpp"
#include "pobounds/estimate.hpp"
#include "pobounds/identify.hpp"
#include "pobounds/model.hpp"
#include "pobounds/queries.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace pobounds {

using Json = nlohmann::json;

// Number, or a string "a/b" / "0.25".
double parse_probability(const Json& value, const std::string& where);

Dims parse_dims(const Json& value);

// {"matrix": [[...], ...]} or a bare nested array, d_x rows of d_y entries.
std::vector<std::vector<double>> parse_matrix(const Json& value, const Dims& dims, const std::string& where);
ExperimentalMarginals parse_experimental(const Json& value, const Dims& dims);
ObservationalJoint parse_observational(const Json& value, const Dims& dims);

// Preset name string, {"preset": ...}, {"presets": [...]}, {"terms": [...]},
// optionally with "exogeneity": bool. Objects may combine presets and terms.
AssumptionSet parse_assumptions(const Json& value, const Dims& dims);
Json to_json(const AssumptionSet& assumptions, const Dims& dims);

// {"kind": "event" | "moment" | "posterior_effect" | "raw", ...}
QuerySpec parse_query(const Json& value, const Dims& dims);
Json describe_query(const QuerySpec& query);

// {"dims": [d_x, d_y], "cells": [{"y_vec": [...], "x"?, "y"?, "mass"}]}
SparseJointPO parse_joint(const Json& value);
Json to_json(const SparseJointPO& joint);

Json to_json(const ProbabilityTable& table);
Json to_json(const ConstraintSet& constraints);
// Witnesses are listed as sparse cells.
Json to_json(const BoundResult& result, const Dims& dims, bool with_witnesses);
Json to_json(const EndpointSummary& summary);
Json to_json(const EstimateSummary& summary, bool with_replicates);
Json to_json(const CompatibilityReport& report);

}  // namespace pobounds
