#pragma once

#include "pobounds/model.hpp"

#include <optional>
#include <vector>

namespace pobounds {

// Restriction on one potential outcome Y_index. Interval forms are expanded
// to explicit value sets when the query is built.
struct PoConstraint {
    enum class Kind { Values, AtMost, AtLeast };

    int index = 0;
    Kind kind = Kind::Values;
    std::vector<int> values;  // Kind::Values
    int bound = 0;            // Kind::AtMost / Kind::AtLeast

    static PoConstraint equals(int index, int value) { return {index, Kind::Values, {value}, 0}; }
    static PoConstraint one_of(int index, std::vector<int> values) { return {index, Kind::Values, std::move(values), 0}; }
    static PoConstraint at_most(int index, int bound) { return {index, Kind::AtMost, {}, bound}; }
    static PoConstraint at_least(int index, int bound) { return {index, Kind::AtLeast, {}, bound}; }
};

// Conjunction of PO restrictions and optional factual (X, Y) values.
struct Event {
    std::vector<PoConstraint> po;
    std::optional<int> x;
    std::optional<int> y;
};

// Allowed values of each Y_k after intersecting the event's constraints.
// Throws ContradictionError when some Y_k has no allowed value.
std::vector<std::vector<bool>> allowed_values(const Dims& dims, const Event& event);

// Indicator of the event over the full (y_vec, x, y) space.
QuerySpec build_event_query(const Dims& dims, const Event& event);

// P(event | X = l, Y = m). The event's own (X, Y) must be absent or equal.
QuerySpec build_conditional_query(const Dims& dims, const Event& event, Evidence given);

// E[(Y_i - Y_j)^order].
QuerySpec build_moment_query(const Dims& dims, int order, int i, int j);

// E[Y_i - Y_j | X = l, Y = m].
QuerySpec build_posterior_effect_query(const Dims& dims, int i, int j, Evidence given);

// Coefficients over the decision variables after applying consistency:
// coeff(y_vec, x) = query(y_vec, x, y_x). A conditional query keeps its
// evidence; the divisor is supplied later by bind_condition.
struct Objective {
    std::vector<double> coeffs;
    std::optional<Evidence> condition;

    double evaluate(const std::vector<double>& params) const;
};

Objective collapse_to_objective(const QuerySpec& query);

// Objective with the conditional divisor already applied to coeffs; divisor
// records P(X = l, Y = m), or 1 when the query is unconditional.
struct BoundObjective {
    std::vector<double> coeffs;
    double divisor = 1.0;
};

// Divides by P(X = l, Y = m) taken from obs. Unconditional queries pass
// through with divisor 1. Throws UndefinedConditionalError when the
// evidence has probability zero.
BoundObjective bind_condition(const QuerySpec& query, const ObservationalJoint& obs);

// Binds an unconditional query; throws ConfigError for conditional ones.
BoundObjective bind_unconditional(const QuerySpec& query);

}  // namespace pobounds
