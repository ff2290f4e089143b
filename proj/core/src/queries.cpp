#include "pobounds/queries.hpp"

#include "pobounds/errors.hpp"

#include <cmath>
#include <sstream>

namespace pobounds {

namespace {

void check_po_index(const Dims& dims, int k) {
    if (k < 0 || k >= dims.d_x())
        throw RangeError("PO index " + std::to_string(k) + " outside [0, " + std::to_string(dims.d_x()) + ")");
}

void check_evidence(const Dims& dims, Evidence e) {
    if (e.x < 0 || e.x >= dims.d_x() || e.y < 0 || e.y >= dims.d_y())
        throw RangeError("evidence (X = " + std::to_string(e.x) + ", Y = " + std::to_string(e.y) + ") out of range");
}

bool cell_in_event(const std::vector<std::vector<bool>>& allowed, std::span<const int> y_vec) {
    for (std::size_t k = 0; k < y_vec.size(); ++k)
        if (!allowed[k][static_cast<std::size_t>(y_vec[k])]) return false;
    return true;
}

std::string describe_event(const Event& event) {
    std::ostringstream out;
    bool first = true;
    auto sep = [&] {
        if (!first) out << ", ";
        first = false;
    };
    for (const auto& c : event.po) {
        sep();
        out << "Y_" << c.index;
        switch (c.kind) {
        case PoConstraint::Kind::AtMost: out << "<=" << c.bound; break;
        case PoConstraint::Kind::AtLeast: out << ">=" << c.bound; break;
        case PoConstraint::Kind::Values:
            if (c.values.size() == 1) {
                out << '=' << c.values.front();
            } else {
                out << " in {";
                for (std::size_t i = 0; i < c.values.size(); ++i) out << (i ? "," : "") << c.values[i];
                out << '}';
            }
            break;
        }
    }
    if (event.x) {
        sep();
        out << "X=" << *event.x;
    }
    if (event.y) {
        sep();
        out << "Y=" << *event.y;
    }
    return out.str();
}

}  // namespace

std::vector<std::vector<bool>> allowed_values(const Dims& dims, const Event& event) {
    std::vector<std::vector<bool>> allowed(static_cast<std::size_t>(dims.d_x()),
                                           std::vector<bool>(static_cast<std::size_t>(dims.d_y()), true));
    for (const auto& c : event.po) {
        check_po_index(dims, c.index);
        std::vector<bool> keep(static_cast<std::size_t>(dims.d_y()), false);
        switch (c.kind) {
        case PoConstraint::Kind::Values:
            for (int v : c.values) {
                if (v < 0 || v >= dims.d_y())
                    throw RangeError("value " + std::to_string(v) + " for Y_" + std::to_string(c.index) + " out of range");
                keep[static_cast<std::size_t>(v)] = true;
            }
            break;
        case PoConstraint::Kind::AtMost:
            for (int v = 0; v < dims.d_y(); ++v) keep[static_cast<std::size_t>(v)] = v <= c.bound;
            break;
        case PoConstraint::Kind::AtLeast:
            for (int v = 0; v < dims.d_y(); ++v) keep[static_cast<std::size_t>(v)] = v >= c.bound;
            break;
        }
        auto& slot = allowed[static_cast<std::size_t>(c.index)];
        bool any = false;
        for (std::size_t v = 0; v < slot.size(); ++v) {
            slot[v] = slot[v] && keep[v];
            any = any || slot[v];
        }
        if (!any) throw ContradictionError("event leaves no admissible value for Y_" + std::to_string(c.index));
    }
    return allowed;
}

QuerySpec build_event_query(const Dims& dims, const Event& event) {
    const auto allowed = allowed_values(dims, event);
    if (event.x && (*event.x < 0 || *event.x >= dims.d_x())) throw RangeError("event X out of range");
    if (event.y && (*event.y < 0 || *event.y >= dims.d_y())) throw RangeError("event Y out of range");

    QuerySpec query(dims);
    query.label = "P(" + describe_event(event) + ")";
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t i = 0; i < dims.param_count(); ++i) {
        const auto y_vec = unflatten_y_vec(i / d_x, dims);
        if (!cell_in_event(allowed, y_vec)) continue;
        const int x = static_cast<int>(i % d_x);
        if (event.x && *event.x != x) continue;
        for (int y = 0; y < dims.d_y(); ++y) {
            if (event.y && *event.y != y) continue;
            query.coeffs[full_index(i, y, dims)] = 1.0;
        }
    }
    return query;
}

QuerySpec build_conditional_query(const Dims& dims, const Event& event, Evidence given) {
    check_evidence(dims, given);
    if ((event.x && *event.x != given.x) || (event.y && *event.y != given.y))
        throw ContradictionError("event's factual (X, Y) conflicts with the conditioning evidence");
    Event restricted = event;
    restricted.x = given.x;
    restricted.y = given.y;
    QuerySpec query = build_event_query(dims, restricted);
    query.condition = given;
    Event shown = event;
    shown.x.reset();
    shown.y.reset();
    query.label = "P(" + describe_event(shown) + " | X=" + std::to_string(given.x) + ", Y=" + std::to_string(given.y) + ")";
    return query;
}

QuerySpec build_moment_query(const Dims& dims, int order, int i, int j) {
    check_po_index(dims, i);
    check_po_index(dims, j);
    if (order < 1) throw RangeError("moment order must be >= 1");
    QuerySpec query(dims);
    query.label = "E[(Y_" + std::to_string(i) + " - Y_" + std::to_string(j) + ")^" + std::to_string(order) + "]";
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t p = 0; p < dims.param_count(); ++p) {
        const std::size_t yi = p / d_x;
        const double diff = po_digit(yi, i, dims) - po_digit(yi, j, dims);
        const double value = std::pow(diff, order);
        if (value == 0.0) continue;
        for (int y = 0; y < dims.d_y(); ++y) query.coeffs[full_index(p, y, dims)] = value;
    }
    return query;
}

QuerySpec build_posterior_effect_query(const Dims& dims, int i, int j, Evidence given) {
    check_po_index(dims, i);
    check_po_index(dims, j);
    check_evidence(dims, given);
    QuerySpec query(dims);
    query.condition = given;
    query.label = "E[Y_" + std::to_string(i) + " - Y_" + std::to_string(j) + " | X=" + std::to_string(given.x) +
                  ", Y=" + std::to_string(given.y) + "]";
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t p = static_cast<std::size_t>(given.x); p < dims.param_count(); p += d_x) {
        const std::size_t yi = p / d_x;
        const double diff = po_digit(yi, i, dims) - po_digit(yi, j, dims);
        if (diff != 0.0) query.coeffs[full_index(p, given.y, dims)] = diff;
    }
    return query;
}

double Objective::evaluate(const std::vector<double>& params) const {
    if (params.size() != coeffs.size()) throw ShapeError("objective and point differ in length");
    double sum = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * params[i];
    return sum;
}

Objective collapse_to_objective(const QuerySpec& query) {
    query.validate();
    const Dims& dims = query.dims;
    Objective objective;
    objective.coeffs.assign(dims.param_count(), 0.0);
    objective.condition = query.condition;
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t p = 0; p < dims.param_count(); ++p) {
        const int x = static_cast<int>(p % d_x);
        const int y_x = po_digit(p / d_x, x, dims);
        objective.coeffs[p] = query.coeffs[full_index(p, y_x, dims)];
    }
    return objective;
}

BoundObjective bind_condition(const QuerySpec& query, const ObservationalJoint& obs) {
    if (!(obs.dims() == query.dims)) throw ShapeError("observational table dims differ from query dims");
    Objective objective = collapse_to_objective(query);
    BoundObjective bound{std::move(objective.coeffs), 1.0};
    if (!query.condition) return bound;
    const double divisor = obs.at(query.condition->x, query.condition->y);
    if (!(divisor > 0.0))
        throw UndefinedConditionalError("P(X = " + std::to_string(query.condition->x) + ", Y = " +
                                        std::to_string(query.condition->y) + ") = 0; conditional query undefined");
    for (double& c : bound.coeffs) c /= divisor;
    bound.divisor = divisor;
    return bound;
}

BoundObjective bind_unconditional(const QuerySpec& query) {
    if (query.condition) throw ConfigError("conditional query requires observational data to bind its divisor");
    Objective objective = collapse_to_objective(query);
    return BoundObjective{std::move(objective.coeffs), 1.0};
}

}  // namespace pobounds
