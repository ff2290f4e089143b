#include "pobounds/serialize.hpp"

#include "pobounds/compile.hpp"
#include "pobounds/errors.hpp"

#include <cmath>

namespace pobounds {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

int as_int(const Json& v, const std::string& where) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    fail(where, "expected an integer");
}

std::vector<int> as_int_list(const Json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_int(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::optional<int> optional_int(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return as_int(*it, where + "." + key);
}

std::optional<Evidence> parse_given(const Json& obj, const std::string& where) {
    auto it = obj.find("given");
    if (it == obj.end() || it->is_null()) return std::nullopt;
    const std::string w = where + ".given";
    return Evidence{as_int(field(*it, "x", w), w + ".x"), as_int(field(*it, "y", w), w + ".y")};
}

PoConstraint parse_po(const Json& v, const std::string& where) {
    const int index = as_int(field(v, "index", where), where + ".index");
    if (v.contains("values")) return PoConstraint::one_of(index, as_int_list(v["values"], where + ".values"));
    if (v.contains("eq")) return PoConstraint::equals(index, as_int(v["eq"], where + ".eq"));
    if (v.contains("le")) return PoConstraint::at_most(index, as_int(v["le"], where + ".le"));
    if (v.contains("ge")) return PoConstraint::at_least(index, as_int(v["ge"], where + ".ge"));
    fail(where, "PO constraint needs one of \"values\", \"eq\", \"le\", \"ge\"");
}

Json window_bound(const IncrementBound& b) { return b.is_unbounded() ? Json(nullptr) : Json(b.value()); }

IncrementBound parse_window_bound(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return IncrementBound::unbounded();
    return IncrementBound::at(as_int(*it, where + "." + key));
}

MonotoneTerm parse_term(const Json& v, const Dims& dims, const std::string& where) {
    MonotoneTerm term(dims.d_x());
    if (v.contains("windows")) {
        const Json& windows = v["windows"];
        if (!windows.is_array()) fail(where + ".windows", "expected an array");
        for (std::size_t i = 0; i < windows.size(); ++i) {
            const std::string w = where + ".windows[" + std::to_string(i) + "]";
            const int s = as_int(field(windows[i], "s", w), w + ".s");
            const int t = as_int(field(windows[i], "t", w), w + ".t");
            if (!(s > t && t >= 0 && s < dims.d_x())) fail(w, "window needs 0 <= t < s < d_x");
            term.set_window(s, t, parse_window_bound(windows[i], "lower", w), parse_window_bound(windows[i], "upper", w));
        }
    }
    const double lower = v.contains("L") ? parse_probability(v["L"], where + ".L") : 0.0;
    const double upper = v.contains("U") ? parse_probability(v["U"], where + ".U") : 1.0;
    term.set_probability(lower, upper);
    if (v.contains("label")) term.set_label(v["label"].get<std::string>());
    return term;
}

void append_preset(AssumptionSet& set, const Json& name, const Dims& dims, const std::string& where) {
    if (!name.is_string()) fail(where, "preset must be a string");
    AssumptionSet p = preset(name.get<std::string>(), dims);
    for (auto& t : p.terms) set.terms.push_back(std::move(t));
    if (!set.label.empty()) set.label += "+";
    set.label += p.label;
}

}  // namespace

double parse_probability(const Json& value, const std::string& where) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) fail(where, "expected a number or an \"a/b\" string");
    const std::string text = value.get<std::string>();
    try {
        const auto slash = text.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used != text.size()) fail(where, "malformed number \"" + text + "\"");
            return v;
        }
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        const double a = std::stod(num, &used);
        if (used != num.size()) fail(where, "malformed fraction \"" + text + "\"");
        const double b = std::stod(den, &used);
        if (used != den.size() || b == 0.0) fail(where, "malformed fraction \"" + text + "\"");
        return a / b;
    } catch (const std::invalid_argument&) {
        fail(where, "malformed number \"" + text + "\"");
    } catch (const std::out_of_range&) {
        fail(where, "number out of range \"" + text + "\"");
    }
}

Dims parse_dims(const Json& value) {
    const auto d = as_int_list(value, "dims");
    if (d.size() != 2) fail("dims", "expected [d_x, d_y]");
    return Dims(d[0], d[1]);
}

std::vector<std::vector<double>> parse_matrix(const Json& value, const Dims& dims, const std::string& where) {
    const Json& m = value.is_object() ? field(value, "matrix", where) : value;
    if (value.is_object() && value.contains("dims") && !(parse_dims(value["dims"]) == dims))
        fail(where, "dims in file differ from --dims");
    if (!m.is_array() || m.size() != static_cast<std::size_t>(dims.d_x()))
        fail(where, "expected " + std::to_string(dims.d_x()) + " rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!m[i].is_array() || m[i].size() != static_cast<std::size_t>(dims.d_y()))
            fail(w, "expected " + std::to_string(dims.d_y()) + " entries");
        std::vector<double> row;
        for (std::size_t j = 0; j < m[i].size(); ++j) row.push_back(parse_probability(m[i][j], w + "[" + std::to_string(j) + "]"));
        rows.push_back(std::move(row));
    }
    return rows;
}

ExperimentalMarginals parse_experimental(const Json& value, const Dims& dims) {
    ExperimentalMarginals exp(dims, parse_matrix(value, dims, "experimental"));
    require_valid(exp);
    return exp;
}

ObservationalJoint parse_observational(const Json& value, const Dims& dims) {
    ObservationalJoint obs(dims, parse_matrix(value, dims, "observational"));
    require_valid(obs);
    return obs;
}

AssumptionSet parse_assumptions(const Json& value, const Dims& dims) {
    AssumptionSet set;
    if (value.is_string()) {
        append_preset(set, value, dims, "assumptions");
        return set;
    }
    if (!value.is_object()) fail("assumptions", "expected a preset name or an object");
    if (value.contains("preset")) append_preset(set, value["preset"], dims, "assumptions.preset");
    if (value.contains("presets")) {
        const Json& list = value["presets"];
        if (!list.is_array()) fail("assumptions.presets", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            append_preset(set, list[i], dims, "assumptions.presets[" + std::to_string(i) + "]");
    }
    if (value.contains("terms")) {
        const Json& list = value["terms"];
        if (!list.is_array()) fail("assumptions.terms", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i)
            set.terms.push_back(parse_term(list[i], dims, "assumptions.terms[" + std::to_string(i) + "]"));
    }
    if (value.contains("exogeneity")) {
        if (!value["exogeneity"].is_boolean()) fail("assumptions.exogeneity", "expected true or false");
        set.exogeneity = value["exogeneity"].get<bool>();
    }
    if (value.contains("label")) set.label = value["label"].get<std::string>();
    set.validate(dims);
    return set;
}

Json to_json(const AssumptionSet& assumptions, const Dims& dims) {
    Json terms = Json::array();
    for (const auto& term : assumptions.terms) {
        Json windows = Json::array();
        for (int s = 1; s < dims.d_x(); ++s)
            for (int t = 0; t < s; ++t) {
                const auto& lo = term.lower(s, t);
                const auto& hi = term.upper(s, t);
                if (lo.is_unbounded() && hi.is_unbounded()) continue;
                windows.push_back({{"s", s}, {"t", t}, {"lower", window_bound(lo)}, {"upper", window_bound(hi)}});
            }
        Json t{{"windows", windows}, {"L", term.prob_lower()}, {"U", term.prob_upper()}};
        if (!term.label().empty()) t["label"] = term.label();
        terms.push_back(std::move(t));
    }
    Json out{{"terms", terms}, {"exogeneity", assumptions.exogeneity}};
    if (!assumptions.label.empty()) out["label"] = assumptions.label;
    return out;
}

QuerySpec parse_query(const Json& value, const Dims& dims) {
    if (!value.is_object()) fail("query", "expected an object");
    const Json& kind_field = field(value, "kind", "query");
    if (!kind_field.is_string()) fail("query.kind", "expected a string");
    const std::string kind = kind_field.get<std::string>();
    const auto given = parse_given(value, "query");

    QuerySpec query(dims);
    if (kind == "event") {
        Event event;
        if (value.contains("po")) {
            const Json& po = value["po"];
            if (!po.is_array()) fail("query.po", "expected an array");
            for (std::size_t i = 0; i < po.size(); ++i) event.po.push_back(parse_po(po[i], "query.po[" + std::to_string(i) + "]"));
        }
        event.x = optional_int(value, "x", "query");
        event.y = optional_int(value, "y", "query");
        query = given ? build_conditional_query(dims, event, *given) : build_event_query(dims, event);
    } else if (kind == "moment") {
        query = build_moment_query(dims, value.contains("order") ? as_int(value["order"], "query.order") : 1,
                                   as_int(field(value, "i", "query"), "query.i"),
                                   as_int(field(value, "j", "query"), "query.j"));
        if (given) fail("query", "moment queries take no \"given\"; use kind \"raw\"");
    } else if (kind == "posterior_effect") {
        if (!given) fail("query", "posterior_effect needs \"given\"");
        query = build_posterior_effect_query(dims, as_int(field(value, "i", "query"), "query.i"),
                                             as_int(field(value, "j", "query"), "query.j"), *given);
    } else if (kind == "raw") {
        const Json& terms = field(value, "terms", "query");
        if (!terms.is_array()) fail("query.terms", "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string w = "query.terms[" + std::to_string(i) + "]";
            const auto y_vec = as_int_list(field(terms[i], "y_vec", w), w + ".y_vec");
            const auto x = optional_int(terms[i], "x", w);
            const auto y = optional_int(terms[i], "y", w);
            const double coeff = terms[i].contains("coeff") ? parse_probability(terms[i]["coeff"], w + ".coeff") : 1.0;
            if (y && !x) fail(w, "\"y\" requires \"x\"");
            try {
                for (int xx = 0; xx < dims.d_x(); ++xx) {
                    if (x && *x != xx) continue;
                    for (int yy = 0; yy < dims.d_y(); ++yy) {
                        if (y && *y != yy) continue;
                        query.add(FullCell{y_vec, xx, yy}, coeff);
                    }
                }
            } catch (const Error& e) {
                fail(w, e.what());
            }
        }
        query.condition = given;
        query.label = "raw";
    } else {
        fail("query.kind", "unknown kind \"" + kind + "\"");
    }
    if (value.contains("label")) query.label = value["label"].get<std::string>();
    query.validate();
    return query;
}

Json describe_query(const QuerySpec& query) {
    Json out{{"label", query.label}};
    if (query.condition) out["given"] = {{"x", query.condition->x}, {"y", query.condition->y}};
    return out;
}

SparseJointPO parse_joint(const Json& value) {
    const Dims dims = parse_dims(field(value, "dims", "joint"));
    const Json& cells = field(value, "cells", "joint");
    if (!cells.is_array()) fail("joint.cells", "expected an array");
    SparseJointPO joint(dims);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string w = "joint.cells[" + std::to_string(i) + "]";
        JointCell cell{as_int_list(field(cells[i], "y_vec", w), w + ".y_vec"), optional_int(cells[i], "x", w),
                       optional_int(cells[i], "y", w)};
        const double mass = parse_probability(field(cells[i], "mass", w), w + ".mass");
        try {
            joint.add(std::move(cell), mass);
        } catch (const Error& e) {
            fail(w, e.what());
        }
    }
    return joint;
}

Json to_json(const SparseJointPO& joint) {
    Json cells = Json::array();
    for (const auto& [cell, mass] : joint.entries()) {
        if (mass == 0.0) continue;
        Json c{{"y_vec", cell.y_vec}};
        if (cell.x) c["x"] = *cell.x;
        if (cell.y) c["y"] = *cell.y;
        c["mass"] = mass;
        cells.push_back(std::move(c));
    }
    return Json{{"dims", {joint.dims().d_x(), joint.dims().d_y()}}, {"cells", cells}};
}

Json to_json(const ProbabilityTable& table) { return Json{{"matrix", table.rows()}}; }

Json to_json(const ConstraintSet& constraints) {
    Json rows = Json::array();
    for (const auto& row : constraints.rows) {
        Json coeffs = Json::array();
        for (const auto& [j, v] : row.coeffs) coeffs.push_back({j, v});
        rows.push_back({{"provenance", row.provenance.tag()},
                        {"kind", row.kind == RowKind::Equal ? "eq" : "le"},
                        {"rhs", row.rhs},
                        {"coeffs", coeffs}});
    }
    Json out{{"num_vars", constraints.num_vars}, {"rows", rows}};
    if (!constraints.warnings.empty()) out["warnings"] = constraints.warnings;
    return out;
}

Json to_json(const BoundResult& result, const Dims& dims, bool with_witnesses) {
    Json out{{"status", to_string(result.status)}};
    if (result.status == BoundStatus::Ok) {
        out["lower"] = result.lower;
        out["upper"] = result.upper;
    } else {
        out["lower"] = nullptr;
        out["upper"] = nullptr;
    }
    if (result.status == BoundStatus::Infeasible) {
        Json tags = Json::array();
        for (const auto& p : result.diagnostics) tags.push_back(p.tag());
        out["diagnostics"] = {{"certificate", tags}};
    }
    if (result.status == BoundStatus::Error) out["diagnostics"] = {{"error", result.error}};
    if (!result.warnings.empty()) out["warnings"] = result.warnings;
    if (with_witnesses && result.status == BoundStatus::Ok && !result.lower_witness.empty()) {
        out["witnesses"] = {{"lower", to_json(joint_from_params(dims, result.lower_witness))["cells"]},
                            {"upper", to_json(joint_from_params(dims, result.upper_witness))["cells"]}};
    }
    return out;
}

Json to_json(const EndpointSummary& summary) {
    return Json{{"mean", summary.mean}, {"ci", {summary.ci_lower, summary.ci_upper}}};
}

Json to_json(const EstimateSummary& summary, bool with_replicates) {
    Json out{{"lower", to_json(summary.lower)},
             {"upper", to_json(summary.upper)},
             {"used", summary.used},
             {"excluded", summary.excluded}};
    if (with_replicates) {
        Json reps = Json::array();
        for (const auto& r : summary.replicates) {
            if (r.used)
                reps.push_back({{"lower", r.lower}, {"upper", r.upper}});
            else
                reps.push_back({{"excluded", r.note}});
        }
        out["replicates"] = reps;
    }
    return out;
}

Json to_json(const CompatibilityReport& report) {
    Json list = Json::array();
    for (const auto& v : report.violations) {
        Json item{{"chain", v.chain == MiteViolation::Chain::Constant ? "constant" : "step"},
                  {"level", v.level},
                  {"mass", v.mass},
                  {"source", v.source}};
        if (v.chain == MiteViolation::Chain::Step) item["step"] = v.step;
        list.push_back(std::move(item));
    }
    return Json{{"ok", report.ok()}, {"violations", list}};
}

}  // namespace pobounds
