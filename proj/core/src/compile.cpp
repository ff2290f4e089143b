#include "pobounds/compile.hpp"

#include "pobounds/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pobounds {

namespace {

const char* kind_name(Provenance::Kind kind) {
    switch (kind) {
    case Provenance::Kind::BaseSum: return "base-sum";
    case Provenance::Kind::Experimental: return "experimental";
    case Provenance::Kind::Observational: return "observational";
    case Provenance::Kind::Exogeneity: return "exogeneity";
    case Provenance::Kind::Monotone: return "monotone";
    case Provenance::Kind::Custom: return "custom";
    }
    return "custom";
}

int parse_int(std::string_view text) {
    int value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("expected an integer, got '" + std::string(text) + "'");
    return value;
}

double parse_double(std::string_view text) {
    std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw ParseError("expected a number, got '" + s + "'");
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits "name(a,b)" into name and argument list.
std::pair<std::string_view, std::vector<std::string_view>> split_call(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos) return {text, {}};
    if (text.back() != ')') throw ParseError("unbalanced parentheses in '" + std::string(text) + "'");
    std::string_view name = trim(text.substr(0, open));
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    std::vector<std::string_view> args;
    while (!inner.empty()) {
        const auto comma = inner.find(',');
        args.push_back(trim(inner.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
    }
    return {name, args};
}

}  // namespace

std::string Provenance::tag() const {
    std::ostringstream out;
    out << kind_name(kind);
    switch (kind) {
    case Kind::BaseSum: break;
    case Kind::Experimental:
    case Kind::Observational: out << '(' << a << ',' << b << ')'; break;
    case Kind::Exogeneity: out << '(' << a << ',' << b << ',' << c << ')'; break;
    case Kind::Monotone: out << '(' << a << ',' << (side == Side::Lower ? "lower" : "upper") << ')'; break;
    case Kind::Custom: out << '(' << a << ')'; break;
    }
    return out.str();
}

Provenance Provenance::parse(std::string_view tag) {
    auto [name, args] = split_call(tag);
    auto expect = [&](std::size_t n) {
        if (args.size() != n) throw ParseError("provenance tag '" + std::string(tag) + "' has the wrong arity");
    };
    if (name == "base-sum") {
        expect(0);
        return base_sum();
    }
    if (name == "experimental") {
        expect(2);
        return experimental(parse_int(args[0]), parse_int(args[1]));
    }
    if (name == "observational") {
        expect(2);
        return observational(parse_int(args[0]), parse_int(args[1]));
    }
    if (name == "exogeneity") {
        expect(3);
        return exogeneity(parse_int(args[0]), parse_int(args[1]), parse_int(args[2]));
    }
    if (name == "monotone") {
        expect(2);
        if (args[1] == "lower") return monotone(parse_int(args[0]), Side::Lower);
        if (args[1] == "upper") return monotone(parse_int(args[0]), Side::Upper);
        throw ParseError("monotone provenance side must be lower or upper");
    }
    if (name == "custom") {
        expect(1);
        return custom(parse_int(args[0]));
    }
    throw ParseError("unknown provenance tag '" + std::string(tag) + "'");
}

double ConstraintRow::evaluate(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& [i, a] : coeffs) sum += a * x[i];
    return sum;
}

void ConstraintSet::append(const ConstraintSet& other) {
    if (other.num_vars != num_vars) throw ShapeError("cannot merge constraint sets over different variable counts");
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::size_t ConstraintSet::count(Provenance::Kind kind) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const ConstraintRow& r) { return r.provenance.kind == kind; }));
}

double ConstraintSet::max_violation(std::span<const double> x) const {
    if (x.size() != num_vars) throw ShapeError("point has the wrong dimension");
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const auto& row : rows) {
        const double lhs = row.evaluate(x);
        const double gap = row.kind == RowKind::Equal ? std::abs(lhs - row.rhs) : lhs - row.rhs;
        worst = std::max(worst, gap);
    }
    return worst;
}

void ConstraintSet::validate() const {
    if (dims && dims->param_count() != num_vars) throw ValidationError("constraint set dims disagree with num_vars");
    for (const auto& row : rows) {
        if (!std::isfinite(row.rhs)) throw ValidationError("row " + row.provenance.tag() + " has a non-finite rhs");
        for (const auto& [i, a] : row.coeffs) {
            if (i >= num_vars) throw ValidationError("row " + row.provenance.tag() + " references a missing variable");
            if (!std::isfinite(a)) throw ValidationError("row " + row.provenance.tag() + " has a non-finite coefficient");
        }
    }
}

ConstraintRow make_row(std::span<const double> dense, double rhs, RowKind kind, Provenance provenance) {
    ConstraintRow row;
    row.rhs = rhs;
    row.kind = kind;
    row.provenance = provenance;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0.0) row.coeffs.emplace_back(i, dense[i]);
    return row;
}

ConstraintSet compile_base(const Dims& dims) {
    ConstraintSet set(dims);
    std::vector<double> ones(dims.param_count(), 1.0);
    set.rows.push_back(make_row(ones, 1.0, RowKind::Equal, Provenance::base_sum()));
    return set;
}

ConstraintSet compile_experimental(const Dims& dims, const ExperimentalMarginals& exp) {
    if (!(exp.dims() == dims)) throw ShapeError("experimental table dims differ from problem dims");
    require_valid(exp);
    ConstraintSet set(dims);
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (int k = 0; k < dims.d_x(); ++k) {
        for (int j = 0; j + 1 < dims.d_y(); ++j) {
            ConstraintRow row;
            row.rhs = exp.at(k, j);
            row.kind = RowKind::Equal;
            row.provenance = Provenance::experimental(k, j);
            for (std::size_t i = 0; i < dims.param_count(); ++i)
                if (po_digit(i / d_x, k, dims) == j) row.coeffs.emplace_back(i, 1.0);
            set.rows.push_back(std::move(row));
        }
    }
    return set;
}

ConstraintSet compile_observational(const Dims& dims, const ObservationalJoint& obs) {
    if (!(obs.dims() == dims)) throw ShapeError("observational table dims differ from problem dims");
    require_valid(obs);
    ConstraintSet set(dims);
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (int l = 0; l < dims.d_x(); ++l) {
        for (int m = 0; m < dims.d_y(); ++m) {
            if (l == dims.d_x() - 1 && m == dims.d_y() - 1) continue;
            ConstraintRow row;
            row.rhs = obs.at(l, m);
            row.kind = RowKind::Equal;
            row.provenance = Provenance::observational(l, m);
            for (std::size_t i = static_cast<std::size_t>(l); i < dims.param_count(); i += d_x)
                if (po_digit(i / d_x, l, dims) == m) row.coeffs.emplace_back(i, 1.0);
            set.rows.push_back(std::move(row));
        }
    }
    return set;
}

ConstraintSet compile_exogeneity(const Dims& dims, const ObservationalJoint& obs) {
    if (!(obs.dims() == dims)) throw ShapeError("observational table dims differ from problem dims");
    require_valid(obs);
    ConstraintSet set(dims);
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (int l = 0; l < dims.d_x(); ++l) {
        const double px = obs.p_x(l);
        if (px <= 0.0) {
            set.warnings.push_back("P(X = " + std::to_string(l) + ") = 0: exogeneity rows for this arm skipped");
            continue;
        }
        for (int k = 0; k < dims.d_x(); ++k) {
            for (int v = 0; v < dims.d_y(); ++v) {
                ConstraintRow row;
                row.rhs = 0.0;
                row.kind = RowKind::Equal;
                row.provenance = Provenance::exogeneity(k, v, l);
                for (std::size_t i = 0; i < dims.param_count(); ++i) {
                    if (po_digit(i / d_x, k, dims) != v) continue;
                    const double a = (static_cast<int>(i % d_x) == l ? 1.0 : 0.0) - px;
                    if (a != 0.0) row.coeffs.emplace_back(i, a);
                }
                if (!row.coeffs.empty()) set.rows.push_back(std::move(row));
            }
        }
    }
    return set;
}

std::vector<bool> indicator_mask(const Dims& dims, const MonotoneTerm& term) {
    if (term.d_x() != dims.d_x()) throw ShapeError("monotone term d_x differs from problem d_x");
    std::vector<bool> admitted(dims.y_vec_count());
    for (std::size_t yi = 0; yi < dims.y_vec_count(); ++yi) admitted[yi] = term.admits(unflatten_y_vec(yi, dims));
    std::vector<bool> mask(dims.param_count());
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = admitted[i / d_x];
    return mask;
}

ConstraintSet compile_monotonicity(const Dims& dims, const AssumptionSet& assumptions) {
    assumptions.validate(dims);
    ConstraintSet set(dims);
    for (std::size_t w = 0; w < assumptions.terms.size(); ++w) {
        const auto& term = assumptions.terms[w];
        const auto mask = indicator_mask(dims, term);
        const int wi = static_cast<int>(w);
        if (term.prob_upper() < 1.0) {
            ConstraintRow row;
            row.kind = RowKind::LessEqual;
            row.rhs = term.prob_upper();
            row.provenance = Provenance::monotone(wi, Provenance::Side::Upper);
            for (std::size_t i = 0; i < mask.size(); ++i)
                if (mask[i]) row.coeffs.emplace_back(i, 1.0);
            set.rows.push_back(std::move(row));
        }
        if (term.prob_lower() > 0.0) {
            ConstraintRow row;
            row.kind = RowKind::LessEqual;
            row.rhs = -term.prob_lower();
            row.provenance = Provenance::monotone(wi, Provenance::Side::Lower);
            for (std::size_t i = 0; i < mask.size(); ++i)
                if (mask[i]) row.coeffs.emplace_back(i, -1.0);
            set.rows.push_back(std::move(row));
        }
    }
    return set;
}

ConstraintSet relax_data_rows(const ConstraintSet& constraints, double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("slack must be a finite nonnegative number");
    ConstraintSet out(constraints.num_vars);
    out.dims = constraints.dims;
    out.warnings = constraints.warnings;
    for (const auto& row : constraints.rows) {
        if (!row.provenance.is_data() || row.kind != RowKind::Equal) {
            out.rows.push_back(row);
            continue;
        }
        ConstraintRow upper = row;
        upper.kind = RowKind::LessEqual;
        upper.rhs = row.rhs + eps;
        ConstraintRow lower = row;
        lower.kind = RowKind::LessEqual;
        lower.rhs = -(row.rhs - eps);
        for (auto& [i, a] : lower.coeffs) a = -a;
        out.rows.push_back(std::move(upper));
        out.rows.push_back(std::move(lower));
    }
    return out;
}

// ---------------------------------------------------------------------------

AssumptionSet preset_mtr(const Dims& dims) {
    MonotoneTerm term(dims.d_x());
    for (int t = 0; t + 1 < dims.d_x(); ++t)
        term.set_window(t + 1, t, IncrementBound::at(0), IncrementBound::unbounded());
    term.set_probability(1.0, 1.0).set_label("mtr");
    return AssumptionSet{{term}, false, "mtr"};
}

AssumptionSet preset_mite(const Dims& dims) {
    MonotoneTerm term(dims.d_x());
    for (int s = 1; s < dims.d_x(); ++s)
        for (int t = 0; t < s; ++t) term.set_window(s, t, IncrementBound::at(0), IncrementBound::at(1));
    term.set_probability(1.0, 1.0).set_label("mite");
    return AssumptionSet{{term}, false, "mite"};
}

AssumptionSet preset_pairwise(const Dims& dims, int s, int t) {
    MonotoneTerm term(dims.d_x());
    term.set_window(s, t, IncrementBound::at(0), IncrementBound::unbounded());
    const std::string label = "pairwise(" + std::to_string(s) + "," + std::to_string(t) + ")";
    term.set_probability(1.0, 1.0).set_label(label);
    return AssumptionSet{{term}, false, label};
}

AssumptionSet preset_epsilon_harm(const Dims& dims, double epsilon) {
    if (dims.d_x() != 2) throw ConfigError("epsilon_harm applies to binary treatment only");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon_harm requires epsilon in [0, 1]");
    MonotoneTerm term(2);
    term.set_window(1, 0, IncrementBound::unbounded(), IncrementBound::at(-1));
    std::ostringstream label;
    label << "epsilon_harm(" << epsilon << ")";
    term.set_probability(0.0, epsilon).set_label(label.str());
    return AssumptionSet{{term}, false, label.str()};
}

AssumptionSet preset_prob_mtr(const Dims& dims, double lower, double upper) {
    AssumptionSet set = preset_mtr(dims);
    std::ostringstream label;
    label << "prob_mtr(" << lower << "," << upper << ")";
    set.terms.front().set_probability(lower, upper).set_label(label.str());
    set.label = label.str();
    set.validate(dims);
    return set;
}

AssumptionSet preset(std::string_view name, const Dims& dims) {
    std::pair<std::string_view, std::vector<std::string_view>> call;
    try {
        call = split_call(name);
    } catch (const ParseError& e) {
        throw ConfigError(e.what());
    }
    const auto& [head, args] = call;
    auto arity = [&](std::size_t n) {
        if (args.size() != n)
            throw ConfigError("preset '" + std::string(head) + "' takes " + std::to_string(n) + " argument(s)");
    };
    try {
        if (head == "none") {
            arity(0);
            return AssumptionSet{{}, false, "none"};
        }
        if (head == "mtr") {
            arity(0);
            return preset_mtr(dims);
        }
        if (head == "mite") {
            arity(0);
            return preset_mite(dims);
        }
        if (head == "pairwise") {
            arity(2);
            return preset_pairwise(dims, parse_int(args[0]), parse_int(args[1]));
        }
        if (head == "epsilon_harm") {
            arity(1);
            return preset_epsilon_harm(dims, parse_double(args[0]));
        }
        if (head == "prob_mtr") {
            arity(2);
            return preset_prob_mtr(dims, parse_double(args[0]), parse_double(args[1]));
        }
    } catch (const ParseError& e) {
        throw ConfigError(std::string("bad preset argument: ") + e.what());
    } catch (const RangeError& e) {
        throw ConfigError(std::string("bad preset argument: ") + e.what());
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("bad preset argument: ") + e.what());
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace pobounds
