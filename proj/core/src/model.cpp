#include "pobounds/model.hpp"

#include "pobounds/errors.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace pobounds {

namespace {

constexpr double kJointMassTolerance = 1e-8;

std::size_t checked_power(int base, int exponent) {
    std::size_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > (std::size_t{1} << 40) / static_cast<std::size_t>(base))
            throw SizeError("dimensions too large: d_y^d_x overflows the parameter space");
        result *= static_cast<std::size_t>(base);
    }
    return result;
}

void check_y_vec(std::span<const int> y_vec, const Dims& dims) {
    if (static_cast<int>(y_vec.size()) != dims.d_x())
        throw RangeError("y_vec has " + std::to_string(y_vec.size()) + " entries, expected " +
                         std::to_string(dims.d_x()));
    for (std::size_t k = 0; k < y_vec.size(); ++k) {
        if (y_vec[k] < 0 || y_vec[k] >= dims.d_y())
            throw RangeError("Y_" + std::to_string(k) + " = " + std::to_string(y_vec[k]) +
                             " outside [0, " + std::to_string(dims.d_y()) + ")");
    }
}

}  // namespace

Dims::Dims(int d_x, int d_y) : d_x_(d_x), d_y_(d_y), y_vec_count_(0) {
    if (d_x < 2 || d_y < 2)
        throw RangeError("dims require d_x >= 2 and d_y >= 2, got (" + std::to_string(d_x) + ", " +
                         std::to_string(d_y) + ")");
    y_vec_count_ = checked_power(d_y, d_x);
}

std::size_t flatten_y_vec(std::span<const int> y_vec, const Dims& dims) {
    check_y_vec(y_vec, dims);
    std::size_t index = 0;
    for (int v : y_vec) index = index * static_cast<std::size_t>(dims.d_y()) + static_cast<std::size_t>(v);
    return index;
}

std::vector<int> unflatten_y_vec(std::size_t index, const Dims& dims) {
    if (index >= dims.y_vec_count())
        throw RangeError("y_vec index " + std::to_string(index) + " out of range");
    std::vector<int> y_vec(static_cast<std::size_t>(dims.d_x()));
    for (int k = dims.d_x() - 1; k >= 0; --k) {
        y_vec[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(dims.d_y()));
        index /= static_cast<std::size_t>(dims.d_y());
    }
    return y_vec;
}

int po_digit(std::size_t y_vec_index, int k, const Dims& dims) {
    const auto d_y = static_cast<std::size_t>(dims.d_y());
    for (int i = dims.d_x() - 1; i > k; --i) y_vec_index /= d_y;
    return static_cast<int>(y_vec_index % d_y);
}

std::size_t flatten_index(const CellIndex& cell, const Dims& dims) {
    if (cell.x < 0 || cell.x >= dims.d_x())
        throw RangeError("x = " + std::to_string(cell.x) + " outside [0, " + std::to_string(dims.d_x()) + ")");
    return flatten_y_vec(cell.y_vec, dims) * static_cast<std::size_t>(dims.d_x()) +
           static_cast<std::size_t>(cell.x);
}

CellIndex unflatten_index(std::size_t index, const Dims& dims) {
    if (index >= dims.param_count())
        throw RangeError("parameter index " + std::to_string(index) + " outside [0, " +
                         std::to_string(dims.param_count()) + ")");
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    return CellIndex{unflatten_y_vec(index / d_x, dims), static_cast<int>(index % d_x)};
}

std::size_t full_index(std::size_t param_index, int y, const Dims& dims) {
    return param_index * static_cast<std::size_t>(dims.d_y()) + static_cast<std::size_t>(y);
}

// ---------------------------------------------------------------------------

std::string ValidationIssue::describe() const {
    std::ostringstream out;
    switch (kind) {
    case Kind::Negative:
        out << "negative entry " << value << " at (" << row << ", " << col << ")";
        break;
    case Kind::AboveOne:
        out << "entry " << value << " above 1 at (" << row << ", " << col << ")";
        break;
    case Kind::RowSum:
        out << "row " << row << " sums to " << value << ", expected 1";
        break;
    case Kind::TotalSum:
        out << "table sums to " << value << ", expected 1";
        break;
    }
    return out.str();
}

std::string ValidationReport::summary() const {
    if (ok()) return "ok";
    std::string text;
    for (const auto& issue : issues) {
        if (!text.empty()) text += "; ";
        text += issue.describe();
    }
    return text;
}

ProbabilityTable::ProbabilityTable(const Dims& dims, std::vector<std::vector<double>> rows) : dims_(dims) {
    if (static_cast<int>(rows.size()) != dims.d_x())
        throw ShapeError("table has " + std::to_string(rows.size()) + " rows, expected d_x = " +
                         std::to_string(dims.d_x()));
    values_.reserve(static_cast<std::size_t>(dims.d_x() * dims.d_y()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) != dims.d_y())
            throw ShapeError("table row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                             " columns, expected d_y = " + std::to_string(dims.d_y()));
        values_.insert(values_.end(), rows[r].begin(), rows[r].end());
    }
}

ProbabilityTable::ProbabilityTable(const Dims& dims, std::vector<double> row_major)
    : dims_(dims), values_(std::move(row_major)) {
    if (values_.size() != static_cast<std::size_t>(dims.d_x() * dims.d_y()))
        throw ShapeError("table has " + std::to_string(values_.size()) + " entries, expected " +
                         std::to_string(dims.d_x() * dims.d_y()));
}

std::size_t ProbabilityTable::index(int row, int col) const {
    if (row < 0 || row >= dims_.d_x() || col < 0 || col >= dims_.d_y())
        throw RangeError("table index (" + std::to_string(row) + ", " + std::to_string(col) + ") out of range");
    return static_cast<std::size_t>(row * dims_.d_y() + col);
}

double ProbabilityTable::row_sum(int row) const {
    double sum = 0.0;
    for (int c = 0; c < dims_.d_y(); ++c) sum += at(row, c);
    return sum;
}

double ProbabilityTable::total() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

std::vector<std::vector<double>> ProbabilityTable::rows() const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(dims_.d_x()));
    for (int r = 0; r < dims_.d_x(); ++r)
        for (int c = 0; c < dims_.d_y(); ++c) out[static_cast<std::size_t>(r)].push_back(at(r, c));
    return out;
}

double ObservationalJoint::p_y_given_x(int m, int l) const {
    const double px = p_x(l);
    if (px <= 0.0) throw UndefinedConditionalError("P(X = " + std::to_string(l) + ") = 0");
    return at(l, m) / px;
}

namespace {

void check_entries(const ProbabilityTable& table, ValidationReport& report) {
    for (int r = 0; r < table.dims().d_x(); ++r) {
        for (int c = 0; c < table.dims().d_y(); ++c) {
            const double v = table.at(r, c);
            if (!(v >= 0.0))
                report.issues.push_back({ValidationIssue::Kind::Negative, r, c, v});
            else if (v > 1.0 + kDistributionTolerance)
                report.issues.push_back({ValidationIssue::Kind::AboveOne, r, c, v});
        }
    }
}

}  // namespace

ValidationReport validate_distribution(const ExperimentalMarginals& exp) {
    ValidationReport report;
    check_entries(exp, report);
    for (int r = 0; r < exp.dims().d_x(); ++r) {
        const double sum = exp.row_sum(r);
        if (std::abs(sum - 1.0) > kDistributionTolerance)
            report.issues.push_back({ValidationIssue::Kind::RowSum, r, -1, sum});
    }
    return report;
}

ValidationReport validate_distribution(const ObservationalJoint& obs) {
    ValidationReport report;
    check_entries(obs, report);
    const double sum = obs.total();
    if (std::abs(sum - 1.0) > kDistributionTolerance)
        report.issues.push_back({ValidationIssue::Kind::TotalSum, -1, -1, sum});
    return report;
}

void require_valid(const ExperimentalMarginals& exp) {
    auto report = validate_distribution(exp);
    if (!report.ok()) throw ValidationError("invalid experimental distribution: " + report.summary());
}

void require_valid(const ObservationalJoint& obs) {
    auto report = validate_distribution(obs);
    if (!report.ok()) throw ValidationError("invalid observational distribution: " + report.summary());
}

// ---------------------------------------------------------------------------

int IncrementBound::value() const {
    if (!value_) throw RangeError("unbounded increment has no finite value");
    return *value_;
}

MonotoneTerm::MonotoneTerm(int d_x)
    : d_x_(d_x),
      lower_(static_cast<std::size_t>(d_x * d_x), IncrementBound::unbounded()),
      upper_(static_cast<std::size_t>(d_x * d_x), IncrementBound::unbounded()) {
    if (d_x < 2) throw RangeError("monotone term requires d_x >= 2");
}

std::size_t MonotoneTerm::slot(int s, int t) const {
    if (s < 0 || t < 0 || s >= d_x_ || t >= d_x_ || s <= t)
        throw RangeError("increment window (" + std::to_string(s) + ", " + std::to_string(t) +
                         ") requires d_x > s > t >= 0");
    return static_cast<std::size_t>(s * d_x_ + t);
}

MonotoneTerm& MonotoneTerm::set_window(int s, int t, IncrementBound lower, IncrementBound upper) {
    const auto i = slot(s, t);
    lower_[i] = lower;
    upper_[i] = upper;
    return *this;
}

MonotoneTerm& MonotoneTerm::set_probability(double lower, double upper) {
    prob_lower_ = lower;
    prob_upper_ = upper;
    return *this;
}

MonotoneTerm& MonotoneTerm::set_label(std::string label) {
    label_ = std::move(label);
    return *this;
}

const IncrementBound& MonotoneTerm::lower(int s, int t) const { return lower_[slot(s, t)]; }
const IncrementBound& MonotoneTerm::upper(int s, int t) const { return upper_[slot(s, t)]; }

bool MonotoneTerm::admits(std::span<const int> y_vec) const {
    for (int s = 1; s < d_x_; ++s) {
        for (int t = 0; t < s; ++t) {
            const auto i = static_cast<std::size_t>(s * d_x_ + t);
            const int diff = y_vec[static_cast<std::size_t>(s)] - y_vec[static_cast<std::size_t>(t)];
            if (!lower_[i].is_unbounded() && diff < lower_[i].value()) return false;
            if (!upper_[i].is_unbounded() && diff > upper_[i].value()) return false;
        }
    }
    return true;
}

void MonotoneTerm::validate() const {
    if (!(prob_lower_ >= 0.0 && prob_lower_ <= 1.0 && prob_upper_ >= 0.0 && prob_upper_ <= 1.0))
        throw ValidationError("monotone term probabilities must lie in [0, 1]");
    if (prob_lower_ > prob_upper_) throw ValidationError("monotone term has L > U");
    for (int s = 1; s < d_x_; ++s) {
        for (int t = 0; t < s; ++t) {
            const auto i = static_cast<std::size_t>(s * d_x_ + t);
            if (!lower_[i].is_unbounded() && !upper_[i].is_unbounded() && lower_[i].value() > upper_[i].value())
                throw ValidationError("monotone term window (" + std::to_string(s) + ", " + std::to_string(t) +
                                      ") has lower > upper");
        }
    }
}

void AssumptionSet::validate(const Dims& dims) const {
    for (const auto& term : terms) {
        if (term.d_x() != dims.d_x())
            throw ValidationError("monotone term built for d_x = " + std::to_string(term.d_x()) +
                                  ", problem has d_x = " + std::to_string(dims.d_x()));
        term.validate();
    }
}

// ---------------------------------------------------------------------------

double QuerySpec::coeff(const FullCell& cell) const {
    if (cell.y < 0 || cell.y >= dims.d_y()) throw RangeError("query cell y out of range");
    return coeffs[full_index(flatten_index({cell.y_vec, cell.x}, dims), cell.y, dims)];
}

void QuerySpec::add(const FullCell& cell, double value) {
    if (cell.y < 0 || cell.y >= dims.d_y()) throw RangeError("query cell y out of range");
    coeffs[full_index(flatten_index({cell.y_vec, cell.x}, dims), cell.y, dims)] += value;
}

void QuerySpec::validate() const {
    if (coeffs.size() != dims.full_count())
        throw ValidationError("query has " + std::to_string(coeffs.size()) + " coefficients, expected " +
                              std::to_string(dims.full_count()));
    for (double c : coeffs)
        if (!std::isfinite(c)) throw ValidationError("query has a non-finite coefficient");
    if (!condition) return;
    if (condition->x < 0 || condition->x >= dims.d_x() || condition->y < 0 || condition->y >= dims.d_y())
        throw ValidationError("query condition out of range");
    const auto d_y = static_cast<std::size_t>(dims.d_y());
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0) continue;
        const auto y = static_cast<int>(i % d_y);
        const auto x = static_cast<int>((i / d_y) % d_x);
        if (x != condition->x || y != condition->y)
            throw ValidationError("conditional query has weight on a cell with (X, Y) = (" + std::to_string(x) +
                                  ", " + std::to_string(y) + ") outside its condition");
    }
}

// ---------------------------------------------------------------------------

void SparseJointPO::add(JointCell cell, double mass) {
    check_y_vec(cell.y_vec, dims_);
    if (cell.x) {
        if (*cell.x < 0 || *cell.x >= dims_.d_x()) throw RangeError("joint cell x out of range");
        const int implied = cell.y_vec[static_cast<std::size_t>(*cell.x)];
        if (cell.y && *cell.y != implied)
            throw ValidationError("joint cell violates consistency: X = " + std::to_string(*cell.x) +
                                  " requires Y = Y_x = " + std::to_string(implied));
        cell.y = implied;
    } else if (cell.y) {
        throw ValidationError("joint cell has Y without X");
    }
    if (!entries_.empty() && entries_.begin()->first.x.has_value() != cell.x.has_value())
        throw ValidationError("joint mixes PO-only cells with treatment-indexed cells");
    entries_[std::move(cell)] += mass;
}

bool SparseJointPO::has_treatment() const { return !entries_.empty() && entries_.begin()->first.x.has_value(); }

double SparseJointPO::total_mass() const {
    double total = 0.0;
    for (const auto& [cell, mass] : entries_) total += mass;
    return total;
}

double SparseJointPO::clamp_negative(double tol) {
    double most_negative = 0.0;
    for (auto& [cell, mass] : entries_) {
        most_negative = std::min(most_negative, mass);
        if (mass < 0.0 && mass > -tol) mass = 0.0;
    }
    return most_negative;
}

void SparseJointPO::normalize() {
    const double total = total_mass();
    if (total <= 0.0) throw ValidationError("cannot normalize a joint with no mass");
    for (auto& [cell, mass] : entries_) mass /= total;
}

ParamVector SparseJointPO::to_param_vector() const {
    if (!entries_.empty() && !has_treatment())
        throw ConfigError("joint distribution over POs only has no treatment-indexed parameters");
    ParamVector params(dims_.param_count(), 0.0);
    for (const auto& [cell, mass] : entries_) params[flatten_index({cell.y_vec, *cell.x}, dims_)] += mass;
    return params;
}

std::vector<double> SparseJointPO::po_distribution() const {
    std::vector<double> dist(dims_.y_vec_count(), 0.0);
    for (const auto& [cell, mass] : entries_) dist[flatten_y_vec(cell.y_vec, dims_)] += mass;
    return dist;
}

void SparseJointPO::validate() const {
    for (const auto& [cell, mass] : entries_)
        if (!(mass >= -kDistributionTolerance)) throw ValidationError("joint has negative mass " + std::to_string(mass));
    const double total = total_mass();
    if (std::abs(total - 1.0) > kJointMassTolerance)
        throw ValidationError("joint masses sum to " + std::to_string(total) + ", expected 1");
}

SparseJointPO joint_from_params(const Dims& dims, std::span<const double> params) {
    if (params.size() != dims.param_count()) throw ShapeError("parameter vector has the wrong length");
    SparseJointPO joint(dims);
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i] == 0.0) continue;
        auto cell = unflatten_index(i, dims);
        joint.add({std::move(cell.y_vec), cell.x, std::nullopt}, params[i]);
    }
    return joint;
}

ExperimentalMarginals experimental_marginals(const Dims& dims, std::span<const double> params) {
    if (params.size() != dims.param_count()) throw ShapeError("parameter vector has the wrong length");
    std::vector<double> table(static_cast<std::size_t>(dims.d_x() * dims.d_y()), 0.0);
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::size_t yi = i / d_x;
        for (int k = 0; k < dims.d_x(); ++k)
            table[static_cast<std::size_t>(k * dims.d_y() + po_digit(yi, k, dims))] += params[i];
    }
    return ExperimentalMarginals(dims, std::move(table));
}

ObservationalJoint observational_joint(const Dims& dims, std::span<const double> params) {
    if (params.size() != dims.param_count()) throw ShapeError("parameter vector has the wrong length");
    std::vector<double> table(static_cast<std::size_t>(dims.d_x() * dims.d_y()), 0.0);
    const auto d_x = static_cast<std::size_t>(dims.d_x());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const int x = static_cast<int>(i % d_x);
        const int y = po_digit(i / d_x, x, dims);
        table[static_cast<std::size_t>(x * dims.d_y() + y)] += params[i];
    }
    return ObservationalJoint(dims, std::move(table));
}

ExperimentalMarginals experimental_marginals(const SparseJointPO& joint) {
    const Dims& dims = joint.dims();
    std::vector<double> table(static_cast<std::size_t>(dims.d_x() * dims.d_y()), 0.0);
    for (const auto& [cell, mass] : joint.entries())
        for (int k = 0; k < dims.d_x(); ++k)
            table[static_cast<std::size_t>(k * dims.d_y() + cell.y_vec[static_cast<std::size_t>(k)])] += mass;
    return ExperimentalMarginals(dims, std::move(table));
}

ObservationalJoint observational_joint(const SparseJointPO& joint) {
    if (!joint.entries().empty() && !joint.has_treatment())
        throw ConfigError("joint distribution over POs only has no observational margin");
    return observational_joint(joint.dims(), joint.to_param_vector());
}

}  // namespace pobounds
