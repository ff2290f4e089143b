#pragma once

// Domain types for joint potential-outcome (PO) / observed-variable (OV)
// distributions with a discrete treatment X in [0, d_x) and an ordinal
// outcome Y in [0, d_y).
//
// Decision variables are p[y_0, ..., y_{d_x-1}, x] = P(Y_0 = y_0, ..., X = x),
// flattened lexicographically with y_0 the most significant digit and x the
// least significant one. The factual outcome is implied by consistency
// (X = x  =>  Y = y_x), so the full (y_vec, x, y) space is only needed for
// query coefficients.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pobounds {

using ParamVector = std::vector<double>;

inline constexpr double kDistributionTolerance = 1e-9;

class Dims {
public:
    Dims(int d_x, int d_y);

    int d_x() const { return d_x_; }
    int d_y() const { return d_y_; }

    // d_y^{d_x}: number of PO configurations.
    std::size_t y_vec_count() const { return y_vec_count_; }
    // d_y^{d_x} * d_x: number of LP decision variables.
    std::size_t param_count() const { return y_vec_count_ * static_cast<std::size_t>(d_x_); }
    // param_count * d_y: size of the full (y_vec, x, y) space.
    std::size_t full_count() const { return param_count() * static_cast<std::size_t>(d_y_); }

    friend bool operator==(const Dims&, const Dims&) = default;

private:
    int d_x_;
    int d_y_;
    std::size_t y_vec_count_;
};

struct CellIndex {
    std::vector<int> y_vec;
    int x = 0;

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

std::size_t flatten_index(const CellIndex& cell, const Dims& dims);
CellIndex unflatten_index(std::size_t index, const Dims& dims);

// Index of a PO configuration alone in [0, d_y^{d_x}).
std::size_t flatten_y_vec(std::span<const int> y_vec, const Dims& dims);
std::vector<int> unflatten_y_vec(std::size_t index, const Dims& dims);

// Value of Y_k in the configuration with the given y_vec index. No range check.
int po_digit(std::size_t y_vec_index, int k, const Dims& dims);

// Index into the full (y_vec, x, y) space used by query coefficients.
std::size_t full_index(std::size_t param_index, int y, const Dims& dims);

// ---------------------------------------------------------------------------
// Distributions

struct ValidationIssue {
    enum class Kind { Negative, AboveOne, RowSum, TotalSum };
    Kind kind;
    int row = -1;  // -1 when the issue concerns the whole table
    int col = -1;
    double value = 0.0;

    std::string describe() const;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    std::string summary() const;
};

// d_x x d_y row-major table of probabilities.
class ProbabilityTable {
public:
    ProbabilityTable(const Dims& dims, std::vector<std::vector<double>> rows);
    ProbabilityTable(const Dims& dims, std::vector<double> row_major);

    const Dims& dims() const { return dims_; }
    double at(int row, int col) const { return values_[index(row, col)]; }
    double row_sum(int row) const;
    double total() const;
    std::vector<std::vector<double>> rows() const;

private:
    std::size_t index(int row, int col) const;

    Dims dims_;
    std::vector<double> values_;
};

// Entry (k, j) = P(Y_k = j). Each row is a distribution.
class ExperimentalMarginals : public ProbabilityTable {
public:
    using ProbabilityTable::ProbabilityTable;
};

// Entry (l, m) = P(X = l, Y = m). The whole table is a distribution.
class ObservationalJoint : public ProbabilityTable {
public:
    using ProbabilityTable::ProbabilityTable;

    double p_x(int l) const { return row_sum(l); }
    // P(Y = m | X = l); throws UndefinedConditionalError when P(X = l) = 0.
    double p_y_given_x(int m, int l) const;
};

ValidationReport validate_distribution(const ExperimentalMarginals& exp);
ValidationReport validate_distribution(const ObservationalJoint& obs);

// Throws ValidationError carrying the report summary when not ok.
void require_valid(const ExperimentalMarginals& exp);
void require_valid(const ObservationalJoint& obs);

// ---------------------------------------------------------------------------
// Monotonicity assumptions

// Endpoint of an increment window D_st. Unbounded endpoints always admit
// the comparison, whatever the outcome difference.
class IncrementBound {
public:
    static IncrementBound unbounded() { return IncrementBound{}; }
    static IncrementBound at(int value) { return IncrementBound{value}; }

    bool is_unbounded() const { return !value_.has_value(); }
    int value() const;

    friend bool operator==(const IncrementBound&, const IncrementBound&) = default;

private:
    IncrementBound() = default;
    explicit IncrementBound(int v) : value_(v) {}

    std::optional<int> value_;
};

// One term of the probability- and increment-limited monotonicity family:
//   L <= P( AND_{s > t} lower[s][t] <= Y_s - Y_t <= upper[s][t] ) <= U.
class MonotoneTerm {
public:
    // All windows unbounded, L = 0, U = 1: the vacuous term.
    explicit MonotoneTerm(int d_x);

    int d_x() const { return d_x_; }

    // Requires s > t.
    MonotoneTerm& set_window(int s, int t, IncrementBound lower, IncrementBound upper);
    MonotoneTerm& set_probability(double lower, double upper);
    MonotoneTerm& set_label(std::string label);

    const IncrementBound& lower(int s, int t) const;
    const IncrementBound& upper(int s, int t) const;
    double prob_lower() const { return prob_lower_; }
    double prob_upper() const { return prob_upper_; }
    const std::string& label() const { return label_; }

    // True when y_vec satisfies every window (the product of indicators).
    bool admits(std::span<const int> y_vec) const;

    // Throws ValidationError on L > U, probabilities outside [0, 1], or an
    // empty window.
    void validate() const;

private:
    std::size_t slot(int s, int t) const;

    int d_x_;
    std::vector<IncrementBound> lower_;
    std::vector<IncrementBound> upper_;
    double prob_lower_ = 0.0;
    double prob_upper_ = 1.0;
    std::string label_;
};

struct AssumptionSet {
    std::vector<MonotoneTerm> terms;
    bool exogeneity = false;
    std::string label;

    void validate(const Dims& dims) const;
};

// ---------------------------------------------------------------------------
// Queries

// Factual evidence (X = x, Y = y) used for conditioning.
struct Evidence {
    int x = 0;
    int y = 0;

    friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct FullCell {
    std::vector<int> y_vec;
    int x = 0;
    int y = 0;
};

// A linear functional over the full (y_vec, x, y) space, optionally divided
// by P(X = l, Y = m).
struct QuerySpec {
    Dims dims;
    std::vector<double> coeffs;  // dense, length dims.full_count()
    std::optional<Evidence> condition;
    std::string label;

    explicit QuerySpec(const Dims& d) : dims(d), coeffs(d.full_count(), 0.0) {}

    double coeff(const FullCell& cell) const;
    void add(const FullCell& cell, double value);

    // Throws ValidationError when the coefficient vector has the wrong length
    // or a conditional query puts weight outside its evidence cell.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Sparse joint distributions (identification output, simulation truth)

struct JointCell {
    std::vector<int> y_vec;
    std::optional<int> x;
    std::optional<int> y;

    auto operator<=>(const JointCell&) const = default;
};

class SparseJointPO {
public:
    explicit SparseJointPO(const Dims& dims) : dims_(dims) {}

    const Dims& dims() const { return dims_; }
    const std::map<JointCell, double>& entries() const { return entries_; }

    // Adds mass to a cell. When x is set, y defaults to y_vec[x] and must
    // equal it if given.
    void add(JointCell cell, double mass);

    bool has_treatment() const;
    double total_mass() const;

    // Clamps masses in (-tol, 0) to zero; returns the most negative mass seen.
    double clamp_negative(double tol);
    void normalize();

    // Dense decision-variable vector; requires treatment-indexed cells.
    ParamVector to_param_vector() const;
    // Marginal P(y_vec) over PO configurations, indexed by flatten_y_vec.
    std::vector<double> po_distribution() const;

    // Throws ValidationError unless masses are >= -1e-9 and sum to 1 (1e-8).
    void validate() const;

private:
    Dims dims_;
    std::map<JointCell, double> entries_;
};

SparseJointPO joint_from_params(const Dims& dims, std::span<const double> params);

ExperimentalMarginals experimental_marginals(const Dims& dims, std::span<const double> params);
ObservationalJoint observational_joint(const Dims& dims, std::span<const double> params);
ExperimentalMarginals experimental_marginals(const SparseJointPO& joint);
// Requires treatment-indexed cells.
ObservationalJoint observational_joint(const SparseJointPO& joint);

// Whichever data sources are available for one analysis.
struct DataSources {
    std::optional<ExperimentalMarginals> exp;
    std::optional<ObservationalJoint> obs;

    bool empty() const { return !exp && !obs; }
};

}  // namespace pobounds
