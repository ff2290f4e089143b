#pragma once

// Compilation of data and assumptions into a linear system over the decision
// variables p[y_vec, x] >= 0:
//
//   base          sum(p) = 1
//   experimental  sum_{y_k = j} p = P(Y_k = j)              k < d_x, j < d_y - 1
//   observational sum_{x = l, y_l = m} p = P(X = l, Y = m)  (l, m) != (d_x-1, d_y-1)
//   exogeneity    sum_{x = l, y_k = v} p - P(X = l) sum_{y_k = v} p = 0
//   monotone      L^w <= mask_w . p <= U^w
//
// Nonnegativity is implicit in every consumer of a ConstraintSet.

#include "pobounds/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pobounds {

struct Provenance {
    enum class Kind { BaseSum, Experimental, Observational, Exogeneity, Monotone, Custom };
    enum class Side { None, Lower, Upper };

    Kind kind = Kind::Custom;
    // Experimental(k, j), Observational(l, m), Exogeneity(k, v, l),
    // Monotone(w), Custom(id). Unused slots are -1.
    int a = -1;
    int b = -1;
    int c = -1;
    Side side = Side::None;

    static Provenance base_sum() { return {Kind::BaseSum}; }
    static Provenance experimental(int k, int j) { return {Kind::Experimental, k, j}; }
    static Provenance observational(int l, int m) { return {Kind::Observational, l, m}; }
    static Provenance exogeneity(int k, int v, int l) { return {Kind::Exogeneity, k, v, l}; }
    static Provenance monotone(int w, Side side) { return {Kind::Monotone, w, -1, -1, side}; }
    static Provenance custom(int id) { return {Kind::Custom, id}; }

    bool is_data() const { return kind == Kind::Experimental || kind == Kind::Observational; }

    // Stable text tag, e.g. "experimental(0,1)", "monotone(2,lower)".
    std::string tag() const;
    static Provenance parse(std::string_view tag);

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

enum class RowKind { Equal, LessEqual };

struct ConstraintRow {
    // Sorted by variable index, no duplicate indices, no zero coefficients.
    std::vector<std::pair<std::size_t, double>> coeffs;
    double rhs = 0.0;
    RowKind kind = RowKind::Equal;
    Provenance provenance;

    double evaluate(std::span<const double> x) const;
};

struct ConstraintSet {
    std::size_t num_vars = 0;
    std::optional<Dims> dims;
    std::vector<ConstraintRow> rows;
    std::vector<std::string> warnings;

    ConstraintSet() = default;
    explicit ConstraintSet(const Dims& d) : num_vars(d.param_count()), dims(d) {}
    explicit ConstraintSet(std::size_t n) : num_vars(n) {}

    void append(const ConstraintSet& other);
    std::size_t count(Provenance::Kind kind) const;

    // Largest violation of any row or of nonnegativity at x (0 when feasible).
    double max_violation(std::span<const double> x) const;

    // Throws ValidationError when an index is out of range or a rhs is not finite.
    void validate() const;
};

// Builds a row from a dense coefficient vector, dropping zeros.
ConstraintRow make_row(std::span<const double> dense, double rhs, RowKind kind, Provenance provenance);

ConstraintSet compile_base(const Dims& dims);
ConstraintSet compile_experimental(const Dims& dims, const ExperimentalMarginals& exp);
ConstraintSet compile_observational(const Dims& dims, const ObservationalJoint& obs);
// Arms with P(X = l) = 0 are skipped and reported in ConstraintSet::warnings.
ConstraintSet compile_exogeneity(const Dims& dims, const ObservationalJoint& obs);

// mask[i] is true when parameter i's y_vec satisfies every window of the term.
std::vector<bool> indicator_mask(const Dims& dims, const MonotoneTerm& term);

// Two rows per term at most; vacuous sides (L = 0, U = 1) are omitted.
ConstraintSet compile_monotonicity(const Dims& dims, const AssumptionSet& assumptions);

// Replaces every data equality row a.p = b with a.p <= b + eps and
// -a.p <= -(b - eps). Provenance tags are kept.
ConstraintSet relax_data_rows(const ConstraintSet& constraints, double eps);

// ---------------------------------------------------------------------------
// Presets for monotonicity assumptions from the literature.

// Y_0 <= Y_1 <= ... <= Y_{d_x-1} almost surely.
AssumptionSet preset_mtr(const Dims& dims);
// 0 <= Y_s - Y_t <= 1 for all s > t almost surely.
AssumptionSet preset_mite(const Dims& dims);
// Y_t <= Y_s almost surely for one pair, s > t.
AssumptionSet preset_pairwise(const Dims& dims, int s, int t);
// P(Y_1 - Y_0 <= -1) <= epsilon; binary treatment only.
AssumptionSet preset_epsilon_harm(const Dims& dims, double epsilon);
// L <= P(Y_0 <= Y_1 <= ... <= Y_{d_x-1}) <= U.
AssumptionSet preset_prob_mtr(const Dims& dims, double lower, double upper);

// Parses "none", "mtr", "mite", "pairwise(s,t)", "epsilon_harm(eps)",
// "prob_mtr(L,U)". Throws ConfigError for anything else.
AssumptionSet preset(std::string_view name, const Dims& dims);

}  // namespace pobounds
