#pragma once

// Closed-form identification under the discrete MITE assumption
// (0 <= Y_s - Y_t <= 1 for s > t). Only two kinds of PO configurations carry
// mass:
//   constant chains  Y_0 = ... = Y_{d_x-1} = y0
//   step chains      Y_0 = ... = Y_k = y0, Y_{k+1} = ... = y0 + 1
// and their masses are telescoping sums of per-arm CDFs F_k:
//   theta(y0)  = F_{d_x-1}(y0) - F_0(y0 - 1)
//   phi(y0, k) = F_k(y0) - F_{k+1}(y0)

#include "pobounds/model.hpp"

#include <string>
#include <vector>

namespace pobounds {

inline constexpr double kMiteNegativeTolerance = 1e-8;

struct MiteViolation {
    enum class Chain { Constant, Step };

    Chain chain = Chain::Constant;
    int level = 0;  // y0
    int step = -1;  // k for step chains
    double mass = 0.0;
    std::string source;  // "experimental" or "observational"

    std::string describe() const;
};

struct CompatibilityReport {
    std::vector<MiteViolation> violations;

    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

// Masses of the MITE chains from per-arm CDF rows (cdf[k][j] = F_k(j)).
// Masses may be negative when the data contradict MITE.
std::vector<std::pair<std::vector<int>, double>> mite_chain_masses(const Dims& dims,
                                                                   const std::vector<std::vector<double>>& cdf);

// Joint over PO configurations only. Throws MiteIncompatibleError when a mass
// is below -1e-8; smaller negatives are clamped and the joint renormalized.
SparseJointPO identify_experimental(const ExperimentalMarginals& exp);

// Joint over (y_vec, x, y) with Y_x independent of X assumed. Throws
// UndefinedConditionalError when some P(X = x) = 0.
SparseJointPO identify_observational(const ObservationalJoint& obs);

// Sum of query coefficients times mass, divided by P(X = l, Y = m) for
// conditional queries. The divisor comes from obs when given, else from the
// joint's own (X, Y) margin.
double evaluate(const SparseJointPO& joint, const QuerySpec& query, const ObservationalJoint* obs = nullptr);

CompatibilityReport mite_compatibility_report(const DataSources& data);

}  // namespace pobounds
