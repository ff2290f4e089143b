#pragma once

#include "pobounds/bounds.hpp"
#include "pobounds/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pobounds {

// arms[k] holds the outcomes observed under do(X = k).
struct ExperimentalSample {
    Dims dims;
    std::vector<std::vector<int>> arms;

    std::size_t size() const;
    void validate() const;
};

struct Record {
    int x = 0;
    int y = 0;

    friend bool operator==(const Record&, const Record&) = default;
};

struct ObservationalSample {
    Dims dims;
    std::vector<Record> records;

    void validate() const;
};

struct SampleSet {
    std::optional<ExperimentalSample> exp;
    std::optional<ObservationalSample> obs;
};

ExperimentalMarginals empirical_experimental(const ExperimentalSample& sample);
ObservationalJoint empirical_observational(const ObservationalSample& sample);
DataSources empirical(const SampleSet& samples);

// Equal-tailed interpolated quantile (linear between order statistics,
// h = (n - 1) p). values need not be sorted.
double quantile(std::vector<double> values, double p);

struct EndpointSummary {
    double mean = 0.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;

    double width() const { return ci_upper - ci_lower; }
};

EndpointSummary summarize(std::span<const double> values, double level = 0.95);

enum class EstimateMode { Bound, Identify };

// One replicate's outcome. In identify mode lower == upper.
struct ReplicateResult {
    bool used = false;
    double lower = 0.0;
    double upper = 0.0;
    std::string note;  // reason for exclusion
};

struct EstimateSummary {
    EndpointSummary lower;
    EndpointSummary upper;
    std::size_t used = 0;
    std::size_t excluded = 0;
    std::vector<ReplicateResult> replicates;
};

struct BootstrapConfig {
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    EstimateMode mode = EstimateMode::Bound;
    unsigned threads = 0;  // 0: hardware concurrency
    double level = 0.95;
    BoundOptions bound_options;
};

// Point estimate of one data set: bounds, or the identified value.
// Identify mode uses the experimental path when exp is present and the
// observational path otherwise. Infeasible bounds, MITE-incompatible data
// and zero-probability evidence come back as an unused ReplicateResult.
ReplicateResult estimate_once(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions,
                              const QuerySpec& query, EstimateMode mode, const BoundOptions& options = {});

// Nonparametric bootstrap: per-arm resampling for experimental data,
// row-wise for observational data. Throws BootstrapFailure when every
// replicate is excluded.
EstimateSummary bootstrap(const SampleSet& samples, const AssumptionSet& assumptions, const QuerySpec& query,
                          const BootstrapConfig& config);

enum class SampleKind { Experimental, Observational };

// Experimental kind draws n outcomes per arm from each PO marginal;
// observational kind draws n (X, Y) records and needs a treatment-indexed
// truth.
SampleSet sample_from_truth(const SparseJointPO& truth, std::size_t n, std::uint64_t seed, SampleKind kind);

struct SimulationConfig {
    std::size_t n = 1000;
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    EstimateMode mode = EstimateMode::Bound;
    bool use_experimental = true;
    bool use_observational = true;
    unsigned threads = 0;
    double level = 0.95;
    BoundOptions bound_options;
};

// Repeats sample -> estimate -> bound/identify. Excluded replicates are
// counted, not redrawn. Throws BootstrapFailure when all are excluded.
EstimateSummary simulate(const SparseJointPO& truth, const AssumptionSet& assumptions, const QuerySpec& query,
                         const SimulationConfig& config);

}  // namespace pobounds
