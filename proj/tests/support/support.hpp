#pragma once

// Shared fixtures for the test binaries: the two reference settings, direct
// enumeration helpers that do not go through the library's own marginal
// code, and small random generators.

#include <pobounds/bounds.hpp>
#include <pobounds/model.hpp>
#include <pobounds/queries.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using namespace pobounds;

std::string data_path(const std::string& relative);

// Truth of the monotone-bounding setting (3 treatments, 3 outcome levels).
SparseJointPO bounding_truth();
// Truth of the identification setting, satisfying MITE and exogeneity.
SparseJointPO identification_truth();

// Marginals computed by summing the truth's cells directly.
std::vector<std::vector<double>> direct_po_marginals(const SparseJointPO& truth);
std::vector<std::vector<double>> direct_obs_joint(const SparseJointPO& truth);

DataSources exact_sources(const SparseJointPO& truth, bool with_exp, bool with_obs);

// Mass of the cells satisfying pred, optionally divided by P(X = l, Y = m).
template <class Pred>
double direct_probability(const SparseJointPO& truth, Pred pred) {
    double total = 0.0;
    for (const auto& [cell, mass] : truth.entries())
        if (pred(cell)) total += mass;
    return total;
}

// Event P(Y_0 = a, Y_1 = b, Y_2 = c).
QuerySpec three_way_event(const Dims& dims, int a, int b, int c);

// Random joint supported on MITE chains, every arm with positive mass.
SparseJointPO random_mite_joint(const Dims& dims, std::mt19937_64& rng, bool with_treatment);

// Random strictly positive joint over all (y_vec, x) cells.
SparseJointPO random_full_joint(const Dims& dims, std::mt19937_64& rng);

// Standard query suite used for LP/identification comparisons.
std::vector<QuerySpec> standard_queries(const Dims& dims, bool include_conditional);

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace testing_support
