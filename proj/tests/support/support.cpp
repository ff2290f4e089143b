#include "support.hpp"

#include <pobounds/serialize.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#ifndef POBOUNDS_TEST_DATA_DIR
#error "POBOUNDS_TEST_DATA_DIR must point at the repository's data directory"
#endif

namespace testing_support {

std::string data_path(const std::string& relative) { return std::string(POBOUNDS_TEST_DATA_DIR) + "/" + relative; }

namespace {

SparseJointPO load(const std::string& relative) {
    std::ifstream in(data_path(relative));
    if (!in) throw std::runtime_error("missing test data " + relative);
    return parse_joint(Json::parse(in));
}

}  // namespace

SparseJointPO bounding_truth() { return load("settings/monotone_bounding.json"); }
SparseJointPO identification_truth() { return load("settings/identification.json"); }

std::vector<std::vector<double>> direct_po_marginals(const SparseJointPO& truth) {
    const Dims& d = truth.dims();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(d.d_x()), std::vector<double>(static_cast<std::size_t>(d.d_y())));
    for (const auto& [cell, mass] : truth.entries())
        for (std::size_t k = 0; k < cell.y_vec.size(); ++k) m[k][static_cast<std::size_t>(cell.y_vec[k])] += mass;
    return m;
}

std::vector<std::vector<double>> direct_obs_joint(const SparseJointPO& truth) {
    const Dims& d = truth.dims();
    std::vector<std::vector<double>> m(static_cast<std::size_t>(d.d_x()), std::vector<double>(static_cast<std::size_t>(d.d_y())));
    for (const auto& [cell, mass] : truth.entries())
        m[static_cast<std::size_t>(*cell.x)][static_cast<std::size_t>(cell.y_vec[static_cast<std::size_t>(*cell.x)])] += mass;
    return m;
}

DataSources exact_sources(const SparseJointPO& truth, bool with_exp, bool with_obs) {
    DataSources s;
    if (with_exp) s.exp = ExperimentalMarginals(truth.dims(), direct_po_marginals(truth));
    if (with_obs) s.obs = ObservationalJoint(truth.dims(), direct_obs_joint(truth));
    return s;
}

QuerySpec three_way_event(const Dims& dims, int a, int b, int c) {
    Event e;
    e.po = {PoConstraint::equals(0, a), PoConstraint::equals(1, b), PoConstraint::equals(2, c)};
    return build_event_query(dims, e);
}

SparseJointPO random_mite_joint(const Dims& dims, std::mt19937_64& rng, bool with_treatment) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution keep(0.7);
    std::vector<std::vector<int>> chains;
    for (int y0 = 0; y0 < dims.d_y(); ++y0) chains.emplace_back(static_cast<std::size_t>(dims.d_x()), y0);
    for (int y0 = 0; y0 + 1 < dims.d_y(); ++y0)
        for (int k = 0; k + 1 < dims.d_x(); ++k) {
            std::vector<int> y(static_cast<std::size_t>(dims.d_x()), y0);
            for (int s = k + 1; s < dims.d_x(); ++s) y[static_cast<std::size_t>(s)] = y0 + 1;
            chains.push_back(std::move(y));
        }
    std::vector<double> w(chains.size());
    double total = 0.0;
    for (auto& v : w) {
        v = keep(rng) ? u(rng) : 0.0;
        total += v;
    }
    if (total == 0.0) {
        w[0] = 1.0;
        total = 1.0;
    }
    std::vector<double> px(static_cast<std::size_t>(dims.d_x()));
    double px_total = 0.0;
    for (auto& p : px) {
        p = u(rng);
        px_total += p;
    }
    SparseJointPO joint(dims);
    for (std::size_t i = 0; i < chains.size(); ++i) {
        if (w[i] == 0.0) continue;
        if (!with_treatment) {
            joint.add({chains[i], std::nullopt, std::nullopt}, w[i] / total);
            continue;
        }
        for (int x = 0; x < dims.d_x(); ++x)
            joint.add({chains[i], x, std::nullopt}, w[i] / total * px[static_cast<std::size_t>(x)] / px_total);
    }
    return joint;
}

SparseJointPO random_full_joint(const Dims& dims, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> w(dims.param_count());
    double total = 0.0;
    for (auto& v : w) {
        v = u(rng);
        total += v;
    }
    for (auto& v : w) v /= total;
    return joint_from_params(dims, w);
}

std::vector<QuerySpec> standard_queries(const Dims& dims, bool include_conditional) {
    std::vector<QuerySpec> out;
    const int top = dims.d_y() - 1;
    for (int i = 1; i < dims.d_x(); ++i) {
        out.push_back(build_moment_query(dims, 1, i, 0));
        out.push_back(build_moment_query(dims, 2, i, 0));
        Event harm;
        harm.po = {PoConstraint::at_least(0, 1), PoConstraint::equals(i, 0)};
        out.push_back(build_event_query(dims, harm));
        Event up;
        up.po = {PoConstraint::equals(0, 0), PoConstraint::at_least(i, 1)};
        out.push_back(build_event_query(dims, up));
    }
    Event corner;
    for (int k = 0; k < dims.d_x(); ++k) corner.po.push_back(PoConstraint::at_most(k, top - 1));
    out.push_back(build_event_query(dims, corner));
    Event mixed;
    mixed.po = {PoConstraint::equals(0, 0), PoConstraint::one_of(dims.d_x() - 1, {1, top})};
    out.push_back(build_event_query(dims, mixed));
    if (include_conditional) {
        out.push_back(build_posterior_effect_query(dims, dims.d_x() - 1, 0, Evidence{dims.d_x() - 1, top}));
        Event e;
        e.po = {PoConstraint::equals(0, 0)};
        out.push_back(build_conditional_query(dims, e, Evidence{dims.d_x() - 1, 1}));
        Event x0;
        x0.po = {PoConstraint::at_least(1, 1)};
        x0.x = 0;
        out.push_back(build_event_query(dims, x0));
    }
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testing_support
