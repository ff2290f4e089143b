#include "pobounds/identify.hpp"

#include "pobounds/errors.hpp"

#include <cmath>
#include <sstream>

namespace pobounds {

namespace {

std::vector<std::vector<double>> cdf_rows(const Dims& dims, const std::vector<std::vector<double>>& pmf) {
    std::vector<std::vector<double>> cdf(pmf.size(), std::vector<double>(static_cast<std::size_t>(dims.d_y()), 0.0));
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        double run = 0.0;
        for (int j = 0; j < dims.d_y(); ++j) {
            run += pmf[k][static_cast<std::size_t>(j)];
            cdf[k][static_cast<std::size_t>(j)] = run;
        }
    }
    return cdf;
}

std::vector<std::vector<double>> conditional_rows(const ObservationalJoint& obs) {
    const Dims& dims = obs.dims();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(dims.d_x()));
    for (int k = 0; k < dims.d_x(); ++k) {
        rows[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(dims.d_y()));
        for (int m = 0; m < dims.d_y(); ++m) rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = obs.p_y_given_x(m, k);
    }
    return rows;
}

std::vector<int> constant_chain(const Dims& dims, int y0) { return std::vector<int>(static_cast<std::size_t>(dims.d_x()), y0); }

std::vector<int> step_chain(const Dims& dims, int y0, int k) {
    std::vector<int> y(static_cast<std::size_t>(dims.d_x()), y0);
    for (int s = k + 1; s < dims.d_x(); ++s) y[static_cast<std::size_t>(s)] = y0 + 1;
    return y;
}

void collect_violations(const Dims& dims, const std::vector<std::vector<double>>& cdf, const std::string& source,
                        std::vector<MiteViolation>& out) {
    const int d_x = dims.d_x();
    const int d_y = dims.d_y();
    auto F = [&](int k, int j) { return j < 0 ? 0.0 : cdf[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; };
    for (int y0 = 0; y0 < d_y; ++y0) {
        const double theta = F(d_x - 1, y0) - F(0, y0 - 1);
        if (theta < -kMiteNegativeTolerance) out.push_back({MiteViolation::Chain::Constant, y0, -1, theta, source});
    }
    for (int y0 = 0; y0 + 1 < d_y; ++y0) {
        for (int k = 0; k + 1 < d_x; ++k) {
            const double phi = F(k, y0) - F(k + 1, y0);
            if (phi < -kMiteNegativeTolerance) out.push_back({MiteViolation::Chain::Step, y0, k, phi, source});
        }
    }
}

[[noreturn]] void throw_incompatible(std::vector<MiteViolation> violations) {
    CompatibilityReport report{std::move(violations)};
    throw MiteIncompatibleError("data incompatible with MITE: " + report.summary());
}

}  // namespace

std::string MiteViolation::describe() const {
    std::ostringstream out;
    if (chain == Chain::Constant)
        out << "constant chain y0=" << level;
    else
        out << "step chain y0=" << level << " k=" << step;
    out << " has mass " << mass;
    if (!source.empty()) out << " (" << source << ")";
    return out.str();
}

std::string CompatibilityReport::summary() const {
    if (violations.empty()) return "ok";
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) out << (i ? "; " : "") << violations[i].describe();
    return out.str();
}

std::vector<std::pair<std::vector<int>, double>> mite_chain_masses(const Dims& dims,
                                                                   const std::vector<std::vector<double>>& cdf) {
    if (cdf.size() != static_cast<std::size_t>(dims.d_x())) throw ShapeError("one CDF row per arm expected");
    const int d_x = dims.d_x();
    const int d_y = dims.d_y();
    auto F = [&](int k, int j) { return j < 0 ? 0.0 : cdf[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]; };
    std::vector<std::pair<std::vector<int>, double>> masses;
    for (int y0 = 0; y0 < d_y; ++y0) masses.emplace_back(constant_chain(dims, y0), F(d_x - 1, y0) - F(0, y0 - 1));
    for (int y0 = 0; y0 + 1 < d_y; ++y0)
        for (int k = 0; k + 1 < d_x; ++k) masses.emplace_back(step_chain(dims, y0, k), F(k, y0) - F(k + 1, y0));
    return masses;
}

SparseJointPO identify_experimental(const ExperimentalMarginals& exp) {
    require_valid(exp);
    const Dims& dims = exp.dims();
    const auto cdf = cdf_rows(dims, exp.rows());
    std::vector<MiteViolation> violations;
    collect_violations(dims, cdf, "experimental", violations);
    if (!violations.empty()) throw_incompatible(std::move(violations));

    SparseJointPO joint(dims);
    for (auto& [y_vec, mass] : mite_chain_masses(dims, cdf)) {
        if (mass <= 0.0) continue;
        joint.add({std::move(y_vec), std::nullopt, std::nullopt}, mass);
    }
    joint.normalize();
    return joint;
}

SparseJointPO identify_observational(const ObservationalJoint& obs) {
    require_valid(obs);
    const Dims& dims = obs.dims();
    for (int x = 0; x < dims.d_x(); ++x)
        if (!(obs.p_x(x) > 0.0))
            throw UndefinedConditionalError("P(X = " + std::to_string(x) + ") = 0; P(Y | X) undefined for that arm");
    const auto cdf = cdf_rows(dims, conditional_rows(obs));
    std::vector<MiteViolation> violations;
    collect_violations(dims, cdf, "observational", violations);
    if (!violations.empty()) throw_incompatible(std::move(violations));

    SparseJointPO joint(dims);
    for (auto& [y_vec, mass] : mite_chain_masses(dims, cdf)) {
        if (mass <= 0.0) continue;
        for (int x = 0; x < dims.d_x(); ++x) joint.add({y_vec, x, std::nullopt}, mass * obs.p_x(x));
    }
    joint.normalize();
    return joint;
}

double evaluate(const SparseJointPO& joint, const QuerySpec& query, const ObservationalJoint* obs) {
    const Dims& dims = joint.dims();
    if (!(query.dims == dims)) throw ShapeError("query dims differ from joint dims");
    query.validate();

    double total = 0.0;
    if (joint.has_treatment()) {
        for (const auto& [cell, mass] : joint.entries())
            total += mass * query.coeff(FullCell{cell.y_vec, *cell.x, *cell.y});
    } else {
        if (query.condition) throw ConfigError("conditional query needs a treatment-indexed joint");
        for (const auto& [cell, mass] : joint.entries()) {
            const double c = query.coeff(FullCell{cell.y_vec, 0, 0});
            for (int x = 0; x < dims.d_x(); ++x)
                for (int y = 0; y < dims.d_y(); ++y)
                    if (query.coeff(FullCell{cell.y_vec, x, y}) != c)
                        throw ConfigError("query depends on the factual (X, Y); a joint over POs alone cannot evaluate it");
            total += mass * c;
        }
    }
    if (!query.condition) return total;

    const Evidence e = *query.condition;
    double divisor = 0.0;
    if (obs) {
        divisor = obs->at(e.x, e.y);
    } else {
        for (const auto& [cell, mass] : joint.entries())
            if (*cell.x == e.x && *cell.y == e.y) divisor += mass;
    }
    if (!(divisor > 0.0))
        throw UndefinedConditionalError("P(X = " + std::to_string(e.x) + ", Y = " + std::to_string(e.y) +
                                        ") = 0; conditional query undefined");
    return total / divisor;
}

CompatibilityReport mite_compatibility_report(const DataSources& data) {
    if (data.empty()) throw ConfigError("compatibility check needs a data source");
    CompatibilityReport report;
    if (data.exp) collect_violations(data.exp->dims(), cdf_rows(data.exp->dims(), data.exp->rows()), "experimental",
                                     report.violations);
    if (data.obs) {
        const Dims& dims = data.obs->dims();
        for (int x = 0; x < dims.d_x(); ++x)
            if (!(data.obs->p_x(x) > 0.0))
                throw UndefinedConditionalError("P(X = " + std::to_string(x) + ") = 0; P(Y | X) undefined for that arm");
        collect_violations(dims, cdf_rows(dims, conditional_rows(*data.obs)), "observational", report.violations);
    }
    return report;
}

}  // namespace pobounds
