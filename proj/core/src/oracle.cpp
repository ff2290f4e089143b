#include "pobounds/oracle.hpp"

#include "pobounds/errors.hpp"
#include "pobounds/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pobounds {

namespace {

constexpr double kTightTolerance = 1e-9;

std::vector<double> dense_coeffs(const ConstraintRow& row, std::size_t n) {
    std::vector<double> a(n, 0.0);
    for (const auto& [j, v] : row.coeffs) a[j] = v;
    return a;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Solves the square system in place by Gaussian elimination with partial
// pivoting. Returns false when singular.
bool solve_square(std::vector<double>& m, std::vector<double>& rhs, std::size_t r) {
    for (std::size_t k = 0; k < r; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < r; ++i)
            if (std::abs(m[i * r + k]) > std::abs(m[p * r + k])) p = i;
        if (std::abs(m[p * r + k]) < 1e-10) return false;
        if (p != k) {
            for (std::size_t c = 0; c < r; ++c) std::swap(m[k * r + c], m[p * r + c]);
            std::swap(rhs[k], rhs[p]);
        }
        for (std::size_t i = k + 1; i < r; ++i) {
            const double f = m[i * r + k] / m[k * r + k];
            if (f == 0.0) continue;
            for (std::size_t c = k; c < r; ++c) m[i * r + c] -= f * m[k * r + c];
            rhs[i] -= f * rhs[k];
        }
    }
    for (std::size_t k = r; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t c = k + 1; c < r; ++c) s -= m[k * r + c] * rhs[c];
        rhs[k] = s / m[k * r + k];
    }
    return true;
}

}  // namespace

std::pair<double, double> tian_pearl_pns_bounds(double p1, double p0) {
    if (!(p1 >= 0.0 && p1 <= 1.0 && p0 >= 0.0 && p0 <= 1.0)) throw RangeError("conditional probabilities must lie in [0, 1]");
    return {std::max(0.0, p1 - p0), std::min(p1, 1.0 - p0)};
}

std::vector<std::vector<double>> random_feasible_points(const ConstraintSet& constraints, std::size_t n,
                                                        std::uint64_t seed) {
    const std::size_t dim = constraints.num_vars;
    const auto feasible = check_feasible(constraints);
    if (!feasible.feasible) throw ContradictionError("cannot sample from an empty polytope");

    SimplexSolver solver;
    std::vector<std::vector<double>> anchors;
    std::vector<bool> fixed(dim, false);
    for (std::size_t j = 0; j < dim; ++j) {
        LpProblem p{std::vector<double>(dim, 0.0), constraints, Sense::Maximize};
        p.objective[j] = 1.0;
        auto s = solver.solve(p);
        if (s.status == LpStatus::Unbounded) throw SizeError("polytope is unbounded; hit-and-run needs a bounded region");
        if (s.value <= kTightTolerance)
            fixed[j] = true;
        else
            anchors.push_back(std::move(s.witness));
    }
    std::vector<bool> tight(constraints.rows.size(), false);
    for (std::size_t r = 0; r < constraints.rows.size(); ++r) {
        const auto& row = constraints.rows[r];
        if (row.kind != RowKind::LessEqual) continue;
        LpProblem p{dense_coeffs(row, dim), constraints, Sense::Minimize};
        auto s = solver.solve(p);
        if (s.value >= row.rhs - kTightTolerance)
            tight[r] = true;
        else
            anchors.push_back(std::move(s.witness));
    }
    if (anchors.empty()) anchors.push_back(feasible.point);

    std::vector<double> x(dim, 0.0);
    for (const auto& a : anchors)
        for (std::size_t j = 0; j < dim; ++j) x[j] += a[j];
    for (std::size_t j = 0; j < dim; ++j) x[j] = fixed[j] ? 0.0 : x[j] / static_cast<double>(anchors.size());

    // Orthonormal basis of the directions the walk must not move along.
    std::vector<std::vector<double>> basis;
    auto absorb = [&](std::vector<double> v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) {
                const double c = dot(q, v);
                for (std::size_t j = 0; j < dim; ++j) v[j] -= c * q[j];
            }
        const double norm = std::sqrt(dot(v, v));
        if (norm < 1e-10) return;
        for (double& e : v) e /= norm;
        basis.push_back(std::move(v));
    };
    for (std::size_t r = 0; r < constraints.rows.size(); ++r)
        if (constraints.rows[r].kind == RowKind::Equal || tight[r]) absorb(dense_coeffs(constraints.rows[r], dim));
    for (std::size_t j = 0; j < dim; ++j) {
        if (!fixed[j]) continue;
        std::vector<double> e(dim, 0.0);
        e[j] = 1.0;
        absorb(std::move(e));
    }

    std::vector<std::vector<double>> loose;
    std::vector<double> loose_rhs;
    for (std::size_t r = 0; r < constraints.rows.size(); ++r) {
        if (constraints.rows[r].kind != RowKind::LessEqual || tight[r]) continue;
        loose.push_back(dense_coeffs(constraints.rows[r], dim));
        loose_rhs.push_back(constraints.rows[r].rhs);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double inf = std::numeric_limits<double>::infinity();
    auto step = [&] {
        std::vector<double> d(dim);
        for (std::size_t j = 0; j < dim; ++j) d[j] = fixed[j] ? 0.0 : gauss(rng);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) {
                const double c = dot(q, d);
                for (std::size_t j = 0; j < dim; ++j) d[j] -= c * q[j];
            }
        const double norm = std::sqrt(dot(d, d));
        if (norm < 1e-12) return;
        for (double& e : d) e /= norm;
        double lo = -inf;
        double hi = inf;
        for (std::size_t j = 0; j < dim; ++j) {
            if (fixed[j] || std::abs(d[j]) < 1e-15) continue;
            const double t = -x[j] / d[j];
            if (d[j] > 0.0) lo = std::max(lo, t);
            else hi = std::min(hi, t);
        }
        for (std::size_t r = 0; r < loose.size(); ++r) {
            const double ad = dot(loose[r], d);
            if (std::abs(ad) < 1e-15) continue;
            const double t = (loose_rhs[r] - dot(loose[r], x)) / ad;
            if (ad > 0.0) hi = std::min(hi, t);
            else lo = std::max(lo, t);
        }
        if (!std::isfinite(lo) || !std::isfinite(hi)) throw SizeError("hit-and-run found an unbounded direction");
        if (hi <= lo) return;
        const double t = std::uniform_real_distribution<double>(lo, hi)(rng);
        for (std::size_t j = 0; j < dim; ++j) x[j] = fixed[j] ? 0.0 : std::max(x[j] + t * d[j], 0.0);
    };

    constexpr int kBurnIn = 30;
    constexpr int kThin = 5;
    for (int i = 0; i < kBurnIn; ++i) step();
    std::vector<std::vector<double>> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int s = 0; s < kThin; ++s) step();
        points.push_back(x);
    }
    return points;
}

std::vector<std::vector<double>> vertex_enumerate_small(const ConstraintSet& constraints) {
    const std::size_t n = constraints.num_vars;
    if (n > kVertexEnumerationLimit)
        throw SizeError("vertex enumeration limited to " + std::to_string(kVertexEnumerationLimit) + " variables, got " +
                        std::to_string(n));
    constraints.validate();

    // Standard form with one slack per inequality row.
    std::size_t slacks = 0;
    for (const auto& row : constraints.rows)
        if (row.kind == RowKind::LessEqual) ++slacks;
    const std::size_t cols = n + slacks;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::size_t s = n;
    for (const auto& row : constraints.rows) {
        std::vector<double> r(cols, 0.0);
        for (const auto& [j, v] : row.coeffs) r[j] = v;
        if (row.kind == RowKind::LessEqual) r[s++] = 1.0;
        a.push_back(std::move(r));
        b.push_back(row.rhs);
    }

    // Row-reduce to drop dependent rows and detect inconsistency.
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
        std::size_t p = rank;
        for (std::size_t i = rank + 1; i < a.size(); ++i)
            if (std::abs(a[i][c]) > std::abs(a[p][c])) p = i;
        if (std::abs(a[p][c]) < 1e-10) continue;
        std::swap(a[p], a[rank]);
        std::swap(b[p], b[rank]);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == rank) continue;
            const double f = a[i][c] / a[rank][c];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < cols; ++k) a[i][k] -= f * a[rank][k];
            b[i] -= f * b[rank];
        }
        ++rank;
    }
    for (std::size_t i = rank; i < a.size(); ++i)
        if (std::abs(b[i]) > 1e-9) return {};
    a.resize(rank);
    b.resize(rank);

    std::vector<std::vector<double>> vertices;
    auto keep = [&](std::vector<double> v) {
        for (const auto& w : vertices) {
            double diff = 0.0;
            for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(w[j] - v[j]));
            if (diff < 1e-9) return;
        }
        vertices.push_back(std::move(v));
    };
    if (rank == 0) {
        keep(std::vector<double>(n, 0.0));
        return vertices;
    }

    std::vector<std::size_t> pick(rank);
    for (std::size_t i = 0; i < rank; ++i) pick[i] = i;
    while (true) {
        std::vector<double> m(rank * rank);
        std::vector<double> rhs = b;
        for (std::size_t i = 0; i < rank; ++i)
            for (std::size_t c = 0; c < rank; ++c) m[i * rank + c] = a[i][pick[c]];
        if (solve_square(m, rhs, rank) && std::all_of(rhs.begin(), rhs.end(), [](double v) { return v >= -1e-9; })) {
            std::vector<double> full(cols, 0.0);
            for (std::size_t c = 0; c < rank; ++c) full[pick[c]] = std::max(rhs[c], 0.0);
            full.resize(n);
            keep(std::move(full));
        }
        // Next combination in lexicographic order.
        std::size_t i = rank;
        while (i > 0 && pick[i - 1] == cols - rank + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < rank; ++j) pick[j] = pick[j - 1] + 1;
    }
    return vertices;
}

}  // namespace pobounds
