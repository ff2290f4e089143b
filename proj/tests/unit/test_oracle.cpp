#include <doctest.h>

#include "support.hpp"

#include <pobounds/bounds.hpp>
#include <pobounds/compile.hpp>
#include <pobounds/errors.hpp>
#include <pobounds/oracle.hpp>

#include <algorithm>

using namespace pobounds;
using namespace testing_support;

TEST_CASE("closed-form PNS examples") {
    CHECK(tian_pearl_pns_bounds(0.5, 0.5) == std::pair{0.0, 0.5});
    CHECK(tian_pearl_pns_bounds(1.0, 0.0) == std::pair{1.0, 1.0});
    CHECK(tian_pearl_pns_bounds(0.0, 1.0) == std::pair{0.0, 0.0});
}

TEST_CASE("LP bounds on PNS agree with the closed form over a grid") {
    const Dims d(2, 2);
    Event pns;
    pns.po = {PoConstraint::equals(0, 0), PoConstraint::equals(1, 1)};
    const auto q = build_event_query(d, pns);
    AssumptionSet exo;
    exo.exogeneity = true;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const double p1 = i / 20.0;
            const double p0 = j / 20.0;
            // P(X = 1) = 0.4; exact conditionals.
            DataSources data;
            data.obs = ObservationalJoint(d, {{0.6 * (1 - p0), 0.6 * p0}, {0.4 * (1 - p1), 0.4 * p1}});
            const auto r = bound(d, data, exo, q);
            REQUIRE(r.status == BoundStatus::Ok);
            const auto [lo, hi] = tian_pearl_pns_bounds(p1, p0);
            CHECK(std::abs(r.lower - lo) < 1e-8);
            CHECK(std::abs(r.upper - hi) < 1e-8);
        }
}

TEST_CASE("hit-and-run points on the simplex") {
    const auto pts = random_feasible_points(compile_base(Dims(2, 2)), 100, 1);
    CHECK(pts.size() == 100);
    for (const auto& p : pts) CHECK(compile_base(Dims(2, 2)).max_violation(p) < 1e-8);
    CHECK(pts[0] != pts[1]);
}

TEST_CASE("hit-and-run points respect LP bounds") {
    const auto truth = bounding_truth();
    const Dims& d = truth.dims();
    const auto data = exact_sources(truth, true, true);
    const auto a = preset("mtr", d);
    const auto set = compile_problem(d, data, a);
    const auto pts = random_feasible_points(set, 60, 3);
    for (const auto& q : standard_queries(d, true)) {
        const auto r = bound(d, data, a, q);
        const auto obj = bind_query(q, data);
        for (const auto& p : pts) {
            CHECK(set.max_violation(p) < 1e-8);
            double v = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) v += obj.coeffs[i] * p[i];
            CHECK(v >= r.lower - 1e-7);
            CHECK(v <= r.upper + 1e-7);
        }
    }
}

TEST_CASE("hit-and-run stays on the MITE support") {
    const auto truth = identification_truth();
    const Dims& d = truth.dims();
    const auto m = preset_mite(d);
    const auto set = compile_problem(d, exact_sources(truth, true, true), m);
    const auto mask = indicator_mask(d, m.terms.front());
    for (const auto& p : random_feasible_points(set, 40, 8))
        for (std::size_t i = 0; i < p.size(); ++i)
            if (!mask[i]) CHECK(std::abs(p[i]) < 1e-8);
}

TEST_CASE("hit-and-run rejects infeasible systems and is seeded") {
    const Dims d(2, 3);
    DataSources data;
    data.exp = ExperimentalMarginals(d, {{0, 0, 1}, {1, 0, 0}});
    CHECK_THROWS_AS(random_feasible_points(compile_problem(d, data, preset_mtr(d)), 5, 1), ContradictionError);
    const auto set = compile_problem(d, data, {});
    CHECK(random_feasible_points(set, 10, 4) == random_feasible_points(set, 10, 4));
}

TEST_CASE("vertex enumeration examples") {
    ConstraintSet simplex(3);
    simplex.rows.push_back(make_row(std::vector<double>{1, 1, 1}, 1.0, RowKind::Equal, Provenance::base_sum()));
    auto v = vertex_enumerate_small(simplex);
    std::sort(v.begin(), v.end());
    CHECK(v == std::vector<std::vector<double>>{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});

    const Dims d(2, 2);
    ConstraintSet set = compile_base(d);
    set.rows.push_back(make_row(std::vector<double>{1, 0, 1, 0, 0, 0, 0, 0}, 0.3, RowKind::Equal, Provenance::observational(0, 0)));
    const auto verts = vertex_enumerate_small(set);
    CHECK_FALSE(verts.empty());
    for (int i = 0; i < 8; ++i) {
        std::vector<double> c(8, 0.0);
        c[static_cast<std::size_t>(i)] = 1.0;
        c[static_cast<std::size_t>((i + 3) % 8)] = -0.5;
        const auto s = solve(LpProblem{c, set, Sense::Maximize});
        REQUIRE(s.status == LpStatus::Optimal);
        bool attained = false;
        for (const auto& vert : verts) attained = attained || max_abs_diff(vert, s.witness) < 1e-9;
        double best = -1e9;
        for (const auto& vert : verts) {
            double val = 0.0;
            for (std::size_t k = 0; k < 8; ++k) val += c[k] * vert[k];
            best = std::max(best, val);
        }
        CHECK(std::abs(best - s.value) < 1e-9);
        CHECK(attained);
    }

    ConstraintSet bad = simplex;
    bad.rows.push_back(make_row(std::vector<double>{1, 1, 1}, 2.0, RowKind::Equal, Provenance::custom(0)));
    CHECK(vertex_enumerate_small(bad).empty());
    CHECK_THROWS_AS(vertex_enumerate_small(compile_base(Dims(2, 3))), SizeError);
}
