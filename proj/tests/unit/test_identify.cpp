#include <doctest.h>

#include "support.hpp"

#include <pobounds/bounds.hpp>
#include <pobounds/compile.hpp>
#include <pobounds/errors.hpp>
#include <pobounds/identify.hpp>

#include <random>

using namespace pobounds;
using namespace testing_support;

TEST_CASE("identification setting reference values") {
    const auto truth = identification_truth();
    const Dims& d = truth.dims();
    const auto src = exact_sources(truth, true, true);
    const auto joint = identify_experimental(*src.exp);
    CHECK(std::abs(evaluate(joint, three_way_event(d, 0, 0, 1)) - 1.0 / 7.0) < 1e-12);
    const auto obs_joint = identify_observational(*src.obs);
    CHECK(std::abs(evaluate(obs_joint, build_posterior_effect_query(d, 1, 0, {2, 2}), &*src.obs) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(evaluate(obs_joint, build_posterior_effect_query(d, 1, 0, {2, 2})) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(evaluate(obs_joint, build_moment_query(d, 2, 1, 0)) - 2.0 / 7.0) < 1e-12);
    CHECK(std::abs(evaluate(joint, build_moment_query(d, 2, 1, 0)) - 2.0 / 7.0) < 1e-12);
    CHECK(evaluate(joint, build_event_query(d, Event{})) == doctest::Approx(1.0));
}

TEST_CASE("identified joint matches the truth cell by cell") {
    const auto truth = identification_truth();
    const auto joint = identify_experimental(experimental_marginals(truth));
    CHECK(max_abs_diff(joint.po_distribution(), truth.po_distribution()) < 1e-12);
}

TEST_CASE("no-effect marginals put mass on constant chains only") {
    const Dims d(3, 3);
    const ExperimentalMarginals exp(d, {{0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}});
    const auto joint = identify_experimental(exp);
    for (const auto& [cell, mass] : joint.entries()) {
        if (mass == 0.0) continue;
        CHECK(cell.y_vec[0] == cell.y_vec[1]);
        CHECK(cell.y_vec[1] == cell.y_vec[2]);
        CHECK(mass == doctest::Approx(std::vector<double>{0.2, 0.3, 0.5}[static_cast<std::size_t>(cell.y_vec[0])]));
    }

    const ObservationalJoint obs(d, {{0.1, 0.15, 0.25}, {0.06, 0.09, 0.15}, {0.04, 0.06, 0.1}});
    const auto oj = identify_observational(obs);
    for (const auto& [cell, mass] : oj.entries()) {
        if (mass < 1e-12) continue;
        CHECK(cell.y_vec[0] == cell.y_vec[2]);
        const double px = obs.p_x(*cell.x);
        const double py = std::vector<double>{0.2, 0.3, 0.5}[static_cast<std::size_t>(cell.y_vec[0])];
        CHECK(mass == doctest::Approx(px * py));
    }
}

TEST_CASE("deterministic step at two levels") {
    const Dims d(2, 2);
    const auto joint = identify_experimental(ExperimentalMarginals(d, {{1, 0}, {0, 1}}));
    const auto dist = joint.po_distribution();
    CHECK(dist[flatten_y_vec(std::vector<int>{0, 1}, d)] == doctest::Approx(1.0));
    CHECK(dist[flatten_y_vec(std::vector<int>{0, 0}, d)] == 0.0);
    CHECK(dist[flatten_y_vec(std::vector<int>{1, 1}, d)] == 0.0);
}

TEST_CASE("reversed marginals are incompatible") {
    const Dims d(2, 2);
    const ExperimentalMarginals exp(d, {{0, 1}, {1, 0}});
    CHECK_THROWS_AS(identify_experimental(exp), MiteIncompatibleError);
    DataSources data;
    data.exp = exp;
    const auto report = mite_compatibility_report(data);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].chain == MiteViolation::Chain::Step);
    CHECK(report.violations[0].level == 0);
    CHECK(report.violations[0].step == 0);
    CHECK(report.violations[0].mass == doctest::Approx(-1.0));
    CHECK(report.violations[0].source == "experimental");
}

TEST_CASE("compatibility on the reference and uniform data") {
    const auto truth = identification_truth();
    CHECK(mite_compatibility_report(exact_sources(truth, true, true)).ok());
    DataSources uniform;
    uniform.exp = ExperimentalMarginals(Dims(3, 3), {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
    CHECK(mite_compatibility_report(uniform).ok());
    CHECK_FALSE(mite_compatibility_report(exact_sources(bounding_truth(), true, false)).ok());
}

TEST_CASE("tiny negative masses are clamped") {
    const Dims d(2, 2);
    const ExperimentalMarginals exp(d, {{0.5 + 1e-10, 0.5 - 1e-10}, {0.5, 0.5}});
    const auto joint = identify_experimental(exp);
    for (const auto& [cell, mass] : joint.entries()) CHECK(mass >= 0.0);
    CHECK(joint.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-probability arms are rejected by the observational path") {
    const Dims d(2, 2);
    CHECK_THROWS_AS(identify_observational(ObservationalJoint(d, {{0.5, 0.5}, {0, 0}})), UndefinedConditionalError);
}

TEST_CASE("marginal round trip and support restriction on random MITE truths") {
    std::mt19937_64 rng(5);
    for (auto [dx, dy] : {std::pair{2, 2}, {2, 3}, {3, 3}, {3, 4}}) {
        const Dims d(dx, dy);
        const auto mask = indicator_mask(d, preset_mite(d).terms.front());
        for (int trial = 0; trial < 25; ++trial) {
            const auto truth = random_mite_joint(d, rng, false);
            const auto marg = direct_po_marginals(truth);
            const ExperimentalMarginals exp(d, marg);
            const auto joint = identify_experimental(exp);
            CHECK(joint.total_mass() == doctest::Approx(1.0).epsilon(1e-8));
            const auto back = experimental_marginals(joint);
            for (int k = 0; k < dx; ++k)
                for (int j = 0; j < dy; ++j) CHECK(std::abs(back.at(k, j) - marg[k][j]) < 1e-9);
            for (const auto& [cell, mass] : joint.entries())
                if (mass > 0.0) CHECK(mask[flatten_y_vec(cell.y_vec, d) * static_cast<std::size_t>(dx)]);
        }
    }
}

TEST_CASE("LP with MITE collapses to the closed form") {
    std::mt19937_64 rng(17);
    for (auto [dx, dy] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
        const Dims d(dx, dy);
        for (int trial = 0; trial < 4; ++trial) {
            const auto truth = random_mite_joint(d, rng, true);
            const auto exp_only = exact_sources(truth, true, false);
            const auto joint = identify_experimental(*exp_only.exp);
            for (const auto& q : standard_queries(d, false)) {
                const auto r = bound(d, exp_only, preset_mite(d), q);
                REQUIRE(r.status == BoundStatus::Ok);
                CHECK(r.upper - r.lower < 1e-7);
                CHECK(std::abs(r.lower - evaluate(joint, q)) < 1e-7);
            }
            auto a = preset_mite(d);
            a.exogeneity = true;
            const auto obs_only = exact_sources(truth, false, true);
            const auto oj = identify_observational(*obs_only.obs);
            for (const auto& q : standard_queries(d, true)) {
                const auto r = bound(d, obs_only, a, q);
                REQUIRE(r.status == BoundStatus::Ok);
                CHECK(r.upper - r.lower < 1e-7);
                CHECK(std::abs(r.lower - evaluate(oj, q, &*obs_only.obs)) < 1e-7);
            }
        }
    }
}

TEST_CASE("evaluation errors") {
    const Dims d(2, 2);
    const auto joint = identify_experimental(ExperimentalMarginals(d, {{0.5, 0.5}, {0.5, 0.5}}));
    Event e;
    e.x = 1;
    CHECK_THROWS(evaluate(joint, build_event_query(d, e)));
    CHECK_THROWS(evaluate(joint, build_posterior_effect_query(d, 1, 0, {1, 1})));
    const ObservationalJoint obs(d, {{0.5, 0.0}, {0.0, 0.5}});
    CHECK_THROWS_AS(evaluate(identify_observational(obs), build_posterior_effect_query(d, 1, 0, {1, 0}), &obs),
                    UndefinedConditionalError);
}
