#include <doctest.h>

#include "support.hpp"

#include <pobounds/errors.hpp>
#include <pobounds/estimate.hpp>
#include <pobounds/identify.hpp>

#include <algorithm>
#include <random>

using namespace pobounds;
using namespace testing_support;

TEST_CASE("empirical experimental marginals") {
    const Dims d2(2, 2);
    const auto a = empirical_experimental({d2, {{0, 0, 1, 1}, {1}}});
    CHECK(a.at(0, 0) == 0.5);
    CHECK(a.at(0, 1) == 0.5);
    CHECK(a.at(1, 1) == 1.0);
    const Dims d3(2, 3);
    const auto b = empirical_experimental({d3, {{2}, {0, 1, 2, 2}}});
    CHECK(b.rows() == std::vector<std::vector<double>>{{0, 0, 1}, {0.25, 0.25, 0.5}});
    CHECK_THROWS_AS(empirical_experimental({Dims(2, 2), {{0}, {}}}), InsufficientDataError);
}

TEST_CASE("empirical observational joint") {
    const Dims d(2, 2);
    const auto a = empirical_observational({d, {{0, 0}, {1, 1}}});
    CHECK(a.rows() == std::vector<std::vector<double>>{{0.5, 0}, {0, 0.5}});
    const auto b = empirical_observational({d, {{0, 1}}});
    CHECK(b.at(0, 1) == 1.0);
    CHECK_THROWS_AS(empirical_observational({d, {}}), InsufficientDataError);
}

TEST_CASE("sampled marginals concentrate") {
    const auto t19 = identification_truth();
    const auto s = sample_from_truth(t19, 10000, 3, SampleKind::Experimental);
    const auto e = empirical_experimental(*s.exp);
    CHECK(std::abs(e.at(0, 0) - 3.0 / 7) < 0.02);
    CHECK(std::abs(e.at(0, 1) - 3.0 / 7) < 0.02);
    CHECK(std::abs(e.at(0, 2) - 1.0 / 7) < 0.02);

    const auto t7 = bounding_truth();
    const auto o = empirical_observational(*sample_from_truth(t7, 10000, 3, SampleKind::Observational).obs);
    const auto exact = direct_obs_joint(t7);
    for (int l = 0; l < 3; ++l)
        for (int m = 0; m < 3; ++m) CHECK(std::abs(o.at(l, m) - exact[l][m]) < 0.02);
}

TEST_CASE("sampling edge cases") {
    const auto t = identification_truth();
    const auto empty = sample_from_truth(t, 0, 1, SampleKind::Observational);
    CHECK(empty.obs->records.empty());
    SparseJointPO point(Dims(2, 3));
    point.add({{1, 2}, 1, std::nullopt}, 1.0);
    const auto s = sample_from_truth(point, 50, 9, SampleKind::Observational);
    for (const auto& r : s.obs->records) CHECK(r == Record{1, 2});
    const auto ex = sample_from_truth(point, 20, 9, SampleKind::Experimental);
    CHECK(std::all_of(ex.exp->arms[0].begin(), ex.exp->arms[0].end(), [](int y) { return y == 1; }));
    CHECK(std::all_of(ex.exp->arms[1].begin(), ex.exp->arms[1].end(), [](int y) { return y == 2; }));
    const auto a = sample_from_truth(t, 100, 42, SampleKind::Observational);
    const auto b = sample_from_truth(t, 100, 42, SampleKind::Observational);
    CHECK(a.obs->records == b.obs->records);
}

TEST_CASE("quantiles interpolate linearly") {
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.0) == 1.0);
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 1.0) == 4.0);
    CHECK(quantile({0.0, 10.0}, 0.025) == doctest::Approx(0.25));
    CHECK(quantile({7.0}, 0.3) == 7.0);
    const std::vector<double> v{1.0, 2.0, 3.0};
    const auto s = summarize(v);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.ci_lower == doctest::Approx(1.05));
    CHECK(s.ci_upper == doctest::Approx(2.95));
}

TEST_CASE("single replicate and degenerate data") {
    const auto t = bounding_truth();
    const Dims& d = t.dims();
    const auto samples = sample_from_truth(t, 200, 1, SampleKind::Observational);
    BootstrapConfig cfg;
    cfg.replicates = 1;
    cfg.seed = 4;
    const auto one = bootstrap(samples, {}, three_way_event(d, 0, 0, 1), cfg);
    REQUIRE(one.used == 1);
    CHECK(one.upper.ci_lower == one.replicates[0].upper);
    CHECK(one.upper.ci_upper == one.replicates[0].upper);
    CHECK(one.upper.mean == one.replicates[0].upper);

    SampleSet flat;
    flat.obs = ObservationalSample{d, std::vector<Record>(30, Record{1, 2})};
    cfg.replicates = 20;
    const auto deg = bootstrap(flat, {}, three_way_event(d, 0, 0, 1), cfg);
    CHECK(deg.lower.width() == 0.0);
    CHECK(deg.upper.width() == 0.0);
}

TEST_CASE("bootstrap is deterministic across thread counts") {
    const auto t = bounding_truth();
    const Dims& d = t.dims();
    SampleSet samples = sample_from_truth(t, 300, 2, SampleKind::Observational);
    samples.exp = sample_from_truth(t, 300, 2, SampleKind::Experimental).exp;
    BootstrapConfig cfg;
    cfg.replicates = 16;
    cfg.seed = 7;
    cfg.threads = 1;
    const auto a = bootstrap(samples, preset("mtr", d), three_way_event(d, 0, 0, 1), cfg);
    cfg.threads = 4;
    const auto b = bootstrap(samples, preset("mtr", d), three_way_event(d, 0, 0, 1), cfg);
    REQUIRE(a.replicates.size() == b.replicates.size());
    for (std::size_t i = 0; i < a.replicates.size(); ++i) {
        CHECK(a.replicates[i].used == b.replicates[i].used);
        CHECK(a.replicates[i].upper == b.replicates[i].upper);
    }
    cfg.seed = 8;
    const auto c = bootstrap(samples, preset("mtr", d), three_way_event(d, 0, 0, 1), cfg);
    bool differs = false;
    for (std::size_t i = 0; i < a.replicates.size(); ++i) differs = differs || a.replicates[i].upper != c.replicates[i].upper;
    CHECK(differs);
}

TEST_CASE("exact population data excludes nothing") {
    const auto t = identification_truth();
    const Dims& d = t.dims();
    // 21 equally weighted cells: a sample with one record per cell is the
    // population itself.
    SampleSet s;
    s.obs = ObservationalSample{d, {}};
    s.exp = ExperimentalSample{d, std::vector<std::vector<int>>(3)};
    for (const auto& [cell, mass] : t.entries()) {
        s.obs->records.push_back({*cell.x, *cell.y});
        for (int k = 0; k < 3; ++k) s.exp->arms[static_cast<std::size_t>(k)].push_back(cell.y_vec[static_cast<std::size_t>(k)]);
    }
    const auto pop = estimate_once(d, empirical(s), preset_mite(d), three_way_event(d, 0, 0, 1), EstimateMode::Bound);
    CHECK(pop.used);
    BootstrapConfig cfg;
    cfg.replicates = 10;
    const auto r = bootstrap(SampleSet{s.exp, std::nullopt}, {}, three_way_event(d, 0, 0, 1), cfg);
    CHECK(r.excluded == 0);
    CHECK(r.used == 10);

    const auto exact = estimate_once(d, exact_sources(t, true, false), {}, three_way_event(d, 0, 0, 1), EstimateMode::Identify);
    CHECK(exact.used);
    CHECK(std::abs(exact.lower - 1.0 / 7) < 1e-12);
}

TEST_CASE("bootstrap failure when nothing is usable") {
    const Dims d(2, 3);
    SampleSet s;
    s.exp = ExperimentalSample{d, {{2, 2, 2}, {0, 0, 0}}};
    BootstrapConfig cfg;
    cfg.replicates = 5;
    Event e;
    e.po = {PoConstraint::equals(0, 2)};
    CHECK_THROWS_AS(bootstrap(s, preset("mtr", d), build_event_query(d, e), cfg), BootstrapFailure);
    cfg.mode = EstimateMode::Identify;
    CHECK_THROWS_AS(bootstrap(s, {}, build_event_query(d, e), cfg), BootstrapFailure);
}

TEST_CASE("simulation endpoints approach the population values") {
    const auto t = bounding_truth();
    const Dims& d = t.dims();
    const auto q = three_way_event(d, 0, 0, 1);
    const double population = bound(d, exact_sources(t, true, true), {}, q).upper;
    SimulationConfig cfg;
    cfg.reps = 20;
    cfg.seed = 11;
    double prev_width = 1e9;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        cfg.n = n;
        const auto r = simulate(t, {}, q, cfg);
        CHECK(r.used + r.excluded == 20);
        std::vector<double> errs;
        for (const auto& rep : r.replicates)
            if (rep.used) errs.push_back(std::abs(rep.upper - population));
        if (n == 10000) CHECK(quantile(errs, 0.5) < 0.01);
        CHECK(r.upper.width() < prev_width);
        prev_width = r.upper.width();
    }
}

TEST_CASE("simulate configuration") {
    const auto t = identification_truth();
    const Dims& d = t.dims();
    SimulationConfig cfg;
    cfg.mode = EstimateMode::Identify;
    cfg.reps = 3;
    cfg.n = 500;
    CHECK_THROWS_AS(simulate(t, {}, three_way_event(d, 0, 0, 1), cfg), ConfigError);
    cfg.use_observational = false;
    const auto r = simulate(t, {}, three_way_event(d, 0, 0, 1), cfg);
    CHECK(r.replicates.size() == 3);
    for (const auto& rep : r.replicates) CHECK(rep.lower == rep.upper);
    const auto again = simulate(t, {}, three_way_event(d, 0, 0, 1), cfg);
    CHECK(again.upper.mean == r.upper.mean);
}

TEST_CASE("replicates with empty evidence cells are excluded in bound mode") {
    const Dims d(2, 2);
    SampleSet s;
    // One record carries the evidence; most resamples miss it.
    s.obs = ObservationalSample{d, {{0, 0}, {0, 1}, {1, 0}, {0, 0}, {0, 1}, {1, 0}, {0, 0}, {0, 1}, {1, 0}, {1, 1}}};
    BootstrapConfig cfg;
    cfg.replicates = 40;
    cfg.seed = 3;
    const auto r = bootstrap(s, {}, build_posterior_effect_query(d, 1, 0, {1, 1}), cfg);
    CHECK(r.excluded > 0);
    CHECK(r.used + r.excluded == 40);
    for (const auto& rep : r.replicates)
        if (!rep.used) CHECK(rep.note.find("P(X = 1, Y = 1)") != std::string::npos);
}
