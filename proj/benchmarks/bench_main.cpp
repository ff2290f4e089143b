#include <pobounds/bounds.hpp>
#include <pobounds/estimate.hpp>
#include <pobounds/identify.hpp>
#include <pobounds/serialize.hpp>

#include <benchmark/benchmark.h>

#include <fstream>

using namespace pobounds;

namespace {

SparseJointPO load(const char* name) {
    std::ifstream in(std::string(POBOUNDS_BENCH_DATA_DIR) + "/settings/" + name);
    return parse_joint(Json::parse(in));
}

QuerySpec event001(const Dims& d) {
    Event e;
    e.po = {PoConstraint::equals(0, 0), PoConstraint::equals(1, 0), PoConstraint::equals(2, 1)};
    return build_event_query(d, e);
}

DataSources both(const SparseJointPO& truth) {
    return DataSources{experimental_marginals(truth), observational_joint(truth)};
}

void BM_BoundBoth(benchmark::State& state) {
    const auto truth = load("monotone_bounding.json");
    const Dims& d = truth.dims();
    const auto data = both(truth);
    const auto a = preset(state.range(0) ? "mtr" : "none", d);
    const auto q = event001(d);
    for (auto _ : state) benchmark::DoNotOptimize(bound(d, data, a, q));
}
BENCHMARK(BM_BoundBoth)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

// Cost of the solver alone on a random full-support joint, growing with
// the outcome levels at three treatments.
void BM_SimplexScaling(benchmark::State& state) {
    const Dims d(3, static_cast<int>(state.range(0)));
    std::vector<double> w(d.param_count());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>((i * 7919) % 13);
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    const auto joint = joint_from_params(d, w);
    const auto set = compile_problem(d, both(joint), preset_mtr(d));
    const auto obj = collapse_to_objective(build_moment_query(d, 2, 2, 0));
    const LpProblem problem{obj.coeffs, set, Sense::Maximize};
    for (auto _ : state) benchmark::DoNotOptimize(solve(problem));
    state.counters["vars"] = static_cast<double>(d.param_count());
    state.counters["rows"] = static_cast<double>(set.rows.size());
}
BENCHMARK(BM_SimplexScaling)->DenseRange(2, 5)->Unit(benchmark::kMillisecond);

void BM_IdentifyObservational(benchmark::State& state) {
    const auto truth = load("identification.json");
    const auto obs = observational_joint(truth);
    const auto q = build_posterior_effect_query(truth.dims(), 1, 0, {2, 2});
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(identify_observational(obs), q, &obs));
}
BENCHMARK(BM_IdentifyObservational)->Unit(benchmark::kMicrosecond);

void BM_Bootstrap(benchmark::State& state) {
    const auto truth = load("monotone_bounding.json");
    const Dims& d = truth.dims();
    SampleSet samples = sample_from_truth(truth, 1000, 1, SampleKind::Observational);
    samples.exp = sample_from_truth(truth, 1000, 1, SampleKind::Experimental).exp;
    BootstrapConfig cfg;
    cfg.replicates = 100;
    cfg.threads = static_cast<unsigned>(state.range(0));
    const auto q = event001(d);
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap(samples, {}, q, cfg));
}
BENCHMARK(BM_Bootstrap)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
