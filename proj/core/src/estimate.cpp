#include "pobounds/estimate.hpp"

#include "pobounds/errors.hpp"
#include "pobounds/identify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

namespace pobounds {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream};
    return std::mt19937_64(seq);
}

// Runs fn(i) for i in [0, count) over a small thread pool. Results land in
// index order; the lowest-index exception is rethrown.
template <class Fn>
std::vector<ReplicateResult> run_indexed(std::size_t count, unsigned threads, Fn fn) {
    std::vector<ReplicateResult> results(count);
    std::vector<std::exception_ptr> errors(count);
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

EstimateSummary collect(std::vector<ReplicateResult> replicates, double level) {
    EstimateSummary summary;
    std::vector<double> lows;
    std::vector<double> highs;
    for (const auto& r : replicates) {
        if (!r.used) {
            ++summary.excluded;
            continue;
        }
        lows.push_back(r.lower);
        highs.push_back(r.upper);
    }
    summary.used = lows.size();
    if (summary.used == 0)
        throw BootstrapFailure("all " + std::to_string(replicates.size()) + " replicates were excluded" +
                               (replicates.empty() ? std::string() : ": " + replicates.front().note));
    summary.lower = summarize(lows, level);
    summary.upper = summarize(highs, level);
    summary.replicates = std::move(replicates);
    return summary;
}

std::vector<double> po_marginal(const SparseJointPO& truth, int k) {
    std::vector<double> p(static_cast<std::size_t>(truth.dims().d_y()), 0.0);
    for (const auto& [cell, mass] : truth.entries()) p[static_cast<std::size_t>(cell.y_vec[static_cast<std::size_t>(k)])] += mass;
    for (double& v : p) v = std::max(v, 0.0);
    return p;
}

}  // namespace

std::size_t ExperimentalSample::size() const {
    std::size_t n = 0;
    for (const auto& arm : arms) n += arm.size();
    return n;
}

void ExperimentalSample::validate() const {
    if (arms.size() != static_cast<std::size_t>(dims.d_x()))
        throw ShapeError("experimental sample has " + std::to_string(arms.size()) + " arms, expected " +
                         std::to_string(dims.d_x()));
    for (std::size_t k = 0; k < arms.size(); ++k)
        for (std::size_t i = 0; i < arms[k].size(); ++i)
            if (arms[k][i] < 0 || arms[k][i] >= dims.d_y())
                throw RangeError("arm " + std::to_string(k) + " record " + std::to_string(i) + ": Y = " +
                                 std::to_string(arms[k][i]) + " out of range");
}

void ObservationalSample::validate() const {
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.x < 0 || r.x >= dims.d_x() || r.y < 0 || r.y >= dims.d_y())
            throw RangeError("record " + std::to_string(i) + ": (X, Y) = (" + std::to_string(r.x) + ", " +
                             std::to_string(r.y) + ") out of range");
    }
}

ExperimentalMarginals empirical_experimental(const ExperimentalSample& sample) {
    sample.validate();
    const Dims& dims = sample.dims;
    std::vector<double> table(static_cast<std::size_t>(dims.d_x() * dims.d_y()), 0.0);
    for (int k = 0; k < dims.d_x(); ++k) {
        const auto& arm = sample.arms[static_cast<std::size_t>(k)];
        if (arm.empty()) throw InsufficientDataError("experimental arm " + std::to_string(k) + " has no records");
        const double n = static_cast<double>(arm.size());
        std::vector<std::size_t> counts(static_cast<std::size_t>(dims.d_y()), 0);
        for (int y : arm) ++counts[static_cast<std::size_t>(y)];
        for (int j = 0; j < dims.d_y(); ++j)
            table[static_cast<std::size_t>(k * dims.d_y() + j)] = static_cast<double>(counts[static_cast<std::size_t>(j)]) / n;
    }
    return ExperimentalMarginals(dims, std::move(table));
}

ObservationalJoint empirical_observational(const ObservationalSample& sample) {
    sample.validate();
    const Dims& dims = sample.dims;
    if (sample.records.empty()) throw InsufficientDataError("observational sample has no records");
    std::vector<std::size_t> counts(static_cast<std::size_t>(dims.d_x() * dims.d_y()), 0);
    for (const auto& r : sample.records) ++counts[static_cast<std::size_t>(r.x * dims.d_y() + r.y)];
    std::vector<double> table(counts.size());
    const double n = static_cast<double>(sample.records.size());
    for (std::size_t i = 0; i < counts.size(); ++i) table[i] = static_cast<double>(counts[i]) / n;
    return ObservationalJoint(dims, std::move(table));
}

DataSources empirical(const SampleSet& samples) {
    DataSources data;
    if (samples.exp) data.exp = empirical_experimental(*samples.exp);
    if (samples.obs) data.obs = empirical_observational(*samples.obs);
    return data;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InsufficientDataError("quantile of an empty set");
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

EndpointSummary summarize(std::span<const double> values, double level) {
    if (values.empty()) throw InsufficientDataError("nothing to summarize");
    std::vector<double> v(values.begin(), values.end());
    EndpointSummary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    const double tail = (1.0 - level) / 2.0;
    s.ci_lower = quantile(v, tail);
    s.ci_upper = quantile(v, 1.0 - tail);
    return s;
}

ReplicateResult estimate_once(const Dims& dims, const DataSources& data, const AssumptionSet& assumptions,
                              const QuerySpec& query, EstimateMode mode, const BoundOptions& options) {
    ReplicateResult r;
    if (mode == EstimateMode::Bound) {
        BoundResult b;
        try {
            b = bound(dims, data, assumptions, query, options);
        } catch (const UndefinedConditionalError& e) {
            r.note = e.what();
            return r;
        }
        if (b.status != BoundStatus::Ok) {
            r.note = "infeasible";
            return r;
        }
        r.used = true;
        r.lower = b.lower;
        r.upper = b.upper;
        return r;
    }
    try {
        double value = 0.0;
        if (data.exp) {
            value = evaluate(identify_experimental(*data.exp), query);
        } else if (data.obs) {
            value = evaluate(identify_observational(*data.obs), query, &*data.obs);
        } else {
            throw ConfigError("identification needs a data source");
        }
        r.used = true;
        r.lower = r.upper = value;
    } catch (const MiteIncompatibleError& e) {
        r.note = e.what();
    } catch (const UndefinedConditionalError& e) {
        r.note = e.what();
    }
    return r;
}

EstimateSummary bootstrap(const SampleSet& samples, const AssumptionSet& assumptions, const QuerySpec& query,
                          const BootstrapConfig& config) {
    if (config.replicates < 1) throw RangeError("bootstrap needs at least one replicate");
    if (!samples.exp && !samples.obs) throw ConfigError("bootstrap needs raw records");
    const Dims dims = samples.exp ? samples.exp->dims : samples.obs->dims;
    if (samples.exp) {
        samples.exp->validate();
        for (std::size_t k = 0; k < samples.exp->arms.size(); ++k)
            if (samples.exp->arms[k].empty())
                throw InsufficientDataError("experimental arm " + std::to_string(k) + " has no records");
    }
    if (samples.obs) {
        samples.obs->validate();
        if (samples.obs->records.empty()) throw InsufficientDataError("observational sample has no records");
    }

    auto replicate = [&](std::size_t rep) {
        std::mt19937_64 rng = stream_rng(config.seed, rep, 0);
        SampleSet drawn;
        if (samples.exp) {
            ExperimentalSample s{dims, {}};
            for (const auto& arm : samples.exp->arms) {
                std::uniform_int_distribution<std::size_t> pick(0, arm.size() - 1);
                std::vector<int> out(arm.size());
                for (auto& y : out) y = arm[pick(rng)];
                s.arms.push_back(std::move(out));
            }
            drawn.exp = std::move(s);
        }
        if (samples.obs) {
            const auto& rec = samples.obs->records;
            std::uniform_int_distribution<std::size_t> pick(0, rec.size() - 1);
            ObservationalSample s{dims, std::vector<Record>(rec.size())};
            for (auto& r : s.records) r = rec[pick(rng)];
            drawn.obs = std::move(s);
        }
        return estimate_once(dims, empirical(drawn), assumptions, query, config.mode, config.bound_options);
    };
    return collect(run_indexed(config.replicates, config.threads, replicate), config.level);
}

SampleSet sample_from_truth(const SparseJointPO& truth, std::size_t n, std::uint64_t seed, SampleKind kind) {
    const Dims& dims = truth.dims();
    SampleSet set;
    if (kind == SampleKind::Experimental) {
        ExperimentalSample s{dims, {}};
        for (int k = 0; k < dims.d_x(); ++k) {
            auto p = po_marginal(truth, k);
            std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(k), 1);
            std::discrete_distribution<int> draw(p.begin(), p.end());
            std::vector<int> arm(n);
            for (auto& y : arm) y = draw(rng);
            s.arms.push_back(std::move(arm));
        }
        set.exp = std::move(s);
        return set;
    }
    if (!truth.entries().empty() && !truth.has_treatment())
        throw ConfigError("observational sampling needs a truth indexed by treatment");
    const auto obs = observational_joint(truth);
    std::vector<double> weights;
    for (int x = 0; x < dims.d_x(); ++x)
        for (int y = 0; y < dims.d_y(); ++y) weights.push_back(std::max(obs.at(x, y), 0.0));
    std::mt19937_64 rng = stream_rng(seed, 0, 2);
    std::discrete_distribution<int> draw(weights.begin(), weights.end());
    ObservationalSample s{dims, std::vector<Record>(n)};
    for (auto& r : s.records) {
        const int cell = draw(rng);
        r = Record{cell / dims.d_y(), cell % dims.d_y()};
    }
    set.obs = std::move(s);
    return set;
}

EstimateSummary simulate(const SparseJointPO& truth, const AssumptionSet& assumptions, const QuerySpec& query,
                         const SimulationConfig& config) {
    truth.validate();
    if (!config.use_experimental && !config.use_observational) throw ConfigError("simulation needs a data source");
    if (config.mode == EstimateMode::Identify && config.use_experimental && config.use_observational)
        throw ConfigError("identification takes either experimental or observational data, not both");
    if (config.reps < 1) throw RangeError("simulation needs at least one repetition");
    const Dims& dims = truth.dims();

    auto replicate = [&](std::size_t rep) {
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(rep)};
        std::uint64_t parts[2];
        std::uint32_t words[4];
        seq.generate(words, words + 4);
        parts[0] = (std::uint64_t{words[0]} << 32) | words[1];
        parts[1] = (std::uint64_t{words[2]} << 32) | words[3];
        SampleSet drawn;
        if (config.use_experimental) drawn.exp = sample_from_truth(truth, config.n, parts[0], SampleKind::Experimental).exp;
        if (config.use_observational)
            drawn.obs = sample_from_truth(truth, config.n, parts[1], SampleKind::Observational).obs;
        DataSources data;
        try {
            data = empirical(drawn);
        } catch (const InsufficientDataError& e) {
            ReplicateResult r;
            r.note = e.what();
            return r;
        }
        return estimate_once(dims, data, assumptions, query, config.mode, config.bound_options);
    };
    return collect(run_indexed(config.reps, config.threads, replicate), config.level);
}

}  // namespace pobounds
