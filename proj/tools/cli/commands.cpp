#include "commands.hpp"

#include "inputs.hpp"

#include <pobounds/errors.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace pobounds::cli {

namespace {

std::string absolute_or_empty(const std::string& path) {
    if (path.empty()) return path;
    return std::filesystem::absolute(path).lexically_normal().string();
}

struct Loaded {
    Dims dims;
    std::optional<ExperimentalInput> exp;
    std::optional<ObservationalInput> obs;

    DataSources sources() const {
        DataSources d;
        if (exp) d.exp = exp->distribution;
        if (obs) d.obs = obs->distribution;
        return d;
    }

    SampleSet samples() const {
        if ((exp && !exp->sample) || (obs && !obs->sample))
            throw ConfigError("--bootstrap needs raw CSV records; pre-aggregated JSON distributions cannot be resampled");
        SampleSet s;
        if (exp) s.exp = exp->sample;
        if (obs) s.obs = obs->sample;
        return s;
    }
};

Loaded load_data(const Options& o) {
    if (o.dims.empty()) throw ConfigError("--dims is required");
    Loaded data{parse_dims_flag(o.dims), std::nullopt, std::nullopt};
    if (o.exp_path.empty() && o.obs_path.empty()) throw ConfigError("at least one of --exp or --obs is required");
    if (!o.exp_path.empty()) data.exp = load_experimental(o.exp_path, data.dims);
    if (!o.obs_path.empty()) data.obs = load_observational(o.obs_path, data.dims);
    return data;
}

QuerySpec load_query(const Options& o, const Dims& dims) {
    if (o.query.is_null()) throw ConfigError("--query is required");
    return parse_query(o.query, dims);
}

Json base_report(const Options& o, const QuerySpec& query) {
    Json report;
    report["config"] = to_config(o);
    report["query"] = describe_query(query);
    return report;
}

BootstrapConfig bootstrap_config(const Options& o, EstimateMode mode, unsigned threads) {
    BootstrapConfig c;
    c.replicates = o.bootstrap;
    c.seed = o.seed;
    c.mode = mode;
    c.threads = threads;
    if (o.slack) c.bound_options.slack = o.slack;
    return c;
}

void attach_warnings(Outcome& outcome, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) outcome.warnings.push_back(w);
    if (!outcome.warnings.empty()) outcome.report["warnings"] = outcome.warnings;
}

}  // namespace

Json to_config(const Options& o) {
    Json c{{"command", o.command}};
    if (!o.dims.empty()) c["dims"] = o.dims;
    if (!o.exp_path.empty()) c["exp"] = o.exp_path;
    if (!o.obs_path.empty()) c["obs"] = o.obs_path;
    if (!o.assume.is_null()) c["assume"] = o.assume;
    if (!o.query.is_null()) c["query"] = o.query;
    c["exogeneity"] = o.exogeneity;
    c["bootstrap"] = o.bootstrap;
    c["seed"] = o.seed;
    c["slack"] = o.slack ? Json(*o.slack) : Json(nullptr);
    c["witnesses"] = o.witnesses;
    if (o.command == "simulate") {
        c["truth"] = o.truth_path;
        c["n"] = o.n;
        c["reps"] = o.reps;
        c["mode"] = o.mode;
        c["sources"] = o.sources;
        c["replicates"] = o.replicates;
    }
    return c;
}

Options from_config(const Json& config) {
    const Json& c = config.contains("config") ? config["config"] : config;
    if (!c.is_object() || !c.contains("command")) throw ParseError("--config: expected a report or a config object");
    Options o;
    try {
        o.command = c.at("command").get<std::string>();
        o.dims = c.value("dims", std::string());
        o.exp_path = c.value("exp", std::string());
        o.obs_path = c.value("obs", std::string());
        if (c.contains("assume")) o.assume = c["assume"];
        if (c.contains("query")) o.query = c["query"];
        o.exogeneity = c.value("exogeneity", false);
        o.bootstrap = c.value("bootstrap", std::size_t{0});
        o.seed = c.value("seed", std::uint64_t{0});
        if (c.contains("slack") && !c["slack"].is_null()) o.slack = c["slack"].get<double>();
        o.witnesses = c.value("witnesses", false);
        o.truth_path = c.value("truth", std::string());
        o.n = c.value("n", std::size_t{1000});
        o.reps = c.value("reps", std::size_t{100});
        o.mode = c.value("mode", std::string("bound"));
        o.sources = c.value("sources", std::string("both"));
        o.replicates = c.value("replicates", false);
    } catch (const Json::exception& e) {
        throw ParseError(std::string("--config: ") + e.what());
    }
    return o;
}

Outcome cmd_bound(const Options& o, unsigned threads) {
    const Loaded data = load_data(o);
    AssumptionSet assumptions = o.assume.is_null() ? AssumptionSet{} : parse_assumptions(o.assume, data.dims);
    if (o.exogeneity) assumptions.exogeneity = true;
    const QuerySpec query = load_query(o, data.dims);

    BoundOptions options;
    if (o.slack) options.slack = o.slack;
    const BoundResult result = bound(data.dims, data.sources(), assumptions, query, options);

    Outcome outcome;
    outcome.report = base_report(o, query);
    outcome.report["assumptions"] = to_json(assumptions, data.dims);
    const Json fields = to_json(result, data.dims, o.witnesses);
    for (const auto& [key, value] : fields.items()) outcome.report[key] = value;
    if (result.status == BoundStatus::Infeasible) {
        outcome.exit_code = kInfeasible;
        return outcome;
    }
    if (o.bootstrap > 0) {
        const auto summary = bootstrap(data.samples(), assumptions, query, bootstrap_config(o, EstimateMode::Bound, threads));
        outcome.report["bootstrap"] = to_json(summary, false);
    }
    attach_warnings(outcome, result.warnings);
    return outcome;
}

Outcome cmd_identify(const Options& o, unsigned threads) {
    if (!o.exp_path.empty() && !o.obs_path.empty())
        throw ConfigError("identify takes --exp or --obs, not both: the experimental and observational formulas differ, pick one");
    const Loaded data = load_data(o);
    const QuerySpec query = load_query(o, data.dims);

    Outcome outcome;
    outcome.report = base_report(o, query);
    outcome.report["assumptions"] = Json{{"preset", "mite"}, {"exogeneity", data.obs.has_value()}};
    std::vector<std::string> warnings;
    if (data.obs) warnings.push_back("identification from observational data assumes exogeneity (Y_x independent of X)");

    std::optional<SparseJointPO> joint;
    double value = 0.0;
    try {
        if (data.exp) {
            joint = identify_experimental(data.exp->distribution);
            value = evaluate(*joint, query);
        } else {
            joint = identify_observational(data.obs->distribution);
            value = evaluate(*joint, query, &data.obs->distribution);
        }
    } catch (const MiteIncompatibleError&) {
        outcome.exit_code = kMiteIncompatible;
        outcome.report["status"] = "mite-incompatible";
        outcome.report["lower"] = nullptr;
        outcome.report["upper"] = nullptr;
        outcome.report["diagnostics"] = to_json(mite_compatibility_report(data.sources()));
        attach_warnings(outcome, warnings);
        return outcome;
    }
    outcome.report["status"] = "ok";
    outcome.report["value"] = value;
    outcome.report["lower"] = value;
    outcome.report["upper"] = value;
    if (o.witnesses) outcome.report["joint"] = to_json(*joint)["cells"];
    if (o.bootstrap > 0) {
        const auto summary =
            bootstrap(data.samples(), AssumptionSet{}, query, bootstrap_config(o, EstimateMode::Identify, threads));
        outcome.report["bootstrap"] = to_json(summary, false);
    }
    attach_warnings(outcome, warnings);
    return outcome;
}

Outcome cmd_simulate(const Options& o, unsigned threads) {
    if (o.truth_path.empty()) throw ConfigError("--truth is required");
    const SparseJointPO truth = parse_joint(read_json_file(o.truth_path));
    truth.validate();
    const Dims& dims = truth.dims();
    if (!o.dims.empty() && !(parse_dims_flag(o.dims) == dims)) throw ConfigError("--dims differs from the truth file's dims");

    SimulationConfig config;
    config.n = o.n;
    config.reps = o.reps;
    config.seed = o.seed;
    config.threads = threads;
    if (o.slack) config.bound_options.slack = o.slack;
    if (o.mode == "bound")
        config.mode = EstimateMode::Bound;
    else if (o.mode == "identify")
        config.mode = EstimateMode::Identify;
    else
        throw ConfigError("--mode must be 'bound' or 'identify'");
    if (o.sources == "both") {
        config.use_experimental = config.use_observational = true;
    } else if (o.sources == "exp") {
        config.use_experimental = true;
        config.use_observational = false;
    } else if (o.sources == "obs") {
        config.use_experimental = false;
        config.use_observational = true;
    } else {
        throw ConfigError("--sources must be 'exp', 'obs' or 'both'");
    }

    AssumptionSet assumptions = o.assume.is_null() ? AssumptionSet{} : parse_assumptions(o.assume, dims);
    if (o.exogeneity) assumptions.exogeneity = true;
    const QuerySpec query = load_query(o, dims);

    Outcome outcome;
    outcome.report = base_report(o, query);
    outcome.report["assumptions"] = config.mode == EstimateMode::Identify
                                        ? Json{{"preset", "mite"}, {"exogeneity", !config.use_experimental}}
                                        : to_json(assumptions, dims);
    const EstimateSummary summary = simulate(truth, assumptions, query, config);
    outcome.report["status"] = "ok";
    outcome.report["lower"] = summary.lower.mean;
    outcome.report["upper"] = summary.upper.mean;
    outcome.report["simulation"] = to_json(summary, o.replicates);
    return outcome;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sharp bounds and identification for joint potential-outcome probabilities"};
    app.require_subcommand(0, 1);

    Options o;
    std::string config_path;
    std::string out_path;
    std::string assume_text;
    std::string query_text;
    unsigned threads = 0;
    app.add_option("--config", config_path, "Re-run the config echoed in a report");
    app.add_option("--out", out_path, "Write the report here instead of stdout");
    app.add_option("--threads", threads, "Worker threads for bootstrap and simulation (0: all cores)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--dims", o.dims, "Treatment and outcome levels as dX,dY");
        sub->add_option("--query", query_text, "Query JSON (file or inline)");
        sub->add_option("--bootstrap", o.bootstrap, "Bootstrap replicates (raw CSV inputs only)");
        sub->add_option("--seed", o.seed, "Seed for all randomness");
        sub->add_option("--out", out_path, "Write the report here instead of stdout");
        sub->add_option("--threads", threads, "Worker threads (0: all cores)");
        sub->add_flag("--witnesses", o.witnesses, "Include optimal distributions in the report");
    };

    CLI::App* bound_cmd = app.add_subcommand("bound", "Sharp bounds via linear programming");
    add_common(bound_cmd);
    bound_cmd->add_option("--exp", o.exp_path, "Experimental data: CSV arm,y or JSON matrix");
    bound_cmd->add_option("--obs", o.obs_path, "Observational data: CSV x,y or JSON matrix");
    bound_cmd->add_option("--assume", assume_text, "Preset name, assumption JSON file, or inline JSON");
    bound_cmd->add_flag("--exogeneity", o.exogeneity, "Impose Y_x independent of X");
    bound_cmd->add_option("--slack", o.slack, "Relax data equalities to |row - rhs| <= EPS");

    CLI::App* identify_cmd = app.add_subcommand("identify", "Point identification under MITE");
    add_common(identify_cmd);
    identify_cmd->add_option("--exp", o.exp_path, "Experimental data: CSV arm,y or JSON matrix");
    identify_cmd->add_option("--obs", o.obs_path, "Observational data: CSV x,y or JSON matrix");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Repeated sampling from a known joint distribution");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--truth", o.truth_path, "Joint distribution JSON")->required();
    simulate_cmd->add_option("--n", o.n, "Records per experimental arm and observational records");
    simulate_cmd->add_option("--reps", o.reps, "Repetitions");
    simulate_cmd->add_option("--mode", o.mode, "bound or identify");
    simulate_cmd->add_option("--sources", o.sources, "exp, obs or both");
    simulate_cmd->add_option("--assume", assume_text, "Preset name, assumption JSON file, or inline JSON");
    simulate_cmd->add_flag("--exogeneity", o.exogeneity, "Impose Y_x independent of X");
    simulate_cmd->add_option("--slack", o.slack, "Relax data equalities to |row - rhs| <= EPS");
    simulate_cmd->add_flag("--replicates", o.replicates, "List every repetition in the report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!config_path.empty()) {
            o = from_config(read_json_file(config_path));
        } else {
            if (bound_cmd->parsed()) o.command = "bound";
            else if (identify_cmd->parsed()) o.command = "identify";
            else if (simulate_cmd->parsed()) o.command = "simulate";
            else {
                err << app.help();
                return kUsage;
            }
            o.exp_path = absolute_or_empty(o.exp_path);
            o.obs_path = absolute_or_empty(o.obs_path);
            o.truth_path = absolute_or_empty(o.truth_path);
            if (!assume_text.empty()) o.assume = load_assumption_spec(assume_text);
            if (!query_text.empty()) o.query = load_query_spec(query_text);
        }

        Outcome outcome;
        if (o.command == "bound") outcome = cmd_bound(o, threads);
        else if (o.command == "identify") outcome = cmd_identify(o, threads);
        else if (o.command == "simulate") outcome = cmd_simulate(o, threads);
        else throw ConfigError("unknown command '" + o.command + "'");

        for (const auto& w : outcome.warnings) err << "warning: " << w << '\n';
        const std::string text = outcome.report.dump(2) + "\n";
        if (out_path.empty()) {
            out << text;
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw ConfigError("cannot write " + out_path);
            file << text;
        }
        return outcome.exit_code;
    } catch (const MiteIncompatibleError& e) {
        err << "error: " << e.what() << '\n';
        return kMiteIncompatible;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace pobounds::cli
