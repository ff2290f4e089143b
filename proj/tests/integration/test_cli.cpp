#include <doctest.h>

#include "support.hpp"

#include <commands.hpp>
#include <inputs.hpp>
#include <pobounds/errors.hpp>
#include <pobounds/estimate.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace pobounds;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
    Json report() const { return Json::parse(out); }
};

Run run_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("pobounds-cli-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string exp_csv(const ExperimentalSample& s) {
    std::string text = "arm,y\n";
    for (std::size_t k = 0; k < s.arms.size(); ++k)
        for (int y : s.arms[k]) text += std::to_string(k) + "," + std::to_string(y) + "\n";
    return text;
}

std::string obs_csv(const ObservationalSample& s) {
    std::string text = "x,y\n";
    for (const auto& r : s.records) text += std::to_string(r.x) + "," + std::to_string(r.y) + "\n";
    return text;
}

const std::string kEvent001 = R"({"kind":"event","po":[{"index":0,"eq":0},{"index":1,"eq":0},{"index":2,"eq":1}]})";

}  // namespace

TEST_CASE("bound on population files") {
    const auto r = run_cli({"bound", "--dims", "3,3", "--exp", data_path("examples/monotone_bounding_exp.json"), "--obs",
                            data_path("examples/monotone_bounding_obs.json"), "--assume", "mtr", "--query",
                            data_path("examples/query_pns3.json"), "--witnesses"});
    REQUIRE(r.code == cli::kOk);
    const auto j = r.report();
    CHECK(j["status"] == "ok");
    CHECK(std::abs(j["upper"].get<double>() - 0.167) < 0.01);
    CHECK(j["witnesses"]["upper"].is_array());
    CHECK(fs::path(j["config"]["exp"].get<std::string>()).is_absolute());
}

TEST_CASE("bound on sampled CSV records with bootstrap is reproducible") {
    TempDir dir;
    const auto t = bounding_truth();
    const auto es = sample_from_truth(t, 400, 5, SampleKind::Experimental);
    const auto os = sample_from_truth(t, 400, 5, SampleKind::Observational);
    const auto e = dir.write("exp.csv", exp_csv(*es.exp));
    const auto o = dir.write("obs.csv", obs_csv(*os.obs));
    const std::vector<std::string> args{"bound", "--dims", "3,3", "--exp", e, "--obs", o, "--query", kEvent001,
                                        "--bootstrap", "30", "--seed", "7"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
    CHECK(a.report()["bootstrap"]["used"].get<int>() + a.report()["bootstrap"]["excluded"].get<int>() == 30);

    auto c_args = args;
    c_args.push_back("--threads");
    c_args.push_back("3");
    CHECK(run_cli(c_args).out == a.out);
}

TEST_CASE("a report's config replays to the same result") {
    TempDir dir;
    const auto first = run_cli({"bound", "--dims", "3,3", "--exp", data_path("examples/monotone_bounding_exp.json"), "--obs",
                                data_path("examples/monotone_bounding_obs.json"), "--assume", "pairwise(2,1)", "--query",
                                kEvent001});
    REQUIRE(first.code == cli::kOk);
    const auto report = dir.write("report.json", first.out);
    const auto again = run_cli({"--config", report});
    REQUIRE(again.code == cli::kOk);
    CHECK(again.out == first.out);

    const auto out_path = dir.path("written.json");
    CHECK(run_cli({"--config", report, "--out", out_path}).code == cli::kOk);
    std::ifstream in(out_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == first.out);
}

TEST_CASE("usage and data errors exit 1") {
    TempDir dir;
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"bound", "--dims", "3,3", "--query", kEvent001}).code == cli::kUsage);
    CHECK(run_cli({"bound", "--bogus"}).code == cli::kUsage);
    const auto exp = data_path("examples/monotone_bounding_exp.json");
    const auto pe = R"({"kind":"posterior_effect","i":1,"j":0,"given":{"x":2,"y":2}})";
    const auto cond = run_cli({"bound", "--dims", "3,3", "--exp", exp, "--query", pe});
    CHECK(cond.code == cli::kUsage);
    CHECK(cond.err.find("observational") != std::string::npos);
    CHECK(run_cli({"bound", "--dims", "3,3", "--exp", exp, "--query", kEvent001, "--bootstrap", "5"}).code == cli::kUsage);
    CHECK(run_cli({"bound", "--dims", "3,3", "--exp", dir.path("missing.csv"), "--query", kEvent001}).code == cli::kUsage);
    const auto bad_json = dir.write("bad.json", "{\"matrix\": [[1,0,0],");
    CHECK(run_cli({"bound", "--dims", "3,3", "--exp", bad_json, "--query", kEvent001}).code == cli::kUsage);
}

TEST_CASE("CSV errors name their location") {
    TempDir dir;
    const auto bad = dir.write("bad.csv", "x,y\n0,5\n");
    const auto r = run_cli({"bound", "--dims", "3,3", "--obs", bad, "--query", kEvent001});
    CHECK(r.code == cli::kUsage);
    CHECK(r.err.find("row 1") != std::string::npos);
    const auto col = dir.write("col.csv", "x,z\n0,1\n");
    const auto rc = run_cli({"bound", "--dims", "3,3", "--obs", col, "--query", kEvent001});
    CHECK(rc.err.find("unknown column 'z'") != std::string::npos);

    const auto two = cli::parse_observational_csv("x,y\n0,1\n1,0\n", Dims(2, 2));
    CHECK(two.records == std::vector<Record>{{0, 1}, {1, 0}});
    CHECK_THROWS_AS(cli::parse_observational_csv("x,y\n0,1\n2,a\n", Dims(3, 3)), ParseError);
    CHECK(cli::load_assumption_spec(R"({"preset":"mite"})")["preset"] == "mite");
    CHECK(parse_assumptions(cli::load_assumption_spec(R"({"preset":"mite"})"), Dims(3, 3)).terms.size() == 1);
}

TEST_CASE("contradictory assumptions exit 2 with monotone diagnostics") {
    TempDir dir;
    const auto exp = dir.write("exp.json", R"({"matrix":[[0,0,1],[1,0,0]]})");
    const auto r = run_cli({"bound", "--dims", "2,3", "--exp", exp, "--assume", "mtr", "--query",
                            R"({"kind":"event","po":[{"index":0,"eq":2}]})"});
    CHECK(r.code == cli::kInfeasible);
    const auto j = r.report();
    CHECK(j["status"] == "infeasible");
    bool monotone = false;
    for (const auto& tag : j["diagnostics"]["certificate"]) monotone = monotone || tag.get<std::string>().rfind("monotone", 0) == 0;
    CHECK(monotone);
}

TEST_CASE("identify paths") {
    TempDir dir;
    const auto pe = R"({"kind":"posterior_effect","i":1,"j":0,"given":{"x":2,"y":2}})";
    const auto obs = run_cli({"identify", "--dims", "3,3", "--obs", data_path("examples/identification_obs.json"), "--query", pe});
    REQUIRE(obs.code == cli::kOk);
    CHECK(std::abs(obs.report()["value"].get<double>() - 1.0 / 3) < 1e-9);
    CHECK(obs.err.find("exogeneity") != std::string::npos);

    const auto exp = run_cli({"identify", "--dims", "3,3", "--exp", data_path("examples/identification_exp.json"), "--query", kEvent001});
    REQUIRE(exp.code == cli::kOk);
    CHECK(std::abs(exp.report()["value"].get<double>() - 1.0 / 7) < 1e-12);

    const auto both = run_cli({"identify", "--dims", "3,3", "--exp", data_path("examples/identification_exp.json"), "--obs",
                               data_path("examples/identification_obs.json"), "--query", kEvent001});
    CHECK(both.code == cli::kUsage);
    CHECK(both.err.find("not both") != std::string::npos);

    const auto bad = dir.write("bad.json", R"({"matrix":[[0,1],[1,0]]})");
    const auto r = run_cli({"identify", "--dims", "2,2", "--exp", bad, "--query", R"({"kind":"event","po":[{"index":0,"eq":0}]})"});
    CHECK(r.code == cli::kMiteIncompatible);
    CHECK(r.report()["diagnostics"]["violations"].size() == 1);

    const auto uniform = dir.write("uniform.json", R"({"matrix":[["1/3","1/3","1/3"],["1/3","1/3","1/3"]]})");
    const auto u = run_cli({"identify", "--dims", "2,3", "--exp", uniform, "--witnesses", "--query",
                            R"({"kind":"event","po":[{"index":0,"eq":0}]})"});
    REQUIRE(u.code == cli::kOk);
    for (const auto& cell : u.report()["joint"]) CHECK(cell["y_vec"][0] == cell["y_vec"][1]);
}

TEST_CASE("simulate") {
    const auto truth = data_path("settings/identification.json");
    const auto r = run_cli({"simulate", "--truth", truth, "--n", "300", "--reps", "1", "--seed", "3", "--mode", "identify",
                            "--sources", "exp", "--query", kEvent001, "--replicates"});
    REQUIRE(r.code == cli::kOk);
    const auto j = r.report();
    CHECK(j["simulation"]["replicates"].size() == 1);
    CHECK(j["simulation"]["upper"]["ci"][0] == j["simulation"]["upper"]["ci"][1]);
    CHECK(run_cli({"simulate", "--truth", truth, "--mode", "identify", "--query", kEvent001}).code == cli::kUsage);
    CHECK(run_cli({"simulate", "--truth", truth, "--mode", "guess", "--query", kEvent001}).code == cli::kUsage);

    TempDir dir;
    const auto bad = dir.write("truth.json", R"({"dims":[2,2],"cells":[{"y_vec":[0,1],"x":0,"mass":0.4}]})");
    CHECK(run_cli({"simulate", "--truth", bad, "--query", R"({"kind":"event"})"}).code == cli::kUsage);
}
