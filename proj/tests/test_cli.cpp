#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "banditsim/config.hpp"
#include "banditsim/experiment_io.hpp"

using namespace banditsim;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = "cli_tmp";

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

long line_count(const std::string& text) {
    long n = 0;
    for (char c : text) n += c == '\n' ? 1 : 0;
    return n;
}

int run_cli(const std::string& args) {
    const std::string command = std::string(BANDITSIM_CLI_PATH) + " " + args + " 2> " +
                                (kTmp / "stderr.txt").string();
    return std::system(command.c_str());
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("ConfigMap parses key = value lines with comments") {
    ConfigMap cfg = ConfigMap::from_string("a = 1\n# comment\n b = two # trailing\n\nc=3.5\n");
    CHECK(cfg.get_long("a", 0) == 1);
    CHECK(cfg.get_string("b", "") == "two");
    CHECK(cfg.get_double("c", 0.0) == doctest::Approx(3.5));
    cfg.finish();
}

TEST_CASE("ConfigMap rejects malformed input") {
    CHECK_THROWS(ConfigMap::from_string("novalue\n"));
    CHECK_THROWS(ConfigMap::from_string("a = 1\na = 2\n"));

    ConfigMap bad_int = ConfigMap::from_string("n = 1.5\n");
    CHECK_THROWS(bad_int.get_long("n", 0));

    ConfigMap missing = ConfigMap::from_string("");
    CHECK_THROWS(missing.require_string("preset"));
}

TEST_CASE("ConfigMap reports unknown keys by name") {
    ConfigMap cfg = ConfigMap::from_string("known = 1\nmystery_knob = 2\n");
    cfg.get_long("known", 0);
    try {
        cfg.finish();
        FAIL("expected finish() to throw");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("mystery_knob") != std::string::npos);
    }
}

TEST_CASE("resolve_experiment applies preset defaults and overrides") {
    io::ResolvedExperiment basic = io::resolve_experiment(
        ConfigMap::from_string("preset = simple-stationary\n"), io::ConfigKind::simulate);
    CHECK(basic.config.epochs == 100);
    CHECK(basic.config.window_capacity == 0);
    CHECK(basic.config.environment.n_actions == 18);
    CHECK(basic.config.environment.context_dim == 2);
    CHECK(basic.config.train.learning_rate == doctest::Approx(0.1));
    CHECK(basic.config.train.patience == 5);

    io::ResolvedExperiment drift = io::resolve_experiment(
        ConfigMap::from_string("preset = simple-drift\nepochs = 42\npolicy = falcon\n"),
        io::ConfigKind::simulate);
    CHECK(drift.config.epochs == 42);
    CHECK(drift.config.window_capacity == 4500);
    CHECK_FALSE(drift.config.environment.stationary);
    CHECK(drift.config.policy.kind == policy::PolicyKind::falcon);

    CHECK_THROWS(io::resolve_experiment(ConfigMap::from_string("preset = nope\n"),
                                        io::ConfigKind::simulate));
    CHECK_THROWS(io::resolve_experiment(
        ConfigMap::from_string("preset = simple-stationary\npolicy = dance\n"),
        io::ConfigKind::simulate));
    // Unknown keys are hard errors.
    CHECK_THROWS(io::resolve_experiment(
        ConfigMap::from_string("preset = simple-stationary\nepochz = 9\n"),
        io::ConfigKind::simulate));
    // simulate-only keys are unknown to analyze-iterations.
    CHECK_THROWS(io::resolve_experiment(
        ConfigMap::from_string("preset = simple-stationary\npolicy = greedy\n"),
        io::ConfigKind::analyze));
}

TEST_CASE("two-arm-alloc subcommand writes the documented table") {
    fs::remove_all(kTmp);
    fs::create_directories(kTmp);
    const fs::path out = kTmp / "alloc.csv";
    const int rc = run_cli("two-arm-alloc --n1 4 --n2 4 --s1 3 --s2 1 --sims 2000 --seed 5 --out " +
                           out.string());
    REQUIRE(rc == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("N1,N2,s1,s2,p_earlystop_arm2,p_ts_arm2,one_sided_pvalue", 0) == 0);
    CHECK(line_count(text) == 2);
    // Exhaustive path at these totals: allocation is exactly (0.75, 0.25).
    CHECK(text.find("4,4,3,1,0.25,") != std::string::npos);
    CHECK(fs::exists(out.string() + ".manifest"));

    // Same seed, byte-identical output.
    const fs::path out2 = kTmp / "alloc2.csv";
    REQUIRE(run_cli("two-arm-alloc --n1 4 --n2 4 --s1 3 --s2 1 --sims 2000 --seed 5 --out " +
                    out2.string()) == 0);
    CHECK(slurp(out2) == text);

    // Odd totals violate the balanced-split precondition.
    CHECK(run_cli("two-arm-alloc --n1 5 --n2 4 --s1 3 --s2 1 --out " + (kTmp / "odd.csv").string()) !=
          0);
}

TEST_CASE("two-arm-reward subcommand writes one row per round") {
    fs::create_directories(kTmp);
    const fs::path out = kTmp / "reward.csv";
    const int rc = run_cli(
        "two-arm-reward --mu1 0.6 --mu2 0.4 --horizon 50 --replications 5 --seed 3 --out " +
        out.string());
    REQUIRE(rc == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("round,cum_mean_reward_earlystop,cum_mean_reward_ts", 0) == 0);
    CHECK(line_count(text) == 51);
}

TEST_CASE("simulate subcommand resolves configs and is reproducible") {
    fs::create_directories(kTmp);
    write_file(kTmp / "sim.cfg",
               "preset = simple-stationary\n"
               "burn_in = 150\n"
               "epochs = 3\n"
               "epoch_size = 20\n"
               "pool_size = 60\n"
               "replications = 2\n"
               "max_rounds = 15\n"
               "seed = 11\n");
    const fs::path out = kTmp / "sim.csv";
    REQUIRE(run_cli("simulate --config " + (kTmp / "sim.cfg").string() + " --out " + out.string()) ==
            0);
    const std::string text = slurp(out);
    CHECK(text.rfind("replication,epoch,cum_reward,cum_regret,mean_regret,stop_iteration", 0) == 0);
    CHECK(line_count(text) == 1 + 2 * 3);
    CHECK(fs::exists(kTmp / "sim_summary.csv"));
    CHECK(fs::exists(kTmp / "sim.csv.manifest"));

    const fs::path out2 = kTmp / "sim_again.csv";
    REQUIRE(run_cli("simulate --config " + (kTmp / "sim.cfg").string() + " --out " + out2.string()) ==
            0);
    CHECK(slurp(out2) == text);

    // Unknown config keys fail loudly.
    write_file(kTmp / "bad.cfg", "preset = simple-stationary\nepohcs = 3\n");
    CHECK(run_cli("simulate --config " + (kTmp / "bad.cfg").string() + " --out " +
                  (kTmp / "bad.csv").string()) != 0);
    const std::string err = slurp(kTmp / "stderr.txt");
    CHECK(err.find("epohcs") != std::string::npos);
}

TEST_CASE("analyze-iterations subcommand writes histogram and truncation curves") {
    fs::create_directories(kTmp);
    write_file(kTmp / "analyze.cfg",
               "preset = simple-stationary\n"
               "burn_in = 200\n"
               "pool_size = 60\n"
               "n_fits = 8\n"
               "analysis_iterations = 6\n"
               "max_rounds = 15\n"
               "seed = 2\n");
    const fs::path out = kTmp / "analysis.csv";
    REQUIRE(run_cli("analyze-iterations --config " + (kTmp / "analyze.cfg").string() + " --out " +
                    out.string()) == 0);
    const std::string hist = slurp(kTmp / "analysis_stop_hist.csv");
    CHECK(hist.rfind("iteration,count", 0) == 0);
    const std::string curve = slurp(kTmp / "analysis_truncation.csv");
    CHECK(curve.rfind("iteration,mse,regret", 0) == 0);
    CHECK(line_count(curve) == 1 + 6 + 1);  // header + iterations 0..6
    CHECK(fs::exists(out.string() + ".manifest"));
}
