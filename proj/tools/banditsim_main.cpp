// banditsim - command-line front end for the bandit simulation pipelines.
// Subcommands: two-arm-alloc, two-arm-reward, simulate, analyze-iterations.
// All diagnostics go to stderr; outputs are CSV files plus a manifest that
// pins every resolved setting.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "banditsim/csv.hpp"
#include "banditsim/experiment_io.hpp"
#include "banditsim/runner.hpp"
#include "banditsim/stats.hpp"
#include "banditsim/two_arm.hpp"

namespace {

using namespace banditsim;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    if (values.empty()) throw std::runtime_error("empty list: '" + text + "'");
    return values;
}

struct TwoArmAllocOptions {
    long n1 = 100;
    long n2 = 100;
    std::string means1 = "0.5,0.55,0.6,0.7";
    std::string means2 = "0.5";
    std::string s1_list;
    std::string s2_list;
    double eta = 0.01;
    long sims = 100000;
    std::uint64_t seed = 1;
    double prior_alpha = 1.0;
    double prior_beta = 1.0;
    long exhaustive_limit = 60;
    std::string out;
};

int cmd_two_arm_alloc(const TwoArmAllocOptions& opt) {
    std::vector<long> s1_values;
    std::vector<long> s2_values;
    if (!opt.s1_list.empty() || !opt.s2_list.empty()) {
        if (opt.s1_list.empty() || opt.s2_list.empty())
            throw std::runtime_error("--s1 and --s2 must be given together");
        for (double v : parse_list(opt.s1_list)) s1_values.push_back(std::llround(v));
        for (double v : parse_list(opt.s2_list)) s2_values.push_back(std::llround(v));
    } else {
        for (double m : parse_list(opt.means1))
            s1_values.push_back(std::llround(m * static_cast<double>(opt.n1)));
        for (double m : parse_list(opt.means2))
            s2_values.push_back(std::llround(m * static_cast<double>(opt.n2)));
    }

    CsvWriter csv(opt.out);
    csv.header({"N1", "N2", "s1", "s2", "p_earlystop_arm2", "p_ts_arm2", "one_sided_pvalue"});
    std::uint64_t row = 0;
    for (long s1 : s1_values) {
        for (long s2 : s2_values) {
            const twoarm::TwoArmCounts counts{s1, opt.n1, s2, opt.n2};
            twoarm::validate(counts);

            twoarm::ArmAllocation earlystop;
            if (opt.n1 <= opt.exhaustive_limit && opt.n2 <= opt.exhaustive_limit) {
                earlystop = twoarm::allocation_prob_exhaustive(counts, opt.eta);
            } else {
                earlystop = twoarm::allocation_prob_montecarlo(counts, opt.eta, opt.sims,
                                                               derive_seed(opt.seed, 2 * row));
            }
            const twoarm::ArmAllocation ts = twoarm::ts_allocation_prob(
                counts, opt.prior_alpha, opt.prior_beta, opt.sims, derive_seed(opt.seed, 2 * row + 1));

            const double r1 = static_cast<double>(s1) / static_cast<double>(opt.n1);
            const double r2 = static_cast<double>(s2) / static_cast<double>(opt.n2);
            const double sigma = twoarm::sigma_delta(r1, r2, opt.n1, opt.n2);
            const double pvalue = sigma > 0.0 ? normal_cdf(-(r1 - r2) / sigma)
                                              : (r1 == r2 ? 0.5 : (r1 > r2 ? 0.0 : 1.0));

            csv.cell(opt.n1).cell(opt.n2).cell(s1).cell(s2);
            csv.cell(earlystop.p_arm2).cell(ts.p_arm2).cell(pvalue);
            csv.end_row();
            ++row;
        }
    }

    std::vector<std::pair<std::string, std::string>> entries{
        {"n1", std::to_string(opt.n1)},
        {"n2", std::to_string(opt.n2)},
        {"means1", opt.means1},
        {"means2", opt.means2},
        {"s1", opt.s1_list},
        {"s2", opt.s2_list},
        {"eta", format_double(opt.eta)},
        {"sims", std::to_string(opt.sims)},
        {"seed", std::to_string(opt.seed)},
        {"prior_alpha", format_double(opt.prior_alpha)},
        {"prior_beta", format_double(opt.prior_beta)},
        {"exhaustive_limit", std::to_string(opt.exhaustive_limit)},
        {"out", opt.out}};
    io::write_manifest(opt.out + ".manifest", "two-arm-alloc", std::move(entries));
    return 0;
}

struct TwoArmRewardOptions {
    double mu1 = 0.6;
    double mu2 = 0.4;
    long horizon = 2000;
    long replications = 200;
    double eta = 0.01;
    double prior_alpha = 1.0;
    double prior_beta = 1.0;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_two_arm_reward(const TwoArmRewardOptions& opt) {
    const twoarm::RewardCurves curves = twoarm::reward_comparison(
        opt.mu1, opt.mu2, opt.horizon, opt.replications, opt.eta, opt.prior_alpha, opt.prior_beta,
        opt.seed);

    CsvWriter csv(opt.out);
    csv.header({"round", "cum_mean_reward_earlystop", "cum_mean_reward_ts"});
    for (std::size_t t = 0; t < curves.earlystop.size(); ++t) {
        csv.cell(static_cast<long>(t + 1)).cell(curves.earlystop[t]).cell(curves.thompson[t]);
        csv.end_row();
    }

    std::vector<std::pair<std::string, std::string>> entries{
        {"mu1", format_double(opt.mu1)},
        {"mu2", format_double(opt.mu2)},
        {"horizon", std::to_string(opt.horizon)},
        {"replications", std::to_string(opt.replications)},
        {"eta", format_double(opt.eta)},
        {"prior_alpha", format_double(opt.prior_alpha)},
        {"prior_beta", format_double(opt.prior_beta)},
        {"seed", std::to_string(opt.seed)},
        {"out", opt.out}};
    io::write_manifest(opt.out + ".manifest", "two-arm-reward", std::move(entries));
    return 0;
}

struct RunOverrides {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long replications = 0;
};

io::ResolvedExperiment load_resolved(const RunOverrides& overrides, io::ConfigKind kind) {
    io::ResolvedExperiment resolved =
        io::resolve_experiment(ConfigMap::from_file(overrides.config_path), kind);
    if (overrides.seed_set) resolved.config.master_seed = overrides.seed;
    if (overrides.replications > 0)
        resolved.config.replications = static_cast<int>(overrides.replications);
    if (!overrides.out.empty()) resolved.out = overrides.out;
    if (resolved.out.empty())
        throw std::runtime_error("no output path: set 'out' in the config or pass --out");
    return resolved;
}

int cmd_simulate(const RunOverrides& overrides) {
    const io::ResolvedExperiment resolved = load_resolved(overrides, io::ConfigKind::simulate);

    std::cerr << "simulate: preset=" << resolved.preset << " replications="
              << resolved.config.replications << " epochs=" << resolved.config.epochs << "\n";
    const std::vector<run::MetricsLog> logs = run::run_replications(resolved.config);
    io::write_metrics_csv(resolved.out, logs);
    const std::string summary_path = io::derived_path(resolved.out, "_summary");
    io::write_summary_csv(summary_path, run::aggregate_replications(logs));

    auto entries = io::manifest_entries(resolved);
    entries.emplace_back("out", resolved.out);
    entries.emplace_back("summary_out", summary_path);
    if (!resolved.export_label_table.empty()) {
        const env::Environment environment = env::make_environment(resolved.config.environment);
        io::write_label_table_csv(resolved.export_label_table, environment);
        entries.emplace_back("export_label_table", resolved.export_label_table);
    }
    io::write_manifest(resolved.out + ".manifest", "simulate", std::move(entries));
    return 0;
}

int cmd_analyze_iterations(const RunOverrides& overrides) {
    const io::ResolvedExperiment resolved = load_resolved(overrides, io::ConfigKind::analyze);
    const run::ExperimentConfig& config = resolved.config;

    const env::Environment environment = env::make_environment(config.environment);
    Rng rng(config.master_seed);
    const run::HistoryBuffer buffer = run::run_burn_in(environment, config, rng);
    const gbt::Dataset data = buffer.to_dataset(environment.bank);

    std::cerr << "analyze-iterations: preset=" << resolved.preset << " n_fits=" << resolved.n_fits
              << " buffer=" << buffer.size() << "\n";

    std::map<int, long> histogram;
    for (int f = 0; f < resolved.n_fits; ++f) {
        gbt::TrainConfig train = config.train;
        train.seed = derive_seed(config.master_seed, 5000 + static_cast<std::uint64_t>(f));
        const gbt::TrainResult result = gbt::train_early_stopping(data, train);
        ++histogram[result.trace.best_iteration];
    }
    const std::string hist_path = io::derived_path(resolved.out, "_stop_hist");
    {
        CsvWriter csv(hist_path);
        csv.header({"iteration", "count"});
        const int max_it = histogram.empty() ? 0 : histogram.rbegin()->first;
        for (int it = 0; it <= max_it; ++it) {
            const auto found = histogram.find(it);
            csv.cell(it).cell(found == histogram.end() ? 0L : found->second);
            csv.end_row();
        }
    }

    const gbt::BoostedModel full_model =
        gbt::train_fixed_rounds(data, resolved.analysis_iterations, config.train);
    const run::TruncationCurve curve = run::evaluate_truncations(
        full_model, environment, 0, resolved.eval_contexts, derive_seed(config.master_seed, 777));
    const std::string curve_path = io::derived_path(resolved.out, "_truncation");
    {
        CsvWriter csv(curve_path);
        csv.header({"iteration", "mse", "regret"});
        for (std::size_t m = 0; m < curve.mse.size(); ++m) {
            csv.cell(static_cast<long>(m)).cell(curve.mse[m]).cell(curve.regret[m]);
            csv.end_row();
        }
    }

    auto entries = io::manifest_entries(resolved);
    entries.emplace_back("n_fits", std::to_string(resolved.n_fits));
    entries.emplace_back("analysis_iterations", std::to_string(resolved.analysis_iterations));
    entries.emplace_back("eval_contexts", std::to_string(resolved.eval_contexts));
    entries.emplace_back("stop_hist_out", hist_path);
    entries.emplace_back("truncation_out", curve_path);
    io::write_manifest(resolved.out + ".manifest", "analyze-iterations", std::move(entries));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bandit simulation toolkit"};
    app.require_subcommand(1);

    TwoArmAllocOptions alloc;
    CLI::App* alloc_cmd =
        app.add_subcommand("two-arm-alloc", "allocation probabilities in the two-armed case");
    alloc_cmd->add_option("--n1", alloc.n1, "arm 1 total (even)");
    alloc_cmd->add_option("--n2", alloc.n2, "arm 2 total (even)");
    alloc_cmd->add_option("--means1", alloc.means1, "comma list of arm 1 empirical means");
    alloc_cmd->add_option("--means2", alloc.means2, "comma list of arm 2 empirical means");
    alloc_cmd->add_option("--s1", alloc.s1_list, "comma list of arm 1 success counts (overrides means)");
    alloc_cmd->add_option("--s2", alloc.s2_list, "comma list of arm 2 success counts");
    alloc_cmd->add_option("--eta", alloc.eta, "two-step learning rate");
    alloc_cmd->add_option("--sims", alloc.sims, "Monte-Carlo samples per estimate");
    alloc_cmd->add_option("--seed", alloc.seed, "master seed");
    alloc_cmd->add_option("--prior-alpha", alloc.prior_alpha, "Beta prior alpha");
    alloc_cmd->add_option("--prior-beta", alloc.prior_beta, "Beta prior beta");
    alloc_cmd->add_option("--exhaustive-limit", alloc.exhaustive_limit,
                          "largest per-arm total enumerated exactly");
    alloc_cmd->add_option("--out", alloc.out, "output CSV path")->required();

    TwoArmRewardOptions reward;
    CLI::App* reward_cmd =
        app.add_subcommand("two-arm-reward", "cumulative reward: early stopping vs Thompson");
    reward_cmd->add_option("--mu1", reward.mu1, "true mean of arm 1");
    reward_cmd->add_option("--mu2", reward.mu2, "true mean of arm 2");
    reward_cmd->add_option("--horizon", reward.horizon, "rounds per replication");
    reward_cmd->add_option("--replications", reward.replications, "independent replications");
    reward_cmd->add_option("--eta", reward.eta, "two-step learning rate");
    reward_cmd->add_option("--prior-alpha", reward.prior_alpha, "Beta prior alpha");
    reward_cmd->add_option("--prior-beta", reward.prior_beta, "Beta prior beta");
    reward_cmd->add_option("--seed", reward.seed, "master seed");
    reward_cmd->add_option("--out", reward.out, "output CSV path")->required();

    RunOverrides sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "epoch-scheduled bandit simulation");
    sim_cmd->add_option("--config", sim.config_path, "experiment config file")->required();
    sim_cmd->add_option("--out", sim.out, "metrics CSV path (overrides config)");
    sim_cmd->add_option("--seed", sim.seed, "master seed (overrides config)")
        ->each([&sim](const std::string&) { sim.seed_set = true; });
    sim_cmd->add_option("--replications", sim.replications, "replications (overrides config)");

    RunOverrides analyze;
    CLI::App* analyze_cmd = app.add_subcommand(
        "analyze-iterations", "stopping-iteration histogram and truncation curves");
    analyze_cmd->add_option("--config", analyze.config_path, "experiment config file")->required();
    analyze_cmd->add_option("--out", analyze.out, "output path stem (overrides config)");
    analyze_cmd->add_option("--seed", analyze.seed, "master seed (overrides config)")
        ->each([&analyze](const std::string&) { analyze.seed_set = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (alloc_cmd->parsed()) return cmd_two_arm_alloc(alloc);
        if (reward_cmd->parsed()) return cmd_two_arm_reward(reward);
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (analyze_cmd->parsed()) return cmd_analyze_iterations(analyze);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
