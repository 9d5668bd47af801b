#pragma once

#include <string>
#include <utility>
#include <vector>

#include "banditsim/config.hpp"
#include "banditsim/runner.hpp"

namespace banditsim::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Which key set a config file is validated against.
enum class ConfigKind { simulate, analyze };

struct ResolvedExperiment {
    run::ExperimentConfig config;
    std::string preset;
    std::string out;
    std::string export_label_table;  // optional; simulate only
    // analyze-iterations controls
    int n_fits = 200;
    int analysis_iterations = 60;
    int eval_contexts = 0;  // 0 = whole pool
};

// Applies the named preset's environment and schedule defaults. Known
// presets: simple-stationary, simple-drift, large-stationary, large-drift,
// flat-stationary.
void apply_preset(run::ExperimentConfig& config, const std::string& name);

// Resolves a parsed config file against defaults. Unknown keys and malformed
// values throw.
ResolvedExperiment resolve_experiment(ConfigMap cfg, ConfigKind kind);

// Every resolved setting, as sorted key/value pairs; written into manifests
// so a run can be reproduced from its manifest alone.
std::vector<std::pair<std::string, std::string>> manifest_entries(const ResolvedExperiment& resolved);

void write_manifest(const std::string& path, const std::string& subcommand,
                    std::vector<std::pair<std::string, std::string>> entries);

// Per-replication metrics rows: replication, epoch, cum_reward, cum_regret,
// mean_regret, stop_iteration.
void write_metrics_csv(const std::string& path, const std::vector<run::MetricsLog>& logs);

// Per-epoch mean/stderr curves across replications.
void write_summary_csv(const std::string& path, const run::AggregateCurves& curves);

void write_label_table_csv(const std::string& path, const env::Environment& environment);

// sim.csv -> sim_summary.csv (suffix inserted before the extension).
std::string derived_path(const std::string& out, const std::string& suffix);

}  // namespace banditsim::io
