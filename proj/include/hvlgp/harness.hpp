#pragma once

#include "hvlgp/engine.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hvlgp {

struct ExperimentConfig {
    std::string name = "custom";
    /// Problem size, seed and trace level are overridden per trial.
    RunConfig base{};
    std::vector<std::uint32_t> n_values;
    std::uint32_t trials_per_n = 1;
    std::uint64_t master_seed = 0;
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned parallelism = 0;
};

/// Throws ConfigError for empty / non-increasing n lists, zero trials, or
/// a run template that would be invalid at some n.
void validate(const ExperimentConfig& config);

struct TrialRow {
    std::uint32_t n = 0;
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    RunResult result;
};

struct SummaryRow {
    std::uint32_t n = 0;
    std::size_t trials = 0;
    std::size_t optimal = 0;
    /// Over Optimal runs only; zero when there are none.
    double mean_evaluations = 0.0;
    /// Sample (n - 1) standard deviation over Optimal runs.
    double std_evaluations = 0.0;
    double stuck_fraction = 0.0;
    double budget_fraction = 0.0;
    double mean_t_max = 0.0;
};

struct ExperimentResult {
    std::vector<TrialRow> rows; // sorted by (n, trial)
    std::vector<SummaryRow> summary;
};

/// Seed of one trial, a mixing hash of (master seed, n, trial index).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint32_t n, std::uint32_t trial);

ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows);

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double residual_norm = 0.0;
    std::size_t points = 0;
};

/// Least-squares line through (log n, log mean_evaluations) over the n
/// values whose runs all reached the optimum. Needs at least three.
ScalingFit fit_scaling_exponent(const std::vector<SummaryRow>& summary);

inline constexpr std::string_view csv_header = "n,trial,seed,status,evaluations,accepted,t_max_nodes,final_fitness";

void write_csv(std::ostream& os, const std::vector<TrialRow>& rows);
std::string to_csv(const std::vector<TrialRow>& rows);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& summary);
/// Whitespace-separated "n mean std" lines for plotting tools.
void emit_plot_data(const std::vector<SummaryRow>& summary, const std::filesystem::path& path);

/// Named replications: "fig2", "fig3", "order-scaling", "tlopt-multi".
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Flat "key = value" lines; '#' starts a comment. Recognized keys:
/// name, problem, acceptance, ops, initializer, budget, stuck_detection,
/// incremental_majority, n_values (comma separated), trials, seed, threads.
ExperimentConfig parse_experiment_config(std::istream& is);
/// Applies every line of a config stream on top of an existing config.
void apply_config_stream(ExperimentConfig& config, std::istream& is);
/// Applies one key/value to an experiment config.
void apply_config_key(ExperimentConfig& config, std::string_view key, std::string_view value);

} // namespace hvlgp
