#pragma once

// Experiment runs shared by the CLI and the acceptance suite: config
// (de)serialization, train/eval/sweep drivers, and the artifact writers.

#include "orient/backbone.hpp"
#include "orient/checkpoint.hpp"
#include "orient/metrics.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace orient {

struct ExperimentConfig {
    Head head = Head::discrete_meanshift;
    std::vector<std::size_t> hidden = {64};
    double init_std = 0.01;
    TrainConfig train;
    std::size_t n_classes = 8;
    std::size_t n_tasks = 9;
    double huber_delta = kDefaultHuberDelta;
    MeanShiftConfig meanshift;
    std::string train_data;
    std::string test_data;
    std::string output_dir = "runs";
};

/// output_dir is left out: where a run is written does not change what it computes.
nlohmann::json to_json(const ExperimentConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// 8 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

HeadSetup head_setup(const ExperimentConfig& config);
NetworkSpec network_spec(const ExperimentConfig& config, std::size_t input_dim);

struct TrainOutcome {
    Checkpoint checkpoint;
    TrainLog log;
};

/// init_model + train; the checkpoint metadata embeds the resolved config.
TrainOutcome run_training(const ExperimentConfig& config, const Dataset& train_data);

struct EvalOutcome {
    EvalReport report;
    std::vector<double> predictions;  // degrees
    std::vector<double> errors;       // degrees
    std::size_t undecodable = 0;      // scored as a 0-degree prediction
};

EvalOutcome run_evaluation(const ModelState& model, const HeadSetup& setup,
                           const MeanShiftConfig& meanshift, const Dataset& data);

/// Reconstructs the head from a checkpoint's embedded config.
ExperimentConfig config_from_checkpoint(const Checkpoint& checkpoint);

// ---- artifact writers -------------------------------------------------------

/// "# config: <json>" then "iteration,loss,skipped,learning_rate" rows.
void write_loss_log(const std::filesystem::path& path, const TrainLog& log, const nlohmann::json& config);

/// "# config: <json>" then "index,truth,prediction,error" rows.
void write_error_table(const std::filesystem::path& path, const Dataset& data, const EvalOutcome& outcome,
                       const nlohmann::json& metadata);

nlohmann::json eval_report_json(const EvalOutcome& outcome, const ExperimentConfig& config,
                                const std::string& checkpoint, const std::string& dataset);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// ---- sweeps -----------------------------------------------------------------

struct SweepCell {
    std::size_t n_classes = 0;
    std::size_t n_tasks = 0;
    std::optional<EvalReport> report;
    std::string error;  // set when the cell failed
};

/// Trains and evaluates one discrete-meanshift model per (N, M) cell with the base
/// config's seed. Failures are recorded in the cell and the sweep continues.
std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                                 const Dataset& train_data, const Dataset& test_data);

/// Columns are (N, M) cells; rows are N, M, MeanAE, MedianAE, Acc-22.5, Acc-45.
std::string format_sweep_table(const std::vector<SweepCell>& cells);
nlohmann::json sweep_json(const std::vector<SweepCell>& cells, const ExperimentConfig& base);

/// Parses "8x1,8x3,72x1".
std::vector<std::pair<std::size_t, std::size_t>> parse_cells(const std::string& text);

}  // namespace orient
