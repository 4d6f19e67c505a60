// Classification metrics, the financial metrics (ex-post Sharpe ratio and
// Spearman information coefficient), the operation-count cost model, plot
// data emission, and the comparison report with its JSON serialization.

#pragma once

#include "qforecast/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qforecast {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

ConfusionCounts confusion_counts(std::span<const int> predicted,
                                 std::span<const int> actual);

struct ClassificationMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_degenerate = false;  // tp + fp == 0
    bool recall_degenerate = false;     // tp + fn == 0
};

ClassificationMetrics classification_metrics(const ConfusionCounts& counts);

// Long-when-1/flat-when-0 strategy: daily strategy returns are
// prediction * realized_return; the ratio is mean over sample std (n-1),
// annualized by sqrt(252), zero risk-free rate. Throws std::domain_error
// when the strategy return series has zero variance.
double sharpe_ratio(std::span<const int> predictions,
                    std::span<const double> realized_returns);

// Spearman rank correlation with average-rank tie handling. Throws
// std::domain_error on constant scores or constant returns.
double information_coefficient(std::span<const double> scores,
                               std::span<const double> realized_returns);

// Abstract training-cost model: ansatz gate applications for the quantum
// models, forward multiply-accumulates for the classical one.
struct CostModelRecord {
    std::string cost_model;                     // "gate_applications" | "multiply_accumulates"
    std::uint64_t units_per_forward = 0;        // per single-sample forward pass
    std::uint64_t parameter_count = 0;
    std::uint64_t forward_passes_per_gradient = 0;  // 1 for backprop
    std::uint64_t ops_per_epoch = 0;
    std::uint64_t total_training_ops = 0;
};

nlohmann::ordered_json op_count_comparison(std::span<const std::string> names,
                                           std::span<const CostModelRecord> records);

struct ModelResult {
    std::string name;
    ClassificationMetrics metrics;
    std::optional<double> sharpe;  // empty when the strategy is degenerate
    std::optional<double> ic;      // empty when the correlation is undefined
    CostModelRecord cost;
    TrainHistory history;
    std::vector<int> test_predictions;
    std::vector<double> test_p_up;
    double final_train_loss = 0.0;
    double final_train_accuracy = 0.0;
    nlohmann::ordered_json description;  // circuit dump or layer sizes
    std::string failure;                 // non-empty when this model failed
};

struct ComparisonReport {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string data_fingerprint;
    nlohmann::ordered_json config;
    std::vector<ModelResult> models;       // ann, qqbn, qqtn
    std::vector<int> test_actuals;
    std::vector<double> test_returns;
};

bool any_model_failed(const ComparisonReport& report);

// Deterministic report serialization: no wall-clock content, stable key
// order, published reference values attached with reproduction flags.
nlohmann::ordered_json report_to_json(const ComparisonReport& report);

// Reference benchmark tables from the source publication, each row carrying
// a reproduction status flag ("not_reproducible" for the timing claims,
// "not_attempted" for the original-dataset accuracy figures).
nlohmann::ordered_json published_reference_tables();

struct ModelSeries {
    std::string name;
    const TrainHistory* history = nullptr;
    std::span<const int> predictions;
    std::span<const double> p_up;
};

// Writes cost_curves.csv, predictions.csv and one residuals_<model>.csv per
// model into out_dir. Deterministic: fixed ordering, 12 significant digits.
void emit_plot_data(std::span<const ModelSeries> models,
                    std::span<const int> actuals, const std::string& out_dir);

// report.json + all plot CSVs for a finished comparison run.
void write_report_files(const ComparisonReport& report, const std::string& out_dir);

// FNV-1a hash rendered as 16 hex digits; used for config/data fingerprints.
std::string fnv1a_hex(std::string_view bytes);

std::string format_sig12(double v);

}  // namespace qforecast
