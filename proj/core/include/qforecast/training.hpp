// Unified training loop: one Adam implementation shared by the classical and
// quantum paths, plain gradient descent as the paper-verbatim fallback, and
// the three-model comparison runner.

#pragma once

#include "qforecast/classical_nn.hpp"
#include "qforecast/market_data.hpp"
#include "qforecast/vqc.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qforecast {

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OptimizerKind { Adam, PlainGd };
enum class ModelKind { Ann, Qqbn, Qqtn };

std::string to_string(OptimizerKind k);
std::string to_string(FdScheme s);
std::string to_string(ModelKind m);
OptimizerKind optimizer_from_string(const std::string& s);
FdScheme fd_scheme_from_string(const std::string& s);
ModelKind model_from_string(const std::string& s);

inline constexpr int kDefaultClassicalEpochs = 200;
inline constexpr int kDefaultQuantumEpochs = 100;

struct TrainConfig {
    double learning_rate = 0.001;
    int batch_size = 32;
    int epochs = -1;  // -1: per-model default (200 classical, 100 quantum)
    std::uint64_t seed = 0;
    double delta_theta = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    FdScheme fd_scheme = FdScheme::Forward;
    int threads = 1;

    int epochs_for(ModelKind m) const {
        if (epochs >= 0) return epochs;
        return m == ModelKind::Ann ? kDefaultClassicalEpochs : kDefaultQuantumEpochs;
    }
};

void validate_config(const TrainConfig& cfg);
nlohmann::ordered_json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

struct EpochRecord {
    int epoch = 0;              // 1-based
    double train_loss = 0.0;    // running mean of batch losses
    double train_accuracy = 0.0;
    double wall_time_s = 0.0;   // informational only; never serialized
    std::uint64_t cumulative_ops = 0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Bias-corrected Adam update, in place. Both training paths call this.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double alpha);

// W <- W - alpha * dW, the plain descent rule.
void plain_gd_step(std::span<double> params, std::span<const double> grads,
                   double alpha);

// Uniform [-pi/4, pi/4] starting angles for a variational circuit.
void init_theta(ParameterizedCircuit& circuit, std::mt19937_64& rng);

// Mini-batch loop over contiguous chronological slices (no shuffling,
// drop-last off). `params` come seeded from the caller.
std::pair<MlpParams, TrainHistory> train_classical(MlpParams params,
                                                   const SplitDataset& data,
                                                   const TrainConfig& cfg);

// Builds the reference ANN seeded from cfg.seed and trains it.
std::pair<MlpParams, TrainHistory> train_classical(const SplitDataset& data,
                                                   const TrainConfig& cfg);

std::pair<ParameterizedCircuit, TrainHistory> train_quantum(ParameterizedCircuit model,
                                                            const SplitDataset& data,
                                                            const TrainConfig& cfg);

// Classical helpers shared by training and evaluation.
Matrix features_matrix(std::span<const MarketSample> samples);
std::vector<int> labels_vector(std::span<const MarketSample> samples);

struct ComparisonReport;

// Trains ANN, QQBN and QQTN under one config and seed, evaluates every
// metric on the test split, and assembles the comparison report.
ComparisonReport run_comparison(const SplitDataset& data, const TrainConfig& cfg);

}  // namespace qforecast
