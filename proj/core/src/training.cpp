#include "qforecast/training.hpp"

#include "qforecast/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace qforecast {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Forward multiply-accumulates for one sample through the whole stack.
std::uint64_t mac_per_sample(const MlpParams& params) {
    std::uint64_t macs = 0;
    for (const auto& w : params.weights) {
        macs += static_cast<std::uint64_t>(w.rows) * w.cols;
    }
    return macs;
}

double classical_batch_loss(const Matrix& y_hat, std::span<const int> labels) {
    std::vector<double> y(labels.size());
    std::vector<double> p_up(labels.size());
    const std::size_t up_row = y_hat.rows > 1 ? 1 : 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = static_cast<double>(labels[i]);
        p_up[i] = y_hat(up_row, i);
    }
    return bce_cost(y, p_up);
}

double classical_accuracy(const MlpParams& params, const Matrix& x,
                          std::span<const int> labels) {
    const auto [out, cache] = model_forward(params, x, Activation::Softmax);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int pred = out(1, i) >= 0.5 ? 1 : 0;
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

std::string fingerprint_samples(const SplitDataset& data) {
    std::string bytes;
    bytes.reserve((data.train.size() + data.test.size()) * 64);
    char buf[40];
    auto absorb = [&](const MarketSample& s) {
        for (double f : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g,", f);
            bytes += buf;
        }
        std::snprintf(buf, sizeof(buf), "%d,%.17g;", s.label, s.next_return);
        bytes += buf;
    };
    for (const auto& s : data.train) absorb(s);
    bytes += "|";
    for (const auto& s : data.test) absorb(s);
    return fnv1a_hex(bytes);
}

}  // namespace

std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::Adam ? "adam" : "plain_gd";
}

std::string to_string(FdScheme s) {
    return s == FdScheme::Forward ? "forward" : "central";
}

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::Ann: return "ann";
        case ModelKind::Qqbn: return "qqbn";
        case ModelKind::Qqtn: return "qqtn";
    }
    throw std::logic_error("unreachable");
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "adam") return OptimizerKind::Adam;
    if (s == "plain_gd") return OptimizerKind::PlainGd;
    throw std::invalid_argument("unknown optimizer '" + s + "' (want adam|plain_gd)");
}

FdScheme fd_scheme_from_string(const std::string& s) {
    if (s == "forward") return FdScheme::Forward;
    if (s == "central") return FdScheme::Central;
    throw std::invalid_argument("unknown fd scheme '" + s + "' (want forward|central)");
}

ModelKind model_from_string(const std::string& s) {
    if (s == "ann") return ModelKind::Ann;
    if (s == "qqbn") return ModelKind::Qqbn;
    if (s == "qqtn") return ModelKind::Qqtn;
    throw std::invalid_argument("unknown model '" + s + "' (want ann|qqbn|qqtn)");
}

void validate_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(cfg.delta_theta > 0.0)) throw std::invalid_argument("delta_theta must be > 0");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
}

nlohmann::ordered_json config_to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json j;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"] = cfg.batch_size;
    j["epochs"] = cfg.epochs;
    j["seed"] = cfg.seed;
    j["delta_theta"] = cfg.delta_theta;
    j["optimizer"] = to_string(cfg.optimizer);
    j["fd_scheme"] = to_string(cfg.fd_scheme);
    j["threads"] = cfg.threads;
    return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("delta_theta")) cfg.delta_theta = j.at("delta_theta").get<double>();
    if (j.contains("optimizer")) {
        cfg.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    }
    if (j.contains("fd_scheme")) {
        cfg.fd_scheme = fd_scheme_from_string(j.at("fd_scheme").get<std::string>());
    }
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    validate_config(cfg);
    return cfg;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double alpha) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient size mismatch");
    }
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("adam_step: state size mismatch");
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= alpha * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

void plain_gd_step(std::span<double> params, std::span<const double> grads,
                   double alpha) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("plain_gd_step: parameter/gradient size mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= alpha * grads[i];
    }
}

void init_theta(ParameterizedCircuit& circuit, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi / 4.0,
                                                 std::numbers::pi / 4.0);
    for (auto& t : circuit.theta) t = angle(rng);
}

Matrix features_matrix(std::span<const MarketSample> samples) {
    Matrix x(kFeatureCount, samples.size());
    for (std::size_t c = 0; c < samples.size(); ++c) {
        for (int f = 0; f < kFeatureCount; ++f) {
            x(static_cast<std::size_t>(f), c) = samples[c].features[f];
        }
    }
    return x;
}

std::vector<int> labels_vector(std::span<const MarketSample> samples) {
    std::vector<int> y(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].label;
    return y;
}

std::pair<MlpParams, TrainHistory> train_classical(MlpParams params,
                                                   const SplitDataset& data,
                                                   const TrainConfig& cfg) {
    validate_config(cfg);
    if (data.train.empty()) throw TrainingError("empty training set");
    const int epochs = cfg.epochs_for(ModelKind::Ann);

    const std::size_t n = data.train.size();
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    const Matrix x_full = features_matrix(data.train);
    const std::vector<int> y_full = labels_vector(data.train);
    const std::uint64_t macs = mac_per_sample(params);

    // Per-tensor optimizer state, all driven by the shared adam_step kernel.
    std::vector<AdamState> w_state(params.weights.size());
    std::vector<AdamState> b_state(params.biases.size());

    TrainHistory history;
    std::uint64_t cumulative_ops = 0;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const auto t0 = Clock::now();
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(start + batch, n);
            const std::size_t m = end - start;
            Matrix x(kFeatureCount, m);
            for (std::size_t c = 0; c < m; ++c) {
                for (int f = 0; f < kFeatureCount; ++f) {
                    x(static_cast<std::size_t>(f), c) = x_full(static_cast<std::size_t>(f), start + c);
                }
            }
            const std::span<const int> labels(y_full.data() + start, m);

            const auto [y_hat, cache] = model_forward(params, x, Activation::Softmax);
            loss_sum += classical_batch_loss(y_hat, labels) * static_cast<double>(m);
            MlpGradients grads = model_backward(params, cache, labels);

            if (cfg.optimizer == OptimizerKind::Adam) {
                for (std::size_t l = 0; l < params.weights.size(); ++l) {
                    adam_step(params.weights[l].data, grads.d_weights[l].data, w_state[l],
                              cfg.learning_rate);
                    adam_step(params.biases[l].data, grads.d_biases[l].data, b_state[l],
                              cfg.learning_rate);
                }
            } else {
                params = gd_update(params, grads, cfg.learning_rate);
            }
            cumulative_ops += macs * m;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.train_accuracy = classical_accuracy(params, x_full, y_full);
        rec.cumulative_ops = cumulative_ops;
        rec.wall_time_s = seconds_since(t0);
        history.epochs.push_back(rec);
    }
    return {std::move(params), std::move(history)};
}

std::pair<MlpParams, TrainHistory> train_classical(const SplitDataset& data,
                                                   const TrainConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    return train_classical(build_reference_ann(rng), data, cfg);
}

std::pair<ParameterizedCircuit, TrainHistory> train_quantum(ParameterizedCircuit model,
                                                            const SplitDataset& data,
                                                            const TrainConfig& cfg) {
    validate_config(cfg);
    validate_circuit(model);
    if (data.train.empty()) throw TrainingError("empty training set");
    const int epochs =
        cfg.epochs_for(model.dim == 2 ? ModelKind::Qqbn : ModelKind::Qqtn);

    const EncodedDataset encoded = encode_dataset(model, data.train);
    const std::size_t n = encoded.states.size();
    const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
    const OperationCount ops = count_operations(model, cfg.fd_scheme);

    std::vector<double> theta = model.theta;
    AdamState state(theta.size());

    TrainHistory history;
    std::uint64_t cumulative_ops = 0;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        const auto t0 = Clock::now();
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(start + batch, n);
            const std::size_t m = end - start;

            const double loss = batch_loss_encoded(model, theta, encoded, start, end);
            loss_sum += loss * static_cast<double>(m);
            const std::vector<double> grad = finite_diff_gradient_encoded(
                model, theta, encoded, start, end, cfg.delta_theta, cfg.fd_scheme,
                cfg.threads, loss);

            if (cfg.optimizer == OptimizerKind::Adam) {
                adam_step(theta, grad, state, cfg.learning_rate);
            } else {
                plain_gd_step(theta, grad, cfg.learning_rate);
            }

            // Circuit executions this batch: the recorded loss plus the
            // gradient's perturbed evaluations (the forward scheme reuses the
            // recorded loss as its base).
            const std::uint64_t loss_evals =
                cfg.fd_scheme == FdScheme::Forward
                    ? ops.forward_passes_per_gradient
                    : ops.forward_passes_per_gradient + 1;
            cumulative_ops += ops.gate_applications_per_forward * loss_evals * m;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.train_accuracy = dataset_accuracy(model, theta, encoded);
        rec.cumulative_ops = cumulative_ops;
        rec.wall_time_s = seconds_since(t0);
        history.epochs.push_back(rec);
    }

    model.theta = std::move(theta);
    return {std::move(model), std::move(history)};
}

ComparisonReport run_comparison(const SplitDataset& data, const TrainConfig& cfg) {
    validate_config(cfg);
    if (data.train.empty() || data.test.empty()) {
        throw TrainingError("comparison needs non-empty train and test splits");
    }

    ComparisonReport report;
    report.seed = cfg.seed;
    report.config = config_to_json(cfg);
    report.config_hash = fnv1a_hex(report.config.dump());
    report.data_fingerprint = fingerprint_samples(data);
    report.test_actuals = labels_vector(data.test);
    report.test_returns.reserve(data.test.size());
    for (const auto& s : data.test) report.test_returns.push_back(s.next_return);

    const std::size_t n_train = data.train.size();

    auto finish_model = [&](ModelResult& result) {
        const ConfusionCounts counts =
            confusion_counts(result.test_predictions, report.test_actuals);
        result.metrics = classification_metrics(counts);
        try {
            result.sharpe = sharpe_ratio(result.test_predictions, report.test_returns);
        } catch (const std::domain_error&) {
            result.sharpe.reset();
        }
        try {
            result.ic = information_coefficient(result.test_p_up, report.test_returns);
        } catch (const std::domain_error&) {
            result.ic.reset();
        }
        if (!result.history.epochs.empty()) {
            result.final_train_loss = result.history.epochs.back().train_loss;
            result.final_train_accuracy = result.history.epochs.back().train_accuracy;
        }
    };

    // ANN
    {
        ModelResult r;
        r.name = "ann";
        try {
            std::mt19937_64 rng(cfg.seed);
            MlpParams params = build_reference_ann(rng);
            const std::uint64_t macs = mac_per_sample(params);
            auto [trained, history] = train_classical(std::move(params), data, cfg);
            r.history = std::move(history);

            const Matrix x_test = features_matrix(data.test);
            const auto [out, cache] = model_forward(trained, x_test, Activation::Softmax);
            r.test_predictions.resize(data.test.size());
            r.test_p_up.resize(data.test.size());
            for (std::size_t i = 0; i < data.test.size(); ++i) {
                r.test_p_up[i] = out(1, i);
                r.test_predictions[i] = r.test_p_up[i] >= 0.5 ? 1 : 0;
            }

            r.cost.cost_model = "multiply_accumulates";
            r.cost.units_per_forward = macs;
            r.cost.parameter_count = parameter_count(trained);
            r.cost.forward_passes_per_gradient = 1;
            r.cost.ops_per_epoch = macs * n_train;
            r.cost.total_training_ops =
                r.history.epochs.empty() ? 0 : r.history.epochs.back().cumulative_ops;

            r.description = {{"architecture", "mlp"},
                             {"layer_sizes", trained.layer_sizes},
                             {"hidden_activation", "relu"},
                             {"output_activation", "softmax"}};
            finish_model(r);
        } catch (const std::exception& e) {
            r.failure = e.what();
        }
        report.models.push_back(std::move(r));
    }

    // QQBN and QQTN share one code path.
    for (const ModelKind kind : {ModelKind::Qqbn, ModelKind::Qqtn}) {
        ModelResult r;
        r.name = to_string(kind);
        try {
            ParameterizedCircuit circuit =
                kind == ModelKind::Qqbn ? build_qbn_ansatz() : build_qqtn_ansatz();
            std::mt19937_64 rng(cfg.seed);
            init_theta(circuit, rng);

            auto [trained, history] = train_quantum(std::move(circuit), data, cfg);
            r.history = std::move(history);

            const EncodedDataset test_enc = encode_dataset(trained, data.test);
            r.test_predictions.resize(data.test.size());
            r.test_p_up.resize(data.test.size());
            for (std::size_t i = 0; i < data.test.size(); ++i) {
                const Prediction p = predict_encoded(trained, trained.theta, test_enc, i);
                r.test_predictions[i] = p.label_hat;
                r.test_p_up[i] = p.p_up;
            }

            const OperationCount ops = count_operations(trained, cfg.fd_scheme);
            r.cost.cost_model = "gate_applications";
            r.cost.units_per_forward = ops.gate_applications_per_forward;
            r.cost.parameter_count = ops.parameter_count;
            r.cost.forward_passes_per_gradient = ops.forward_passes_per_gradient;
            r.cost.ops_per_epoch = ops.gate_applications_per_forward *
                                   ops.forward_passes_per_gradient * n_train;
            r.cost.total_training_ops =
                r.history.epochs.empty() ? 0 : r.history.epochs.back().cumulative_ops;

            r.description = circuit_to_json(trained);
            finish_model(r);
        } catch (const std::exception& e) {
            r.failure = e.what();
        }
        report.models.push_back(std::move(r));
    }

    return report;
}

}  // namespace qforecast
