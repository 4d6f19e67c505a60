// From-scratch multilayer perceptron: activations with backward forms, the
// two cost functions, forward/backward propagation, and plain gradient
// descent updates. Batch layout puts samples in columns.

#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qforecast {

// Minimal dense row-major matrix; all shapes here are small.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

enum class Activation { Sigmoid, Relu, Softmax };

// Elementwise sigmoid/relu; softmax is column-wise with max subtraction.
Matrix activation(Activation kind, const Matrix& z);

// dA * sigma'(Z) for sigmoid, dA gated by Z > 0 for relu (0 at Z == 0).
Matrix activation_backward(Activation kind, const Matrix& da, const Matrix& z);

// Mean negative log-likelihood; predictions clipped to [1e-12, 1 - 1e-12].
double bce_cost(std::span<const double> y, std::span<const double> y_hat);

double mse_cost(std::span<const double> y, std::span<const double> y_hat);

struct MlpParams {
    std::vector<std::size_t> layer_sizes;  // [n0, ..., nL]
    std::vector<Matrix> weights;           // W[l]: n_l x n_{l-1}
    std::vector<Matrix> biases;            // b[l]: n_l x 1
};

std::size_t parameter_count(const MlpParams& params);

struct ForwardCache {
    Matrix input;                 // A[0]
    std::vector<Matrix> zs;       // Z[1..L]
    std::vector<Matrix> as;       // A[1..L]
    Activation output = Activation::Softmax;
};

struct MlpGradients {
    std::vector<Matrix> d_weights;
    std::vector<Matrix> d_biases;
};

// Z[l] = W[l] A[l-1] + b[l] at every layer; relu on hidden layers, `output`
// on the last. Returns the final activation and the cache for backward.
std::pair<Matrix, ForwardCache> model_forward(const MlpParams& params,
                                              const Matrix& x,
                                              Activation output = Activation::Softmax);

// Cross-entropy gradients via the output-layer shortcut dZ = y_hat - y.
// For the softmax head `labels` are one-hot encoded internally; for the
// scalar sigmoid head they are used directly.
MlpGradients model_backward(const MlpParams& params, const ForwardCache& cache,
                            std::span<const int> labels);

// W <- W - alpha dW, b <- b - alpha db.
MlpParams gd_update(const MlpParams& params, const MlpGradients& grads, double alpha);

// He-initialized random MLP with the given layer sizes; biases start at zero.
MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::mt19937_64& rng);

// The reference architecture: [5, 128, 64, 32, 2], relu hidden, softmax head.
MlpParams build_reference_ann(std::mt19937_64& rng);

// Checkpoint format: layer sizes plus row-major matrices.
nlohmann::ordered_json mlp_to_json(const MlpParams& params);
MlpParams mlp_from_json(const nlohmann::json& j);

}  // namespace qforecast
