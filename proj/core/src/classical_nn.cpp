#include "qforecast/classical_nn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qforecast {

namespace {

constexpr double kClipEps = 1e-12;

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

// out = W * A + b (b broadcast across columns)
Matrix linear_forward(const Matrix& w, const Matrix& a, const Matrix& b) {
    if (w.cols != a.rows) throw std::invalid_argument("linear layer: W cols != A rows");
    Matrix out(w.rows, a.cols);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wrow = &w.data[r * w.cols];
        for (std::size_t c = 0; c < a.cols; ++c) {
            double acc = b.data[r];
            for (std::size_t k = 0; k < w.cols; ++k) {
                acc += wrow[k] * a(k, c);
            }
            out(r, c) = acc;
        }
    }
    return out;
}

}  // namespace

Matrix activation(Activation kind, const Matrix& z) {
    Matrix out(z.rows, z.cols);
    switch (kind) {
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                out.data[i] = 1.0 / (1.0 + std::exp(-z.data[i]));
            }
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                out.data[i] = std::max(0.0, z.data[i]);
            }
            break;
        case Activation::Softmax:
            for (std::size_t c = 0; c < z.cols; ++c) {
                double zmax = z(0, c);
                for (std::size_t r = 1; r < z.rows; ++r) zmax = std::max(zmax, z(r, c));
                double sum = 0.0;
                for (std::size_t r = 0; r < z.rows; ++r) {
                    const double e = std::exp(z(r, c) - zmax);
                    out(r, c) = e;
                    sum += e;
                }
                for (std::size_t r = 0; r < z.rows; ++r) out(r, c) /= sum;
            }
            break;
    }
    return out;
}

Matrix activation_backward(Activation kind, const Matrix& da, const Matrix& z) {
    check_same_shape(da, z, "activation_backward");
    Matrix out(z.rows, z.cols);
    switch (kind) {
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                const double s = 1.0 / (1.0 + std::exp(-z.data[i]));
                out.data[i] = da.data[i] * s * (1.0 - s);
            }
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < z.data.size(); ++i) {
                out.data[i] = z.data[i] > 0.0 ? da.data[i] : 0.0;
            }
            break;
        case Activation::Softmax:
            throw std::invalid_argument(
                "softmax backward is folded into the cross-entropy output shortcut");
    }
    return out;
}

double bce_cost(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) {
        throw std::invalid_argument("bce_cost: label/prediction length mismatch");
    }
    const double m = static_cast<double>(y.size());
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = std::clamp(y_hat[i], kClipEps, 1.0 - kClipEps);
        total += y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
    }
    return -total / m;
}

double mse_cost(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size() || y.empty()) {
        throw std::invalid_argument("mse_cost: length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - y_hat[i];
        total += r * r;
    }
    return total / static_cast<double>(y.size());
}

std::size_t parameter_count(const MlpParams& params) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        n += params.weights[l].rows * params.weights[l].cols + params.biases[l].rows;
    }
    return n;
}

std::pair<Matrix, ForwardCache> model_forward(const MlpParams& params, const Matrix& x,
                                              Activation output) {
    if (params.weights.empty()) throw std::invalid_argument("empty model");
    if (x.rows != params.layer_sizes.front() || x.cols == 0) {
        throw std::invalid_argument("input height does not match layer_sizes[0]");
    }
    if (output != Activation::Sigmoid && output != Activation::Softmax) {
        throw std::invalid_argument("output head must be sigmoid or softmax");
    }

    ForwardCache cache;
    cache.input = x;
    cache.output = output;
    const std::size_t layers = params.weights.size();
    const Matrix* prev = &cache.input;
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = linear_forward(params.weights[l], *prev, params.biases[l]);
        const Activation kind = (l + 1 == layers) ? output : Activation::Relu;
        cache.zs.push_back(std::move(z));
        cache.as.push_back(activation(kind, cache.zs.back()));
        prev = &cache.as.back();
    }
    return {cache.as.back(), cache};
}

MlpGradients model_backward(const MlpParams& params, const ForwardCache& cache,
                            std::span<const int> labels) {
    const std::size_t layers = params.weights.size();
    if (cache.zs.size() != layers || cache.as.size() != layers) {
        throw std::invalid_argument("cache does not match the model's layer count");
    }
    const std::size_t m = cache.input.cols;
    if (labels.size() != m) {
        throw std::invalid_argument("label count does not match the cached batch width");
    }
    const Matrix& y_hat = cache.as.back();

    // Output shortcut dZ[L] = y_hat - y for sigmoid+BCE and softmax+CE alike.
    Matrix dz(y_hat.rows, y_hat.cols);
    if (cache.output == Activation::Softmax) {
        if (y_hat.rows < 2) throw std::invalid_argument("softmax head needs >= 2 rows");
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t r = 0; r < y_hat.rows; ++r) {
                const double onehot = (static_cast<std::size_t>(labels[c]) == r) ? 1.0 : 0.0;
                dz(r, c) = y_hat(r, c) - onehot;
            }
        }
    } else {
        if (y_hat.rows != 1) throw std::invalid_argument("sigmoid head must be scalar");
        for (std::size_t c = 0; c < m; ++c) {
            dz(0, c) = y_hat(0, c) - static_cast<double>(labels[c]);
        }
    }

    MlpGradients grads;
    grads.d_weights.resize(layers);
    grads.d_biases.resize(layers);
    const double inv_m = 1.0 / static_cast<double>(m);

    for (std::size_t l = layers; l-- > 0;) {
        const Matrix& a_prev = (l == 0) ? cache.input : cache.as[l - 1];

        // dW[l] = (1/m) dZ A_prev^T
        Matrix dw(dz.rows, a_prev.rows);
        for (std::size_t r = 0; r < dz.rows; ++r) {
            for (std::size_t k = 0; k < a_prev.rows; ++k) {
                double acc = 0.0;
                for (std::size_t c = 0; c < m; ++c) acc += dz(r, c) * a_prev(k, c);
                dw(r, k) = acc * inv_m;
            }
        }
        // db[l] = (1/m) row-sum of dZ
        Matrix db(dz.rows, 1);
        for (std::size_t r = 0; r < dz.rows; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < m; ++c) acc += dz(r, c);
            db(r, 0) = acc * inv_m;
        }
        grads.d_weights[l] = std::move(dw);
        grads.d_biases[l] = std::move(db);

        if (l > 0) {
            // dA[l-1] = W[l]^T dZ, then through the hidden relu.
            const Matrix& w = params.weights[l];
            Matrix da(w.cols, m);
            for (std::size_t k = 0; k < w.cols; ++k) {
                for (std::size_t c = 0; c < m; ++c) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < w.rows; ++r) acc += w(r, k) * dz(r, c);
                    da(k, c) = acc;
                }
            }
            dz = activation_backward(Activation::Relu, da, cache.zs[l - 1]);
        }
    }
    return grads;
}

MlpParams gd_update(const MlpParams& params, const MlpGradients& grads, double alpha) {
    if (grads.d_weights.size() != params.weights.size()) {
        throw std::invalid_argument("gradient/parameter layer count mismatch");
    }
    MlpParams out = params;
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
        check_same_shape(out.weights[l], grads.d_weights[l], "gd_update W");
        check_same_shape(out.biases[l], grads.d_biases[l], "gd_update b");
        for (std::size_t i = 0; i < out.weights[l].data.size(); ++i) {
            out.weights[l].data[i] -= alpha * grads.d_weights[l].data[i];
        }
        for (std::size_t i = 0; i < out.biases[l].data.size(); ++i) {
            out.biases[l].data[i] -= alpha * grads.d_biases[l].data[i];
        }
    }
    return out;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes, std::mt19937_64& rng) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("need at least input and output layer sizes");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    MlpParams params;
    params.layer_sizes = layer_sizes;
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        Matrix w(layer_sizes[l], layer_sizes[l - 1]);
        const double scale = std::sqrt(2.0 / static_cast<double>(layer_sizes[l - 1]));
        for (auto& v : w.data) v = scale * gauss(rng);
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(layer_sizes[l], 1);
    }
    return params;
}

MlpParams build_reference_ann(std::mt19937_64& rng) {
    return init_mlp({5, 128, 64, 32, 2}, rng);
}

nlohmann::ordered_json mlp_to_json(const MlpParams& params) {
    nlohmann::ordered_json j;
    j["architecture"] = "mlp";
    j["layer_sizes"] = params.layer_sizes;
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    nlohmann::ordered_json biases = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        weights.push_back(params.weights[l].data);
        biases.push_back(params.biases[l].data);
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j;
}

MlpParams mlp_from_json(const nlohmann::json& j) {
    MlpParams params;
    params.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    if (params.layer_sizes.size() < 2) {
        throw std::invalid_argument("checkpoint needs at least two layer sizes");
    }
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != params.layer_sizes.size() - 1 ||
        biases.size() != params.layer_sizes.size() - 1) {
        throw std::invalid_argument("checkpoint layer count mismatch");
    }
    for (std::size_t l = 1; l < params.layer_sizes.size(); ++l) {
        Matrix w(params.layer_sizes[l], params.layer_sizes[l - 1]);
        auto wdata = weights[l - 1].get<std::vector<double>>();
        if (wdata.size() != w.data.size()) {
            throw std::invalid_argument("checkpoint weight shape mismatch");
        }
        w.data = std::move(wdata);
        params.weights.push_back(std::move(w));

        Matrix b(params.layer_sizes[l], 1);
        auto bdata = biases[l - 1].get<std::vector<double>>();
        if (bdata.size() != b.data.size()) {
            throw std::invalid_argument("checkpoint bias shape mismatch");
        }
        b.data = std::move(bdata);
        params.biases.push_back(std::move(b));
    }
    return params;
}

}  // namespace qforecast
