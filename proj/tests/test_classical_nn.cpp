#include "qforecast/classical_nn.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qforecast;

namespace {

// Independent step-by-step forward recomputation with its own loop nest.
Matrix forward_oracle(const MlpParams& p, const Matrix& x, Activation output) {
    Matrix a = x;
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        const Matrix& w = p.weights[l];
        Matrix z(w.rows, a.cols);
        for (std::size_t r = 0; r < w.rows; ++r) {
            for (std::size_t c = 0; c < a.cols; ++c) {
                double acc = p.biases[l](r, 0);
                for (std::size_t k = 0; k < w.cols; ++k) acc += w(r, k) * a(k, c);
                z(r, c) = acc;
            }
        }
        const Activation kind = (l + 1 == p.weights.size()) ? output : Activation::Relu;
        a = activation(kind, z);
    }
    return a;
}

double softmax_ce_loss(const MlpParams& p, const Matrix& x,
                       const std::vector<int>& labels) {
    const auto [out, cache] = model_forward(p, x, Activation::Softmax);
    std::vector<double> y(labels.size()), up(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        y[i] = labels[i];
        up[i] = out(1, i);
    }
    return bce_cost(y, up);
}

// Central finite differences of the cross-entropy cost, h = 1e-5.
MlpGradients fd_gradients(MlpParams p, const Matrix& x, const std::vector<int>& labels) {
    const double h = 1e-5;
    MlpGradients g;
    g.d_weights.resize(p.weights.size());
    g.d_biases.resize(p.biases.size());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        g.d_weights[l] = Matrix(p.weights[l].rows, p.weights[l].cols);
        for (std::size_t i = 0; i < p.weights[l].data.size(); ++i) {
            const double saved = p.weights[l].data[i];
            p.weights[l].data[i] = saved + h;
            const double plus = softmax_ce_loss(p, x, labels);
            p.weights[l].data[i] = saved - h;
            const double minus = softmax_ce_loss(p, x, labels);
            p.weights[l].data[i] = saved;
            g.d_weights[l].data[i] = (plus - minus) / (2.0 * h);
        }
        g.d_biases[l] = Matrix(p.biases[l].rows, 1);
        for (std::size_t i = 0; i < p.biases[l].data.size(); ++i) {
            const double saved = p.biases[l].data[i];
            p.biases[l].data[i] = saved + h;
            const double plus = softmax_ce_loss(p, x, labels);
            p.biases[l].data[i] = saved - h;
            const double minus = softmax_ce_loss(p, x, labels);
            p.biases[l].data[i] = saved;
            g.d_biases[l].data[i] = (plus - minus) / (2.0 * h);
        }
    }
    return g;
}

bool gradients_close(const MlpGradients& a, const MlpGradients& b, double tol) {
    for (std::size_t l = 0; l < a.d_weights.size(); ++l) {
        for (std::size_t i = 0; i < a.d_weights[l].data.size(); ++i) {
            const double x = a.d_weights[l].data[i], y = b.d_weights[l].data[i];
            if (std::abs(x - y) > tol * std::max({1.0, std::abs(x), std::abs(y)})) return false;
        }
        for (std::size_t i = 0; i < a.d_biases[l].data.size(); ++i) {
            const double x = a.d_biases[l].data[i], y = b.d_biases[l].data[i];
            if (std::abs(x - y) > tol * std::max({1.0, std::abs(x), std::abs(y)})) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("activations match their defining formulas") {
    Matrix z(1, 3);
    z(0, 0) = 0.0;
    z(0, 1) = -3.0;
    z(0, 2) = 2.0;

    const auto sig = activation(Activation::Sigmoid, z);
    CHECK(sig(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

    const auto rel = activation(Activation::Relu, z);
    CHECK(rel(0, 1) == 0.0);
    CHECK(rel(0, 2) == 2.0);

    Matrix two(2, 1);
    const auto soft = activation(Activation::Softmax, two);
    CHECK(soft(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(soft(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("softmax columns sum to one with positive entries") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss(0.0, 3.0);
    Matrix z(4, 6);
    for (auto& v : z.data) v = gauss(rng);
    const auto soft = activation(Activation::Softmax, z);
    for (std::size_t c = 0; c < z.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < z.rows; ++r) {
            CHECK(soft(r, c) > 0.0);
            sum += soft(r, c);
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
    // large logits do not overflow
    Matrix big(2, 1);
    big(0, 0) = 1000.0;
    big(1, 0) = -1000.0;
    const auto stable = activation(Activation::Softmax, big);
    CHECK(stable(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("activation backward follows the piecewise derivatives") {
    Matrix z(1, 1), da(1, 1);
    da(0, 0) = 1.0;

    z(0, 0) = 0.0;
    CHECK(activation_backward(Activation::Relu, da, z)(0, 0) == 0.0);
    CHECK(activation_backward(Activation::Sigmoid, da, z)(0, 0) ==
          doctest::Approx(0.25).epsilon(1e-12));

    z(0, 0) = 2.0;
    da(0, 0) = 0.0;
    CHECK(activation_backward(Activation::Relu, da, z)(0, 0) == 0.0);
    CHECK(activation_backward(Activation::Sigmoid, da, z)(0, 0) == 0.0);

    Matrix wrong(2, 1);
    CHECK_THROWS_AS(activation_backward(Activation::Relu, da, wrong),
                    std::invalid_argument);
}

TEST_CASE("activation backward agrees with the numerical derivative away from 0") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> draw(-4.0, 4.0);
    const double h = 1e-6;
    for (int trial = 0; trial < 200; ++trial) {
        double v = draw(rng);
        if (std::abs(v) < 1e-2) continue;
        Matrix z(1, 1), zp(1, 1), zm(1, 1), one(1, 1);
        z(0, 0) = v;
        zp(0, 0) = v + h;
        zm(0, 0) = v - h;
        one(0, 0) = 1.0;
        for (Activation kind : {Activation::Sigmoid, Activation::Relu}) {
            const double analytic = activation_backward(kind, one, z)(0, 0);
            const double numeric = (activation(kind, zp)(0, 0) - activation(kind, zm)(0, 0)) /
                                   (2.0 * h);
            CHECK(std::abs(analytic - numeric) < 1e-6);
        }
    }
}

TEST_CASE("cost functions match hand evaluations") {
    const std::vector<double> y1{1.0};
    const std::vector<double> p_half{0.5};
    CHECK(bce_cost(y1, p_half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    const std::vector<double> y0{0.0};
    CHECK(bce_cost(y0, p_half) == doctest::Approx(bce_cost(y1, p_half)).epsilon(1e-12));

    const std::vector<double> y{1.0, 0.0};
    const std::vector<double> perfect{1.0, 0.0};
    CHECK(bce_cost(y, perfect) < 1e-10);

    const std::vector<double> flipped{0.0, 1.0};
    CHECK(mse_cost(y, flipped) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mse_cost(y, y) == 0.0);
    const std::vector<double> two{2.0}, five{5.0};
    CHECK(mse_cost(two, five) == doctest::Approx(9.0).epsilon(1e-12));

    const std::vector<double> short_vec{1.0};
    CHECK_THROWS_AS(bce_cost(y, short_vec), std::invalid_argument);
    CHECK_THROWS_AS(mse_cost(y, short_vec), std::invalid_argument);
}

TEST_CASE("model_forward on degenerate and identity nets") {
    // zero weights, sigmoid scalar head: every output 0.5
    MlpParams zero;
    zero.layer_sizes = {3, 1};
    zero.weights.push_back(Matrix(1, 3));
    zero.biases.push_back(Matrix(1, 1));
    Matrix x(3, 4);
    for (auto& v : x.data) v = 0.7;
    const auto [out, cache] = model_forward(zero, x, Activation::Sigmoid);
    for (std::size_t c = 0; c < 4; ++c) CHECK(out(0, c) == doctest::Approx(0.5));

    // identity hidden layer: the relu passthrough [[-1],[2]] -> [[0],[2]]
    // shows up in the cached hidden activation
    MlpParams ident;
    ident.layer_sizes = {2, 2, 1};
    Matrix w(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = 1.0;
    ident.weights.push_back(w);
    ident.biases.push_back(Matrix(2, 1));
    ident.weights.push_back(Matrix(1, 2));
    ident.biases.push_back(Matrix(1, 1));
    Matrix input(2, 1);
    input(0, 0) = -1.0;
    input(1, 0) = 2.0;
    const auto [out2, cache2] = model_forward(ident, input, Activation::Sigmoid);
    CHECK(cache2.as[0](0, 0) == 0.0);
    CHECK(cache2.as[0](1, 0) == 2.0);

    Matrix wrong(4, 1);
    CHECK_THROWS_AS(model_forward(ident, wrong, Activation::Sigmoid),
                    std::invalid_argument);
}

TEST_CASE("model_forward equals the independent layer-by-layer oracle") {
    std::mt19937_64 rng(91);
    const auto p = init_mlp({4, 6, 5, 2}, rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix x(4, 7);
    for (auto& v : x.data) v = unit(rng);
    const auto [out, cache] = model_forward(p, x, Activation::Softmax);
    const auto want = forward_oracle(p, x, Activation::Softmax);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        CHECK(std::abs(out.data[i] - want.data[i]) < 1e-12);
    }
}

TEST_CASE("single-sample logistic regression gradient in closed form") {
    MlpParams p;
    p.layer_sizes = {1, 1};
    Matrix w(1, 1);
    w(0, 0) = 0.8;
    p.weights.push_back(w);
    Matrix b(1, 1);
    b(0, 0) = -0.2;
    p.biases.push_back(b);

    Matrix x(1, 1);
    x(0, 0) = 1.7;
    const auto [out, cache] = model_forward(p, x, Activation::Sigmoid);
    const std::vector<int> labels{1};
    const auto grads = model_backward(p, cache, labels);

    const double y_hat = 1.0 / (1.0 + std::exp(-(0.8 * 1.7 - 0.2)));
    CHECK(grads.d_weights[0](0, 0) == doctest::Approx((y_hat - 1.0) * 1.7).epsilon(1e-12));
    CHECK(grads.d_biases[0](0, 0) == doctest::Approx(y_hat - 1.0).epsilon(1e-12));
}

TEST_CASE("perfect predictions give vanishing gradients") {
    MlpParams p;
    p.layer_sizes = {2, 2};
    Matrix w(2, 2);
    w(0, 0) = 40.0;
    w(1, 1) = 40.0;
    p.weights.push_back(w);
    p.biases.push_back(Matrix(2, 1));
    Matrix x(2, 2);
    x(0, 0) = 1.0;   // sample 0 strongly class 0
    x(1, 1) = 1.0;   // sample 1 strongly class 1
    const auto [out, cache] = model_forward(p, x, Activation::Softmax);
    const std::vector<int> labels{0, 1};
    const auto grads = model_backward(p, cache, labels);
    for (const auto& g : grads.d_weights) {
        for (double v : g.data) CHECK(std::abs(v) < 1e-10);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int done = 0;
    while (done < 8) {
        const auto p = init_mlp({5, 4, 3, 2}, rng);
        Matrix x(5, 6);
        for (auto& v : x.data) v = unit(rng);
        std::vector<int> labels(6);
        for (auto& l : labels) l = static_cast<int>(rng() % 2);

        // keep clear of relu kinks so the finite differences stay smooth
        const auto [out, cache] = model_forward(p, x, Activation::Softmax);
        bool near_kink = false;
        for (std::size_t l = 0; l + 1 < p.weights.size(); ++l) {
            for (double z : cache.zs[l].data) {
                if (std::abs(z) < 1e-3) near_kink = true;
            }
        }
        if (near_kink) continue;

        const auto analytic = model_backward(p, cache, labels);
        const auto numeric = fd_gradients(p, x, labels);
        CHECK(gradients_close(analytic, numeric, 1e-5));
        ++done;
    }
}

TEST_CASE("gd_update applies the plain descent rule") {
    MlpParams p;
    p.layer_sizes = {1, 1};
    Matrix w(1, 1);
    w(0, 0) = 1.0;
    p.weights.push_back(w);
    p.biases.push_back(Matrix(1, 1));

    MlpGradients g;
    Matrix dw(1, 1);
    dw(0, 0) = 2.0;
    g.d_weights.push_back(dw);
    g.d_biases.push_back(Matrix(1, 1));

    const auto updated = gd_update(p, g, 0.1);
    CHECK(updated.weights[0](0, 0) == doctest::Approx(0.8).epsilon(1e-15));

    const auto frozen = gd_update(p, g, 0.0);
    CHECK(frozen.weights[0](0, 0) == 1.0);

    MlpGradients zero;
    zero.d_weights.push_back(Matrix(1, 1));
    zero.d_biases.push_back(Matrix(1, 1));
    const auto same = gd_update(p, zero, 0.5);
    CHECK(same.weights[0](0, 0) == 1.0);
}

TEST_CASE("reference ANN has the stated shapes and derived parameter count") {
    std::mt19937_64 rng(1);
    const auto p = build_reference_ann(rng);
    REQUIRE(p.weights.size() == 4);
    CHECK(p.weights[0].rows == 128);
    CHECK(p.weights[0].cols == 5);
    CHECK(p.weights[1].rows == 64);
    CHECK(p.weights[1].cols == 128);
    CHECK(p.weights[2].rows == 32);
    CHECK(p.weights[2].cols == 64);
    CHECK(p.weights[3].rows == 2);
    CHECK(p.weights[3].cols == 32);

    // Sum(n_l * n_{l-1} + n_l) over the stack, recomputed here from shapes.
    std::size_t want = 0;
    const std::vector<std::size_t> sizes{5, 128, 64, 32, 2};
    for (std::size_t l = 1; l < sizes.size(); ++l) {
        want += sizes[l] * sizes[l - 1] + sizes[l];
    }
    CHECK(want == 11170);
    CHECK(parameter_count(p) == want);

    std::mt19937_64 rng_a(9), rng_b(9);
    const auto a = build_reference_ann(rng_a);
    const auto b = build_reference_ann(rng_b);
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        CHECK(a.weights[l].data == b.weights[l].data);
    }
}

TEST_CASE("mlp checkpoints round-trip through json") {
    std::mt19937_64 rng(123);
    const auto p = init_mlp({5, 4, 2}, rng);
    const auto j = mlp_to_json(p);
    const auto q = mlp_from_json(j);
    CHECK(q.layer_sizes == p.layer_sizes);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        CHECK(q.weights[l].data == p.weights[l].data);
        CHECK(q.biases[l].data == p.biases[l].data);
    }
}
