#include "qforecast/training.hpp"

#include "qforecast/metrics.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace qforecast;

namespace {

TrainConfig tiny_config(int epochs, std::uint64_t seed = 7) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("adam first step and zero-gradient behavior") {
    // zero gradient: parameters unchanged, step counter advances
    std::vector<double> params{1.0, -2.0};
    std::vector<double> zeros{0.0, 0.0};
    AdamState state(2);
    adam_step(params, zeros, state, 0.1);
    CHECK(params[0] == 1.0);
    CHECK(params[1] == -2.0);
    CHECK(state.t == 1);

    // first-step magnitude is ~alpha regardless of gradient scale:
    // hand-evaluated t=1 update is alpha * g / (|g| + eps)
    for (double g : {0.5, 2.0, -3.0, 1e-4}) {
        std::vector<double> p{0.0};
        std::vector<double> grad{g};
        AdamState s(1);
        adam_step(p, grad, s, 0.01);
        const double want = -0.01 * g / (std::abs(g) + 1e-8);
        CHECK(p[0] == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::abs(std::abs(p[0]) - 0.01) < 1e-5);
    }

    std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(adam_step(params, wrong, state, 0.1), std::invalid_argument);
}

TEST_CASE("plain gd matches the update equations to machine precision") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> params(50), grads(50), want(50);
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] = gauss(rng);
        grads[i] = gauss(rng);
        want[i] = params[i] - 0.37 * grads[i];
    }
    plain_gd_step(params, grads, 0.37);
    for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK(std::abs(params[i] - want[i]) < 1e-15);
    }
}

TEST_CASE("the same adam kernel drives sliced and flat parameter layouts") {
    // one synthetic gradient sequence pushed through the kernel as a single
    // flat vector and as two tensor slices with their own states
    std::mt19937_64 rng(77);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> flat{0.1, 0.2, 0.3, 0.4};
    std::vector<double> a{0.1, 0.2}, b{0.3, 0.4};
    AdamState flat_state(4), a_state(2), b_state(2);
    for (int step = 0; step < 25; ++step) {
        std::vector<double> g(4);
        for (auto& v : g) v = gauss(rng);
        adam_step(flat, g, flat_state, 0.005);
        adam_step(a, std::span<const double>(g.data(), 2), a_state, 0.005);
        adam_step(b, std::span<const double>(g.data() + 2, 2), b_state, 0.005);
    }
    CHECK(flat[0] == a[0]);
    CHECK(flat[1] == a[1]);
    CHECK(flat[2] == b[0]);
    CHECK(flat[3] == b[1]);
}

TEST_CASE("config json round-trip and validation") {
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 16;
    cfg.epochs = 42;
    cfg.seed = 99;
    cfg.delta_theta = 1e-4;
    cfg.optimizer = OptimizerKind::PlainGd;
    cfg.fd_scheme = FdScheme::Central;
    cfg.threads = 2;
    const auto j = config_to_json(cfg);
    const auto back = config_from_json(j);
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.batch_size == cfg.batch_size);
    CHECK(back.epochs == cfg.epochs);
    CHECK(back.seed == cfg.seed);
    CHECK(back.delta_theta == cfg.delta_theta);
    CHECK(back.optimizer == cfg.optimizer);
    CHECK(back.fd_scheme == cfg.fd_scheme);
    CHECK(back.threads == cfg.threads);

    TrainConfig bad;
    bad.batch_size = 0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);
    bad = TrainConfig{};
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(validate_config(bad), std::invalid_argument);

    CHECK(TrainConfig{}.epochs_for(ModelKind::Ann) == kDefaultClassicalEpochs);
    CHECK(TrainConfig{}.epochs_for(ModelKind::Qqtn) == kDefaultQuantumEpochs);
    CHECK(tiny_config(5).epochs_for(ModelKind::Ann) == 5);
}

TEST_CASE("zero epochs return the initial parameters and empty history") {
    const auto data = test_helpers::separable_dataset(5, 60);
    const auto cfg = tiny_config(0);

    std::mt19937_64 rng(cfg.seed);
    const auto initial = build_reference_ann(rng);
    const auto [params, hist] = train_classical(data, cfg);
    CHECK(hist.epochs.empty());
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        CHECK(params.weights[l].data == initial.weights[l].data);
    }

    auto circuit = build_qbn_ansatz();
    std::mt19937_64 qrng(cfg.seed);
    init_theta(circuit, qrng);
    const std::vector<double> theta0 = circuit.theta;
    const auto [trained, qhist] = train_quantum(std::move(circuit), data, cfg);
    CHECK(qhist.epochs.empty());
    CHECK(trained.theta == theta0);
}

TEST_CASE("classical training separates the separable fixture") {
    const auto data = test_helpers::separable_dataset(11, 500);
    TrainConfig cfg = tiny_config(200, 11);
    const auto [params, hist] = train_classical(data, cfg);
    REQUIRE(hist.epochs.size() == 200);
    CHECK(hist.epochs.back().train_accuracy >= 0.95);

    // windowed monotonicity: means over consecutive 10-epoch windows do not
    // increase after the initial transient
    for (std::size_t w = 1; w + 10 <= 200; w += 10) {
        if (w < 10) continue;
        double prev = 0.0, cur = 0.0;
        for (std::size_t i = 0; i < 10; ++i) {
            prev += hist.epochs[w - 10 + i].train_loss;
            cur += hist.epochs[w + i].train_loss;
        }
        CHECK(cur <= prev + 1e-6);
    }
}

TEST_CASE("quantum training reduces the loss on a single-sample toy problem") {
    // 1-parameter landscape: loss = sin^2(theta/2) for label 0 at |000>
    ParameterizedCircuit probe;
    probe.dim = 2;
    probe.wires = 3;
    probe.readout_wire = 0;
    LayerSpec rot;
    rot.kind = LayerKind::Rotation;
    GatePlacement g;
    g.spec.kind = GateKind::Rotation;
    g.spec.axis = Axis::Y;
    g.spec.targets = {0};
    g.slot = 0;
    rot.gates.push_back(g);
    probe.layers.push_back(rot);
    probe.theta = {1.0};
    validate_circuit(probe);

    MarketSample s;
    s.features = {1, 0, 0, 0, 0};  // amplitude-encodes to |000>
    s.label = 0;
    SplitDataset data;
    data.train.assign(1, s);
    data.test.assign(1, s);

    TrainConfig cfg = tiny_config(5);
    cfg.learning_rate = 0.05;
    auto [trained, hist] = train_quantum(probe, data, cfg);
    REQUIRE(hist.epochs.size() == 5);
    for (std::size_t e = 1; e < hist.epochs.size(); ++e) {
        CHECK(hist.epochs[e].train_loss < hist.epochs[e - 1].train_loss);
    }
}

TEST_CASE("quantum training is deterministic for a fixed seed and config") {
    const auto data = test_helpers::separable_dataset(13, 60);
    TrainConfig cfg = tiny_config(3, 13);

    auto run = [&]() {
        auto circuit = build_qbn_ansatz();
        std::mt19937_64 rng(cfg.seed);
        init_theta(circuit, rng);
        return train_quantum(std::move(circuit), data, cfg);
    };
    const auto [a, ha] = run();
    const auto [b, hb] = run();
    REQUIRE(a.theta.size() == b.theta.size());
    CHECK(std::memcmp(a.theta.data(), b.theta.data(),
                      a.theta.size() * sizeof(double)) == 0);
    REQUIRE(ha.epochs.size() == hb.epochs.size());
    for (std::size_t e = 0; e < ha.epochs.size(); ++e) {
        CHECK(ha.epochs[e].train_loss == hb.epochs[e].train_loss);
        CHECK(ha.epochs[e].cumulative_ops == hb.epochs[e].cumulative_ops);
    }
}

TEST_CASE("quantum history charges the stated gate-application budget") {
    const auto data = test_helpers::separable_dataset(21, 40);  // 32 train
    TrainConfig cfg = tiny_config(1, 21);
    auto circuit = build_qbn_ansatz();
    std::mt19937_64 rng(cfg.seed);
    init_theta(circuit, rng);
    const auto [trained, hist] = train_quantum(std::move(circuit), data, cfg);
    REQUIRE(hist.epochs.size() == 1);
    // one batch of 32: 27 gates * 19 loss passes * 32 samples
    CHECK(hist.epochs[0].cumulative_ops == 27ull * 19ull * 32ull);
}

TEST_CASE("run_comparison produces three deterministic model rows") {
    const auto rows = synthetic_series(3, 80, 0.0005, 0.01, 0.8);
    const auto data = prepare_dataset(rows, 0.8);
    TrainConfig cfg = tiny_config(2, 3);

    const auto report = run_comparison(data, cfg);
    REQUIRE(report.models.size() == 3);
    CHECK(report.models[0].name == "ann");
    CHECK(report.models[1].name == "qqbn");
    CHECK(report.models[2].name == "qqtn");
    CHECK_FALSE(any_model_failed(report));

    const auto j = report_to_json(report);
    for (const auto& m : j.at("models")) {
        CHECK(m.contains("metrics"));
        CHECK(m.at("metrics").contains("accuracy"));
        CHECK(m.at("metrics").contains("precision"));
        CHECK(m.at("metrics").contains("recall"));
        CHECK(m.at("metrics").contains("f1"));
        CHECK(m.at("metrics").contains("sharpe"));
        CHECK(m.at("metrics").contains("ic"));
        CHECK(m.contains("op_counts"));
    }
    CHECK(j.at("models")[1].at("op_counts").at("units_per_forward") == 27);
    CHECK(j.at("models")[2].at("op_counts").at("units_per_forward") == 30);
    CHECK(j.at("models")[1].at("op_counts").at("forward_passes_per_gradient") == 19);
    CHECK(j.at("models")[2].at("op_counts").at("forward_passes_per_gradient") == 23);

    const auto report2 = run_comparison(data, cfg);
    CHECK(report_to_json(report2).dump(2) == j.dump(2));
}
