#include "qforecast/classical_nn.hpp"
#include "qforecast/encoders.hpp"
#include "qforecast/gates.hpp"
#include "qforecast/market_data.hpp"
#include "qforecast/training.hpp"
#include "qforecast/vqc.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace qforecast;

namespace {

std::vector<MarketSample> random_batch(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<MarketSample> batch(n);
    for (auto& s : batch) {
        for (auto& f : s.features) f = unit(rng);
        s.label = static_cast<int>(rng() % 2);
    }
    return batch;
}

ParameterizedCircuit randomized(ParameterizedCircuit c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    init_theta(c, rng);
    return c;
}

void BM_ApplyQutritGate(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto reg = basis_state(3, 5, 0);
    const auto gate = rotation(Axis::Y, 0.7, 3, {0, 1});
    const std::vector<int> wire{2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_unitary(reg, gate, wire));
    }
}
BENCHMARK(BM_ApplyQutritGate);

void BM_QbnForward(benchmark::State& state) {
    const auto c = randomized(build_qbn_ansatz(), 2);
    const auto in = encode_input(c, std::vector<double>{0.3, 0.7, 0.2, 0.9, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(c, in));
    }
}
BENCHMARK(BM_QbnForward);

void BM_QqtnForward(benchmark::State& state) {
    const auto c = randomized(build_qqtn_ansatz(), 3);
    const auto in = encode_input(c, std::vector<double>{0.3, 0.7, 0.2, 0.9, 0.5});
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(c, in));
    }
}
BENCHMARK(BM_QqtnForward);

void BM_QbnBatchGradient(benchmark::State& state) {
    const auto c = randomized(build_qbn_ansatz(), 4);
    const auto batch = random_batch(32, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            finite_diff_gradient(c, batch, 1e-3, FdScheme::Forward));
    }
}
BENCHMARK(BM_QbnBatchGradient);

void BM_QqtnBatchGradient(benchmark::State& state) {
    const auto c = randomized(build_qqtn_ansatz(), 6);
    const auto batch = random_batch(32, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            finite_diff_gradient(c, batch, 1e-3, FdScheme::Forward));
    }
}
BENCHMARK(BM_QqtnBatchGradient);

void BM_MlpForwardBackward(benchmark::State& state) {
    std::mt19937_64 rng(8);
    const auto params = build_reference_ann(rng);
    const auto batch = random_batch(32, 9);
    const Matrix x = features_matrix(batch);
    const auto labels = labels_vector(batch);
    for (auto _ : state) {
        const auto [out, cache] = model_forward(params, x, Activation::Softmax);
        benchmark::DoNotOptimize(model_backward(params, cache, labels));
    }
}
BENCHMARK(BM_MlpForwardBackward);

}  // namespace

BENCHMARK_MAIN();
