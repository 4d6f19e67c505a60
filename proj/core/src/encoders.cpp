#include "qforecast/encoders.hpp"

#include "qforecast/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qforecast {

namespace {

void check_unit_interval(double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw std::domain_error("phase-encoded feature must lie in [0,1], got " +
                                std::to_string(v));
    }
}

}  // namespace

QuditRegister amplitude_encode(std::span<const double> x, int d, int n) {
    const std::size_t capacity = pow_size(d, n);
    if (x.size() > capacity) {
        throw std::invalid_argument("feature vector of length " +
                                    std::to_string(x.size()) +
                                    " exceeds register capacity " +
                                    std::to_string(capacity));
    }
    double n2 = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) throw std::domain_error("features must be finite");
        n2 += v * v;
    }
    if (n2 <= 0.0) {
        throw std::domain_error("amplitude encoding of the all-zero vector is undefined");
    }
    const double inv = 1.0 / std::sqrt(n2);
    std::vector<Amplitude> amps(capacity, Amplitude{0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        amps[i] = Amplitude{x[i] * inv, 0.0};
    }
    return QuditRegister(d, n, std::move(amps));
}

QuditRegister phase_encode_qubit(double v) {
    check_unit_interval(v);
    const double half = std::numbers::pi * v / 2.0;
    return QuditRegister(2, 1, {Amplitude{std::cos(half), 0.0},
                                Amplitude{std::sin(half), 0.0}});
}

QuditRegister phase_encode_qutrit(double v) {
    check_unit_interval(v);
    const double angle = std::numbers::pi * v;
    QuditRegister reg = basis_state(3, 1, 0);
    const int wire[] = {0};
    reg = apply_unitary(reg, rotation(Axis::Y, angle, 3, {0, 1}), wire);
    reg = apply_unitary(reg, rotation(Axis::Y, angle, 3, {1, 2}), wire);
    return reg;
}

QuditRegister encode_feature_register(std::span<const double> x,
                                      EncodingScheme scheme, int d) {
    if (x.empty()) throw std::invalid_argument("cannot encode an empty feature vector");
    for (double v : x) check_unit_interval(v);

    if (scheme == EncodingScheme::Amplitude) {
        if (d != 2) {
            throw std::invalid_argument("amplitude encoding uses the qubit layout (d = 2)");
        }
        int n = 1;
        while (pow_size(2, n) < x.size()) ++n;
        return amplitude_encode(x, 2, n);
    }

    // Phase: tensor product of per-feature single-wire encodings, feature i
    // on wire i (wire 0 most significant).
    const int f = static_cast<int>(x.size());
    std::vector<std::vector<Amplitude>> single;
    single.reserve(f);
    for (double v : x) {
        const QuditRegister one =
            (d == 2) ? phase_encode_qubit(v) : phase_encode_qutrit(v);
        single.push_back(one.amps());
    }
    const std::size_t total = pow_size(d, f);
    std::vector<Amplitude> amps(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        Amplitude prod{1.0, 0.0};
        std::size_t rem = idx;
        for (int w = f - 1; w >= 0; --w) {
            prod *= single[w][rem % d];
            rem /= d;
        }
        amps[idx] = prod;
    }
    return QuditRegister(d, f, std::move(amps));
}

QuditRegister basis_encode(std::size_t symbol, int d, int n) {
    return basis_state(d, n, symbol);
}

QuditRegister qft_encode(std::size_t symbol, int d, int n) {
    QuditRegister reg = basis_encode(symbol, d, n);
    std::vector<int> wires(n);
    for (int w = 0; w < n; ++w) wires[w] = w;
    return apply_unitary(reg, qft(d, n), wires);
}

}  // namespace qforecast
