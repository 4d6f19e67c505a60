#include "qforecast/qudit_state.hpp"

#include "qforecast/gates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qforecast {

namespace {

void check_dim(int dim) {
    if (dim != 2 && dim != 3) {
        throw std::invalid_argument("qudit dimension must be 2 or 3, got " +
                                    std::to_string(dim));
    }
}

}  // namespace

std::size_t pow_size(int dim, int wires) {
    std::size_t n = 1;
    for (int i = 0; i < wires; ++i) n *= static_cast<std::size_t>(dim);
    return n;
}

QuditRegister::QuditRegister(int dim, int wires, std::vector<Amplitude> amps)
    : dim_(dim), wires_(wires), amps_(std::move(amps)) {
    check_dim(dim_);
    if (wires_ < 1) throw std::invalid_argument("wire count must be >= 1");
    if (amps_.size() != pow_size(dim_, wires_)) {
        throw std::invalid_argument("amplitude vector length " +
                                    std::to_string(amps_.size()) +
                                    " does not equal dim^wires");
    }
    double n2 = 0.0;
    for (const auto& a : amps_) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("amplitudes must be finite");
        }
        n2 += std::norm(a);
    }
    if (std::abs(n2 - 1.0) > kNormTolerance) {
        throw std::invalid_argument("register norm^2 = " + std::to_string(n2) +
                                    " is outside the 1e-9 tolerance");
    }
}

QuditRegister::QuditRegister(int dim, int wires, std::vector<Amplitude> amps,
                             unchecked_tag)
    : dim_(dim), wires_(wires), amps_(std::move(amps)) {}

QuditRegister QuditRegister::basis_state(int dim, int wires, std::size_t index) {
    check_dim(dim);
    if (wires < 1) throw std::invalid_argument("wire count must be >= 1");
    const std::size_t n = pow_size(dim, wires);
    if (index >= n) {
        throw std::out_of_range("basis index " + std::to_string(index) +
                                " out of range for dim^wires = " + std::to_string(n));
    }
    std::vector<Amplitude> amps(n, Amplitude{0.0, 0.0});
    amps[index] = Amplitude{1.0, 0.0};
    return QuditRegister(dim, wires, std::move(amps), unchecked_tag{});
}

QuditRegister basis_state(int dim, int wires, std::size_t index) {
    return QuditRegister::basis_state(dim, wires, index);
}

std::size_t QuditRegister::stride(int wire) const {
    return pow_size(dim_, wires_ - 1 - wire);
}

int QuditRegister::digit(std::size_t index, int wire) const {
    return static_cast<int>((index / stride(wire)) % static_cast<std::size_t>(dim_));
}

double QuditRegister::norm_squared() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return n2;
}

QuditRegister QuditRegister::renormalized() const {
    const double n = std::sqrt(norm_squared());
    if (n <= 0.0) throw std::domain_error("cannot renormalize the zero vector");
    std::vector<Amplitude> amps(amps_);
    for (auto& a : amps) a /= n;
    return QuditRegister(dim_, wires_, std::move(amps), unchecked_tag{});
}

namespace detail {

void apply_unitary_inplace(std::vector<Amplitude>& amps, int dim, int wires,
                           const GateMatrix& gate, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    const std::size_t side = static_cast<std::size_t>(gate.side());

    // Offsets of the gate's local index space inside the full register:
    // local index t (big-endian over the listed wires) contributes
    // sum_j digit_j(t) * stride(targets[j]).
    std::vector<std::size_t> offsets(side, 0);
    {
        std::vector<std::size_t> strides(k);
        for (int j = 0; j < k; ++j) {
            strides[j] = pow_size(dim, wires - 1 - targets[j]);
        }
        for (std::size_t t = 0; t < side; ++t) {
            std::size_t rem = t;
            std::size_t off = 0;
            for (int j = k - 1; j >= 0; --j) {
                off += (rem % dim) * strides[j];
                rem /= dim;
            }
            offsets[t] = off;
        }
    }

    // Non-target wires and their strides, for enumerating base indices.
    std::vector<std::size_t> rest_strides;
    rest_strides.reserve(wires - k);
    for (int w = 0; w < wires; ++w) {
        if (std::find(targets.begin(), targets.end(), w) == targets.end()) {
            rest_strides.push_back(pow_size(dim, wires - 1 - w));
        }
    }

    std::vector<Amplitude> in(side), out(side);
    std::vector<int> counter(rest_strides.size(), 0);
    const std::size_t n_bases = pow_size(dim, wires - k);
    std::size_t base = 0;
    for (std::size_t b = 0; b < n_bases; ++b) {
        for (std::size_t t = 0; t < side; ++t) in[t] = amps[base + offsets[t]];
        const Amplitude* m = gate.entries().data();
        for (std::size_t r = 0; r < side; ++r) {
            Amplitude acc{0.0, 0.0};
            for (std::size_t c = 0; c < side; ++c) acc += m[r * side + c] * in[c];
            out[r] = acc;
        }
        for (std::size_t t = 0; t < side; ++t) amps[base + offsets[t]] = out[t];

        // Advance the mixed-radix counter over non-target wires.
        for (int j = static_cast<int>(rest_strides.size()) - 1; j >= 0; --j) {
            base += rest_strides[j];
            if (++counter[j] < dim) break;
            base -= static_cast<std::size_t>(dim) * rest_strides[j];
            counter[j] = 0;
        }
    }
}

}  // namespace detail

QuditRegister apply_unitary(const QuditRegister& reg, const GateMatrix& gate,
                            std::span<const int> wires) {
    const int k = static_cast<int>(wires.size());
    if (k < 1 || k > reg.wires()) {
        throw std::invalid_argument("gate must act on between 1 and n wires");
    }
    for (int j = 0; j < k; ++j) {
        if (wires[j] < 0 || wires[j] >= reg.wires()) {
            throw std::out_of_range("gate wire " + std::to_string(wires[j]) +
                                    " out of range");
        }
        for (int i = 0; i < j; ++i) {
            if (wires[i] == wires[j]) {
                throw std::invalid_argument("gate wires must be distinct");
            }
        }
    }
    if (static_cast<std::size_t>(gate.side()) != pow_size(reg.dim(), k)) {
        throw std::invalid_argument("gate side " + std::to_string(gate.side()) +
                                    " does not match dim^k for k = " +
                                    std::to_string(k));
    }

    std::vector<Amplitude> amps = reg.amps();
    detail::apply_unitary_inplace(amps, reg.dim(), reg.wires(), gate, wires);

    QuditRegister out(reg.dim(), reg.wires(), std::move(amps),
                      QuditRegister::unchecked_tag{});
    if (std::abs(out.norm_squared() - 1.0) > kNormTolerance) {
        throw std::runtime_error("unitary application failed to preserve norm");
    }
    return out;
}

ProbabilityVector born_probabilities(const QuditRegister& reg) {
    ProbabilityVector probs(reg.size());
    for (std::size_t i = 0; i < reg.size(); ++i) probs[i] = std::norm(reg[i]);
    return probs;
}

double marginal_probability(const QuditRegister& reg, int wire, int level) {
    if (wire < 0 || wire >= reg.wires()) {
        throw std::out_of_range("marginal wire out of range");
    }
    if (level < 0 || level >= reg.dim()) {
        throw std::out_of_range("marginal level out of range");
    }
    const std::size_t s = reg.stride(wire);
    const std::size_t block = s * static_cast<std::size_t>(reg.dim());
    double p = 0.0;
    for (std::size_t big = 0; big < reg.size(); big += block) {
        const std::size_t start = big + static_cast<std::size_t>(level) * s;
        for (std::size_t off = 0; off < s; ++off) p += std::norm(reg[start + off]);
    }
    return p;
}

double fidelity(const QuditRegister& a, const QuditRegister& b) {
    if (a.dim() != b.dim() || a.wires() != b.wires()) {
        throw std::invalid_argument("fidelity requires registers of equal shape");
    }
    Amplitude overlap{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        overlap += std::conj(a[i]) * b[i];
    }
    return std::norm(overlap);
}

std::size_t sample(const QuditRegister& reg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < reg.size(); ++i) {
        cum += std::norm(reg[i]);
        if (u < cum) return i;
    }
    return reg.size() - 1;
}

}  // namespace qforecast
