// Dense statevector simulation of n wires of dimension d (d in {2,3}).
// Basis indexing is big-endian mixed radix: wire 0 is the most significant
// digit of the basis index.

#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace qforecast {

using Amplitude = std::complex<double>;
using ProbabilityVector = std::vector<double>;

// Norm drift tolerated after construction or unitary application.
inline constexpr double kNormTolerance = 1e-9;

class GateMatrix;

// Immutable pure state. All operations return new registers; there is no
// silent renormalization anywhere (renormalized() is explicit).
class QuditRegister {
public:
    // Validates d in {2,3}, n >= 1, amps.size() == d^n, finite entries,
    // and unit norm within kNormTolerance.
    QuditRegister(int dim, int wires, std::vector<Amplitude> amps);

    static QuditRegister basis_state(int dim, int wires, std::size_t index);

    int dim() const { return dim_; }
    int wires() const { return wires_; }
    std::size_t size() const { return amps_.size(); }
    const std::vector<Amplitude>& amps() const { return amps_; }
    const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

    // dim^(wires-1-wire): distance between consecutive levels of `wire`.
    std::size_t stride(int wire) const;
    // Digit of basis index `index` at `wire` (big-endian).
    int digit(std::size_t index, int wire) const;

    double norm_squared() const;
    QuditRegister renormalized() const;

private:
    struct unchecked_tag {};
    QuditRegister(int dim, int wires, std::vector<Amplitude> amps, unchecked_tag);

    int dim_;
    int wires_;
    std::vector<Amplitude> amps_;

    friend QuditRegister apply_unitary(const QuditRegister&, const GateMatrix&,
                                       std::span<const int>);
};

std::size_t pow_size(int dim, int wires);

QuditRegister basis_state(int dim, int wires, std::size_t index);

// Acts with `gate` on the listed wires (wires[0] is the most significant
// digit of the gate's own index space) and with identity elsewhere.
// Requires gate.side() == dim^wires.size(), wires distinct and in range.
QuditRegister apply_unitary(const QuditRegister& reg, const GateMatrix& gate,
                            std::span<const int> wires);

// probs[i] = |amps[i]|^2
ProbabilityVector born_probabilities(const QuditRegister& reg);

// Probability that `wire` is observed in `level`, all other wires summed out.
double marginal_probability(const QuditRegister& reg, int wire, int level);

// |<a|b>|^2
double fidelity(const QuditRegister& a, const QuditRegister& b);

// One basis-index draw from the Born distribution.
std::size_t sample(const QuditRegister& reg, std::mt19937_64& rng);

namespace detail {
// In-place gate application on a raw amplitude buffer. No norm check; the
// caller guarantees the matrix is unitary. Used by the circuit evaluator.
void apply_unitary_inplace(std::vector<Amplitude>& amps, int dim, int wires,
                           const GateMatrix& gate, std::span<const int> targets);
}  // namespace detail

}  // namespace qforecast
