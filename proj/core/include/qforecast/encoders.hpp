// Classical-to-quantum feature encodings: amplitude, per-wire phase
// (qubit and qutrit), one-hot basis, and Fourier-basis encodings.

#pragma once

#include "qforecast/qudit_state.hpp"

#include <span>

namespace qforecast {

using FeatureVector = std::vector<double>;

enum class EncodingScheme { Amplitude, Phase };

// Zero-pads x to length d^n, L2-normalizes, and writes the result as real
// amplitudes. Scale-invariant: encode(c*x) == encode(x) for c > 0.
QuditRegister amplitude_encode(std::span<const double> x, int d, int n);

// cos(pi v / 2)|0> + sin(pi v / 2)|1>, v in [0,1].
QuditRegister phase_encode_qubit(double v);

// Two sequential subspace-Y rotations of angle pi*v, first on (0,1) then on
// (1,2), applied to |0>. v = 0 gives |0>, v = 1 gives |2>, and intermediate
// values populate all three levels.
QuditRegister phase_encode_qutrit(double v);

// Amplitude: the 3-qubit layout (features padded to 8 amplitudes), d = 2 only.
// Phase: one feature per wire, |x| wires of dimension d.
// Requires every feature finite and in [0,1].
QuditRegister encode_feature_register(std::span<const double> x,
                                      EncodingScheme scheme, int d);

// basis_state(d, n, symbol).
QuditRegister basis_encode(std::size_t symbol, int d, int n);

// qft(d, n) applied to basis_encode(symbol, d, n).
QuditRegister qft_encode(std::size_t symbol, int d, int n);

}  // namespace qforecast
