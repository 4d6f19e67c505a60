// Parameterized variational circuits: the qubit (QBN) and qutrit (QQTN)
// ansatz builders, forward evaluation, prediction, fidelity loss,
// finite-difference gradients, and operation counting.

#pragma once

#include "qforecast/gates.hpp"
#include "qforecast/market_data.hpp"
#include "qforecast/qudit_state.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <vector>

namespace qforecast {

enum class LayerKind { Rotation, Entangle };

// A gate plus the index of the trainable angle driving it. Entangle layers
// either carry no slot (fixed gates) or share one slot across the ring.
struct GatePlacement {
    GateSpec spec;
    std::optional<int> slot;
};

struct LayerSpec {
    LayerKind kind = LayerKind::Rotation;
    std::vector<GatePlacement> gates;
};

struct Prediction {
    double p_up = 0.0;
    int label_hat = 0;  // 1 iff p_up >= 0.5
};

struct ParameterizedCircuit {
    int dim = 2;
    int wires = 1;
    std::vector<LayerSpec> layers;
    std::vector<double> theta;
    int readout_wire = 0;
};

// Checks wire ranges, slot coverage (slots are exactly 0..theta.size()-1),
// rotation layers containing only slotted rotations, and control/target
// disjointness. Throws std::invalid_argument on violation.
void validate_circuit(const ParameterizedCircuit& c);

// 3 qubits, 3 blocks of (RX,RZ rotation layer + CNOT ring): depth 6,
// 18 parameters, readout wire 0. theta starts at zero.
ParameterizedCircuit build_qbn_ansatz();

// 5 qutrits, 2 blocks of (two subspace-Y rotations per wire + CRx ring with
// one shared angle per block, trigger level 2): depth 4, 22 parameters,
// readout wire 0. theta starts at zero.
ParameterizedCircuit build_qqtn_ansatz();

// Sequential application of all layers at the circuit's current theta.
QuditRegister forward(const ParameterizedCircuit& c, const QuditRegister& input);

// Amplitude encoding for qubit circuits, per-feature qutrit phase encoding
// for qutrit circuits. Features must be finite and in [0,1].
QuditRegister encode_input(const ParameterizedCircuit& c, std::span<const double> x);

// Readout marginals p0, p1 on the readout wire; p_up = p1/(p0+p1) (qutrit
// level-2 mass excluded and renormalized). Ties classify as 1.
Prediction predict(const ParameterizedCircuit& c, std::span<const double> x);

// 1 - P(readout == label) for the encoded sample, in [0,1].
double fidelity_loss(const ParameterizedCircuit& c, const MarketSample& sample);

// Arithmetic mean of per-sample fidelity losses; batch must be non-empty.
double batch_loss(const ParameterizedCircuit& c, std::span<const MarketSample> batch);

enum class FdScheme { Forward, Central };

// Per-coordinate finite differences of the batch loss: forward scheme
// (C(theta + d e_j) - C(theta)) / d, central (C(+d) - C(-d)) / 2d.
// The circuit (including theta) is left untouched. Coordinates may be
// evaluated on `threads` threads; the result is identical for any count.
std::vector<double> finite_diff_gradient(const ParameterizedCircuit& c,
                                         std::span<const MarketSample> batch,
                                         double delta, FdScheme scheme,
                                         int threads = 1);

struct OperationCount {
    std::size_t gate_applications_per_forward = 0;
    std::size_t parameter_count = 0;
    std::size_t forward_passes_per_gradient = 0;
};

OperationCount count_operations(const ParameterizedCircuit& c,
                                FdScheme scheme = FdScheme::Forward);

nlohmann::ordered_json circuit_to_json(const ParameterizedCircuit& c);
ParameterizedCircuit circuit_from_json(const nlohmann::json& j);

// ---- training fast path ------------------------------------------------
// Inputs never depend on theta, so training encodes each sample once and
// re-runs only the circuit.

struct EncodedDataset {
    int dim = 2;
    int wires = 0;
    std::vector<std::vector<Amplitude>> states;
    std::vector<int> labels;
};

EncodedDataset encode_dataset(const ParameterizedCircuit& c,
                              std::span<const MarketSample> samples);

// Mean fidelity loss over samples [begin, end) at an explicit theta.
double batch_loss_encoded(const ParameterizedCircuit& c, std::span<const double> theta,
                          const EncodedDataset& data, std::size_t begin,
                          std::size_t end);

// known_base, when given, is the already-computed loss at theta; the forward
// scheme then skips its base evaluation.
std::vector<double> finite_diff_gradient_encoded(const ParameterizedCircuit& c,
                                                 std::span<const double> theta,
                                                 const EncodedDataset& data,
                                                 std::size_t begin, std::size_t end,
                                                 double delta, FdScheme scheme,
                                                 int threads = 1,
                                                 std::optional<double> known_base = {});

Prediction predict_encoded(const ParameterizedCircuit& c, std::span<const double> theta,
                           const EncodedDataset& data, std::size_t index);

double dataset_accuracy(const ParameterizedCircuit& c, std::span<const double> theta,
                        const EncodedDataset& data);

}  // namespace qforecast
