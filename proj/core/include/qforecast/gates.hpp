// Unitary matrix constructors for d = 2 and d = 3, plus the GateSpec
// placement vocabulary used by parameterized circuits. Every constructor
// output is unitarity-checked.

#pragma once

#include "qforecast/qudit_state.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qforecast {

enum class Axis { X, Y, Z };

// Two levels of a qutrit that a rotation acts on; qubits always use {0,1}.
struct Subspace {
    int lo = 0;
    int hi = 1;
};

bool operator==(const Subspace& a, const Subspace& b);

// Dense square unitary. Construction enforces ||U†U - I||_max < 1e-9.
class GateMatrix {
public:
    GateMatrix(int side, std::vector<Amplitude> entries);

    static GateMatrix identity(int side);

    int side() const { return side_; }
    const Amplitude& at(int row, int col) const { return entries_[static_cast<std::size_t>(row) * side_ + col]; }
    const std::vector<Amplitude>& entries() const { return entries_; }

    GateMatrix dagger() const;

private:
    int side_;
    std::vector<Amplitude> entries_;
};

inline constexpr double kUnitarityTolerance = 1e-9;

// d=2: (1/sqrt2)[[1,1],[1,-1]]; d=3: the Fourier matrix F3.
GateMatrix hadamard(int d);

// Cyclic shift |j> -> |j+1 mod d>.
GateMatrix pauli_x(int d);

// Two-wire controlled shift |c,t> -> |c, t+c mod d> (control = first wire).
GateMatrix cnot(int d);

// d=2: exp(-i theta sigma_axis / 2). d=3: the same 2x2 rotation embedded in
// `subspace` with the remaining diagonal entry 1.
GateMatrix rotation(Axis axis, double theta, int d, Subspace subspace = {0, 1});

// Two-wire gate applying rotation(...) to the target iff the control wire is
// in `trigger_level`; identity on every other control level.
GateMatrix controlled_rotation(Axis axis, double theta, int d, Subspace subspace,
                               int trigger_level);

// Entries omega^{jk}/sqrt(d^n) with omega = exp(2 pi i / d^n). d^n <= 256.
GateMatrix qft(int d, int n);

enum class GateKind { Hadamard, PauliX, Cnot, Rotation, ControlledRotation };

std::string to_string(GateKind kind);
std::string to_string(Axis axis);
GateKind gate_kind_from_string(const std::string& s);
Axis axis_from_string(const std::string& s);

// One gate placement: what to apply and where. `theta` holds a fixed angle;
// parameterized circuits bind angles through parameter slots instead.
struct GateSpec {
    GateKind kind = GateKind::Rotation;
    Axis axis = Axis::Z;
    std::optional<double> theta;
    Subspace subspace{0, 1};
    std::vector<int> targets;

    struct Control {
        int wire = 0;
        int trigger_level = 0;
    };
    std::optional<Control> control;
};

// Concrete matrix for a spec at a given angle (ignored for fixed gates).
GateMatrix materialize(const GateSpec& spec, int d, double theta);

// Wires the gate acts on, control first when present.
std::vector<int> gate_wires(const GateSpec& spec);

}  // namespace qforecast
