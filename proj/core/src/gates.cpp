#include "qforecast/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qforecast {

namespace {

void check_dim(int d) {
    if (d != 2 && d != 3) {
        throw std::invalid_argument("gate dimension must be 2 or 3, got " +
                                    std::to_string(d));
    }
}

void check_subspace(int d, Subspace ss) {
    if (d == 2) {
        if (!(ss.lo == 0 && ss.hi == 1)) {
            throw std::invalid_argument("qubit rotations act on the (0,1) subspace");
        }
        return;
    }
    const bool valid = ss.lo >= 0 && ss.hi < d && ss.lo < ss.hi;
    if (!valid) {
        throw std::invalid_argument("invalid rotation subspace (" +
                                    std::to_string(ss.lo) + "," +
                                    std::to_string(ss.hi) + ")");
    }
}

// 2x2 block exp(-i theta sigma_axis / 2), row-major.
std::array<Amplitude, 4> rotation_block(Axis axis, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (axis) {
        case Axis::X:
            return {Amplitude{c, 0}, Amplitude{0, -s}, Amplitude{0, -s}, Amplitude{c, 0}};
        case Axis::Y:
            return {Amplitude{c, 0}, Amplitude{-s, 0}, Amplitude{s, 0}, Amplitude{c, 0}};
        case Axis::Z:
            return {Amplitude{c, -s}, Amplitude{0, 0}, Amplitude{0, 0}, Amplitude{c, s}};
    }
    throw std::logic_error("unreachable");
}

}  // namespace

bool operator==(const Subspace& a, const Subspace& b) {
    return a.lo == b.lo && a.hi == b.hi;
}

GateMatrix::GateMatrix(int side, std::vector<Amplitude> entries)
    : side_(side), entries_(std::move(entries)) {
    if (side_ < 1 || entries_.size() != static_cast<std::size_t>(side_) * side_) {
        throw std::invalid_argument("gate matrix entries do not form a square of the stated side");
    }
    // ||U†U - I||_max < 1e-9
    for (int r = 0; r < side_; ++r) {
        for (int c = 0; c < side_; ++c) {
            Amplitude acc{0.0, 0.0};
            for (int k = 0; k < side_; ++k) {
                acc += std::conj(at(k, r)) * at(k, c);
            }
            const Amplitude expected = (r == c) ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            if (std::abs(acc - expected) >= kUnitarityTolerance) {
                throw std::invalid_argument("matrix is not unitary within 1e-9");
            }
        }
    }
}

GateMatrix GateMatrix::identity(int side) {
    std::vector<Amplitude> e(static_cast<std::size_t>(side) * side, Amplitude{0.0, 0.0});
    for (int i = 0; i < side; ++i) e[static_cast<std::size_t>(i) * side + i] = Amplitude{1.0, 0.0};
    return GateMatrix(side, std::move(e));
}

GateMatrix GateMatrix::dagger() const {
    std::vector<Amplitude> e(entries_.size());
    for (int r = 0; r < side_; ++r) {
        for (int c = 0; c < side_; ++c) {
            e[static_cast<std::size_t>(c) * side_ + r] = std::conj(at(r, c));
        }
    }
    return GateMatrix(side_, std::move(e));
}

GateMatrix hadamard(int d) {
    check_dim(d);
    if (d == 2) {
        const double h = 1.0 / std::sqrt(2.0);
        return GateMatrix(2, {Amplitude{h, 0}, Amplitude{h, 0},
                              Amplitude{h, 0}, Amplitude{-h, 0}});
    }
    // Fourier matrix F3: entries omega^{jk}/sqrt(3), omega = exp(2 pi i/3).
    const double inv = 1.0 / std::sqrt(3.0);
    std::vector<Amplitude> e(9);
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            const double phase = 2.0 * std::numbers::pi * ((j * k) % 3) / 3.0;
            e[static_cast<std::size_t>(j) * 3 + k] = std::polar(inv, phase);
        }
    }
    return GateMatrix(3, std::move(e));
}

GateMatrix pauli_x(int d) {
    check_dim(d);
    std::vector<Amplitude> e(static_cast<std::size_t>(d) * d, Amplitude{0.0, 0.0});
    for (int j = 0; j < d; ++j) {
        e[static_cast<std::size_t>((j + 1) % d) * d + j] = Amplitude{1.0, 0.0};
    }
    return GateMatrix(d, std::move(e));
}

GateMatrix cnot(int d) {
    check_dim(d);
    const int side = d * d;
    std::vector<Amplitude> e(static_cast<std::size_t>(side) * side, Amplitude{0.0, 0.0});
    for (int c = 0; c < d; ++c) {
        for (int t = 0; t < d; ++t) {
            const int row = c * d + (t + c) % d;
            const int col = c * d + t;
            e[static_cast<std::size_t>(row) * side + col] = Amplitude{1.0, 0.0};
        }
    }
    return GateMatrix(side, std::move(e));
}

GateMatrix rotation(Axis axis, double theta, int d, Subspace subspace) {
    check_dim(d);
    check_subspace(d, subspace);
    const auto block = rotation_block(axis, theta);
    std::vector<Amplitude> e(static_cast<std::size_t>(d) * d, Amplitude{0.0, 0.0});
    for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i) * d + i] = Amplitude{1.0, 0.0};
    e[static_cast<std::size_t>(subspace.lo) * d + subspace.lo] = block[0];
    e[static_cast<std::size_t>(subspace.lo) * d + subspace.hi] = block[1];
    e[static_cast<std::size_t>(subspace.hi) * d + subspace.lo] = block[2];
    e[static_cast<std::size_t>(subspace.hi) * d + subspace.hi] = block[3];
    return GateMatrix(d, std::move(e));
}

GateMatrix controlled_rotation(Axis axis, double theta, int d, Subspace subspace,
                               int trigger_level) {
    check_dim(d);
    check_subspace(d, subspace);
    if (trigger_level < 0 || trigger_level >= d) {
        throw std::invalid_argument("trigger level out of range");
    }
    const GateMatrix rot = rotation(axis, theta, d, subspace);
    const int side = d * d;
    std::vector<Amplitude> e(static_cast<std::size_t>(side) * side, Amplitude{0.0, 0.0});
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
            for (int t = 0; t < d; ++t) {
                const Amplitude v = (c == trigger_level)
                                        ? rot.at(r, t)
                                        : (r == t ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0});
                e[static_cast<std::size_t>(c * d + r) * side + (c * d + t)] = v;
            }
        }
    }
    return GateMatrix(side, std::move(e));
}

GateMatrix qft(int d, int n) {
    check_dim(d);
    if (n < 1) throw std::invalid_argument("qft requires n >= 1");
    const std::size_t size = pow_size(d, n);
    if (size > 256) {
        throw std::invalid_argument("qft size d^n = " + std::to_string(size) +
                                    " exceeds the 256 cap");
    }
    const double inv = 1.0 / std::sqrt(static_cast<double>(size));
    std::vector<Amplitude> e(size * size);
    for (std::size_t j = 0; j < size; ++j) {
        for (std::size_t k = 0; k < size; ++k) {
            const double phase = 2.0 * std::numbers::pi *
                                 static_cast<double>((j * k) % size) /
                                 static_cast<double>(size);
            e[j * size + k] = std::polar(inv, phase);
        }
    }
    return GateMatrix(static_cast<int>(size), std::move(e));
}

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::Hadamard: return "h";
        case GateKind::PauliX: return "x";
        case GateKind::Cnot: return "cnot";
        case GateKind::Rotation: return "r";
        case GateKind::ControlledRotation: return "cr";
    }
    throw std::logic_error("unreachable");
}

std::string to_string(Axis axis) {
    switch (axis) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    throw std::logic_error("unreachable");
}

GateKind gate_kind_from_string(const std::string& s) {
    if (s == "h") return GateKind::Hadamard;
    if (s == "x") return GateKind::PauliX;
    if (s == "cnot") return GateKind::Cnot;
    if (s == "r") return GateKind::Rotation;
    if (s == "cr") return GateKind::ControlledRotation;
    throw std::invalid_argument("unknown gate kind '" + s + "'");
}

Axis axis_from_string(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw std::invalid_argument("unknown axis '" + s + "'");
}

GateMatrix materialize(const GateSpec& spec, int d, double theta) {
    switch (spec.kind) {
        case GateKind::Hadamard: return hadamard(d);
        case GateKind::PauliX: return pauli_x(d);
        case GateKind::Cnot: return cnot(d);
        case GateKind::Rotation: return rotation(spec.axis, theta, d, spec.subspace);
        case GateKind::ControlledRotation: {
            if (!spec.control) {
                throw std::invalid_argument("controlled rotation requires a control");
            }
            return controlled_rotation(spec.axis, theta, d, spec.subspace,
                                       spec.control->trigger_level);
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<int> gate_wires(const GateSpec& spec) {
    std::vector<int> wires;
    if (spec.control) wires.push_back(spec.control->wire);
    wires.insert(wires.end(), spec.targets.begin(), spec.targets.end());
    return wires;
}

}  // namespace qforecast
