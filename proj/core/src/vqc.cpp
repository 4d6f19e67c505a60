#include "qforecast/vqc.hpp"

#include "qforecast/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>

namespace qforecast {

namespace {

// A gate with its angle resolved and its application strategy chosen.
// Everything the ansatz vocabulary needs acts on one target wire with an
// optional control wire.
struct BoundGate {
    enum class Op { SingleWireMatrix, TwoLevelRotation, ControlledShift, ControlledTwoLevel };
    Op op = Op::TwoLevelRotation;
    int target = 0;
    int control = -1;
    int trigger = 0;
    int lo = 0, hi = 1;
    Amplitude r00, r01, r10, r11;      // two-level rotation block
    std::array<Amplitude, 9> mat{};    // d x d single-wire matrix
};

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

double placement_theta(const GatePlacement& g, std::span<const double> theta) {
    if (g.slot) return theta[static_cast<std::size_t>(*g.slot)];
    if (g.spec.theta) return *g.spec.theta;
    return 0.0;
}

std::vector<BoundGate> bind_circuit(const ParameterizedCircuit& c,
                                    std::span<const double> theta) {
    std::vector<BoundGate> bound;
    for (const auto& layer : c.layers) {
        for (const auto& g : layer.gates) {
            BoundGate b;
            switch (g.spec.kind) {
                case GateKind::Rotation: {
                    const auto blk = rotation_block(g.spec.axis, placement_theta(g, theta));
                    b.op = BoundGate::Op::TwoLevelRotation;
                    b.target = g.spec.targets.at(0);
                    b.lo = g.spec.subspace.lo;
                    b.hi = g.spec.subspace.hi;
                    b.r00 = blk[0]; b.r01 = blk[1]; b.r10 = blk[2]; b.r11 = blk[3];
                    break;
                }
                case GateKind::ControlledRotation: {
                    const auto blk = rotation_block(g.spec.axis, placement_theta(g, theta));
                    b.op = BoundGate::Op::ControlledTwoLevel;
                    b.control = g.spec.control->wire;
                    b.trigger = g.spec.control->trigger_level;
                    b.target = g.spec.targets.at(0);
                    b.lo = g.spec.subspace.lo;
                    b.hi = g.spec.subspace.hi;
                    b.r00 = blk[0]; b.r01 = blk[1]; b.r10 = blk[2]; b.r11 = blk[3];
                    break;
                }
                case GateKind::Cnot:
                    b.op = BoundGate::Op::ControlledShift;
                    b.control = g.spec.targets.at(0);
                    b.target = g.spec.targets.at(1);
                    break;
                case GateKind::Hadamard:
                case GateKind::PauliX: {
                    b.op = BoundGate::Op::SingleWireMatrix;
                    b.target = g.spec.targets.at(0);
                    const GateMatrix m = materialize(g.spec, c.dim, 0.0);
                    for (int r = 0; r < c.dim; ++r) {
                        for (int col = 0; col < c.dim; ++col) {
                            b.mat[static_cast<std::size_t>(r) * c.dim + col] = m.at(r, col);
                        }
                    }
                    break;
                }
            }
            bound.push_back(b);
        }
    }
    return bound;
}

void run_bound(const std::vector<BoundGate>& gates, std::vector<Amplitude>& amps,
               int d, int n) {
    const std::size_t total = amps.size();
    for (const auto& g : gates) {
        const std::size_t st = pow_size(d, n - 1 - g.target);
        const std::size_t tblock = st * static_cast<std::size_t>(d);
        switch (g.op) {
            case BoundGate::Op::TwoLevelRotation: {
                const std::size_t off_lo = static_cast<std::size_t>(g.lo) * st;
                const std::size_t off_hi = static_cast<std::size_t>(g.hi) * st;
                for (std::size_t big = 0; big < total; big += tblock) {
                    for (std::size_t off = 0; off < st; ++off) {
                        Amplitude& a = amps[big + off_lo + off];
                        Amplitude& b = amps[big + off_hi + off];
                        const Amplitude a0 = a, b0 = b;
                        a = g.r00 * a0 + g.r01 * b0;
                        b = g.r10 * a0 + g.r11 * b0;
                    }
                }
                break;
            }
            case BoundGate::Op::ControlledTwoLevel: {
                const std::size_t sc = pow_size(d, n - 1 - g.control);
                const std::size_t cblock = sc * static_cast<std::size_t>(d);
                const std::size_t coff = static_cast<std::size_t>(g.trigger) * sc;
                const std::size_t off_lo = static_cast<std::size_t>(g.lo) * st;
                const std::size_t off_hi = static_cast<std::size_t>(g.hi) * st;
                for (std::size_t cb = 0; cb < total; cb += cblock) {
                    for (std::size_t co = 0; co < sc; ++co) {
                        const std::size_t i = cb + coff + co;
                        // among control-selected indices, act where the
                        // target digit is `lo`
                        if ((i / st) % static_cast<std::size_t>(d) !=
                            static_cast<std::size_t>(g.lo)) {
                            continue;
                        }
                        Amplitude& a = amps[i];
                        Amplitude& b = amps[i + (off_hi - off_lo)];
                        const Amplitude a0 = a, b0 = b;
                        a = g.r00 * a0 + g.r01 * b0;
                        b = g.r10 * a0 + g.r11 * b0;
                    }
                }
                break;
            }
            case BoundGate::Op::ControlledShift: {
                const std::size_t sc = pow_size(d, n - 1 - g.control);
                const std::size_t cblock = sc * static_cast<std::size_t>(d);
                Amplitude tmp[3];
                for (int cv = 1; cv < d; ++cv) {
                    const std::size_t coff = static_cast<std::size_t>(cv) * sc;
                    for (std::size_t cb = 0; cb < total; cb += cblock) {
                        for (std::size_t co = 0; co < sc; ++co) {
                            const std::size_t i = cb + coff + co;
                            if ((i / st) % static_cast<std::size_t>(d) != 0) continue;
                            for (int t = 0; t < d; ++t) tmp[t] = amps[i + t * st];
                            for (int t = 0; t < d; ++t) {
                                amps[i + ((t + cv) % d) * st] = tmp[t];
                            }
                        }
                    }
                }
                break;
            }
            case BoundGate::Op::SingleWireMatrix: {
                Amplitude in[3], out[3];
                for (std::size_t big = 0; big < total; big += tblock) {
                    for (std::size_t off = 0; off < st; ++off) {
                        const std::size_t base = big + off;
                        for (int t = 0; t < d; ++t) in[t] = amps[base + t * st];
                        for (int r = 0; r < d; ++r) {
                            Amplitude acc{0.0, 0.0};
                            for (int t = 0; t < d; ++t) {
                                acc += g.mat[static_cast<std::size_t>(r) * d + t] * in[t];
                            }
                            out[r] = acc;
                        }
                        for (int r = 0; r < d; ++r) amps[base + r * st] = out[r];
                    }
                }
                break;
            }
        }
    }
}

double marginal_raw(const std::vector<Amplitude>& amps, int d, int n, int wire,
                    int level) {
    const std::size_t st = pow_size(d, n - 1 - wire);
    const std::size_t block = st * static_cast<std::size_t>(d);
    const std::size_t off = static_cast<std::size_t>(level) * st;
    double p = 0.0;
    for (std::size_t big = 0; big < amps.size(); big += block) {
        for (std::size_t o = 0; o < st; ++o) p += std::norm(amps[big + off + o]);
    }
    return p;
}

double loss_raw(const ParameterizedCircuit& c, const std::vector<BoundGate>& bound,
                const std::vector<Amplitude>& encoded, int label,
                std::vector<Amplitude>& scratch) {
    scratch = encoded;
    run_bound(bound, scratch, c.dim, c.wires);
    return 1.0 - marginal_raw(scratch, c.dim, c.wires, c.readout_wire, label);
}

void check_label(int label) {
    if (label != 0 && label != 1) {
        throw std::domain_error("sample label must be 0 or 1");
    }
}

}  // namespace

void validate_circuit(const ParameterizedCircuit& c) {
    if (c.dim != 2 && c.dim != 3) throw std::invalid_argument("circuit dim must be 2 or 3");
    if (c.wires < 1) throw std::invalid_argument("circuit needs at least one wire");
    if (c.readout_wire < 0 || c.readout_wire >= c.wires) {
        throw std::invalid_argument("readout wire out of range");
    }
    std::set<int> slots;
    for (const auto& layer : c.layers) {
        for (const auto& g : layer.gates) {
            const std::size_t want_targets = g.spec.kind == GateKind::Cnot ? 2 : 1;
            if (g.spec.targets.size() != want_targets) {
                throw std::invalid_argument("wrong target count for gate kind");
            }
            if (g.spec.kind == GateKind::ControlledRotation && !g.spec.control) {
                throw std::invalid_argument("controlled rotation requires a control");
            }
            const auto wires = gate_wires(g.spec);
            for (std::size_t a = 0; a < wires.size(); ++a) {
                if (wires[a] < 0 || wires[a] >= c.wires) {
                    throw std::invalid_argument("gate wire out of range");
                }
                for (std::size_t bw = 0; bw < a; ++bw) {
                    if (wires[bw] == wires[a]) {
                        throw std::invalid_argument("gate wires must be distinct");
                    }
                }
            }
            if (g.spec.control) {
                for (int t : g.spec.targets) {
                    if (t == g.spec.control->wire) {
                        throw std::invalid_argument("control wire may not be a target");
                    }
                }
            }
            if (layer.kind == LayerKind::Rotation) {
                if (g.spec.kind != GateKind::Rotation || !g.slot) {
                    throw std::invalid_argument(
                        "rotation layers contain only parameterized rotations");
                }
            }
            if (g.slot) {
                if (*g.slot < 0) throw std::invalid_argument("negative parameter slot");
                slots.insert(*g.slot);
            }
        }
    }
    if (slots.size() != c.theta.size() ||
        (!slots.empty() && (*slots.begin() != 0 ||
                            *slots.rbegin() != static_cast<int>(c.theta.size()) - 1))) {
        throw std::invalid_argument("theta length does not match the circuit's parameter slots");
    }
}

ParameterizedCircuit build_qbn_ansatz() {
    ParameterizedCircuit c;
    c.dim = 2;
    c.wires = 3;
    c.readout_wire = 0;
    const int blocks = 3;
    for (int b = 0; b < blocks; ++b) {
        LayerSpec rot;
        rot.kind = LayerKind::Rotation;
        for (int q = 0; q < 3; ++q) {
            GatePlacement rx;
            rx.spec.kind = GateKind::Rotation;
            rx.spec.axis = Axis::X;
            rx.spec.targets = {q};
            rx.slot = b * 6 + q;
            rot.gates.push_back(std::move(rx));
        }
        for (int q = 0; q < 3; ++q) {
            GatePlacement rz;
            rz.spec.kind = GateKind::Rotation;
            rz.spec.axis = Axis::Z;
            rz.spec.targets = {q};
            rz.slot = b * 6 + 3 + q;
            rot.gates.push_back(std::move(rz));
        }
        c.layers.push_back(std::move(rot));

        LayerSpec ent;
        ent.kind = LayerKind::Entangle;
        for (int q = 0; q < 3; ++q) {
            GatePlacement cx;
            cx.spec.kind = GateKind::Cnot;
            cx.spec.targets = {q, (q + 1) % 3};
            ent.gates.push_back(std::move(cx));
        }
        c.layers.push_back(std::move(ent));
    }
    c.theta.assign(18, 0.0);
    validate_circuit(c);
    return c;
}

ParameterizedCircuit build_qqtn_ansatz() {
    ParameterizedCircuit c;
    c.dim = 3;
    c.wires = 5;
    c.readout_wire = 0;
    const int blocks = 2;
    for (int b = 0; b < blocks; ++b) {
        LayerSpec rot;
        rot.kind = LayerKind::Rotation;
        for (int q = 0; q < 5; ++q) {
            GatePlacement r01;
            r01.spec.kind = GateKind::Rotation;
            r01.spec.axis = Axis::Y;
            r01.spec.subspace = {0, 1};
            r01.spec.targets = {q};
            r01.slot = b * 10 + 2 * q;
            rot.gates.push_back(std::move(r01));

            GatePlacement r12;
            r12.spec.kind = GateKind::Rotation;
            r12.spec.axis = Axis::Y;
            r12.spec.subspace = {1, 2};
            r12.spec.targets = {q};
            r12.slot = b * 10 + 2 * q + 1;
            rot.gates.push_back(std::move(r12));
        }
        c.layers.push_back(std::move(rot));

        // Ring of controlled X-rotations with one shared angle per block.
        LayerSpec ent;
        ent.kind = LayerKind::Entangle;
        for (int q = 0; q < 5; ++q) {
            GatePlacement crx;
            crx.spec.kind = GateKind::ControlledRotation;
            crx.spec.axis = Axis::X;
            crx.spec.subspace = {0, 1};
            crx.spec.targets = {(q + 1) % 5};
            crx.spec.control = GateSpec::Control{q, 2};
            crx.slot = 20 + b;
            ent.gates.push_back(std::move(crx));
        }
        c.layers.push_back(std::move(ent));
    }
    c.theta.assign(22, 0.0);
    validate_circuit(c);
    return c;
}

QuditRegister forward(const ParameterizedCircuit& c, const QuditRegister& input) {
    if (input.dim() != c.dim || input.wires() != c.wires) {
        throw std::invalid_argument("input register does not match the circuit shape");
    }
    std::vector<Amplitude> amps = input.amps();
    const auto bound = bind_circuit(c, c.theta);
    run_bound(bound, amps, c.dim, c.wires);
    return QuditRegister(c.dim, c.wires, std::move(amps));
}

QuditRegister encode_input(const ParameterizedCircuit& c, std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw std::domain_error("model inputs must be finite and in [0,1]");
        }
    }
    if (c.dim == 2) {
        return amplitude_encode(x, 2, c.wires);
    }
    if (static_cast<int>(x.size()) != c.wires) {
        throw std::invalid_argument("qutrit phase encoding needs one feature per wire");
    }
    return encode_feature_register(x, EncodingScheme::Phase, 3);
}

Prediction predict(const ParameterizedCircuit& c, std::span<const double> x) {
    const QuditRegister out = forward(c, encode_input(c, x));
    const double p0 = marginal_probability(out, c.readout_wire, 0);
    const double p1 = marginal_probability(out, c.readout_wire, 1);
    const double denom = p0 + p1;
    if (denom < 1e-12) {
        throw std::domain_error("degenerate readout: no probability mass on levels 0/1");
    }
    Prediction p;
    p.p_up = p1 / denom;
    p.label_hat = p.p_up >= 0.5 ? 1 : 0;
    return p;
}

double fidelity_loss(const ParameterizedCircuit& c, const MarketSample& sample) {
    check_label(sample.label);
    const QuditRegister out = forward(c, encode_input(c, sample.features));
    return 1.0 - marginal_probability(out, c.readout_wire, sample.label);
}

double batch_loss(const ParameterizedCircuit& c, std::span<const MarketSample> batch) {
    if (batch.empty()) throw std::invalid_argument("batch_loss over an empty batch");
    const EncodedDataset data = encode_dataset(c, batch);
    return batch_loss_encoded(c, c.theta, data, 0, data.states.size());
}

std::vector<double> finite_diff_gradient(const ParameterizedCircuit& c,
                                         std::span<const MarketSample> batch,
                                         double delta, FdScheme scheme, int threads) {
    const EncodedDataset data = encode_dataset(c, batch);
    return finite_diff_gradient_encoded(c, c.theta, data, 0, data.states.size(), delta,
                                        scheme, threads);
}

OperationCount count_operations(const ParameterizedCircuit& c, FdScheme scheme) {
    OperationCount out;
    for (const auto& layer : c.layers) out.gate_applications_per_forward += layer.gates.size();
    out.parameter_count = c.theta.size();
    out.forward_passes_per_gradient = (scheme == FdScheme::Forward)
                                          ? 1 + out.parameter_count
                                          : 2 * out.parameter_count;
    return out;
}

EncodedDataset encode_dataset(const ParameterizedCircuit& c,
                              std::span<const MarketSample> samples) {
    EncodedDataset data;
    data.dim = c.dim;
    data.wires = c.wires;
    data.states.reserve(samples.size());
    data.labels.reserve(samples.size());
    for (const auto& s : samples) {
        check_label(s.label);
        data.states.push_back(encode_input(c, s.features).amps());
        data.labels.push_back(s.label);
    }
    return data;
}

double batch_loss_encoded(const ParameterizedCircuit& c, std::span<const double> theta,
                          const EncodedDataset& data, std::size_t begin,
                          std::size_t end) {
    if (begin >= end || end > data.states.size()) {
        throw std::invalid_argument("bad batch range");
    }
    const auto bound = bind_circuit(c, theta);
    std::vector<Amplitude> scratch;
    double total = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        total += loss_raw(c, bound, data.states[i], data.labels[i], scratch);
    }
    return total / static_cast<double>(end - begin);
}

std::vector<double> finite_diff_gradient_encoded(const ParameterizedCircuit& c,
                                                 std::span<const double> theta,
                                                 const EncodedDataset& data,
                                                 std::size_t begin, std::size_t end,
                                                 double delta, FdScheme scheme,
                                                 int threads,
                                                 std::optional<double> known_base) {
    if (delta <= 0.0) throw std::invalid_argument("finite-difference delta must be > 0");
    const std::size_t p = theta.size();
    std::vector<double> grad(p, 0.0);
    if (p == 0) return grad;

    const double base = (scheme == FdScheme::Forward)
                            ? (known_base ? *known_base
                                          : batch_loss_encoded(c, theta, data, begin, end))
                            : 0.0;

    auto eval_range = [&](std::size_t j_begin, std::size_t j_end) {
        std::vector<double> local(theta.begin(), theta.end());
        for (std::size_t j = j_begin; j < j_end; ++j) {
            const double saved = local[j];
            if (scheme == FdScheme::Forward) {
                local[j] = saved + delta;
                const double plus = batch_loss_encoded(c, local, data, begin, end);
                grad[j] = (plus - base) / delta;
            } else {
                local[j] = saved + delta;
                const double plus = batch_loss_encoded(c, local, data, begin, end);
                local[j] = saved - delta;
                const double minus = batch_loss_encoded(c, local, data, begin, end);
                grad[j] = (plus - minus) / (2.0 * delta);
            }
            local[j] = saved;
        }
    };

    const int t = std::clamp(threads, 1, static_cast<int>(p));
    if (t == 1) {
        eval_range(0, p);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(t);
        for (int k = 0; k < t; ++k) {
            const std::size_t j_begin = p * static_cast<std::size_t>(k) / t;
            const std::size_t j_end = p * static_cast<std::size_t>(k + 1) / t;
            pool.emplace_back(eval_range, j_begin, j_end);
        }
        for (auto& th : pool) th.join();
    }
    return grad;
}

Prediction predict_encoded(const ParameterizedCircuit& c, std::span<const double> theta,
                           const EncodedDataset& data, std::size_t index) {
    const auto bound = bind_circuit(c, theta);
    std::vector<Amplitude> scratch = data.states.at(index);
    run_bound(bound, scratch, c.dim, c.wires);
    const double p0 = marginal_raw(scratch, c.dim, c.wires, c.readout_wire, 0);
    const double p1 = marginal_raw(scratch, c.dim, c.wires, c.readout_wire, 1);
    const double denom = p0 + p1;
    if (denom < 1e-12) {
        throw std::domain_error("degenerate readout: no probability mass on levels 0/1");
    }
    Prediction p;
    p.p_up = p1 / denom;
    p.label_hat = p.p_up >= 0.5 ? 1 : 0;
    return p;
}

double dataset_accuracy(const ParameterizedCircuit& c, std::span<const double> theta,
                        const EncodedDataset& data) {
    if (data.states.empty()) throw std::invalid_argument("empty dataset");
    const auto bound = bind_circuit(c, theta);
    std::vector<Amplitude> scratch;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.states.size(); ++i) {
        scratch = data.states[i];
        run_bound(bound, scratch, c.dim, c.wires);
        const double p0 = marginal_raw(scratch, c.dim, c.wires, c.readout_wire, 0);
        const double p1 = marginal_raw(scratch, c.dim, c.wires, c.readout_wire, 1);
        const double denom = p0 + p1;
        const double p_up = denom < 1e-12 ? 0.0 : p1 / denom;
        const int label_hat = p_up >= 0.5 ? 1 : 0;
        if (label_hat == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.states.size());
}

nlohmann::ordered_json circuit_to_json(const ParameterizedCircuit& c) {
    nlohmann::ordered_json j;
    j["dim"] = c.dim;
    j["wires"] = c.wires;
    j["readout_wire"] = c.readout_wire;
    j["theta"] = c.theta;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto& layer : c.layers) {
        nlohmann::ordered_json jl;
        jl["kind"] = layer.kind == LayerKind::Rotation ? "rotation" : "entangle";
        nlohmann::ordered_json gates = nlohmann::ordered_json::array();
        for (const auto& g : layer.gates) {
            nlohmann::ordered_json jg;
            jg["kind"] = to_string(g.spec.kind);
            if (g.spec.kind == GateKind::Rotation ||
                g.spec.kind == GateKind::ControlledRotation) {
                jg["axis"] = to_string(g.spec.axis);
                jg["subspace"] = {g.spec.subspace.lo, g.spec.subspace.hi};
            }
            jg["targets"] = g.spec.targets;
            if (g.spec.control) {
                jg["control"] = {{"wire", g.spec.control->wire},
                                 {"trigger_level", g.spec.control->trigger_level}};
            }
            if (g.slot) jg["slot"] = *g.slot;
            if (g.spec.theta) jg["theta"] = *g.spec.theta;
            gates.push_back(std::move(jg));
        }
        jl["gates"] = std::move(gates);
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    return j;
}

ParameterizedCircuit circuit_from_json(const nlohmann::json& j) {
    ParameterizedCircuit c;
    c.dim = j.at("dim").get<int>();
    c.wires = j.at("wires").get<int>();
    c.readout_wire = j.at("readout_wire").get<int>();
    c.theta = j.at("theta").get<std::vector<double>>();
    for (const auto& jl : j.at("layers")) {
        LayerSpec layer;
        const std::string kind = jl.at("kind").get<std::string>();
        if (kind == "rotation") {
            layer.kind = LayerKind::Rotation;
        } else if (kind == "entangle") {
            layer.kind = LayerKind::Entangle;
        } else {
            throw std::invalid_argument("unknown layer kind '" + kind + "'");
        }
        for (const auto& jg : jl.at("gates")) {
            GatePlacement g;
            g.spec.kind = gate_kind_from_string(jg.at("kind").get<std::string>());
            if (jg.contains("axis")) g.spec.axis = axis_from_string(jg.at("axis").get<std::string>());
            if (jg.contains("subspace")) {
                const auto ss = jg.at("subspace").get<std::vector<int>>();
                if (ss.size() != 2) throw std::invalid_argument("subspace must have two levels");
                g.spec.subspace = {ss[0], ss[1]};
            }
            g.spec.targets = jg.at("targets").get<std::vector<int>>();
            if (jg.contains("control")) {
                g.spec.control = GateSpec::Control{
                    jg.at("control").at("wire").get<int>(),
                    jg.at("control").at("trigger_level").get<int>()};
            }
            if (jg.contains("slot")) g.slot = jg.at("slot").get<int>();
            if (jg.contains("theta")) g.spec.theta = jg.at("theta").get<double>();
            layer.gates.push_back(std::move(g));
        }
        c.layers.push_back(std::move(layer));
    }
    validate_circuit(c);
    return c;
}

}  // namespace qforecast
