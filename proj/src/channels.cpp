// Copyright 2026 The gthemu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gthemu/channels.hpp"

#include <cmath>
#include <fstream>

#include "gthemu/error.hpp"

namespace gthemu::channels {

namespace {

using qcore::Complex;
using qcore::Pauli;

void check_probability(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw InputError(std::string(name) + " = " + std::to_string(value) +
                         " is outside [0, 1]");
    }
}

ComplexMatrix diag2(Complex a, Complex b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Pauli twirl over the listed qubits, (1/4^k) sum_P P rho P, evaluated as
// Tr_q(rho) (x) I/2^k.
ComplexMatrix twirl(const DensityMatrix& rho, std::span<const int> qubits) {
    const int n = rho.n_qubits();
    std::uint32_t mask = 0;
    for (int q : qubits) mask |= 1U << (n - 1 - q);
    const std::uint32_t d = 1U << n;
    const double scale = 1.0 / static_cast<double>(1U << qubits.size());
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (std::uint32_t r = 0; r < d; ++r) {
        for (std::uint32_t c = 0; c < d; ++c) {
            if ((r & mask) != (c & mask)) continue;
            Complex acc = 0.0;
            for (std::uint32_t sub = 0; sub < d; ++sub) {
                if ((sub & ~mask) != 0) continue;
                acc += rho((r & ~mask) | sub, (c & ~mask) | sub);
            }
            out(r, c) = scale * acc;
        }
    }
    return out;
}

DensityMatrix depolarize(const DensityMatrix& rho, double lambda_d, std::span<const int> qubits) {
    check_probability(lambda_d, "lambda_d");
    if (lambda_d == 0.0) return rho;
    return DensityMatrix::unchecked(rho.n_qubits(),
                                    (1.0 - lambda_d) * rho.matrix() + lambda_d * twirl(rho, qubits));
}

DensityMatrix apply_single(const DensityMatrix& rho, ChannelType type, double value, int target) {
    switch (type) {
        case ChannelType::kDepolarizing: return depolarizing_apply_on(rho, value, target);
        case ChannelType::kAmplitudeDamping: return amplitude_damping_apply(rho, value, target);
        case ChannelType::kDephasing: return dephasing_apply(rho, value, target);
        case ChannelType::kReadout: return readout_apply(rho, value, target);
    }
    throw InternalError("unhandled channel type");
}

double component(const LambdaParams& lambda, ChannelType type) {
    switch (type) {
        case ChannelType::kDepolarizing: return lambda.d;
        case ChannelType::kAmplitudeDamping: return lambda.a;
        case ChannelType::kDephasing: return lambda.f;
        case ChannelType::kReadout: return lambda.r;
    }
    return 0.0;
}

nlohmann::json lambda_to_json(const LambdaParams& l) {
    return {{"d", l.d}, {"a", l.a}, {"f", l.f}, {"r", l.r}};
}

LambdaParams lambda_from_json(const nlohmann::json& j) {
    LambdaParams l;
    l.d = j.at("d").get<double>();
    l.a = j.at("a").get<double>();
    l.f = j.at("f").get<double>();
    l.r = j.at("r").get<double>();
    return l;
}

}  // namespace

std::string to_string(ReadoutPlacement placement) {
    return placement == ReadoutPlacement::kPerGate ? "per-gate" : "terminal";
}

ReadoutPlacement readout_placement_from_string(const std::string& text) {
    if (text == "per-gate") return ReadoutPlacement::kPerGate;
    if (text == "terminal") return ReadoutPlacement::kTerminal;
    throw InputError("readout_placement must be 'per-gate' or 'terminal', got '" + text + "'");
}

double KrausChannel::completeness_error() const {
    const auto d = Eigen::Index{1} << n_qubits;
    ComplexMatrix sum = ComplexMatrix::Zero(d, d);
    for (const ComplexMatrix& k : kraus_ops) sum += k.adjoint() * k;
    return (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

void LambdaParams::validate() const {
    check_probability(d, "lambda_d");
    check_probability(a, "lambda_a");
    check_probability(f, "lambda_f");
    check_probability(r, "lambda_r");
}

LambdaParams LambdaParams::from_array(std::span<const double> v) {
    if (v.size() != 4) throw DimensionError("lambda vector must have 4 components");
    return LambdaParams{v[0], v[1], v[2], v[3]};
}

void ZetaParams::validate() const { check_probability(zeta, "zeta"); }

NoiseModel NoiseModel::noiseless(int n_qubits) {
    NoiseModel m;
    m.lambdas.assign(static_cast<std::size_t>(n_qubits), LambdaParams{});
    return m;
}

NoiseModel NoiseModel::single(const LambdaParams& lambda, ReadoutPlacement readout) {
    NoiseModel m;
    m.lambdas = {lambda};
    m.readout = readout;
    return m;
}

NoiseModel NoiseModel::pair(const LambdaParams& lambda_i, const LambdaParams& lambda_j,
                            const ZetaParams& zeta, ReadoutPlacement readout) {
    NoiseModel m;
    m.lambdas = {lambda_i, lambda_j};
    m.zeta = zeta;
    m.readout = readout;
    return m;
}

void NoiseModel::validate() const {
    if (lambdas.empty() || n_qubits() > qcore::kMaxQubits) {
        throw InputError("noise model must cover 1 or 2 qubits");
    }
    for (const LambdaParams& l : lambdas) l.validate();
    zeta.validate();
}

void GthNoiseModel::validate() const {
    lambda_i.validate();
    lambda_j.validate();
    zeta.validate();
}

NoiseModel GthNoiseModel::to_noise_model(ReadoutPlacement readout) const {
    return NoiseModel::pair(lambda_i, lambda_j, zeta, readout);
}

nlohmann::json to_json(const GthNoiseModel& model) {
    return {{"qubits", {model.qubit_ids[0], model.qubit_ids[1]}},
            {"lambda_i", lambda_to_json(model.lambda_i)},
            {"lambda_j", lambda_to_json(model.lambda_j)},
            {"zeta", model.zeta.zeta}};
}

GthNoiseModel gth_model_from_json(const nlohmann::json& j) {
    try {
        GthNoiseModel m;
        const auto& q = j.at("qubits");
        if (!q.is_array() || q.size() != 2) throw SchemaError("'qubits' must list two labels");
        m.qubit_ids = {q[0].get<int>(), q[1].get<int>()};
        m.lambda_i = lambda_from_json(j.at("lambda_i"));
        m.lambda_j = lambda_from_json(j.at("lambda_j"));
        m.zeta.zeta = j.at("zeta").get<double>();
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed noise model: ") + e.what());
    }
}

void save_gth_model(const GthNoiseModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json(model).dump(2) << '\n';
}

GthNoiseModel load_gth_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return gth_model_from_json(j);
}

// Kraus forms

KrausChannel depolarizing_channel(double lambda_d, int n_qubits) {
    check_probability(lambda_d, "lambda_d");
    if (n_qubits < 1 || n_qubits > qcore::kMaxQubits) throw InputError("depolarizing: n must be 1 or 2");
    const int n_paulis = 1 << (2 * n_qubits);
    KrausChannel ch{n_qubits, {}, ChannelType::kDepolarizing, lambda_d};
    for (int idx = 0; idx < n_paulis; ++idx) {
        qcore::PauliString p;
        for (int j = 0; j < n_qubits; ++j) {
            p.ops.push_back(static_cast<Pauli>((idx >> (2 * (n_qubits - 1 - j))) & 3));
        }
        const double w = idx == 0 ? 1.0 - lambda_d * (n_paulis - 1) / n_paulis
                                  : lambda_d / n_paulis;
        ch.kraus_ops.push_back(std::sqrt(w) * p.matrix());
    }
    return ch;
}

KrausChannel amplitude_damping_channel(double lambda_a) {
    check_probability(lambda_a, "lambda_a");
    ComplexMatrix k2 = ComplexMatrix::Zero(2, 2);
    k2(0, 1) = std::sqrt(lambda_a);
    return {1, {diag2(1.0, std::sqrt(1.0 - lambda_a)), k2}, ChannelType::kAmplitudeDamping, lambda_a};
}

KrausChannel dephasing_channel(double lambda_f) {
    check_probability(lambda_f, "lambda_f");
    return {1,
            {diag2(1.0, std::sqrt(1.0 - lambda_f)), diag2(0.0, std::sqrt(lambda_f))},
            ChannelType::kDephasing,
            lambda_f};
}

KrausChannel readout_channel(double lambda_r) {
    check_probability(lambda_r, "lambda_r");
    return {1, {std::sqrt(1.0 - lambda_r) * ComplexMatrix::Identity(2, 2),
                std::sqrt(lambda_r) * qcore::pauli_matrix(Pauli::kX)},
            ChannelType::kReadout,
            lambda_r};
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            std::span<const int> qubits) {
    if (static_cast<int>(qubits.size()) != channel.n_qubits) {
        throw DimensionError("channel arity does not match its qubit list");
    }
    if (channel.type) {
        switch (*channel.type) {
            case ChannelType::kDepolarizing: return depolarize(rho, channel.strength, qubits);
            case ChannelType::kDephasing: return dephasing_apply(rho, channel.strength, qubits[0]);
            case ChannelType::kReadout: return readout_apply(rho, channel.strength, qubits[0]);
            case ChannelType::kAmplitudeDamping: break;
        }
    }
    ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (const ComplexMatrix& k : channel.kraus_ops) {
        const ComplexMatrix full = qcore::embed(k, qubits, rho.n_qubits());
        out.noalias() += full * rho.matrix() * full.adjoint();
    }
    return DensityMatrix::unchecked(rho.n_qubits(), std::move(out));
}

// Closed forms

DensityMatrix depolarizing_apply(const DensityMatrix& rho, double lambda_d, int n_qubits) {
    if (n_qubits != rho.n_qubits()) {
        throw DimensionError("depolarizing: n does not match the state");
    }
    check_probability(lambda_d, "lambda_d");
    const auto d = rho.dim();
    return DensityMatrix::unchecked(
        rho.n_qubits(), (1.0 - lambda_d) * rho.matrix() +
                            (lambda_d / d) * ComplexMatrix::Identity(d, d));
}

DensityMatrix depolarizing_apply_on(const DensityMatrix& rho, double lambda_d, int target) {
    const int q[] = {target};
    if (rho.n_qubits() == 1) return depolarizing_apply(rho, lambda_d, 1);
    return depolarize(rho, lambda_d, q);
}

DensityMatrix amplitude_damping_apply(const DensityMatrix& rho, double lambda_a, int target) {
    const KrausChannel ch = amplitude_damping_channel(lambda_a);
    if (lambda_a == 0.0) return rho;
    const int q[] = {target};
    return apply_channel(rho, ch, q);
}

// Same map as the diagonal Kraus pair, written as (1 - p) rho + p Z rho Z with
// p = (1 - sqrt(1 - lambda_f)) / 2.
DensityMatrix dephasing_apply(const DensityMatrix& rho, double lambda_f, int target) {
    check_probability(lambda_f, "lambda_f");
    if (lambda_f == 0.0) return rho;
    const int q[] = {target};
    const double p = 0.5 * (1.0 - std::sqrt(1.0 - lambda_f));
    const ComplexMatrix z = qcore::embed(qcore::pauli_matrix(Pauli::kZ), q, rho.n_qubits());
    return DensityMatrix::unchecked(rho.n_qubits(),
                                    (1.0 - p) * rho.matrix() + p * (z * rho.matrix() * z));
}

DensityMatrix readout_apply(const DensityMatrix& rho, double lambda_r, int target) {
    check_probability(lambda_r, "lambda_r");
    if (lambda_r == 0.0) return rho;
    const int q[] = {target};
    const ComplexMatrix x = qcore::embed(qcore::pauli_matrix(Pauli::kX), q, rho.n_qubits());
    return DensityMatrix::unchecked(
        rho.n_qubits(), (1.0 - lambda_r) * rho.matrix() + lambda_r * (x * rho.matrix() * x));
}

std::map<std::string, double> confusion_apply(const std::map<std::string, double>& distribution,
                                              std::span<const double> lambda_r) {
    for (double l : lambda_r) check_probability(l, "lambda_r");
    std::map<std::string, double> current = distribution;
    for (std::size_t q = 0; q < lambda_r.size(); ++q) {
        const double flip = lambda_r[q];
        std::map<std::string, double> next;
        for (const auto& [bits, mass] : current) {
            if (bits.size() != lambda_r.size()) {
                throw DimensionError("bitstring '" + bits + "' does not match qubit count");
            }
            std::string flipped = bits;
            flipped[q] = bits[q] == '0' ? '1' : '0';
            next[bits] += (1.0 - flip) * mass;
            if (flip > 0.0) next[flipped] += flip * mass;
        }
        current = std::move(next);
    }
    return current;
}

DensityMatrix apply_M(const DensityMatrix& rho, const LambdaParams& lambda, int target,
                      ReadoutPlacement readout) {
    lambda.validate();
    DensityMatrix out = rho;
    for (ChannelType type : kSingleQubitChannelOrder) {
        if (type == ChannelType::kReadout && readout == ReadoutPlacement::kTerminal) continue;
        out = apply_single(out, type, component(lambda, type), target);
    }
    return out;
}

DensityMatrix apply_N(const DensityMatrix& rho, const LambdaParams& lambda_i,
                      const LambdaParams& lambda_j, const ZetaParams& zeta,
                      std::array<int, 2> qubits, ReadoutPlacement readout) {
    if (rho.n_qubits() != 2) throw DimensionError("two-qubit noise needs a 2-qubit state");
    zeta.validate();
    DensityMatrix out = apply_M(rho, lambda_i, qubits[0], readout);
    out = apply_M(out, lambda_j, qubits[1], readout);
    return depolarize(out, zeta.zeta, qubits);
}

DensityMatrix noisy_execute(const qcore::Circuit& circuit, const NoiseModel& model,
                            const std::optional<DensityMatrix>& initial) {
    circuit.validate();
    model.validate();
    if (model.n_qubits() != circuit.n_qubits) {
        throw DimensionError("noise model covers " + std::to_string(model.n_qubits()) +
                             " qubits but circuit has " + std::to_string(circuit.n_qubits));
    }
    DensityMatrix rho = initial ? *initial : DensityMatrix::ground(circuit.n_qubits);
    if (rho.n_qubits() != circuit.n_qubits) {
        throw DimensionError("initial state does not match circuit width");
    }
    const auto lambda_of = [&](int q) { return model.lambdas[static_cast<std::size_t>(q)]; };
    for (const qcore::GateOp& op : circuit.ops) {
        switch (op.kind) {
            case qcore::GateOp::Kind::kPreparedIdentity:
                break;
            case qcore::GateOp::Kind::kPRx:
                rho = qcore::apply_gate(rho, op);
                rho = apply_M(rho, lambda_of(op.qubits[0]), op.qubits[0], model.readout);
                break;
            case qcore::GateOp::Kind::kCZ: {
                rho = qcore::apply_gate(rho, op);
                const std::array<int, 2> q{op.qubits[0], op.qubits[1]};
                rho = apply_N(rho, lambda_of(q[0]), lambda_of(q[1]), model.zeta, q, model.readout);
                break;
            }
        }
    }
    if (model.readout == ReadoutPlacement::kTerminal) {
        for (int q = 0; q < circuit.n_qubits; ++q) rho = readout_apply(rho, lambda_of(q).r, q);
    }
    return rho;
}

}  // namespace gthemu::channels
