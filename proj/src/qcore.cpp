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

#include "gthemu/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gthemu/error.hpp"

namespace gthemu::qcore {

namespace {

constexpr double kStateTol = 1e-12;
constexpr double kNegativeProbTol = 1e-10;

int bit_of(std::uint32_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1U);
}

void check_qubit_count(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw InputError("qubit count must be 1 or 2, got " + std::to_string(n_qubits));
    }
}

}  // namespace

char to_char(Pauli p) {
    switch (p) {
        case Pauli::kI: return 'I';
        case Pauli::kX: return 'X';
        case Pauli::kY: return 'Y';
        case Pauli::kZ: return 'Z';
    }
    return '?';
}

char to_char(Basis b) {
    switch (b) {
        case Basis::kZ: return 'Z';
        case Basis::kX: return 'X';
        case Basis::kY: return 'Y';
    }
    return '?';
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I': return Pauli::kI;
        case 'X': return Pauli::kX;
        case 'Y': return Pauli::kY;
        case 'Z': return Pauli::kZ;
        default: throw InputError(std::string("unknown Pauli '") + c + "'");
    }
}

Basis basis_from_char(char c) {
    switch (c) {
        case 'Z': return Basis::kZ;
        case 'X': return Basis::kX;
        case 'Y': return Basis::kY;
        default: throw InputError(std::string("unknown measurement basis '") + c + "'");
    }
}

std::string to_string(std::span<const Basis> bases) {
    std::string out;
    for (Basis b : bases) out.push_back(to_char(b));
    return out;
}

ComplexMatrix pauli_matrix(Pauli p) {
    ComplexMatrix m(2, 2);
    const Complex i{0.0, 1.0};
    switch (p) {
        case Pauli::kI: m << 1, 0, 0, 1; break;
        case Pauli::kX: m << 0, 1, 1, 0; break;
        case Pauli::kY: m << 0, -i, i, 0; break;
        case Pauli::kZ: m << 1, 0, 0, -1; break;
    }
    return m;
}

// DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits, ComplexMatrix matrix)
    : n_qubits_(n_qubits), matrix_(std::move(matrix)) {
    check_qubit_count(n_qubits);
    if (matrix_.rows() != dim() || matrix_.cols() != dim()) {
        throw DimensionError("density matrix must be " + std::to_string(dim()) + "x" +
                             std::to_string(dim()));
    }
    if (!matrix_.allFinite()) throw InputError("density matrix has non-finite entries");
    if (hermiticity_error() > kStateTol) throw InputError("density matrix is not Hermitian");
    if (std::abs(matrix_.trace() - Complex{1.0, 0.0}) > kStateTol) {
        throw InputError("density matrix trace is not 1");
    }
}

DensityMatrix DensityMatrix::unchecked(int n_qubits, ComplexMatrix matrix) {
    DensityMatrix out;
    out.n_qubits_ = n_qubits;
    out.matrix_ = std::move(matrix);
    return out;
}

DensityMatrix DensityMatrix::ground(int n_qubits) {
    check_qubit_count(n_qubits);
    const int d = 1 << n_qubits;
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(0, 0) = 1.0;
    return unchecked(n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    check_qubit_count(n_qubits);
    const int d = 1 << n_qubits;
    return unchecked(n_qubits, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_state(const ComplexVector& psi) {
    const auto d = psi.size();
    const int n = d == 2 ? 1 : d == 4 ? 2 : 0;
    if (n == 0) throw DimensionError("state vector must have length 2 or 4");
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InputError("state vector has zero norm");
    const ComplexVector unit = psi / norm;
    return DensityMatrix(n, unit * unit.adjoint());
}

double DensityMatrix::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const ComplexMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool DensityMatrix::is_physical(double tol) const {
    return hermiticity_error() <= tol && std::abs(trace() - 1.0) <= tol &&
           min_eigenvalue() >= -tol;
}

// GateOp / Circuit

GateOp GateOp::prx(int qubit, double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) throw InputError("PRx angles must be finite");
    return GateOp{Kind::kPRx, theta, phi, {qubit}};
}

GateOp GateOp::cz(int control, int target) {
    return GateOp{Kind::kCZ, 0.0, 0.0, {control, target}};
}

GateOp GateOp::prepared_identity(std::vector<int> qubits) {
    return GateOp{Kind::kPreparedIdentity, 0.0, 0.0, std::move(qubits)};
}

void Circuit::validate() const {
    check_qubit_count(n_qubits);
    if (!meas_basis.empty() && static_cast<int>(meas_basis.size()) != n_qubits) {
        throw DimensionError("measurement basis must name every qubit");
    }
    for (const GateOp& op : ops) {
        for (int q : op.qubits) {
            if (q < 0 || q >= n_qubits) {
                throw InputError("gate acts on qubit " + std::to_string(q) +
                                 " outside a " + std::to_string(n_qubits) + "-qubit circuit");
            }
        }
        switch (op.kind) {
            case GateOp::Kind::kPRx:
                if (op.qubits.size() != 1) throw InputError("PRx acts on exactly one qubit");
                if (!std::isfinite(op.theta) || !std::isfinite(op.phi)) {
                    throw InputError("PRx angle is not finite");
                }
                break;
            case GateOp::Kind::kCZ:
                if (op.qubits.size() != 2 || op.qubits[0] == op.qubits[1]) {
                    throw InputError("CZ acts on exactly two distinct qubits");
                }
                break;
            case GateOp::Kind::kPreparedIdentity:
                break;
        }
    }
}

// PauliString

PauliString PauliString::parse(std::string_view text, double coefficient) {
    PauliString out;
    out.coefficient = coefficient;
    for (char c : text) out.ops.push_back(pauli_from_char(c));
    if (out.ops.empty() || out.n_qubits() > kMaxQubits) {
        throw InputError("Pauli string must name 1 or 2 qubits");
    }
    return out;
}

bool PauliString::is_identity() const {
    return std::all_of(ops.begin(), ops.end(), [](Pauli p) { return p == Pauli::kI; });
}

std::string PauliString::str() const {
    std::string s;
    for (Pauli p : ops) s.push_back(to_char(p));
    return s;
}

ComplexMatrix PauliString::matrix() const {
    ComplexMatrix m = ComplexMatrix::Identity(1, 1);
    for (Pauli p : ops) {
        const ComplexMatrix f = pauli_matrix(p);
        ComplexMatrix next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                next.block(2 * r, 2 * c, 2, 2) = m(r, c) * f;
            }
        }
        m = std::move(next);
    }
    return m;
}

std::int64_t Counts::shots() const {
    std::int64_t total = 0;
    for (const auto& [bits, n] : histogram) total += n;
    return total;
}

// Gates

ComplexMatrix prx_unitary(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw InputError("PRx angle is not finite");
    }
    // Rz(phi) Rx(theta) Rz(-phi), multiplied out.
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Complex minus_i{0.0, -1.0};
    ComplexMatrix u(2, 2);
    u(0, 0) = c;
    u(0, 1) = minus_i * s * std::exp(Complex{0.0, -phi});
    u(1, 0) = minus_i * s * std::exp(Complex{0.0, phi});
    u(1, 1) = c;
    return u;
}

ComplexMatrix cz_unitary() {
    ComplexMatrix u = ComplexMatrix::Identity(4, 4);
    u(3, 3) = -1.0;
    return u;
}

ComplexMatrix gate_unitary(const GateOp& op) {
    switch (op.kind) {
        case GateOp::Kind::kPRx: return prx_unitary(op.theta, op.phi);
        case GateOp::Kind::kCZ: return cz_unitary();
        case GateOp::Kind::kPreparedIdentity: {
            const auto d = Eigen::Index{1} << op.qubits.size();
            return ComplexMatrix::Identity(d, d);
        }
    }
    throw InternalError("unhandled gate kind");
}

ComplexMatrix embed(const ComplexMatrix& op, std::span<const int> qubits, int n_qubits) {
    const int k = static_cast<int>(qubits.size());
    if (op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows()) {
        throw DimensionError("operator dimension does not match its qubit count");
    }
    for (int q : qubits) {
        if (q < 0 || q >= n_qubits) throw DimensionError("operator qubit out of range");
    }
    if (k == n_qubits && (k == 1 || qubits[0] < qubits[1])) return op;

    std::uint32_t target_mask = 0;
    for (int q : qubits) target_mask |= 1U << (n_qubits - 1 - q);
    const auto sub_index = [&](std::uint32_t full) {
        std::uint32_t s = 0;
        for (int j = 0; j < k; ++j) {
            s |= static_cast<std::uint32_t>(bit_of(full, qubits[j], n_qubits)) << (k - 1 - j);
        }
        return s;
    };

    const std::uint32_t d = 1U << n_qubits;
    ComplexMatrix full = ComplexMatrix::Zero(d, d);
    for (std::uint32_t r = 0; r < d; ++r) {
        for (std::uint32_t c = 0; c < d; ++c) {
            if ((r & ~target_mask) != (c & ~target_mask)) continue;
            full(r, c) = op(sub_index(r), sub_index(c));
        }
    }
    return full;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                            std::span<const int> qubits) {
    const ComplexMatrix full = embed(u, qubits, rho.n_qubits());
    return DensityMatrix::unchecked(rho.n_qubits(), full * rho.matrix() * full.adjoint());
}

DensityMatrix apply_gate(const DensityMatrix& rho, const GateOp& op) {
    if (op.kind == GateOp::Kind::kPreparedIdentity) return rho;
    return apply_unitary(rho, gate_unitary(op), op.qubits);
}

DensityMatrix simulate(const Circuit& circuit) {
    circuit.validate();
    DensityMatrix rho = DensityMatrix::ground(circuit.n_qubits);
    for (const GateOp& op : circuit.ops) rho = apply_gate(rho, op);
    return rho;
}

// Measurement

double expectation(const DensityMatrix& rho, const PauliString& p) {
    if (p.n_qubits() != rho.n_qubits()) {
        throw DimensionError("Pauli string length does not match the state");
    }
    return (p.matrix() * rho.matrix()).trace().real();
}

std::vector<double> probabilities(const DensityMatrix& rho) {
    std::vector<double> probs(static_cast<std::size_t>(rho.dim()));
    for (int i = 0; i < rho.dim(); ++i) {
        double p = rho(i, i).real();
        if (p < -kNegativeProbTol) {
            throw InternalError("negative outcome probability " + std::to_string(p) +
                                " (broken channel)");
        }
        probs[static_cast<std::size_t>(i)] = std::max(p, 0.0);
    }
    return probs;
}

std::vector<GateOp> basis_rotation_ops(Basis basis, int qubit) {
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    switch (basis) {
        case Basis::kZ: return {};
        case Basis::kX: return {GateOp::prx(qubit, -kHalfPi, kHalfPi)};  // Ry(-pi/2)
        case Basis::kY: return {GateOp::prx(qubit, kHalfPi, 0.0)};       // Rx(pi/2)
    }
    return {};
}

std::string bitstring(std::uint32_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if (bit_of(index, q, n_qubits)) s[static_cast<std::size_t>(q)] = '1';
    }
    return s;
}

Counts sample_computational(const DensityMatrix& rho, std::span<const Basis> basis_label,
                            std::int64_t shots, std::uint64_t seed) {
    if (shots < 1) throw InputError("shots must be >= 1");
    if (static_cast<int>(basis_label.size()) != rho.n_qubits()) {
        throw DimensionError("measurement basis must name every qubit");
    }
    const std::vector<double> probs = probabilities(rho);

    // One multinomial draw, as a chain of conditional binomials.
    std::mt19937_64 rng(seed);
    Counts counts;
    counts.basis.assign(basis_label.begin(), basis_label.end());
    std::int64_t remaining = shots;
    double mass = 0.0;
    for (double p : probs) mass += p;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        std::int64_t n = remaining;
        if (i + 1 < probs.size()) {
            const double q = mass > 0.0 ? std::clamp(probs[i] / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::int64_t> draw(remaining, q);
            n = draw(rng);
        }
        mass -= probs[i];
        remaining -= n;
        if (n > 0) counts.histogram[bitstring(static_cast<std::uint32_t>(i), rho.n_qubits())] = n;
    }
    return counts;
}

Counts sample_counts(const DensityMatrix& rho, std::span<const Basis> meas_basis,
                     std::int64_t shots, std::uint64_t seed) {
    if (static_cast<int>(meas_basis.size()) != rho.n_qubits()) {
        throw DimensionError("measurement basis must name every qubit");
    }
    DensityMatrix rotated = rho;
    for (int q = 0; q < rho.n_qubits(); ++q) {
        for (const GateOp& op : basis_rotation_ops(meas_basis[static_cast<std::size_t>(q)], q)) {
            rotated = apply_gate(rotated, op);
        }
    }
    return sample_computational(rotated, meas_basis, shots, seed);
}

Estimate observable_from_counts(const Counts& counts, std::span<const PauliString> terms) {
    const auto n = counts.basis.size();
    for (const PauliString& p : terms) {
        if (p.ops.size() != n) throw DimensionError("Pauli string length does not match counts");
        for (std::size_t q = 0; q < n; ++q) {
            const Pauli f = p.ops[q];
            if (f == Pauli::kI) continue;
            if (to_char(f) != to_char(counts.basis[q])) {
                throw InputError("Pauli " + p.str() + " is not diagonal in measured basis " +
                                 to_string(counts.basis));
            }
        }
    }
    const std::int64_t shots = counts.shots();
    if (shots < 1) throw InputError("counts are empty");

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [bits, k] : counts.histogram) {
        if (bits.size() != n) throw SchemaError("bitstring '" + bits + "' has wrong length");
        double value = 0.0;
        for (const PauliString& p : terms) {
            int parity = 0;
            for (std::size_t q = 0; q < n; ++q) {
                if (p.ops[q] != Pauli::kI && bits[q] == '1') parity ^= 1;
            }
            value += p.coefficient * (parity ? -1.0 : 1.0);
        }
        const double w = static_cast<double>(k);
        sum += w * value;
        sum_sq += w * value * value;
    }
    const double total = static_cast<double>(shots);
    Estimate e;
    e.mean = sum / total;
    const double var = std::max(sum_sq / total - e.mean * e.mean, 0.0);
    e.stddev = std::sqrt(var / total);
    return e;
}

double pauli_expectation_from_counts(const Counts& counts, const PauliString& p) {
    PauliString unit = p;
    unit.coefficient = 1.0;
    return observable_from_counts(counts, std::span<const PauliString>(&unit, 1)).mean;
}

// Serialisation

nlohmann::json to_json(const GateOp& op) {
    switch (op.kind) {
        case GateOp::Kind::kPRx:
            return {{"gate", "prx"}, {"qubits", op.qubits}, {"theta", op.theta}, {"phi", op.phi}};
        case GateOp::Kind::kCZ:
            return {{"gate", "cz"}, {"qubits", op.qubits}};
        case GateOp::Kind::kPreparedIdentity:
            return {{"gate", "id"}, {"qubits", op.qubits}};
    }
    throw InternalError("unknown gate kind");
}

GateOp gate_from_json(const nlohmann::json& j) {
    try {
        const std::string gate = j.at("gate").get<std::string>();
        const auto qubits = j.at("qubits").get<std::vector<int>>();
        if (gate == "prx") {
            if (qubits.size() != 1) throw SchemaError("prx needs exactly one qubit");
            return GateOp::prx(qubits[0], j.at("theta").get<double>(), j.at("phi").get<double>());
        }
        if (gate == "cz") {
            if (qubits.size() != 2) throw SchemaError("cz needs exactly two qubits");
            return GateOp::cz(qubits[0], qubits[1]);
        }
        if (gate == "id") return GateOp::prepared_identity(qubits);
        throw SchemaError("unknown gate '" + gate + "' (expected prx, cz or id)");
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed gate: ") + e.what());
    }
}

nlohmann::json to_json(const Circuit& circuit) {
    nlohmann::json ops = nlohmann::json::array();
    for (const GateOp& op : circuit.ops) ops.push_back(to_json(op));
    return {{"n_qubits", circuit.n_qubits},
            {"meas_basis", to_string(std::span<const Basis>(circuit.meas_basis))},
            {"label", circuit.label},
            {"ops", ops}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
    try {
        Circuit c;
        c.n_qubits = j.at("n_qubits").get<int>();
        for (const auto& op : j.at("ops")) c.ops.push_back(gate_from_json(op));
        const std::string basis = j.value("meas_basis", std::string(static_cast<std::size_t>(std::max(c.n_qubits, 0)), 'Z'));
        for (char b : basis) c.meas_basis.push_back(basis_from_char(b));
        c.label = j.value("label", std::string());
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed circuit: ") + e.what());
    }
}

}  // namespace gthemu::qcore
