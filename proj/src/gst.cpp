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

#include "gthemu/gst.hpp"

#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "gthemu/error.hpp"
#include "gthemu/seeds.hpp"

namespace gthemu::gst {

namespace {

using qcore::Basis;
using qcore::GateOp;
using qcore::Pauli;

constexpr double kPi = std::numbers::pi;
constexpr std::array<Basis, 3> kBases = {Basis::kZ, Basis::kX, Basis::kY};

void check_width(int n_qubits) {
    if (n_qubits != 1 && n_qubits != 2) {
        throw InputError("GST supports 1 or 2 qubits, got " + std::to_string(n_qubits));
    }
}

int ipow(int base, int exp) {
    int r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

// Digit q (qubit 0 most significant) of `index` in base `radix`.
int digit(int index, int q, int n_qubits, int radix) {
    return (index / ipow(radix, n_qubits - 1 - q)) % radix;
}

std::vector<Basis> basis_of_setting(int setting, int n_qubits) {
    std::vector<Basis> b;
    for (int q = 0; q < n_qubits; ++q) b.push_back(kBases[static_cast<std::size_t>(digit(setting, q, n_qubits, 3))]);
    return b;
}

qcore::PauliString z_mask(const std::vector<Pauli>& paulis) {
    qcore::PauliString p;
    for (Pauli f : paulis) p.ops.push_back(f == Pauli::kI ? Pauli::kI : Pauli::kZ);
    return p;
}

// Fills every matrix from a per-circuit expectation oracle.
template <typename Lookup>
void fill_matrices(GstOutcome& out, int n_gates, Lookup&& lookup) {
    const int d = out.dim();
    out.g = Eigen::MatrixXd::Zero(d, d);
    out.u_list.assign(static_cast<std::size_t>(n_gates), Eigen::MatrixXd::Zero(d, d));
    for (int slot = -1; slot < n_gates; ++slot) {
        Eigen::MatrixXd& m = slot < 0 ? out.g : out.u_list[static_cast<std::size_t>(slot)];
        for (int col = 0; col < d; ++col) {
            std::vector<int> prep;
            for (int q = 0; q < out.n_qubits; ++q) prep.push_back(digit(col, q, out.n_qubits, 4));
            for (int row = 0; row < d; ++row) {
                const std::vector<Pauli> paulis = pauli_of_row(row, out.n_qubits);
                if (row == 0) {
                    m(row, col) = 1.0;
                    continue;
                }
                const GstCircuitLabel label{prep, slot, measurement_setting(paulis)};
                m(row, col) = lookup(label, paulis);
            }
        }
    }
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) {
        throw SchemaError("GST matrix must have " + std::to_string(dim) + " rows");
    }
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
            throw SchemaError("GST matrix row must have " + std::to_string(dim) + " entries");
        }
        for (int c = 0; c < dim; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

nlohmann::json label_to_json(const GstCircuitLabel& label) {
    nlohmann::json basis = nlohmann::json::array();
    for (Basis b : label.basis) basis.push_back(std::string(1, qcore::to_char(b)));
    return {{"prep", label.prep}, {"gate", label.gate}, {"basis", basis}};
}

GstCircuitLabel label_from_json(const nlohmann::json& j) {
    GstCircuitLabel label;
    label.prep = j.at("prep").get<std::vector<int>>();
    label.gate = j.at("gate").get<int>();
    for (const auto& b : j.at("basis")) {
        const auto s = b.get<std::string>();
        if (s.size() != 1) throw SchemaError("basis entries must be \"Z\", \"X\" or \"Y\"");
        label.basis.push_back(qcore::basis_from_char(s[0]));
    }
    if (label.prep.size() != label.basis.size()) {
        throw SchemaError("record prep and basis lengths differ");
    }
    return label;
}

}  // namespace

// Gate sets

GstGateSet GstGateSet::single_qubit_set() {
    struct Angles { double theta, phi; };
    static constexpr Angles kTable[] = {
        {kPi, 0.0},           {kPi / 2, -kPi / 2}, {kPi / 2, kPi / 2},   {kPi / 3, kPi / 3},
        {kPi / 3, kPi / 4},   {kPi / 3, kPi / 7},  {kPi / 4, kPi / 3},   {kPi / 4, kPi / 4},
        {0.0, 0.0},           {kPi, 0.0},          {-kPi / 2, 0.0},      {kPi / 4, kPi / 7},
        {kPi / 7, kPi / 3},   {kPi / 7, kPi / 4},  {kPi / 7, kPi / 7},
    };
    GstGateSet set;
    set.n_qubits = 1;
    for (const Angles& a : kTable) set.gates.push_back(GateOp::prx(0, a.theta, a.phi));
    return set;
}

GstGateSet GstGateSet::cz_only() {
    GstGateSet set;
    set.n_qubits = 2;
    set.gates.push_back(GateOp::cz(0, 1));
    return set;
}

void GstGateSet::validate() const {
    check_width(n_qubits);
    for (const GateOp& g : gates) {
        qcore::Circuit c{n_qubits, {g}, {}, {}};
        c.validate();
    }
}

std::vector<GateOp> prep_fragment(int k, int qubit) {
    switch (k) {
        case 0: return {};
        case 1: return {GateOp::prx(qubit, kPi, 0.0)};
        case 2: return {GateOp::prx(qubit, kPi / 2, kPi / 2)};  // Ry(pi/2)|0> = |+>
        case 3: return {GateOp::prx(qubit, -kPi / 2, 0.0)};     // Rx(-pi/2)|0> = |y+>
        default: throw InputError("preparation index must be 0..3, got " + std::to_string(k));
    }
}

std::vector<GateOp> basis_rotation(Basis basis, int qubit) {
    return qcore::basis_rotation_ops(basis, qubit);
}

// Labels

std::string GstCircuitLabel::str() const {
    std::ostringstream os;
    os << "prep=";
    for (std::size_t i = 0; i < prep.size(); ++i) os << (i ? "," : "") << prep[i];
    os << ";gate=" << gate << ";basis=" << qcore::to_string(basis);
    return os.str();
}

GstCircuitLabel GstCircuitLabel::parse(const std::string& text) {
    GstCircuitLabel label;
    const auto prep_pos = text.find("prep=");
    const auto gate_pos = text.find(";gate=");
    const auto basis_pos = text.find(";basis=");
    if (prep_pos != 0 || gate_pos == std::string::npos || basis_pos == std::string::npos) {
        throw SchemaError("malformed circuit label '" + text + "'");
    }
    std::istringstream preps(text.substr(5, gate_pos - 5));
    for (std::string tok; std::getline(preps, tok, ',');) label.prep.push_back(std::stoi(tok));
    label.gate = std::stoi(text.substr(gate_pos + 6, basis_pos - gate_pos - 6));
    for (char c : text.substr(basis_pos + 7)) label.basis.push_back(qcore::basis_from_char(c));
    return label;
}

std::vector<GstCircuit> build_gst_circuits(const GstGateSet& gate_set, int n_qubits) {
    check_width(n_qubits);
    if (gate_set.n_qubits != n_qubits && !gate_set.gates.empty()) {
        throw InputError("gate set width does not match the requested qubit count");
    }
    const int n_preps = ipow(kNumPreps, n_qubits);
    const int n_settings = ipow(3, n_qubits);
    std::vector<GstCircuit> out;
    out.reserve(static_cast<std::size_t>(n_preps * (gate_set.size() + 1) * n_settings));
    for (int p = 0; p < n_preps; ++p) {
        for (int slot = -1; slot < gate_set.size(); ++slot) {
            for (int s = 0; s < n_settings; ++s) {
                GstCircuit gc;
                gc.label.gate = slot;
                gc.label.basis = basis_of_setting(s, n_qubits);
                gc.circuit.n_qubits = n_qubits;
                for (int q = 0; q < n_qubits; ++q) {
                    const int k = digit(p, q, n_qubits, kNumPreps);
                    gc.label.prep.push_back(k);
                    for (GateOp& op : prep_fragment(k, q)) gc.circuit.ops.push_back(std::move(op));
                }
                if (slot >= 0) gc.circuit.ops.push_back(gate_set.gates[static_cast<std::size_t>(slot)]);
                for (int q = 0; q < n_qubits; ++q) {
                    for (GateOp& op : basis_rotation(gc.label.basis[static_cast<std::size_t>(q)], q)) {
                        gc.circuit.ops.push_back(std::move(op));
                    }
                }
                gc.circuit.meas_basis = gc.label.basis;
                gc.circuit.label = gc.label.str();
                out.push_back(std::move(gc));
            }
        }
    }
    return out;
}

int pauli_row(const std::vector<Pauli>& paulis) {
    int row = 0;
    for (Pauli p : paulis) row = row * 4 + static_cast<int>(p);
    return row;
}

std::vector<Pauli> pauli_of_row(int row, int n_qubits) {
    std::vector<Pauli> out;
    for (int q = 0; q < n_qubits; ++q) out.push_back(static_cast<Pauli>(digit(row, q, n_qubits, 4)));
    return out;
}

std::vector<Basis> measurement_setting(const std::vector<Pauli>& paulis) {
    std::vector<Basis> out;
    for (Pauli p : paulis) {
        switch (p) {
            case Pauli::kI:
            case Pauli::kZ: out.push_back(Basis::kZ); break;
            case Pauli::kX: out.push_back(Basis::kX); break;
            case Pauli::kY: out.push_back(Basis::kY); break;
        }
    }
    return out;
}

std::vector<double> GstOutcome::features() const {
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(dim() * dim()) * (1 + u_list.size()));
    const auto push = [&](const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) f.push_back(m(r, c));
        }
    };
    push(g);
    for (const auto& u : u_list) push(u);
    return f;
}

CountsImport collect_counts(const Executor& executor, const GstGateSet& gate_set, int n_qubits,
                            std::int64_t shots, std::uint64_t seed, const std::vector<int>& device_qubits) {
    gate_set.validate();
    if (shots < 1) throw InputError("shots must be >= 1");
    std::vector<int> qubits = device_qubits;
    if (qubits.empty()) {
        for (int q = 0; q < n_qubits; ++q) qubits.push_back(q);
    }
    if (static_cast<int>(qubits.size()) != n_qubits) {
        throw DimensionError("device qubit list does not match the GST width");
    }
    CountsImport doc;
    doc.shots = shots;
    doc.qubits = qubits;
    for (const GstCircuit& gc : build_gst_circuits(gate_set, n_qubits)) {
        const std::string key = gc.label.str();
        qcore::Counts c = executor.run(gc.circuit, qubits, shots, derive_seed(seed, key));
        if (c.shots() != shots) {
            throw SchemaError("circuit " + key + " returned " + std::to_string(c.shots()) +
                              " shots, expected " + std::to_string(shots));
        }
        doc.records.emplace_back(gc.label, std::move(c));
    }
    return doc;
}

GstOutcome outcome_from_counts(const CountsImport& doc, const GstGateSet& gate_set, std::uint64_t seed) {
    gate_set.validate();
    const int n_qubits = static_cast<int>(doc.qubits.size());
    check_width(n_qubits);
    std::map<std::string, const qcore::Counts*> counts;
    for (const auto& [label, c] : doc.records) {
        if (c.shots() != doc.shots) {
            throw SchemaError("record " + label.str() + " holds " + std::to_string(c.shots()) +
                              " shots, document declares " + std::to_string(doc.shots));
        }
        if (!counts.emplace(label.str(), &c).second) {
            throw CoverageError("duplicate record for circuit " + label.str());
        }
    }
    for (const GstCircuit& gc : build_gst_circuits(gate_set, n_qubits)) {
        if (!counts.contains(gc.label.str())) {
            throw CoverageError("counts document has no record for circuit " + gc.label.str());
        }
    }
    GstOutcome out;
    out.n_qubits = n_qubits;
    out.shots = doc.shots;
    out.qubit_ids = doc.qubits;
    out.seed = seed;
    fill_matrices(out, gate_set.size(), [&](const GstCircuitLabel& label, const std::vector<Pauli>& paulis) {
        qcore::PauliString p;
        p.ops = paulis;
        return qcore::pauli_expectation_from_counts(*counts.at(label.str()), p);
    });
    return out;
}

GstOutcome estimate_gst(const Executor& executor, const GstGateSet& gate_set, int n_qubits,
                        std::int64_t shots, std::uint64_t seed,
                        const std::vector<int>& device_qubits) {
    return outcome_from_counts(collect_counts(executor, gate_set, n_qubits, shots, seed, device_qubits),
                               gate_set, seed);
}

GstOutcome exact_gst(const std::optional<channels::NoiseModel>& model, const GstGateSet& gate_set,
                     int n_qubits) {
    gate_set.validate();
    std::map<std::string, qcore::DensityMatrix> states;
    for (const GstCircuit& gc : build_gst_circuits(gate_set, n_qubits)) {
        states.emplace(gc.label.str(), model ? channels::noisy_execute(gc.circuit, *model)
                                             : qcore::simulate(gc.circuit));
    }
    GstOutcome out;
    out.n_qubits = n_qubits;
    for (int q = 0; q < n_qubits; ++q) out.qubit_ids.push_back(q);
    fill_matrices(out, gate_set.size(), [&](const GstCircuitLabel& label, const std::vector<Pauli>& paulis) {
        return qcore::expectation(states.at(label.str()), z_mask(paulis));
    });
    return out;
}

// Serialisation

nlohmann::json circuits_to_json(const std::vector<GstCircuit>& circuits) {
    nlohmann::json out = nlohmann::json::array();
    for (const GstCircuit& gc : circuits) {
        nlohmann::json entry = label_to_json(gc.label);
        entry["circuit"] = qcore::to_json(gc.circuit);
        out.push_back(std::move(entry));
    }
    return out;
}

CountsImport counts_import_from_json(const nlohmann::json& doc) {
    try {
        CountsImport out;
        out.shots = doc.at("shots").get<std::int64_t>();
        out.qubits = doc.at("qubits").get<std::vector<int>>();
        if (out.shots < 1) throw SchemaError("'shots' must be positive");
        if (out.qubits.empty() || out.qubits.size() > 2) {
            throw SchemaError("'qubits' must list 1 or 2 device qubits");
        }
        for (const auto& rec : doc.at("records")) {
            GstCircuitLabel label = label_from_json(rec);
            if (label.prep.size() != out.qubits.size()) {
                throw SchemaError("record width does not match 'qubits'");
            }
            qcore::Counts counts;
            counts.basis = label.basis;
            for (const auto& [bits, n] : rec.at("counts").items()) {
                if (bits.size() != out.qubits.size()) {
                    throw SchemaError("bitstring '" + bits + "' has wrong length");
                }
                counts.histogram[bits] = n.get<std::int64_t>();
            }
            out.records.emplace_back(std::move(label), std::move(counts));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed counts document: ") + e.what());
    }
}

nlohmann::json to_json(const CountsImport& doc) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& [label, counts] : doc.records) {
        nlohmann::json rec = label_to_json(label);
        rec["counts"] = counts.histogram;
        records.push_back(std::move(rec));
    }
    return {{"shots", doc.shots}, {"qubits", doc.qubits}, {"records", records}};
}

nlohmann::json to_json(const GstOutcome& outcome) {
    nlohmann::json u = nlohmann::json::array();
    for (const auto& m : outcome.u_list) u.push_back(matrix_to_json(m));
    return {{"n_qubits", outcome.n_qubits},
            {"shots", outcome.shots},
            {"g", matrix_to_json(outcome.g)},
            {"u_list", u},
            {"metadata",
             {{"qubits", outcome.qubit_ids}, {"timestamp", outcome.timestamp}, {"seed", outcome.seed}}}};
}

GstOutcome outcome_from_json(const nlohmann::json& j) {
    try {
        GstOutcome out;
        out.n_qubits = j.at("n_qubits").get<int>();
        check_width(out.n_qubits);
        out.shots = j.at("shots").get<std::int64_t>();
        out.g = matrix_from_json(j.at("g"), out.dim());
        for (const auto& m : j.at("u_list")) out.u_list.push_back(matrix_from_json(m, out.dim()));
        const auto& meta = j.at("metadata");
        out.qubit_ids = meta.at("qubits").get<std::vector<int>>();
        out.timestamp = meta.at("timestamp").get<std::string>();
        out.seed = meta.at("seed").get<std::uint64_t>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed GST outcome: ") + e.what());
    } catch (const InputError& e) {
        throw SchemaError(std::string("malformed GST outcome: ") + e.what());
    }
}

void save_outcome(const GstOutcome& outcome, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json(outcome).dump() << '\n';
}

GstOutcome load_outcome(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return outcome_from_json(j);
}

}  // namespace gthemu::gst
