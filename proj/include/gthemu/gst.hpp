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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gthemu/channels.hpp"
#include "gthemu/executor.hpp"
#include "gthemu/qcore.hpp"

// Gate-set-tomography style characterisation matrices built from PRx-only
// preparations and measurement rotations:
//   g_jk = Tr(M_j rho_k),  U_jk = Tr(M_j U rho_k U^dag)
// Rows run over {I,X,Y,Z}^n and columns over {|0>,|1>,|+>,|y+>}^n, qubit 0
// slowest in both.
namespace gthemu::gst {

inline constexpr int kNumPreps = 4;

struct GstGateSet {
    int n_qubits = 1;
    std::vector<qcore::GateOp> gates;

    // The fifteen single-qubit PRx gates used for NN-1Q features.
    static GstGateSet single_qubit_set();
    static GstGateSet cz_only();

    void validate() const;
    int size() const { return static_cast<int>(gates.size()); }
};

std::vector<qcore::GateOp> prep_fragment(int k, int qubit = 0);
std::vector<qcore::GateOp> basis_rotation(qcore::Basis basis, int qubit = 0);

struct GstCircuitLabel {
    std::vector<int> prep;            // per qubit, 0..3
    int gate = -1;                    // index into the gate set, -1 for none
    std::vector<qcore::Basis> basis;  // per qubit

    std::string str() const;
    static GstCircuitLabel parse(const std::string& text);
    bool operator==(const GstCircuitLabel&) const = default;
};

struct GstCircuit {
    GstCircuitLabel label;
    qcore::Circuit circuit;
};

// 4^n preparations x (1 + |gates|) gate slots x 3^n basis settings, in that
// nesting order.
std::vector<GstCircuit> build_gst_circuits(const GstGateSet& gate_set, int n_qubits);

struct GstOutcome {
    int n_qubits = 1;
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> u_list;
    std::int64_t shots = 0;  // 0 marks an exact (infinite-shot) outcome
    std::vector<int> qubit_ids;
    std::string timestamp;
    std::uint64_t seed = 0;

    // g then each U, row-major.
    std::vector<double> features() const;
    int dim() const { return 1 << (2 * n_qubits); }
};

// Counts-import document: {"shots":N,"qubits":[...],"records":[{prep,gate,basis,counts}]}
struct CountsImport {
    std::int64_t shots = 0;
    std::vector<int> qubits;
    std::vector<std::pair<GstCircuitLabel, qcore::Counts>> records;
};

// Runs every GST circuit once; circuit seeds derive from (seed, label).
CountsImport collect_counts(const Executor& executor, const GstGateSet& gate_set, int n_qubits,
                            std::int64_t shots, std::uint64_t seed,
                            const std::vector<int>& device_qubits = {});

// Matrices from a complete counts document. Missing or duplicated circuits
// are coverage errors.
GstOutcome outcome_from_counts(const CountsImport& doc, const GstGateSet& gate_set, std::uint64_t seed = 0);

// collect_counts followed by outcome_from_counts.
GstOutcome estimate_gst(const Executor& executor, const GstGateSet& gate_set, int n_qubits,
                        std::int64_t shots, std::uint64_t seed,
                        const std::vector<int>& device_qubits = {});

// Infinite-shot matrices from exact density matrices. SPAM fragments receive
// noise exactly as in estimate_gst.
GstOutcome exact_gst(const std::optional<channels::NoiseModel>& model, const GstGateSet& gate_set,
                     int n_qubits);

// Row index of a Pauli tuple in the {I,X,Y,Z}^n ordering, and the inverse.
int pauli_row(const std::vector<qcore::Pauli>& paulis);
std::vector<qcore::Pauli> pauli_of_row(int row, int n_qubits);

// Basis setting whose counts carry the row's expectation; identity factors
// read out in Z and are marginalised.
std::vector<qcore::Basis> measurement_setting(const std::vector<qcore::Pauli>& paulis);

// [{prep, gate, basis, circuit}] with the explicit gate sequence of each.
nlohmann::json circuits_to_json(const std::vector<GstCircuit>& circuits);

CountsImport counts_import_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const CountsImport& doc);

nlohmann::json to_json(const GstOutcome& outcome);
GstOutcome outcome_from_json(const nlohmann::json& j);
void save_outcome(const GstOutcome& outcome, const std::string& path);
GstOutcome load_outcome(const std::string& path);

}  // namespace gthemu::gst
