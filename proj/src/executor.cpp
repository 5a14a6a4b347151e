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

#include "gthemu/executor.hpp"

#include <fstream>

#include "gthemu/error.hpp"
#include "gthemu/gst.hpp"

namespace gthemu {

namespace {

std::vector<qcore::Basis> frame_of(const qcore::Circuit& circuit) {
    if (!circuit.meas_basis.empty()) return circuit.meas_basis;
    return std::vector<qcore::Basis>(static_cast<std::size_t>(circuit.n_qubits), qcore::Basis::kZ);
}

std::string qubit_list(const std::vector<int>& qubits) {
    std::string s = "[";
    for (std::size_t i = 0; i < qubits.size(); ++i) s += (i ? "," : "") + std::to_string(qubits[i]);
    return s + "]";
}

}  // namespace

qcore::Counts SimulatorExecutor::run(const qcore::Circuit& circuit, const std::vector<int>&,
                                     std::int64_t shots, std::uint64_t seed) const {
    const qcore::DensityMatrix rho =
        model_ ? channels::noisy_execute(circuit, *model_) : qcore::simulate(circuit);
    return qcore::sample_computational(rho, frame_of(circuit), shots, seed);
}

SyntheticHardware::SyntheticHardware(std::map<int, channels::LambdaParams> qubit_truth,
                                     std::map<std::pair<int, int>, channels::ZetaParams> pair_truth,
                                     channels::ReadoutPlacement readout)
    : qubit_truth_(std::move(qubit_truth)), pair_truth_(std::move(pair_truth)), readout_(readout) {
    for (const auto& [q, l] : qubit_truth_) l.validate();
    for (const auto& [p, z] : pair_truth_) z.validate();
}

SyntheticHardware SyntheticHardware::from_model(const channels::GthNoiseModel& truth,
                                                channels::ReadoutPlacement readout) {
    truth.validate();
    const auto [qi, qj] = truth.qubit_ids;
    return SyntheticHardware({{qi, truth.lambda_i}, {qj, truth.lambda_j}},
                             {{{std::min(qi, qj), std::max(qi, qj)}, truth.zeta}}, readout);
}

channels::NoiseModel SyntheticHardware::model_for(const std::vector<int>& device_qubits) const {
    channels::NoiseModel model;
    model.readout = readout_;
    for (int q : device_qubits) {
        const auto it = qubit_truth_.find(q);
        if (it == qubit_truth_.end()) {
            throw CoverageError("synthetic hardware has no qubit " + std::to_string(q));
        }
        model.lambdas.push_back(it->second);
    }
    if (device_qubits.size() == 2) {
        const int a = std::min(device_qubits[0], device_qubits[1]);
        const int b = std::max(device_qubits[0], device_qubits[1]);
        const auto it = pair_truth_.find({a, b});
        if (it == pair_truth_.end()) {
            throw CoverageError("synthetic hardware has no coupler " + qubit_list(device_qubits));
        }
        model.zeta = it->second;
    }
    return model;
}

qcore::Counts SyntheticHardware::run(const qcore::Circuit& circuit,
                                     const std::vector<int>& device_qubits, std::int64_t shots,
                                     std::uint64_t seed) const {
    if (static_cast<int>(device_qubits.size()) != circuit.n_qubits) {
        throw DimensionError("device qubit list does not match circuit width");
    }
    const qcore::DensityMatrix rho = channels::noisy_execute(circuit, model_for(device_qubits));
    return qcore::sample_computational(rho, frame_of(circuit), shots, seed);
}

void ReplayExecutor::add_document(const nlohmann::json& doc) {
    const gst::CountsImport parsed = gst::counts_import_from_json(doc);
    if (shots_.contains(parsed.qubits)) {
        throw CoverageError("counts for qubits " + qubit_list(parsed.qubits) + " supplied twice");
    }
    shots_[parsed.qubits] = parsed.shots;
    for (const auto& [label, counts] : parsed.records) {
        if (counts.shots() != parsed.shots) {
            throw SchemaError("record " + label.str() + " sums to " + std::to_string(counts.shots()) +
                              " shots, document declares " + std::to_string(parsed.shots));
        }
        const auto [it, inserted] = records_.emplace(std::make_pair(parsed.qubits, label.str()), counts);
        if (!inserted) {
            throw CoverageError("circuit " + label.str() + " appears more than once for qubits " +
                                qubit_list(parsed.qubits));
        }
    }
}

void ReplayExecutor::add_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    add_document(doc);
}

qcore::Counts ReplayExecutor::run(const qcore::Circuit& circuit,
                                  const std::vector<int>& device_qubits, std::int64_t shots,
                                  std::uint64_t) const {
    const auto it = records_.find({device_qubits, circuit.label});
    if (it == records_.end()) {
        throw CoverageError("no replayed counts for circuit '" + circuit.label + "' on qubits " +
                            qubit_list(device_qubits));
    }
    if (it->second.shots() != shots) {
        throw SchemaError("replayed counts for '" + circuit.label + "' hold " +
                          std::to_string(it->second.shots()) + " shots, requested " +
                          std::to_string(shots));
    }
    return it->second;
}

std::int64_t ReplayExecutor::shots_for(const std::vector<int>& device_qubits) const {
    const auto it = shots_.find(device_qubits);
    if (it == shots_.end()) {
        throw CoverageError("no replayed counts for qubits " + qubit_list(device_qubits));
    }
    return it->second;
}

}  // namespace gthemu
