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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gthemu/channels.hpp"
#include "gthemu/qcore.hpp"

namespace gthemu {

// Runs a circuit to a counts histogram. Implementations must be
// deterministic in (circuit, shots, seed) and safe to call concurrently.
class Executor {
public:
    virtual ~Executor() = default;

    // `device_qubits` names the hardware qubit behind each local qubit.
    virtual qcore::Counts run(const qcore::Circuit& circuit, const std::vector<int>& device_qubits,
                              std::int64_t shots, std::uint64_t seed) const = 0;

    virtual std::string name() const = 0;
};

// Density-matrix simulator with an explicit local noise model (or none).
class SimulatorExecutor final : public Executor {
public:
    SimulatorExecutor() = default;
    explicit SimulatorExecutor(channels::NoiseModel model) : model_(std::move(model)) {}

    qcore::Counts run(const qcore::Circuit& circuit, const std::vector<int>& device_qubits,
                      std::int64_t shots, std::uint64_t seed) const override;
    std::string name() const override { return model_ ? "simulator-noisy" : "simulator-noiseless"; }

    const std::optional<channels::NoiseModel>& model() const { return model_; }

private:
    std::optional<channels::NoiseModel> model_;
};

// Stand-in for a device: a planted per-qubit truth the caller cannot read
// back through this interface. Local qubits are routed to device labels.
class SyntheticHardware final : public Executor {
public:
    SyntheticHardware(std::map<int, channels::LambdaParams> qubit_truth,
                      std::map<std::pair<int, int>, channels::ZetaParams> pair_truth,
                      channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate);

    static SyntheticHardware from_model(const channels::GthNoiseModel& truth,
                                        channels::ReadoutPlacement readout =
                                            channels::ReadoutPlacement::kPerGate);

    qcore::Counts run(const qcore::Circuit& circuit, const std::vector<int>& device_qubits,
                      std::int64_t shots, std::uint64_t seed) const override;
    std::string name() const override { return "synthetic-hardware"; }

private:
    channels::NoiseModel model_for(const std::vector<int>& device_qubits) const;

    std::map<int, channels::LambdaParams> qubit_truth_;
    std::map<std::pair<int, int>, channels::ZetaParams> pair_truth_;
    channels::ReadoutPlacement readout_;
};

// Replays counts ingested from hardware, keyed by (device qubits, circuit
// label). Every requested circuit must be present exactly once.
class ReplayExecutor final : public Executor {
public:
    ReplayExecutor() = default;

    // Adds one counts-import document (see gst::CountsImport).
    void add_document(const nlohmann::json& doc);
    void add_file(const std::string& path);

    qcore::Counts run(const qcore::Circuit& circuit, const std::vector<int>& device_qubits,
                      std::int64_t shots, std::uint64_t seed) const override;
    std::string name() const override { return "file-replay"; }

    // Shot count declared by the document covering these qubits.
    std::int64_t shots_for(const std::vector<int>& device_qubits) const;

private:
    std::map<std::pair<std::vector<int>, std::string>, qcore::Counts> records_;
    std::map<std::vector<int>, std::int64_t> shots_;
};

}  // namespace gthemu
