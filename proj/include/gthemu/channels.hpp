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

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gthemu/qcore.hpp"

// Kraus noise channels and the composite per-gate noise models:
//   M(lambda)            = depolarizing -> amplitude damping -> dephasing -> readout
//   N(lambda_i, lambda_j, zeta) = M(lambda_i) on i -> M(lambda_j) on j -> 2q depolarizing
namespace gthemu::channels {

using qcore::ComplexMatrix;
using qcore::DensityMatrix;

enum class ChannelType { kDepolarizing, kAmplitudeDamping, kDephasing, kReadout };

struct KrausChannel {
    int n_qubits = 1;
    std::vector<ComplexMatrix> kraus_ops;
    // Set by the named factories. apply_channel evaluates the unital ones
    // (depolarizing, dephasing, readout) as Pauli mixtures, which keep I/2^n
    // bit-exact.
    std::optional<ChannelType> type;
    double strength = 0.0;

    // max |sum_k K_k^dag K_k - I|
    double completeness_error() const;
};

// Application order inside M. Shared by data generation, prediction and emulation.
inline constexpr std::array<ChannelType, 4> kSingleQubitChannelOrder = {
    ChannelType::kDepolarizing, ChannelType::kAmplitudeDamping, ChannelType::kDephasing,
    ChannelType::kReadout};

// Where the bit-flip readout channel acts: inside M after every gate, or once
// per qubit just before measurement.
enum class ReadoutPlacement { kPerGate, kTerminal };

std::string to_string(ReadoutPlacement placement);
ReadoutPlacement readout_placement_from_string(const std::string& text);

struct LambdaParams {
    double d = 0.0;  // depolarizing
    double a = 0.0;  // amplitude damping
    double f = 0.0;  // dephasing
    double r = 0.0;  // readout

    void validate() const;
    std::array<double, 4> as_array() const { return {d, a, f, r}; }
    static LambdaParams from_array(std::span<const double> v);

    bool operator==(const LambdaParams&) const = default;
};

struct ZetaParams {
    double zeta = 0.0;

    void validate() const;
    bool operator==(const ZetaParams&) const = default;
};

// Local noise model for an n-qubit circuit: one lambda per local qubit and a
// two-qubit depolarizing strength for CZ.
struct NoiseModel {
    std::vector<LambdaParams> lambdas;
    ZetaParams zeta;
    ReadoutPlacement readout = ReadoutPlacement::kPerGate;

    static NoiseModel noiseless(int n_qubits);
    static NoiseModel single(const LambdaParams& lambda,
                             ReadoutPlacement readout = ReadoutPlacement::kPerGate);
    static NoiseModel pair(const LambdaParams& lambda_i, const LambdaParams& lambda_j,
                           const ZetaParams& zeta,
                           ReadoutPlacement readout = ReadoutPlacement::kPerGate);

    int n_qubits() const { return static_cast<int>(lambdas.size()); }
    void validate() const;
};

struct GthNoiseModel {
    LambdaParams lambda_i;
    LambdaParams lambda_j;
    ZetaParams zeta;
    std::array<int, 2> qubit_ids{0, 1};

    void validate() const;
    NoiseModel to_noise_model(ReadoutPlacement readout = ReadoutPlacement::kPerGate) const;

    bool operator==(const GthNoiseModel&) const = default;
};

nlohmann::json to_json(const GthNoiseModel& model);
GthNoiseModel gth_model_from_json(const nlohmann::json& j);
void save_gth_model(const GthNoiseModel& model, const std::string& path);
GthNoiseModel load_gth_model(const std::string& path);

KrausChannel depolarizing_channel(double lambda_d, int n_qubits);
KrausChannel amplitude_damping_channel(double lambda_a);
KrausChannel dephasing_channel(double lambda_f);
KrausChannel readout_channel(double lambda_r);

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& channel,
                            std::span<const int> qubits);

// (1 - lambda) rho + lambda I/2^n on the whole n-qubit register.
DensityMatrix depolarizing_apply(const DensityMatrix& rho, double lambda_d, int n_qubits);
// Single-qubit depolarizing on `target` of a larger register.
DensityMatrix depolarizing_apply_on(const DensityMatrix& rho, double lambda_d, int target);
DensityMatrix amplitude_damping_apply(const DensityMatrix& rho, double lambda_a, int target);
DensityMatrix dephasing_apply(const DensityMatrix& rho, double lambda_f, int target);
DensityMatrix readout_apply(const DensityMatrix& rho, double lambda_r, int target);

// Row-stochastic confusion matrix applied per qubit to an outcome
// distribution (or raw counts); total mass is preserved.
std::map<std::string, double> confusion_apply(const std::map<std::string, double>& distribution,
                                              std::span<const double> lambda_r);

DensityMatrix apply_M(const DensityMatrix& rho, const LambdaParams& lambda, int target,
                      ReadoutPlacement readout = ReadoutPlacement::kPerGate);

DensityMatrix apply_N(const DensityMatrix& rho, const LambdaParams& lambda_i,
                      const LambdaParams& lambda_j, const ZetaParams& zeta,
                      std::array<int, 2> qubits = {0, 1},
                      ReadoutPlacement readout = ReadoutPlacement::kPerGate);

// Gate -> unitary, then M after each PRx (on its qubit) or N after each CZ.
// PreparedIdentity contributes neither gate nor noise. With terminal readout
// placement the readout channel acts once per qubit after the last op.
DensityMatrix noisy_execute(const qcore::Circuit& circuit, const NoiseModel& model,
                            const std::optional<DensityMatrix>& initial = std::nullopt);

}  // namespace gthemu::channels
