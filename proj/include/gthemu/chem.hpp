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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gthemu/channels.hpp"
#include "gthemu/executor.hpp"
#include "gthemu/qcore.hpp"

// Two-qubit H2 benchmark: Pauli Hamiltonian, one-parameter UCC ansatz over
// {PRx, CZ}, energy estimation, theta sweeps and 1-D minimisation.
namespace gthemu::chem {

// Constant added to reported energies when comparing with published
// state-vector numbers (nuclear repulsion is not part of the qubit Hamiltonian).
inline constexpr double kReferenceEnergyOffset = 0.75366;
inline constexpr double kReferenceThetaStar = 0.2097;
inline constexpr int kDefaultSweepPoints = 33;

struct PauliHamiltonian {
    std::vector<qcore::PauliString> terms;  // coefficients in Hartree
    double offset = 0.0;

    int n_qubits() const;
    void validate() const;
    qcore::ComplexMatrix matrix() const;  // without the offset
    double ground_energy() const;         // lowest eigenvalue plus offset
    double expectation(const qcore::DensityMatrix& rho) const;
};

// -0.4584 I + 0.3593 Z0 - 0.4826 Z1 + 0.5818 Z0Z1 + 0.0896 X0X1 + 0.0896 Y0Y1
PauliHamiltonian h2_hamiltonian(double offset = 0.0);

enum class AnsatzVariant {
    // X0 basis change around CZ . Ry(2 phi) . CZ; five gates plus the prep.
    kCompact,
    // Basis change, CNOT ladder built from CZ, Rz core from two PRx(pi, .).
    // Same state, 13 ops, so roughly twice the accumulated noise.
    kGeneric,
};

std::string to_string(AnsatzVariant v);
AnsatzVariant ansatz_variant_from_string(const std::string& text);

// Prepares |10>, rotates to cos(t/2)|10> - sin(t/2)|01> (up to global phase),
// then appends the measurement rotations for `basis`. PRx and CZ only.
qcore::Circuit ucc_circuit(double theta, std::array<qcore::Basis, 2> basis,
                           AnsatzVariant variant = AnsatzVariant::kCompact);

struct TermEstimate {
    std::string pauli;
    double coefficient = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // standard error; 0 for exact evaluation
};

struct EnergyEstimate {
    double theta = 0.0;
    double energy = 0.0;  // includes the offset
    double stddev = 0.0;
    std::vector<TermEstimate> terms;  // non-identity terms, Hamiltonian order
};

// Z-basis circuit -> Z0, Z1, Z0Z1; X-basis -> X0X1; Y-basis -> Y0Y1.
EnergyEstimate energy(double theta, const Executor& executor, std::int64_t shots, std::uint64_t seed,
                      const PauliHamiltonian& h = h2_hamiltonian(),
                      AnsatzVariant variant = AnsatzVariant::kCompact,
                      const std::vector<int>& device_qubits = {0, 1});

// Infinite-shot energy from the final density matrices.
EnergyEstimate exact_energy(double theta, const std::optional<channels::NoiseModel>& model,
                            const PauliHamiltonian& h = h2_hamiltonian(),
                            AnsatzVariant variant = AnsatzVariant::kCompact);

struct SweepResult {
    std::string executor;
    std::vector<EnergyEstimate> points;
};

// kDefaultSweepPoints equally spaced values in [-pi, pi].
std::vector<double> default_thetas(int points = kDefaultSweepPoints);

// Point k uses seed derive_seed(seed, k).
SweepResult sweep(const Executor& executor, const std::vector<double>& thetas, std::int64_t shots,
                  std::uint64_t seed, const PauliHamiltonian& h = h2_hamiltonian(),
                  AnsatzVariant variant = AnsatzVariant::kCompact,
                  const std::vector<int>& device_qubits = {0, 1});
SweepResult exact_sweep(const std::optional<channels::NoiseModel>& model, const std::vector<double>& thetas,
                        const PauliHamiltonian& h = h2_hamiltonian(),
                        AnsatzVariant variant = AnsatzVariant::kCompact);

// Columns: theta, <term>, <term>_std for each term, energy, energy_std.
void write_sweep_csv(const SweepResult& result, const std::string& path);

struct OptimizeResult {
    double theta = 0.0;
    double energy = 0.0;
    int evaluations = 0;
    std::vector<double> scan_thetas;
    std::vector<double> scan_energies;
};

// Coarse scan over default_thetas(), then golden-section search on the
// bracket around the best scan point until its width is below `tolerance`.
OptimizeResult optimize_theta(const std::function<double(double)>& objective, double tolerance);

// Shot-based objective with one fixed seed, so repeated evaluations at the
// same theta agree.
OptimizeResult optimize_theta(const Executor& executor, std::int64_t shots, std::uint64_t seed,
                              double tolerance, const PauliHamiltonian& h = h2_hamiltonian(),
                              AnsatzVariant variant = AnsatzVariant::kCompact);
OptimizeResult optimize_theta_exact(const std::optional<channels::NoiseModel>& model, double tolerance,
                                    const PauliHamiltonian& h = h2_hamiltonian(),
                                    AnsatzVariant variant = AnsatzVariant::kCompact);

}  // namespace gthemu::chem
