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

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

// Exact density-matrix simulation of 1-2 qubit circuits over {PRx, CZ}.
//
// Qubit 0 is the leftmost ket label and the most significant bit of a
// basis-state index and of every bitstring. Global phase is never tracked.
namespace gthemu::qcore {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 2;

enum class Pauli : std::uint8_t { kI = 0, kX = 1, kY = 2, kZ = 3 };
enum class Basis : std::uint8_t { kZ = 0, kX = 1, kY = 2 };

char to_char(Pauli p);
char to_char(Basis b);
Pauli pauli_from_char(char c);
Basis basis_from_char(char c);
std::string to_string(std::span<const Basis> bases);

ComplexMatrix pauli_matrix(Pauli p);

class DensityMatrix {
public:
    // Validates shape, Hermiticity (1e-12) and unit trace (1e-12).
    DensityMatrix(int n_qubits, ComplexMatrix matrix);

    // Skips validation; for channel/unitary outputs whose invariants follow
    // from the map being CPTP.
    static DensityMatrix unchecked(int n_qubits, ComplexMatrix matrix);

    static DensityMatrix ground(int n_qubits);
    static DensityMatrix maximally_mixed(int n_qubits);
    static DensityMatrix from_state(const ComplexVector& psi);

    int n_qubits() const { return n_qubits_; }
    int dim() const { return 1 << n_qubits_; }
    const ComplexMatrix& matrix() const { return matrix_; }
    Complex operator()(int r, int c) const { return matrix_(r, c); }

    double trace() const { return matrix_.trace().real(); }
    double hermiticity_error() const;
    double min_eigenvalue() const;

    // Test-time physicality check; never used to project.
    bool is_physical(double tol = 1e-10) const;

private:
    DensityMatrix() = default;

    int n_qubits_ = 0;
    ComplexMatrix matrix_;
};

struct GateOp {
    enum class Kind : std::uint8_t { kPRx, kCZ, kPreparedIdentity };

    Kind kind = Kind::kPreparedIdentity;
    double theta = 0.0;
    double phi = 0.0;
    std::vector<int> qubits;

    static GateOp prx(int qubit, double theta, double phi);
    static GateOp cz(int control, int target);
    static GateOp prepared_identity(std::vector<int> qubits);

    bool operator==(const GateOp&) const = default;
};

// ops already contain any basis-change fragments; meas_basis records the
// frame that the computational-basis outcome represents.
struct Circuit {
    int n_qubits = 1;
    std::vector<GateOp> ops;
    std::vector<Basis> meas_basis;
    std::string label;

    void validate() const;
};

struct PauliString {
    std::vector<Pauli> ops;
    double coefficient = 1.0;

    // "XZ" -> X on qubit 0, Z on qubit 1.
    static PauliString parse(std::string_view text, double coefficient = 1.0);

    int n_qubits() const { return static_cast<int>(ops.size()); }
    bool is_identity() const;
    std::string str() const;
    ComplexMatrix matrix() const;
};

// Histogram of measured bitstrings, tagged with the basis each qubit was
// read out in.
struct Counts {
    std::vector<Basis> basis;
    std::map<std::string, std::int64_t> histogram;

    std::int64_t shots() const;
};

struct Estimate {
    double mean = 0.0;
    double stddev = 0.0;  // standard error of the mean
};

ComplexMatrix prx_unitary(double theta, double phi);
ComplexMatrix cz_unitary();
ComplexMatrix gate_unitary(const GateOp& op);

// Lifts a k-qubit operator acting on `qubits` (in that order) to n qubits.
ComplexMatrix embed(const ComplexMatrix& op, std::span<const int> qubits, int n_qubits);

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                            std::span<const int> qubits);
DensityMatrix apply_gate(const DensityMatrix& rho, const GateOp& op);

// Noiseless evolution of |0..0><0..0| through the circuit.
DensityMatrix simulate(const Circuit& circuit);

// Tr(P rho). The coefficient of P is not applied.
double expectation(const DensityMatrix& rho, const PauliString& p);

// Computational-basis populations; tiny negatives (>= -1e-10) clamp to zero.
std::vector<double> probabilities(const DensityMatrix& rho);

// PRx fragment mapping the +1 eigenstate of `basis` onto |0>.
std::vector<GateOp> basis_rotation_ops(Basis basis, int qubit);

// Rotates into `meas_basis` (noiselessly) and draws one multinomial sample.
Counts sample_counts(const DensityMatrix& rho, std::span<const Basis> meas_basis,
                     std::int64_t shots, std::uint64_t seed);

// Samples the computational basis directly and tags the result with
// `basis_label`; used when the circuit already carries its rotations.
Counts sample_computational(const DensityMatrix& rho, std::span<const Basis> basis_label,
                            std::int64_t shots, std::uint64_t seed);

std::string bitstring(std::uint32_t index, int n_qubits);

double pauli_expectation_from_counts(const Counts& counts, const PauliString& p);

// Mean and standard error of sum_k c_k * P_k evaluated shot-by-shot. All
// terms must be diagonal in the counts' basis.
Estimate observable_from_counts(const Counts& counts, std::span<const PauliString> terms);

// {"n_qubits":2,"meas_basis":"ZX","label":"...","ops":[{"gate":"prx","qubits":[0],
// "theta":..,"phi":..},{"gate":"cz","qubits":[0,1]},{"gate":"id","qubits":[..]}]}
nlohmann::json to_json(const GateOp& op);
GateOp gate_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

}  // namespace gthemu::qcore
