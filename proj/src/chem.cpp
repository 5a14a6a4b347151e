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

#include "gthemu/chem.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "gthemu/error.hpp"
#include "gthemu/seeds.hpp"

namespace gthemu::chem {

using qcore::Basis;
using qcore::GateOp;
using qcore::Pauli;
using qcore::PauliString;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

std::string num(double v) { return nlohmann::json(v).dump(); }

// Measurement setting for a term: its own Pauli where present, Z elsewhere.
std::string setting_of(const PauliString& p) {
    std::string s;
    for (Pauli op : p.ops) s += op == Pauli::kI ? 'Z' : qcore::to_char(op);
    return s;
}

// The same term with every non-identity factor replaced by Z.
PauliString diagonal_of(const PauliString& p) {
    PauliString z = p;
    for (Pauli& op : z.ops) {
        if (op != Pauli::kI) op = Pauli::kZ;
    }
    return z;
}

// Terms grouped by the basis setting they are read out in.
std::map<std::string, std::vector<PauliString>> groups_of(const PauliHamiltonian& h) {
    std::map<std::string, std::vector<PauliString>> groups;
    for (const PauliString& t : h.terms) {
        if (!t.is_identity()) groups[setting_of(t)].push_back(t);
    }
    return groups;
}

std::array<Basis, 2> bases_of(const std::string& setting) {
    return {qcore::basis_from_char(setting[0]), qcore::basis_from_char(setting[1])};
}

double identity_part(const PauliHamiltonian& h) {
    double c = 0.0;
    for (const PauliString& t : h.terms) {
        if (t.is_identity()) c += t.coefficient;
    }
    return c;
}

// Reorders the per-group estimates into Hamiltonian order and totals them.
EnergyEstimate assemble(double theta, const PauliHamiltonian& h,
                        const std::map<std::string, TermEstimate>& by_term, double group_variance) {
    EnergyEstimate e;
    e.theta = theta;
    e.energy = identity_part(h) + h.offset;
    for (const PauliString& t : h.terms) {
        if (t.is_identity()) continue;
        const TermEstimate& te = by_term.at(t.str());
        e.terms.push_back(te);
        e.energy += te.coefficient * te.mean;
    }
    e.stddev = std::sqrt(group_variance);
    return e;
}

void add_basis_change(std::vector<GateOp>& ops, bool inverse) {
    // Maps the X0 Y1 eigenbasis onto Z0 Z1.
    const double s = inverse ? -1.0 : 1.0;
    ops.push_back(GateOp::prx(0, -s * kHalfPi, kHalfPi));  // Ry(-pi/2)
    ops.push_back(GateOp::prx(1, s * kHalfPi, 0.0));       // Rx(pi/2)
}

void add_cnot(std::vector<GateOp>& ops) {
    // CNOT(0 -> 1) up to a Z on the control, which cancels in pairs.
    ops.push_back(GateOp::prx(1, kHalfPi, kHalfPi));
    ops.push_back(GateOp::cz(0, 1));
    ops.push_back(GateOp::prx(1, -kHalfPi, kHalfPi));
}

}  // namespace

// Hamiltonian

int PauliHamiltonian::n_qubits() const { return terms.empty() ? 0 : terms.front().n_qubits(); }

void PauliHamiltonian::validate() const {
    if (terms.empty()) throw InputError("Hamiltonian has no terms");
    const int n = n_qubits();
    if (static_cast<std::size_t>(1) << (2 * n) < terms.size()) throw InputError("more terms than Pauli strings");
    for (const PauliString& t : terms) {
        if (t.n_qubits() != n) throw DimensionError("Hamiltonian terms act on different qubit counts");
        if (!std::isfinite(t.coefficient)) throw InputError("non-finite Hamiltonian coefficient");
    }
}

qcore::ComplexMatrix PauliHamiltonian::matrix() const {
    validate();
    const int dim = 1 << n_qubits();
    qcore::ComplexMatrix m = qcore::ComplexMatrix::Zero(dim, dim);
    for (const PauliString& t : terms) m += t.coefficient * t.matrix();
    return m;
}

double PauliHamiltonian::ground_energy() const {
    const Eigen::SelfAdjointEigenSolver<qcore::ComplexMatrix> solver(matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0) + offset;
}

double PauliHamiltonian::expectation(const qcore::DensityMatrix& rho) const {
    double e = offset;
    for (const PauliString& t : terms) e += t.coefficient * qcore::expectation(rho, t);
    return e;
}

PauliHamiltonian h2_hamiltonian(double offset) {
    PauliHamiltonian h;
    h.offset = offset;
    h.terms = {PauliString::parse("II", -0.4584), PauliString::parse("ZI", 0.3593),
               PauliString::parse("IZ", -0.4826), PauliString::parse("ZZ", 0.5818),
               PauliString::parse("XX", 0.0896),  PauliString::parse("YY", 0.0896)};
    return h;
}

// Ansatz

std::string to_string(AnsatzVariant v) { return v == AnsatzVariant::kGeneric ? "generic" : "compact"; }

AnsatzVariant ansatz_variant_from_string(const std::string& text) {
    if (text == "generic") return AnsatzVariant::kGeneric;
    if (text == "compact") return AnsatzVariant::kCompact;
    throw InputError("unknown ansatz variant '" + text + "' (expected generic or compact)");
}

qcore::Circuit ucc_circuit(double theta, std::array<Basis, 2> basis, AnsatzVariant variant) {
    if (!std::isfinite(theta)) throw InputError("theta must be finite");
    // exp(-i phi X0 Y1)|10> = cos(phi)|10> + sin(phi)|01>; phi = -theta/2 puts
    // the energy minimum at theta = +0.2097.
    const double phi = -theta / 2.0;
    qcore::Circuit c;
    c.n_qubits = 2;
    c.ops.push_back(GateOp::prx(0, kPi, 0.0));  // |00> -> |10>
    if (variant == AnsatzVariant::kGeneric) {
        add_basis_change(c.ops, false);
        add_cnot(c.ops);
        // Rz(2 phi) on qubit 1 as PRx(pi, phi) . PRx(pi, 0), up to phase.
        c.ops.push_back(GateOp::prx(1, kPi, 0.0));
        c.ops.push_back(GateOp::prx(1, kPi, phi));
        add_cnot(c.ops);
        add_basis_change(c.ops, true);
    } else {
        // CZ . Ry(2 phi)_1 . CZ = exp(-i phi Z0 Y1), then X0 <- Z0.
        c.ops.push_back(GateOp::prx(0, -kHalfPi, kHalfPi));
        c.ops.push_back(GateOp::cz(0, 1));
        c.ops.push_back(GateOp::prx(1, 2.0 * phi, kHalfPi));
        c.ops.push_back(GateOp::cz(0, 1));
        c.ops.push_back(GateOp::prx(0, kHalfPi, kHalfPi));
    }
    for (int q = 0; q < 2; ++q) {
        for (const GateOp& op : qcore::basis_rotation_ops(basis[static_cast<std::size_t>(q)], q)) {
            c.ops.push_back(op);
        }
    }
    c.meas_basis = {basis[0], basis[1]};
    c.label = "ucc;theta=" + num(theta) + ";basis=" + qcore::to_string(std::span<const Basis>(c.meas_basis)) +
              ";ansatz=" + to_string(variant);
    return c;
}

// Energies

EnergyEstimate energy(double theta, const Executor& executor, std::int64_t shots, std::uint64_t seed,
                      const PauliHamiltonian& h, AnsatzVariant variant,
                      const std::vector<int>& device_qubits) {
    h.validate();
    if (h.n_qubits() != 2) throw DimensionError("the UCC ansatz needs a 2-qubit Hamiltonian");
    if (shots < 1) throw InputError("shots must be >= 1");
    std::map<std::string, TermEstimate> by_term;
    double variance = 0.0;
    for (const auto& [setting, terms] : groups_of(h)) {
        const qcore::Circuit c = ucc_circuit(theta, bases_of(setting), variant);
        const qcore::Counts counts = executor.run(c, device_qubits, shots, derive_seed(seed, setting));
        if (counts.shots() != shots) throw SchemaError("executor returned the wrong shot count");
        const qcore::Estimate combined = qcore::observable_from_counts(counts, terms);
        variance += combined.stddev * combined.stddev;
        for (const PauliString& t : terms) {
            const double m = qcore::pauli_expectation_from_counts(counts, t);
            by_term[t.str()] = {t.str(), t.coefficient, m,
                                std::sqrt(std::max(0.0, 1.0 - m * m) / static_cast<double>(shots))};
        }
    }
    return assemble(theta, h, by_term, variance);
}

EnergyEstimate exact_energy(double theta, const std::optional<channels::NoiseModel>& model,
                            const PauliHamiltonian& h, AnsatzVariant variant) {
    h.validate();
    if (h.n_qubits() != 2) throw DimensionError("the UCC ansatz needs a 2-qubit Hamiltonian");
    std::map<std::string, TermEstimate> by_term;
    for (const auto& [setting, terms] : groups_of(h)) {
        const qcore::Circuit c = ucc_circuit(theta, bases_of(setting), variant);
        const qcore::DensityMatrix rho = model ? channels::noisy_execute(c, *model) : qcore::simulate(c);
        for (const PauliString& t : terms) {
            by_term[t.str()] = {t.str(), t.coefficient, qcore::expectation(rho, diagonal_of(t)), 0.0};
        }
    }
    return assemble(theta, h, by_term, 0.0);
}

// Sweeps

std::vector<double> default_thetas(int points) {
    if (points < 2) throw InputError("a sweep needs at least 2 points");
    std::vector<double> out;
    for (int k = 0; k < points; ++k) out.push_back(-kPi + 2.0 * kPi * k / (points - 1));
    return out;
}

namespace {

void check_thetas(const std::vector<double>& thetas) {
    if (thetas.empty()) throw InputError("theta list is empty");
    for (std::size_t k = 1; k < thetas.size(); ++k) {
        if (!(thetas[k] > thetas[k - 1])) throw InputError("theta list must be strictly increasing");
    }
}

}  // namespace

SweepResult sweep(const Executor& executor, const std::vector<double>& thetas, std::int64_t shots,
                  std::uint64_t seed, const PauliHamiltonian& h, AnsatzVariant variant,
                  const std::vector<int>& device_qubits) {
    check_thetas(thetas);
    SweepResult r;
    r.executor = executor.name();
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        r.points.push_back(energy(thetas[k], executor, shots, derive_seed(seed, static_cast<std::uint64_t>(k)), h,
                                  variant, device_qubits));
    }
    return r;
}

SweepResult exact_sweep(const std::optional<channels::NoiseModel>& model, const std::vector<double>& thetas,
                        const PauliHamiltonian& h, AnsatzVariant variant) {
    check_thetas(thetas);
    SweepResult r;
    r.executor = model ? "exact-noisy" : "exact-noiseless";
    for (double t : thetas) r.points.push_back(exact_energy(t, model, h, variant));
    return r;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "theta";
    if (!result.points.empty()) {
        for (const TermEstimate& t : result.points.front().terms) out << ',' << t.pauli << ',' << t.pauli << "_std";
    }
    out << ",energy,energy_std\n";
    for (const EnergyEstimate& p : result.points) {
        out << num(p.theta);
        for (const TermEstimate& t : p.terms) out << ',' << num(t.mean) << ',' << num(t.stddev);
        out << ',' << num(p.energy) << ',' << num(p.stddev) << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

// Optimisation

OptimizeResult optimize_theta(const std::function<double(double)>& objective, double tolerance) {
    if (!(tolerance > 0.0)) throw InputError("tolerance must be positive");
    OptimizeResult r;
    auto eval = [&](double t) {
        const double e = objective(t);
        ++r.evaluations;
        if (!std::isfinite(e)) throw InternalError("non-finite energy at theta = " + num(t));
        return e;
    };
    r.scan_thetas = default_thetas();
    std::size_t best = 0;
    for (std::size_t k = 0; k < r.scan_thetas.size(); ++k) {
        r.scan_energies.push_back(eval(r.scan_thetas[k]));
        if (r.scan_energies[k] < r.scan_energies[best]) best = k;
    }
    double lo = r.scan_thetas[best == 0 ? 0 : best - 1];
    double hi = r.scan_thetas[std::min(best + 1, r.scan_thetas.size() - 1)];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (hi - lo > tolerance) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2);
        }
    }
    r.theta = 0.5 * (lo + hi);
    r.energy = eval(r.theta);
    // Never report worse than the scan (possible with shot noise).
    if (r.scan_energies[best] < r.energy) {
        r.theta = r.scan_thetas[best];
        r.energy = r.scan_energies[best];
    }
    return r;
}

OptimizeResult optimize_theta(const Executor& executor, std::int64_t shots, std::uint64_t seed,
                              double tolerance, const PauliHamiltonian& h, AnsatzVariant variant) {
    return optimize_theta(
        [&](double t) { return energy(t, executor, shots, seed, h, variant).energy; }, tolerance);
}

OptimizeResult optimize_theta_exact(const std::optional<channels::NoiseModel>& model, double tolerance,
                                    const PauliHamiltonian& h, AnsatzVariant variant) {
    return optimize_theta([&](double t) { return exact_energy(t, model, h, variant).energy; }, tolerance);
}

}  // namespace gthemu::chem
