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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gthemu/error.hpp"
#include "gthemu/qcore.hpp"
#include "oracles.hpp"

using namespace gthemu;
using namespace gthemu::qcore;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

Counts make_counts(const std::string& basis, std::map<std::string, std::int64_t> h) {
    Counts c;
    for (char b : basis) c.basis.push_back(basis_from_char(b));
    c.histogram = std::move(h);
    return c;
}

}  // namespace

TEST(Qcore, PrxMatchesClosedForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-2 * oracle::kPi, 2 * oracle::kPi);
    for (int t = 0; t < 50; ++t) {
        const double th = ang(rng), ph = ang(rng);
        EXPECT_LT(max_abs(prx_unitary(th, ph) - oracle::prx(th, ph)), 1e-12);
    }
}

TEST(Qcore, PrxInverseProperty) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ang(-2 * oracle::kPi, 2 * oracle::kPi);
    for (int t = 0; t < 100; ++t) {
        const double th = ang(rng), ph = ang(rng);
        const ComplexMatrix prod = prx_unitary(th, ph) * prx_unitary(-th, ph);
        EXPECT_LT(max_abs(prod - ComplexMatrix::Identity(2, 2)), 1e-12);
    }
}

TEST(Qcore, PrxPiFlipsGround) {
    Circuit c;
    c.ops = {GateOp::prx(0, oracle::kPi, 0.0)};
    const auto rho = simulate(c);
    EXPECT_NEAR(rho(1, 1).real(), 1.0, 1e-12);
    EXPECT_NEAR(rho(0, 0).real(), 0.0, 1e-12);
}

TEST(Qcore, QubitZeroIsMostSignificant) {
    Circuit c;
    c.n_qubits = 2;
    c.ops = {GateOp::prx(0, oracle::kPi, 0.0)};
    const auto p = probabilities(simulate(c));
    EXPECT_NEAR(p[2], 1.0, 1e-12);  // |10>
    EXPECT_EQ(bitstring(2, 2), "10");
}

TEST(Qcore, EmbedMatchesKron) {
    const ComplexMatrix x = pauli_matrix(Pauli::kX);
    const int q0[] = {0};
    const int q1[] = {1};
    EXPECT_LT(max_abs(embed(x, q0, 2) - oracle::kron(oracle::pauli('X'), oracle::pauli('I'))), 1e-15);
    EXPECT_LT(max_abs(embed(x, q1, 2) - oracle::kron(oracle::pauli('I'), oracle::pauli('X'))), 1e-15);
    const int rev[] = {1, 0};
    const ComplexMatrix xz = oracle::kron(oracle::pauli('X'), oracle::pauli('Z'));
    EXPECT_LT(max_abs(embed(xz, rev, 2) - oracle::kron(oracle::pauli('Z'), oracle::pauli('X'))), 1e-15);
}

TEST(Qcore, TracePreservedUnderRandomCircuits) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ang(-oracle::kPi, oracle::kPi);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int t = 0; t < 30; ++t) {
        Circuit c;
        c.n_qubits = 2;
        oracle::M u = oracle::M::Identity(4, 4);
        for (int k = 0; k < 12; ++k) {
            const int kind = pick(rng);
            if (kind == 2) {
                c.ops.push_back(GateOp::cz(0, 1));
                u = oracle::cz() * u;
            } else {
                const double th = ang(rng), ph = ang(rng);
                c.ops.push_back(GateOp::prx(kind, th, ph));
                const oracle::M g = kind == 0 ? oracle::kron(oracle::prx(th, ph), oracle::pauli('I'))
                                              : oracle::kron(oracle::pauli('I'), oracle::prx(th, ph));
                u = g * u;
            }
        }
        const auto rho = simulate(c);
        EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
        EXPECT_TRUE(rho.is_physical());
        const oracle::V psi = u.col(0);
        EXPECT_LT(max_abs(rho.matrix() - psi * psi.adjoint()), 1e-12);
    }
}

TEST(Qcore, DensityMatrixRejectsBadInput) {
    ComplexMatrix m = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix(1, m), InputError);  // trace 2
    EXPECT_THROW(DensityMatrix(2, m / 2.0), DimensionError);
    ComplexMatrix h = ComplexMatrix::Identity(2, 2) / 2.0;
    h(0, 1) = 0.3;
    EXPECT_THROW(DensityMatrix(1, h), InputError);
}

TEST(Qcore, CircuitValidation) {
    Circuit c;
    c.n_qubits = 1;
    c.ops = {GateOp::prx(1, 0.1, 0.0)};
    EXPECT_THROW(c.validate(), InputError);
    EXPECT_THROW(GateOp::prx(0, std::nan(""), 0.0), InputError);
}

TEST(Qcore, PauliExpectationFromCounts) {
    EXPECT_DOUBLE_EQ(pauli_expectation_from_counts(make_counts("Z", {{"0", 100}}), PauliString::parse("Z")), 1.0);
    const auto c = make_counts("ZZ", {{"00", 50}, {"11", 50}});
    EXPECT_DOUBLE_EQ(pauli_expectation_from_counts(c, PauliString::parse("ZZ")), 1.0);
    EXPECT_DOUBLE_EQ(pauli_expectation_from_counts(c, PauliString::parse("ZI")), 0.0);
    EXPECT_DOUBLE_EQ(pauli_expectation_from_counts(c, PauliString::parse("II")), 1.0);
    EXPECT_THROW(pauli_expectation_from_counts(c, PauliString::parse("XZ")), InputError);
}

TEST(Qcore, SampledExpectationMatchesExact) {
    std::mt19937_64 rng(14);
    const int shots = 10000;
    for (int t = 0; t < 20; ++t) {
        const DensityMatrix rho(2, oracle::random_density(4, rng));
        for (const char* setting : {"ZZ", "XY", "YX", "XX"}) {
            std::vector<Basis> bases;
            for (const char* s = setting; *s; ++s) bases.push_back(basis_from_char(*s));
            const auto counts = sample_counts(rho, bases, shots, 1000 + t);
            const auto p = PauliString::parse(setting);
            const double exact = oracle::tr_real(oracle::pauli_string(setting) * rho.matrix());
            const double sigma = std::sqrt(std::max(1.0 - exact * exact, 1e-4) / shots);
            EXPECT_NEAR(pauli_expectation_from_counts(counts, p), exact, 5 * sigma) << setting;
            EXPECT_NEAR(expectation(rho, p), exact, 1e-12);
        }
    }
}

TEST(Qcore, SamplingIsDeterministicAndSumsToShots) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    const std::vector<Basis> zz = {Basis::kZ, Basis::kZ};
    const auto a = sample_counts(rho, zz, 777, 5);
    const auto b = sample_counts(rho, zz, 777, 5);
    const auto c = sample_counts(rho, zz, 777, 6);
    EXPECT_EQ(a.histogram, b.histogram);
    EXPECT_NE(a.histogram, c.histogram);
    EXPECT_EQ(a.shots(), 777);
}

TEST(Qcore, CircuitJsonRoundTrip) {
    Circuit c;
    c.n_qubits = 2;
    c.label = "rt";
    c.meas_basis = {Basis::kX, Basis::kY};
    c.ops = {GateOp::prx(0, 0.1234567890123, -2.5), GateOp::cz(0, 1), GateOp::prepared_identity({0, 1})};
    const Circuit back = circuit_from_json(to_json(c));
    EXPECT_EQ(back.ops, c.ops);
    EXPECT_EQ(back.meas_basis, c.meas_basis);
    EXPECT_EQ(back.label, c.label);
    EXPECT_THROW(circuit_from_json(nlohmann::json::parse(R"({"n_qubits":1,"ops":[{"gate":"h","qubits":[0]}]})")),
                 SchemaError);
}
