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
#include "gthemu/executor.hpp"
#include "gthemu/gst.hpp"
#include "oracles.hpp"

using namespace gthemu;
using namespace gthemu::gst;
using channels::LambdaParams;
using channels::NoiseModel;
using qcore::GateOp;

namespace {

GstGateSet one_gate(const GateOp& g) {
    GstGateSet s;
    s.n_qubits = 1;
    s.gates = {g};
    return s;
}

void expect_first_rows_one(const GstOutcome& o) {
    for (Eigen::Index c = 0; c < o.g.cols(); ++c) EXPECT_EQ(o.g(0, c), 1.0);
    for (const auto& u : o.u_list) {
        for (Eigen::Index c = 0; c < u.cols(); ++c) EXPECT_EQ(u(0, c), 1.0);
    }
}

}  // namespace

TEST(Gst, CircuitBatchShape) {
    EXPECT_EQ(build_gst_circuits(GstGateSet::single_qubit_set(), 1).size(), 4u * 16u * 3u);
    EXPECT_EQ(build_gst_circuits(GstGateSet::cz_only(), 2).size(), 16u * 2u * 9u);
    for (const auto& gc : build_gst_circuits(GstGateSet::cz_only(), 2)) {
        for (const auto& op : gc.circuit.ops) {
            EXPECT_TRUE(op.kind == GateOp::Kind::kPRx || op.kind == GateOp::Kind::kCZ);
        }
        EXPECT_EQ(GstCircuitLabel::parse(gc.label.str()), gc.label);
    }
}

TEST(Gst, PreparationFragmentsMakeTheColumnStates) {
    for (int k = 0; k < kNumPreps; ++k) {
        qcore::Circuit c;
        c.ops = prep_fragment(k);
        const oracle::M want = oracle::projector(oracle::prep_ket(k));
        EXPECT_LT((qcore::simulate(c).matrix() - want).cwiseAbs().maxCoeff(), 1e-12) << k;
    }
}

TEST(Gst, NoiselessMatricesMatchAnalyticTransfer) {
    const auto set = GstGateSet::single_qubit_set();
    const auto o = exact_gst(std::nullopt, set, 1);
    EXPECT_LT((o.g - oracle::ideal_gst(oracle::M::Identity(2, 2), 1)).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::MatrixXd g_expected(4, 4);
    g_expected << 1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, -1, 0, 0;
    EXPECT_LT((o.g - g_expected).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_EQ(o.u_list.size(), set.gates.size());
    for (std::size_t k = 0; k < set.gates.size(); ++k) {
        const auto want = oracle::ideal_gst(oracle::prx(set.gates[k].theta, set.gates[k].phi), 1);
        EXPECT_LT((o.u_list[k] - want).cwiseAbs().maxCoeff(), 1e-10) << "gate " << k;
    }
    const auto o2 = exact_gst(std::nullopt, GstGateSet::cz_only(), 2);
    EXPECT_LT((o2.u_list[0] - oracle::ideal_gst(oracle::cz(), 2)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((o2.g - oracle::ideal_gst(oracle::M::Identity(4, 4), 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Gst, NoiselessEstimateWithinShotNoise) {
    const SimulatorExecutor exec;
    const std::int64_t shots = 10000;
    const auto o = estimate_gst(exec, one_gate(GateOp::prx(0, oracle::kPi, 0.0)), 1, shots, 3);
    Eigen::MatrixXd g_expected(4, 4);
    g_expected << 1, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, -1, 0, 0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const double sigma = std::sqrt(std::max(1 - g_expected(r, c) * g_expected(r, c), 1e-9) / shots);
            EXPECT_NEAR(o.g(r, c), g_expected(r, c), 4 * sigma + 1e-12);
        }
    }
    EXPECT_EQ(o.u_list[0](3, 0), -1.0);
    EXPECT_EQ(o.u_list[0](3, 1), 1.0);
    EXPECT_NEAR(o.u_list[0](3, 2), 0.0, 4 / std::sqrt(double(shots)));
    EXPECT_NEAR(o.u_list[0](3, 3), 0.0, 4 / std::sqrt(double(shots)));
    expect_first_rows_one(o);
}

TEST(Gst, FirstRowsExactlyOneUnderNoise) {
    const SimulatorExecutor exec(NoiseModel::single({0.05, 0.07, 0.02, 0.03}));
    expect_first_rows_one(estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 500, 9));
    const SimulatorExecutor exec2(NoiseModel::pair({0.05, 0.07, 0.02, 0.03}, {0.01, 0, 0.04, 0.02}, {0.1}));
    expect_first_rows_one(estimate_gst(exec2, GstGateSet::cz_only(), 2, 200, 9));
}

TEST(Gst, EntriesInUnitInterval) {
    const SimulatorExecutor exec(NoiseModel::single({0.08, 0.08, 0.08, 0.08}));
    const auto o = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 50, 1);
    for (double v : o.features()) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Gst, FullDepolarizingEndpoint) {
    const auto o = exact_gst(NoiseModel::single({1.0, 0, 0, 0}), one_gate(GateOp::prx(0, 0.0, 0.0)), 1);
    for (int c = 0; c < 4; ++c) {
        for (int r = 1; r < 4; ++r) EXPECT_NEAR(o.u_list[0](r, c), 0.0, 1e-12);
    }
}

TEST(Gst, DephasingKeepsZRowDepolarizingScalesIt) {
    const auto id = one_gate(GateOp::prx(0, 0.0, 0.0));
    const auto clean = exact_gst(std::nullopt, id, 1);
    const auto deph = exact_gst(NoiseModel::single({0, 0, 0.3, 0}), id, 1);
    const auto depo = exact_gst(NoiseModel::single({0.3, 0, 0, 0}), id, 1);
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(deph.u_list[0](3, c), clean.u_list[0](3, c), 1e-12);
    // |1> column: prep PRx(pi,0) then the identity gate, two depolarizing hits.
    EXPECT_NEAR(depo.u_list[0](3, 1), -(0.7 * 0.7), 1e-12);
    EXPECT_NEAR(depo.g(3, 1), -0.7, 1e-12);
}

TEST(Gst, SpamNoiseLeavesFootprintOnG) {
    const auto clean = exact_gst(std::nullopt, GstGateSet::single_qubit_set(), 1);
    for (const LambdaParams& l : {LambdaParams{0.02, 0, 0, 0}, LambdaParams{0, 0.02, 0, 0},
                                  LambdaParams{0, 0, 0.02, 0}, LambdaParams{0, 0, 0, 0.02}}) {
        const auto noisy = exact_gst(NoiseModel::single(l), GstGateSet::single_qubit_set(), 1);
        EXPECT_GT((noisy.g - clean.g).cwiseAbs().maxCoeff(), 1e-4);
    }
}

TEST(Gst, MillionShotEstimateMatchesExact) {
    const NoiseModel model = NoiseModel::single({0.04, 0.06, 0.03, 0.02});
    const SimulatorExecutor exec(model);
    const std::int64_t shots = 1000000;
    const auto est = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, shots, 77);
    const auto ex = exact_gst(model, GstGateSet::single_qubit_set(), 1);
    const auto fe = est.features(), fx = ex.features();
    for (std::size_t i = 0; i < fe.size(); ++i) {
        const double sigma = std::sqrt(std::max(1 - fx[i] * fx[i], 0.0) / shots);
        EXPECT_NEAR(fe[i], fx[i], 5 * sigma + 1e-12) << i;
    }
}

TEST(Gst, DeterministicInSeed) {
    const SimulatorExecutor exec(NoiseModel::single({0.01, 0.02, 0.03, 0.04}));
    const auto a = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 1000, 5);
    const auto b = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 1000, 5);
    const auto c = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 1000, 6);
    EXPECT_EQ(a.features(), b.features());
    EXPECT_NE(a.features(), c.features());
}

TEST(Gst, CountsRoundTripThroughJson) {
    const SimulatorExecutor exec(NoiseModel::single({0.01, 0.02, 0.03, 0.04}));
    const auto doc = collect_counts(exec, GstGateSet::single_qubit_set(), 1, 300, 8, {4});
    const auto text = to_json(doc).dump();
    const auto back = counts_import_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(back.qubits, std::vector<int>{4});
    EXPECT_EQ(to_json(back).dump(), text);
    const auto direct = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 300, 8, {4});
    EXPECT_EQ(outcome_from_counts(back, GstGateSet::single_qubit_set(), 8).features(), direct.features());
}

TEST(Gst, CoverageAndSchemaErrors) {
    const SimulatorExecutor exec;
    auto doc = collect_counts(exec, GstGateSet::cz_only(), 2, 50, 1);
    auto missing = doc;
    missing.records.pop_back();
    EXPECT_THROW(outcome_from_counts(missing, GstGateSet::cz_only()), CoverageError);
    auto dup = doc;
    dup.records.push_back(dup.records.front());
    EXPECT_THROW(outcome_from_counts(dup, GstGateSet::cz_only()), CoverageError);
    auto short_shots = doc;
    short_shots.records.front().second.histogram.begin()->second += 1;
    EXPECT_THROW(outcome_from_counts(short_shots, GstGateSet::cz_only()), SchemaError);
    EXPECT_THROW(counts_import_from_json(nlohmann::json::parse(R"({"shots":10})")), SchemaError);
}

TEST(Gst, OutcomeJsonRoundTrip) {
    const SimulatorExecutor exec(NoiseModel::single({0.01, 0.02, 0.03, 0.04}));
    const auto o = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 123, 4, {2});
    const auto back = outcome_from_json(nlohmann::json::parse(to_json(o).dump()));
    EXPECT_EQ(back.features(), o.features());
    EXPECT_EQ(back.shots, o.shots);
    EXPECT_EQ(back.qubit_ids, o.qubit_ids);
    EXPECT_EQ(back.seed, o.seed);
}

TEST(Gst, ReplayExecutorReproducesCounts) {
    const SimulatorExecutor exec(NoiseModel::single({0.03, 0.01, 0.02, 0.01}));
    const auto doc = collect_counts(exec, GstGateSet::single_qubit_set(), 1, 400, 21, {3});
    ReplayExecutor replay;
    replay.add_document(to_json(doc));
    EXPECT_EQ(replay.shots_for({3}), 400);
    const auto a = estimate_gst(replay, GstGateSet::single_qubit_set(), 1, 400, 0, {3});
    const auto b = estimate_gst(exec, GstGateSet::single_qubit_set(), 1, 400, 21, {3});
    EXPECT_EQ(a.features(), b.features());
    EXPECT_THROW(estimate_gst(replay, GstGateSet::single_qubit_set(), 1, 400, 0, {5}), CoverageError);
}
