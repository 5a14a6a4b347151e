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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gthemu/channels.hpp"
#include "gthemu/datagen.hpp"
#include "gthemu/executor.hpp"
#include "gthemu/gst.hpp"
#include "gthemu/mlp.hpp"

// End-to-end construction of a GthNoiseModel from GST data:
//   1q dataset -> NN-1Q -> device GST on q_i, q_j -> lambda predictions
//   -> 2q dataset conditioned on them -> NN-2Q -> device GST on the pair -> zeta.
namespace gthemu::pipeline {

// Predictions above these are outside the training grids' reliable range.
inline constexpr double kLambdaExtrapolation = 0.09;
inline constexpr double kZetaExtrapolation = 0.198;

struct PipelineConfig {
    std::array<int, 2> qubits{0, 1};
    datagen::GridSpec grid_1q = datagen::GridSpec::paper_scale();
    datagen::GridSpec grid_2q = datagen::GridSpec::paper_scale();
    mlp::MlpConfig nn1q = mlp::MlpConfig::nn_1q();
    mlp::MlpConfig nn2q = mlp::MlpConfig::nn_2q();
    std::int64_t hw_shots_1q = 10000;
    std::int64_t hw_shots_2q = 1000;
    std::uint64_t master_seed = 20240601;
    channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate;
    // Artifacts are written here when non-empty. With `resume`, existing
    // artifacts are loaded instead of recomputed.
    std::string work_dir;
    bool resume = false;

    static PipelineConfig paper_scale();
    static PipelineConfig desk_scale();

    void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
// Missing keys keep the values of `base`.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const PipelineConfig& base = PipelineConfig::paper_scale());

// Seed of every stochastic stage, all derived from the master seed.
struct SeedTree {
    std::uint64_t datagen_1q = 0;
    std::uint64_t train_1q = 0;
    std::uint64_t gst_qi = 0;
    std::uint64_t gst_qj = 0;
    std::uint64_t datagen_2q = 0;
    std::uint64_t train_2q = 0;
    std::uint64_t gst_pair = 0;

    static SeedTree derive(std::uint64_t master_seed);
};

struct NetworkSummary {
    std::string name;
    std::size_t examples = 0;
    int epochs = 0;
    double final_train_loss = 0.0;  // NaN when the model was loaded, not trained
    double final_val_loss = 0.0;
    std::vector<double> val_mse_per_output;
};

struct GstSummary {
    std::vector<int> qubits;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
};

struct PipelineReport {
    nlohmann::json config;
    std::string executor;
    SeedTree seeds;
    NetworkSummary nn1q;
    NetworkSummary nn2q;
    GstSummary gst_qi;
    GstSummary gst_qj;
    GstSummary gst_pair;
    channels::GthNoiseModel model;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> artifacts;
};

nlohmann::json to_json(const PipelineReport& report);

// Features of a 1-qubit fifteen-gate GST outcome -> lambda, each in (0, 0.1).
channels::LambdaParams predict_lambda(const mlp::MlpModel& nn1q, const gst::GstOutcome& outcome);
// Features of a 2-qubit CZ GST outcome -> zeta in (0, 0.2).
channels::ZetaParams predict_zeta(const mlp::MlpModel& nn2q, const gst::GstOutcome& outcome);

// Validation-split summary for a trained network, recomputing the split from
// the training seed.
NetworkSummary summarize(const mlp::MlpModel& model, const datagen::Dataset& dataset,
                         std::uint64_t train_seed, const mlp::TrainResult* trained);

// Runs the whole recipe against `executor`. A supplied `nn1q` skips the 1q
// dataset and training stages (the network does not depend on the device).
PipelineReport run_gth_pipeline(const Executor& executor, const PipelineConfig& config,
                                const std::optional<mlp::MlpModel>& nn1q = std::nullopt);

// Trains NN-1Q from scratch on the configured grid (dataset and training only).
mlp::MlpModel train_nn1q(const PipelineConfig& config, NetworkSummary* summary = nullptr);

}  // namespace gthemu::pipeline
