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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gthemu/datagen.hpp"

// Feed-forward regressor: standard scaler -> [dense -> ReLU] x hidden_layers
// -> dense -> U * sigmoid(alpha * x). Trained with Adam on MSE + L2.
namespace gthemu::mlp {

using Matrix = Eigen::MatrixXd;  // rows are examples
using Vector = Eigen::VectorXd;

struct MlpConfig {
    std::string name = "custom";
    int input_dim = 1;
    int hidden_layers = 2;
    int hidden_width = 128;
    int output_dim = 1;
    double alpha = 8.0;    // output sigmoid steepness
    double ceiling = 0.1;  // output sigmoid ceiling U
    double learning_rate = 1e-4;
    double l2 = 0.0;
    double dropout = 0.0;
    int batch_size = 64;
    double validation_split = 0.2;
    int epochs = 100;

    static MlpConfig nn_1q(int input_dim = datagen::kFeatureDim1q);
    static MlpConfig nn_2q(int input_dim = datagen::kFeatureDim2q);

    void validate() const;
    bool operator==(const MlpConfig&) const = default;
};

struct ScalerStats {
    Vector mean;
    Vector std;  // 1.0 wherever the raw deviation is below 1e-12

    static ScalerStats fit(const Matrix& x);
    static ScalerStats identity(int dim);
    Matrix transform(const Matrix& x) const;
};

struct DenseLayer {
    Matrix w;  // out x in
    Vector b;
};

struct MlpModel {
    MlpConfig config;
    ScalerStats scaler;
    std::vector<DenseLayer> layers;
};

double custom_sigmoid(double x, double alpha, double ceiling);

// Glorot-uniform weights, zero biases, identity scaler.
MlpModel init_model(const MlpConfig& config, std::uint64_t seed);

std::vector<double> forward(const MlpModel& model, const std::vector<double>& features);
Matrix predict(const MlpModel& model, const Matrix& x);

// Loss (MSE + l2 * sum w^2) and its gradient, dropout disabled. Used by the
// trainer and by the finite-difference check.
struct Gradients {
    std::vector<Matrix> dw;
    std::vector<Vector> db;
};
double loss_and_gradient(const MlpModel& model, const Matrix& x_scaled, const Matrix& y,
                         Gradients* grad);

struct TrainResult {
    MlpModel model;
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> val_indices;
};

// Seeded split of [0, n) into sorted (train, validation) index lists; the
// validation part holds round(fraction * n) rows, at most n - 1.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                          double fraction,
                                                                          std::uint64_t seed);

// Seeded validation split (once, before training), scaler fitted on the
// training part, then mini-batch Adam for config.epochs epochs.
TrainResult train(const MlpConfig& config, const Matrix& x, const Matrix& y, std::uint64_t seed);
TrainResult train(const MlpConfig& config, const datagen::Dataset& dataset, std::uint64_t seed);

struct Evaluation {
    std::vector<double> mse_per_output;
    Matrix predicted;
    Matrix truth;
};

Evaluation evaluate(const MlpModel& model, const Matrix& x, const Matrix& y);
Evaluation evaluate(const MlpModel& model, const datagen::Dataset& dataset);

// Columns: row, then true_k, predicted_k for each output k.
void write_pairs_csv(const Evaluation& eval, const std::vector<std::string>& output_names,
                     const std::string& path);

void to_matrices(const datagen::Dataset& dataset, Matrix& x, Matrix& y);

nlohmann::json to_json(const MlpConfig& config);
MlpConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MlpModel& model);
MlpModel model_from_json(const nlohmann::json& j);

void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);
// Additionally requires the stored shapes and output range to match `expected`.
MlpModel load_model(const std::string& path, const MlpConfig& expected);

}  // namespace gthemu::mlp
