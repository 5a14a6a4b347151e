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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gthemu/channels.hpp"
#include "gthemu/gst.hpp"

// Labelled GST training data from sweeping noise parameters through the
// simulator.
namespace gthemu::datagen {

struct Range {
    double start = 0.0;
    double stop = 0.1;  // exclusive
    double step = 0.01;

    void validate() const;
    std::vector<double> values() const;

    bool operator==(const Range&) const = default;
};

struct GridSpec {
    Range lambda{0.0, 0.1, 0.01};
    Range zeta{0.0, 0.2, 0.002};
    int repeats_per_point = 5;
    std::int64_t shots = 10000;

    static GridSpec paper_scale();
    // lambda step 0.03 (4^4 points), 2,000 shots, 3 repeats.
    static GridSpec desk_scale();

    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

struct TrainingExample {
    std::vector<double> features;
    std::vector<double> label;

    bool operator==(const TrainingExample&) const = default;
};

inline constexpr int kFeatureDim1q = 256;
inline constexpr int kFeatureDim2q = 512;

struct DatasetHeader {
    std::string kind = "1q";  // "1q" or "2q"
    int feature_dim = kFeatureDim1q;
    int label_dim = 4;
    GridSpec grid;
    std::uint64_t seed = 0;
    channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate;
    // Conditioning noise for 2q datasets.
    std::optional<channels::LambdaParams> lambda_i;
    std::optional<channels::LambdaParams> lambda_j;

    bool operator==(const DatasetHeader&) const = default;
};

struct Dataset {
    DatasetHeader header;
    std::vector<TrainingExample> examples;

    std::size_t size() const { return examples.size(); }
};

// Every lambda in grid.lambda.values()^4, d slowest, r fastest.
std::vector<channels::LambdaParams> lambda_grid(const GridSpec& grid);

// One example per (point, repeat), ordered by point then repeat. The seed of
// each example derives from (seed, point index, repeat index).
Dataset generate_1q_points(const std::vector<channels::LambdaParams>& points, int repeats,
                           std::int64_t shots, std::uint64_t seed,
                           channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate,
                           const gst::GstGateSet& gate_set = gst::GstGateSet::single_qubit_set());

Dataset generate_1q_dataset(const GridSpec& grid, const gst::GstGateSet& gate_set,
                            std::uint64_t seed,
                            channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate);

Dataset generate_2q_points(const std::vector<double>& zetas, int repeats, std::int64_t shots,
                           const channels::LambdaParams& lambda_i,
                           const channels::LambdaParams& lambda_j, std::uint64_t seed,
                           channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate);

Dataset generate_2q_dataset(const GridSpec& grid, const channels::LambdaParams& lambda_i,
                            const channels::LambdaParams& lambda_j, std::uint64_t seed,
                            channels::ReadoutPlacement readout = channels::ReadoutPlacement::kPerGate);

nlohmann::json to_json(const DatasetHeader& header);
DatasetHeader header_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);

// JSON-lines: one header line, then {"label":[...],"features":[...]} per line.
void write_dataset(const Dataset& dataset, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace gthemu::datagen
