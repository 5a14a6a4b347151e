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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "gthemu/datagen.hpp"
#include "gthemu/error.hpp"

using namespace gthemu;
using namespace gthemu::datagen;
using channels::LambdaParams;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gthemu_test_" + name)).string();
}

GridSpec tiny_grid() {
    GridSpec g = GridSpec::desk_scale();
    g.lambda = {0.0, 0.1, 0.05};  // 2 values -> 16 points
    g.zeta = {0.0, 0.2, 0.05};    // 4 values
    g.repeats_per_point = 2;
    g.shots = 200;
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Datagen, PresetShapes) {
    const auto desk = GridSpec::desk_scale();
    EXPECT_EQ(desk.lambda.values().size(), 4u);
    EXPECT_EQ(lambda_grid(desk).size(), 256u);
    EXPECT_EQ(desk.shots, 2000);
    EXPECT_EQ(desk.repeats_per_point, 3);
    const auto full = GridSpec::paper_scale();
    EXPECT_EQ(full.lambda.values().size(), 10u);
    EXPECT_EQ(full.zeta.values().size(), 100u);
    EXPECT_EQ(full.shots, 10000);
    EXPECT_EQ(full.repeats_per_point, 5);
}

TEST(Datagen, GridOrderDSlowestRFastest) {
    const auto pts = lambda_grid(tiny_grid());
    EXPECT_EQ(pts[0], (LambdaParams{0, 0, 0, 0}));
    EXPECT_EQ(pts[1], (LambdaParams{0, 0, 0, 0.05}));
    EXPECT_EQ(pts[8], (LambdaParams{0.05, 0, 0, 0}));
}

TEST(Datagen, OneQubitCardinalityLayoutAndRanges) {
    const auto g = tiny_grid();
    const auto ds = generate_1q_dataset(g, gst::GstGateSet::single_qubit_set(), 42);
    ASSERT_EQ(ds.size(), 16u * 2u);
    for (const auto& ex : ds.examples) {
        ASSERT_EQ(ex.features.size(), 256u);
        ASSERT_EQ(ex.label.size(), 4u);
        for (int m = 0; m < 16; ++m) {
            for (int c = 0; c < 4; ++c) EXPECT_EQ(ex.features[m * 16 + c], 1.0);
        }
        for (double v : ex.features) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
        for (double l : ex.label) {
            EXPECT_GE(l, g.lambda.start);
            EXPECT_LT(l, g.lambda.stop);
        }
    }
    // Repeats share the label and differ in the shot noise.
    EXPECT_EQ(ds.examples[0].label, ds.examples[1].label);
    EXPECT_NE(ds.examples[0].features, ds.examples[1].features);
}

TEST(Datagen, TwoQubitCardinalityAndLayout) {
    const auto g = tiny_grid();
    const LambdaParams li{0.01, 0.02, 0.0, 0.01}, lj{0.0, 0.03, 0.01, 0.0};
    const auto ds = generate_2q_dataset(g, li, lj, 7);
    ASSERT_EQ(ds.size(), 4u * 2u);
    EXPECT_EQ(ds.header.kind, "2q");
    EXPECT_EQ(ds.header.lambda_i, li);
    for (const auto& ex : ds.examples) {
        ASSERT_EQ(ex.features.size(), 512u);
        ASSERT_EQ(ex.label.size(), 1u);
        for (int m = 0; m < 2; ++m) {
            for (int c = 0; c < 16; ++c) EXPECT_EQ(ex.features[m * 256 + c], 1.0);
        }
    }
}

TEST(Datagen, SeedDeterminism) {
    const auto g = tiny_grid();
    const auto a = generate_1q_dataset(g, gst::GstGateSet::single_qubit_set(), 42);
    const auto b = generate_1q_dataset(g, gst::GstGateSet::single_qubit_set(), 42);
    const auto c = generate_1q_dataset(g, gst::GstGateSet::single_qubit_set(), 43);
    ASSERT_EQ(a.size(), c.size());
    EXPECT_EQ(a.examples, b.examples);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.examples[i].label, c.examples[i].label);
        EXPECT_NE(a.examples[i].features, c.examples[i].features);
    }
}

TEST(Datagen, FileRoundTripIsLossless) {
    const auto g = tiny_grid();
    const auto ds = generate_2q_dataset(g, {0.01, 0.02, 0.0, 0.01}, {0.0, 0.03, 0.01, 0.0}, 3);
    const auto path = temp_path("ds2.jsonl");
    write_dataset(ds, path);
    const auto back = read_dataset(path);
    EXPECT_EQ(back.header, ds.header);
    EXPECT_EQ(back.examples, ds.examples);
    const auto path2 = temp_path("ds2b.jsonl");
    write_dataset(back, path2);
    EXPECT_EQ(slurp(path), slurp(path2));
}

TEST(Datagen, ReadRejectsBadFiles) {
    EXPECT_THROW(read_dataset(temp_path("does_not_exist.jsonl")), IoError);
    const auto g = tiny_grid();
    auto ds = generate_1q_points({LambdaParams{}}, 1, 100, 1);
    ds.examples[0].features.pop_back();
    const auto path = temp_path("bad.jsonl");
    write_dataset(ds, path);
    EXPECT_THROW(read_dataset(path), SchemaError);
}

TEST(Datagen, GridValidation) {
    GridSpec g = tiny_grid();
    g.lambda.step = 0.0;
    EXPECT_THROW(g.validate(), InputError);
    g = tiny_grid();
    g.lambda.stop = 1.5;
    EXPECT_THROW(g.validate(), InputError);
    g = tiny_grid();
    g.repeats_per_point = 0;
    EXPECT_THROW(g.validate(), InputError);
}
