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
#include <filesystem>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gthemu/error.hpp"
#include "gthemu/mlp.hpp"

using namespace gthemu;
using namespace gthemu::mlp;

namespace {

struct Problem {
    Matrix x;
    Matrix y;
};

Problem random_problem(int n, int in, int out, double ceiling, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1), l(0.1 * ceiling, 0.9 * ceiling);
    Problem p{Matrix(n, in), Matrix(n, out)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < in; ++j) p.x(i, j) = u(rng);
        for (int j = 0; j < out; ++j) p.y(i, j) = l(rng);
    }
    return p;
}

MlpConfig small_config() {
    MlpConfig c;
    c.input_dim = 6;
    c.output_dim = 3;
    c.hidden_width = 9;
    c.hidden_layers = 2;
    c.l2 = 1e-3;
    return c;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gthemu_test_" + name)).string();
}

}  // namespace

TEST(Mlp, NetworkFactories) {
    const auto a = MlpConfig::nn_1q();
    EXPECT_EQ(a.input_dim, 256);
    EXPECT_EQ(a.output_dim, 4);
    EXPECT_EQ(a.hidden_layers, 2);
    EXPECT_EQ(a.hidden_width, 128);
    EXPECT_DOUBLE_EQ(a.ceiling, 0.1);
    EXPECT_DOUBLE_EQ(a.alpha, 8.0);
    EXPECT_EQ(a.epochs, 100);
    const auto b = MlpConfig::nn_2q();
    EXPECT_EQ(b.input_dim, 512);
    EXPECT_EQ(b.output_dim, 1);
    EXPECT_DOUBLE_EQ(b.ceiling, 0.2);
    EXPECT_EQ(b.epochs, 1000);
}

TEST(Mlp, CustomSigmoid) {
    EXPECT_DOUBLE_EQ(custom_sigmoid(0.0, 8.0, 0.1), 0.05);
    const double x = 0.3;
    EXPECT_NEAR(custom_sigmoid(x, 8.0, 0.2), 0.2 / (1 + std::exp(-8.0 * x)), 1e-15);
    for (double v = -5; v <= 5; v += 0.01) {
        const double s = custom_sigmoid(v, 8.0, 0.1);
        EXPECT_GT(s, 0.0);
        EXPECT_LT(s, 0.1);
    }
}

TEST(Mlp, OutputsInsideCeiling) {
    for (auto c : {MlpConfig::nn_1q(), MlpConfig::nn_2q()}) {
        const auto model = init_model(c, 3);
        const auto p = random_problem(40, c.input_dim, c.output_dim, c.ceiling, 4);
        const Matrix out = predict(model, p.x);
        EXPECT_GT(out.minCoeff(), 0.0);
        EXPECT_LT(out.maxCoeff(), c.ceiling);
    }
}

TEST(Mlp, GradientsMatchFiniteDifferences) {
    const auto cfg = small_config();
    auto model = init_model(cfg, 17);
    const auto p = random_problem(12, cfg.input_dim, cfg.output_dim, cfg.ceiling, 18);
    Gradients g;
    loss_and_gradient(model, p.x, p.y, &g);
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto check = [&](double& param, double analytic) {
            const double keep = param;
            param = keep + h;
            const double up = loss_and_gradient(model, p.x, p.y, nullptr);
            param = keep - h;
            const double down = loss_and_gradient(model, p.x, p.y, nullptr);
            param = keep;
            const double numeric = (up - down) / (2 * h);
            const double rel = std::abs(numeric - analytic) / std::max(std::abs(numeric) + std::abs(analytic), 1e-7);
            worst = std::max(worst, rel);
        };
        auto& layer = model.layers[l];
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) check(layer.w(r, c), g.dw[l](r, c));
        }
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) check(layer.b(r), g.db[l](r));
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Mlp, MemorisesFiftyExamples) {
    const auto p = random_problem(51, 8, 2, 0.1, 5);
    MlpConfig c;
    c.input_dim = 8;
    c.output_dim = 2;
    c.hidden_width = 64;
    c.learning_rate = 1e-3;
    c.batch_size = 64;
    c.epochs = 2000;
    c.validation_split = 0.02;  // one held-out row, fifty to memorise
    const auto r = train(c, p.x, p.y, 1);
    ASSERT_EQ(r.train_indices.size(), 50u);
    Matrix xt(50, 8), yt(50, 2);
    for (int k = 0; k < 50; ++k) {
        xt.row(k) = p.x.row(static_cast<Eigen::Index>(r.train_indices[k]));
        yt.row(k) = p.y.row(static_cast<Eigen::Index>(r.train_indices[k]));
    }
    for (double m : evaluate(r.model, xt, yt).mse_per_output) EXPECT_LT(m, 1e-6);
}

TEST(Mlp, ScalerRefitMakesPredictionsScaleInvariant) {
    auto cfg = small_config();
    cfg.epochs = 20;
    const auto p = random_problem(60, cfg.input_dim, cfg.output_dim, cfg.ceiling, 6);
    const Matrix shifted = (p.x.array() * 3.0 + 5.0).matrix();
    const auto a = train(cfg, p.x, p.y, 9);
    const auto b = train(cfg, shifted, p.y, 9);
    const Matrix pa = predict(a.model, p.x), pb = predict(b.model, shifted);
    EXPECT_LT((pa - pb).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Mlp, ScalerZeroVarianceFallback) {
    Matrix x(3, 2);
    x << 1, 2, 1, 4, 1, 6;
    const auto s = ScalerStats::fit(x);
    EXPECT_EQ(s.std(0), 1.0);
    EXPECT_EQ(s.transform(x)(1, 0), 0.0);
}

TEST(Mlp, SplitIsDisjointAndStable) {
    for (std::size_t n : {5u, 50u, 1001u}) {
        const auto [tr, va] = split_indices(n, 0.2, 77);
        EXPECT_EQ(tr.size() + va.size(), n);
        EXPECT_EQ(va.size(), static_cast<std::size_t>(std::lround(0.2 * n)));
        std::vector<int> seen(n, 0);
        for (auto i : tr) ++seen[i];
        for (auto i : va) ++seen[i];
        for (int s : seen) EXPECT_EQ(s, 1);
        EXPECT_EQ(split_indices(n, 0.2, 77), split_indices(n, 0.2, 77));
        if (n > 10) EXPECT_NE(split_indices(n, 0.2, 77).second, split_indices(n, 0.2, 78).second);
    }
}

TEST(Mlp, TrainingIsDeterministic) {
    auto cfg = small_config();
    cfg.epochs = 5;
    cfg.dropout = 0.1;
    const auto p = random_problem(40, cfg.input_dim, cfg.output_dim, cfg.ceiling, 7);
    const auto a = train(cfg, p.x, p.y, 3);
    const auto b = train(cfg, p.x, p.y, 3);
    EXPECT_EQ(to_json(a.model).dump(), to_json(b.model).dump());
    EXPECT_EQ(a.train_loss, b.train_loss);
    EXPECT_EQ(a.val_loss, b.val_loss);
}

TEST(Mlp, SaveLoadRoundTrip) {
    auto cfg = MlpConfig::nn_2q();
    cfg.epochs = 2;
    const auto p = random_problem(30, cfg.input_dim, 1, cfg.ceiling, 8);
    const auto r = train(cfg, p.x, p.y, 2);
    const auto path = temp_path("nn2q.json");
    save_model(r.model, path);
    const auto back = load_model(path, cfg);
    const auto q = random_problem(100, cfg.input_dim, 1, cfg.ceiling, 10);
    EXPECT_EQ(predict(back, q.x), predict(r.model, q.x));
    EXPECT_EQ(to_json(back).dump(), to_json(r.model).dump());
    EXPECT_THROW(load_model(path, MlpConfig::nn_1q()), SchemaError);
}

TEST(Mlp, RejectsBadInputs) {
    const auto cfg = small_config();
    auto p = random_problem(10, cfg.input_dim, cfg.output_dim, cfg.ceiling, 1);
    p.y(0, 0) = cfg.ceiling;  // labels live in [0, U)
    EXPECT_THROW(train(cfg, p.x, p.y, 1), InputError);
    auto q = random_problem(10, cfg.input_dim + 1, cfg.output_dim, cfg.ceiling, 1);
    EXPECT_THROW(train(cfg, q.x, q.y, 1), DimensionError);
}

TEST(Mlp, NonFiniteLossIsATrainingError) {
    auto cfg = small_config();
    cfg.epochs = 3;
    auto p = random_problem(20, cfg.input_dim, cfg.output_dim, cfg.ceiling, 1);
    p.x(3, 2) = std::numeric_limits<double>::infinity();
    try {
        train(cfg, p.x, p.y, 1);
        FAIL() << "expected a training error";
    } catch (const TrainingError& e) {
        EXPECT_EQ(e.epoch(), 0);
    }
}
