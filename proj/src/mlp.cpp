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

#include "gthemu/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <numeric>
#include <random>
#include <tuple>

#include "gthemu/error.hpp"
#include "gthemu/seeds.hpp"

namespace gthemu::mlp {

namespace {

constexpr const char* kSchema = "gthemu-mlp/1";
constexpr double kMinStd = 1e-12;

struct ForwardCache {
    std::vector<Matrix> activations;  // a_0 = input, ..., a_L = output
    std::vector<Matrix> pre;          // z_1 .. z_L
    std::vector<Matrix> masks;        // dropout masks for hidden layers (empty when off)
};

Matrix affine(const Matrix& a, const DenseLayer& layer) {
    Matrix z = a * layer.w.transpose();
    z.rowwise() += layer.b.transpose();
    return z;
}

Matrix output_activation(const Matrix& z, double alpha, double ceiling) {
    return z.unaryExpr([&](double v) { return custom_sigmoid(v, alpha, ceiling); });
}

void run_forward(const MlpModel& model, const Matrix& x_scaled, ForwardCache& cache,
                 std::mt19937_64* dropout_rng) {
    const auto& cfg = model.config;
    const std::size_t n_layers = model.layers.size();
    cache.activations.assign(1, x_scaled);
    cache.pre.clear();
    cache.masks.clear();
    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix z = affine(cache.activations.back(), model.layers[l]);
        const bool is_output = l + 1 == n_layers;
        Matrix a = is_output ? output_activation(z, cfg.alpha, cfg.ceiling) : Matrix(z.cwiseMax(0.0));
        if (!is_output && dropout_rng != nullptr && cfg.dropout > 0.0) {
            std::bernoulli_distribution keep(1.0 - cfg.dropout);
            Matrix mask(a.rows(), a.cols());
            const double scale = 1.0 / (1.0 - cfg.dropout);
            for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(*dropout_rng) ? scale : 0.0;
            a = a.cwiseProduct(mask);
            cache.masks.push_back(std::move(mask));
        }
        cache.pre.push_back(std::move(z));
        cache.activations.push_back(std::move(a));
    }
}

double l2_penalty(const MlpModel& model) {
    double s = 0.0;
    for (const auto& layer : model.layers) s += layer.w.squaredNorm();
    return model.config.l2 * s;
}

double backward(const MlpModel& model, const ForwardCache& cache, const Matrix& y, Gradients* grad) {
    const auto& cfg = model.config;
    const Matrix& out = cache.activations.back();
    const Matrix diff = out - y;
    const double denom = static_cast<double>(diff.size());
    const double loss = diff.squaredNorm() / denom + l2_penalty(model);
    if (grad == nullptr) return loss;

    const std::size_t n_layers = model.layers.size();
    grad->dw.resize(n_layers);
    grad->db.resize(n_layers);
    // d/dz [U sigma(alpha z)] = alpha * y * (1 - y / U)
    Matrix dz = (2.0 / denom) * diff.cwiseProduct(
                                    (cfg.alpha * out.array() * (1.0 - out.array() / cfg.ceiling)).matrix());
    const bool masked = !cache.masks.empty();
    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& a_prev = cache.activations[l];
        grad->dw[l] = dz.transpose() * a_prev + 2.0 * cfg.l2 * model.layers[l].w;
        grad->db[l] = dz.colwise().sum().transpose();
        if (l == 0) break;
        Matrix da = dz * model.layers[l].w;
        if (masked) da = da.cwiseProduct(cache.masks[l - 1]);
        const Matrix& z_prev = cache.pre[l - 1];
        dz = da.cwiseProduct(z_prev.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    }
    return loss;
}

struct AdamState {
    std::vector<Matrix> mw, vw;
    std::vector<Vector> mb, vb;
    long step = 0;

    explicit AdamState(const MlpModel& model) {
        for (const auto& layer : model.layers) {
            mw.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
            vw.push_back(Matrix::Zero(layer.w.rows(), layer.w.cols()));
            mb.push_back(Vector::Zero(layer.b.size()));
            vb.push_back(Vector::Zero(layer.b.size()));
        }
    }

    void apply(MlpModel& model, const Gradients& g, double lr) {
        constexpr double kBeta1 = 0.9;
        constexpr double kBeta2 = 0.999;
        constexpr double kEps = 1e-8;
        ++step;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            mw[l] = kBeta1 * mw[l] + (1.0 - kBeta1) * g.dw[l];
            vw[l] = kBeta2 * vw[l] + (1.0 - kBeta2) * g.dw[l].cwiseAbs2();
            model.layers[l].w.array() -=
                lr * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + kEps);
            mb[l] = kBeta1 * mb[l] + (1.0 - kBeta1) * g.db[l];
            vb[l] = kBeta2 * vb[l] + (1.0 - kBeta2) * g.db[l].cwiseAbs2();
            model.layers[l].b.array() -=
                lr * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + kEps);
        }
    }
};

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& idx, std::size_t begin,
                 std::size_t end) {
    Matrix out(static_cast<Eigen::Index>(end - begin), m.cols());
    for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = m.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

nlohmann::json vector_json(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

MlpConfig MlpConfig::nn_1q(int input_dim) {
    MlpConfig c;
    c.name = "NN-1Q";
    c.input_dim = input_dim;
    c.hidden_width = 128;
    c.output_dim = 4;
    c.ceiling = 0.1;
    c.l2 = 5e-5;
    c.dropout = 5e-5;
    c.batch_size = 64;
    c.epochs = 100;
    return c;
}

MlpConfig MlpConfig::nn_2q(int input_dim) {
    MlpConfig c;
    c.name = "NN-2Q";
    c.input_dim = input_dim;
    c.hidden_width = 64;
    c.output_dim = 1;
    c.ceiling = 0.2;
    c.l2 = 5e-6;
    c.dropout = 5e-6;
    c.batch_size = 32;
    c.epochs = 1000;
    return c;
}

void MlpConfig::validate() const {
    if (input_dim < 1 || hidden_layers < 1 || hidden_width < 1 || output_dim < 1) {
        throw InputError("MLP dimensions must be positive");
    }
    if (!(alpha > 0.0) || !(ceiling > 0.0) || !(learning_rate > 0.0)) {
        throw InputError("alpha, ceiling and learning rate must be positive");
    }
    if (l2 < 0.0 || dropout < 0.0 || dropout >= 1.0) throw InputError("invalid l2/dropout");
    if (batch_size < 1 || epochs < 0) throw InputError("invalid batch size or epoch count");
    if (!(validation_split > 0.0 && validation_split < 1.0)) {
        throw InputError("validation_split must lie in (0, 1)");
    }
}

ScalerStats ScalerStats::fit(const Matrix& x) {
    if (x.rows() == 0) throw InputError("cannot fit a scaler on zero rows");
    ScalerStats s;
    s.mean = x.colwise().mean().transpose();
    s.std.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double var = (x.col(c).array() - s.mean(c)).square().mean();
        const double sd = std::sqrt(var);
        s.std(c) = sd < kMinStd ? 1.0 : sd;
    }
    return s;
}

ScalerStats ScalerStats::identity(int dim) {
    return ScalerStats{Vector::Zero(dim), Vector::Ones(dim)};
}

Matrix ScalerStats::transform(const Matrix& x) const {
    if (x.cols() != mean.size()) throw DimensionError("scaler dimension mismatch");
    return (x.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

double custom_sigmoid(double x, double alpha, double ceiling) {
    const double t = alpha * x;
    // Split on sign so exp never overflows.
    double s;
    if (t >= 0.0) {
        s = ceiling / (1.0 + std::exp(-t));
    } else {
        const double e = std::exp(t);
        s = ceiling * e / (1.0 + e);
    }
    // Saturated tails round onto 0 or U; keep the range open.
    return std::clamp(s, std::numeric_limits<double>::min(), std::nextafter(ceiling, 0.0));
}

MlpModel init_model(const MlpConfig& config, std::uint64_t seed) {
    config.validate();
    MlpModel m;
    m.config = config;
    m.scaler = ScalerStats::identity(config.input_dim);
    std::mt19937_64 rng(seed);
    int fan_in = config.input_dim;
    for (int l = 0; l <= config.hidden_layers; ++l) {
        const int fan_out = l == config.hidden_layers ? config.output_dim : config.hidden_width;
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        DenseLayer layer;
        layer.w.resize(fan_out, fan_in);
        for (Eigen::Index i = 0; i < layer.w.size(); ++i) layer.w.data()[i] = u(rng);
        layer.b = Vector::Zero(fan_out);
        m.layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return m;
}

Matrix predict(const MlpModel& model, const Matrix& x) {
    if (x.cols() != model.config.input_dim) {
        throw DimensionError("expected " + std::to_string(model.config.input_dim) +
                             " features, got " + std::to_string(x.cols()));
    }
    // Row by row, so a prediction does not depend on which batch it sits in.
    const Matrix scaled = model.scaler.transform(x);
    Matrix out(x.rows(), model.config.output_dim);
    ForwardCache cache;
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        run_forward(model, scaled.row(i), cache, nullptr);
        out.row(i) = cache.activations.back();
    }
    return out;
}

std::vector<double> forward(const MlpModel& model, const std::vector<double>& features) {
    const Matrix x = Eigen::Map<const Eigen::Matrix<double, 1, Eigen::Dynamic>>(
        features.data(), static_cast<Eigen::Index>(features.size()));
    const Matrix y = predict(model, x);
    return std::vector<double>(y.data(), y.data() + y.size());
}

double loss_and_gradient(const MlpModel& model, const Matrix& x_scaled, const Matrix& y,
                         Gradients* grad) {
    ForwardCache cache;
    run_forward(model, x_scaled, cache, nullptr);
    return backward(model, cache, y, grad);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                          double fraction,
                                                                          std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_val = n > 1 ? static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))) : 0;
    n_val = std::min(n_val, n > 0 ? n - 1 : 0);
    std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> tr(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val.begin(), val.end());
    std::sort(tr.begin(), tr.end());
    return {tr, val};
}

TrainResult train(const MlpConfig& config, const Matrix& x, const Matrix& y, std::uint64_t seed) {
    config.validate();
    if (x.rows() == 0) throw InputError("cannot train on an empty dataset");
    if (x.rows() != y.rows()) throw DimensionError("feature and label row counts differ");
    if (x.cols() != config.input_dim || y.cols() != config.output_dim) {
        throw DimensionError("dataset shape does not match the network configuration");
    }
    if (y.minCoeff() < 0.0 || y.maxCoeff() >= config.ceiling) {
        throw InputError("labels must lie in [0, ceiling)");
    }

    TrainResult result;
    result.model = init_model(config, derive_seed(seed, "init"));
    MlpModel& model = result.model;

    std::tie(result.train_indices, result.val_indices) =
        split_indices(static_cast<std::size_t>(x.rows()), config.validation_split, derive_seed(seed, "split"));
    const std::size_t n_val = result.val_indices.size();

    const Matrix x_train = take_rows(x, result.train_indices, 0, result.train_indices.size());
    const Matrix y_train = take_rows(y, result.train_indices, 0, result.train_indices.size());
    model.scaler = ScalerStats::fit(x_train);
    const Matrix xs_train = model.scaler.transform(x_train);
    Matrix xs_val, y_val;
    if (n_val > 0) {
        xs_val = model.scaler.transform(take_rows(x, result.val_indices, 0, n_val));
        y_val = take_rows(y, result.val_indices, 0, n_val);
    }

    AdamState adam(model);
    std::mt19937_64 rng(derive_seed(seed, "batches"));
    std::vector<std::size_t> batch_order(result.train_indices.size());
    std::iota(batch_order.begin(), batch_order.end(), 0);
    const auto batch = static_cast<std::size_t>(config.batch_size);
    ForwardCache cache;
    Gradients grad;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(batch_order.begin(), batch_order.end(), rng);
        double weighted = 0.0;
        for (std::size_t start = 0; start < batch_order.size(); start += batch) {
            const std::size_t end = std::min(start + batch, batch_order.size());
            const Matrix xb = take_rows(xs_train, batch_order, start, end);
            const Matrix yb = take_rows(y_train, batch_order, start, end);
            run_forward(model, xb, cache, &rng);
            const double loss = backward(model, cache, yb, &grad);
            if (!std::isfinite(loss)) throw TrainingError("non-finite training loss", epoch);
            weighted += loss * static_cast<double>(end - start);
            adam.apply(model, grad, config.learning_rate);
        }
        result.train_loss.push_back(weighted / static_cast<double>(batch_order.size()));
        if (n_val > 0) {
            const double v = loss_and_gradient(model, xs_val, y_val, nullptr);
            if (!std::isfinite(v)) throw TrainingError("non-finite validation loss", epoch);
            result.val_loss.push_back(v);
        }
    }
    return result;
}

void to_matrices(const datagen::Dataset& dataset, Matrix& x, Matrix& y) {
    if (dataset.examples.empty()) throw InputError("dataset is empty");
    const auto n = static_cast<Eigen::Index>(dataset.examples.size());
    const auto f = static_cast<Eigen::Index>(dataset.examples.front().features.size());
    const auto k = static_cast<Eigen::Index>(dataset.examples.front().label.size());
    x.resize(n, f);
    y.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& ex = dataset.examples[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(ex.features.size()) != f || static_cast<Eigen::Index>(ex.label.size()) != k) {
            throw DimensionError("ragged dataset");
        }
        for (Eigen::Index c = 0; c < f; ++c) x(i, c) = ex.features[static_cast<std::size_t>(c)];
        for (Eigen::Index c = 0; c < k; ++c) y(i, c) = ex.label[static_cast<std::size_t>(c)];
    }
}

TrainResult train(const MlpConfig& config, const datagen::Dataset& dataset, std::uint64_t seed) {
    Matrix x, y;
    to_matrices(dataset, x, y);
    return train(config, x, y, seed);
}

Evaluation evaluate(const MlpModel& model, const Matrix& x, const Matrix& y) {
    if (x.rows() == 0) throw InputError("cannot evaluate on an empty dataset");
    if (y.cols() != model.config.output_dim || y.rows() != x.rows()) {
        throw DimensionError("label shape does not match the model");
    }
    Evaluation e;
    e.predicted = predict(model, x);
    e.truth = y;
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
        e.mse_per_output.push_back((e.predicted.col(k) - y.col(k)).squaredNorm() /
                                   static_cast<double>(y.rows()));
    }
    return e;
}

Evaluation evaluate(const MlpModel& model, const datagen::Dataset& dataset) {
    Matrix x, y;
    to_matrices(dataset, x, y);
    return evaluate(model, x, y);
}

void write_pairs_csv(const Evaluation& eval, const std::vector<std::string>& output_names,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "row";
    for (Eigen::Index k = 0; k < eval.truth.cols(); ++k) {
        const std::string name = static_cast<std::size_t>(k) < output_names.size()
                                     ? output_names[static_cast<std::size_t>(k)]
                                     : "y" + std::to_string(k);
        out << ",true_" << name << ",predicted_" << name;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < eval.truth.rows(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < eval.truth.cols(); ++k) {
            out << ',' << nlohmann::json(eval.truth(i, k)).dump() << ','
                << nlohmann::json(eval.predicted(i, k)).dump();
        }
        out << '\n';
    }
}

// Persistence

nlohmann::json to_json(const MlpConfig& c) {
    return {{"name", c.name},           {"input_dim", c.input_dim},
            {"hidden_layers", c.hidden_layers}, {"hidden_width", c.hidden_width},
            {"output_dim", c.output_dim}, {"alpha", c.alpha},
            {"ceiling", c.ceiling},     {"learning_rate", c.learning_rate},
            {"l2", c.l2},               {"dropout", c.dropout},
            {"batch_size", c.batch_size}, {"validation_split", c.validation_split},
            {"epochs", c.epochs}};
}

MlpConfig config_from_json(const nlohmann::json& j) {
    MlpConfig c;
    c.name = j.value("name", c.name);
    c.input_dim = j.at("input_dim").get<int>();
    c.hidden_layers = j.at("hidden_layers").get<int>();
    c.hidden_width = j.at("hidden_width").get<int>();
    c.output_dim = j.at("output_dim").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.ceiling = j.at("ceiling").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.l2 = j.at("l2").get<double>();
    c.dropout = j.at("dropout").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.validation_split = j.at("validation_split").get<double>();
    c.epochs = j.at("epochs").get<int>();
    return c;
}

nlohmann::json to_json(const MlpModel& model) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            w.push_back(vector_json(layer.w.row(r).transpose()));
        }
        layers.push_back({{"w", w}, {"b", vector_json(layer.b)}});
    }
    return {{"schema", kSchema},
            {"config", to_json(model.config)},
            {"scaler", {{"mean", vector_json(model.scaler.mean)}, {"std", vector_json(model.scaler.std)}}},
            {"layers", layers}};
}

MlpModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kSchema) {
            throw SchemaError("unsupported model schema '" + j.at("schema").get<std::string>() + "'");
        }
        MlpModel m;
        m.config = config_from_json(j.at("config"));
        m.config.validate();
        m.scaler.mean = vector_from(j.at("scaler").at("mean"));
        m.scaler.std = vector_from(j.at("scaler").at("std"));
        if (m.scaler.mean.size() != m.config.input_dim || m.scaler.std.size() != m.config.input_dim) {
            throw SchemaError("scaler length does not match input_dim");
        }
        const auto& layers = j.at("layers");
        if (static_cast<int>(layers.size()) != m.config.hidden_layers + 1) {
            throw SchemaError("layer count does not match config");
        }
        int fan_in = m.config.input_dim;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const int fan_out = static_cast<int>(l) == m.config.hidden_layers ? m.config.output_dim
                                                                              : m.config.hidden_width;
            DenseLayer layer;
            const auto& w = layers[l].at("w");
            if (static_cast<int>(w.size()) != fan_out) throw SchemaError("layer weight rows mismatch");
            layer.w.resize(fan_out, fan_in);
            for (int r = 0; r < fan_out; ++r) {
                const auto row = w[static_cast<std::size_t>(r)].get<std::vector<double>>();
                if (static_cast<int>(row.size()) != fan_in) throw SchemaError("layer weight columns mismatch");
                for (int c = 0; c < fan_in; ++c) layer.w(r, c) = row[static_cast<std::size_t>(c)];
            }
            layer.b = vector_from(layers[l].at("b"));
            if (layer.b.size() != fan_out) throw SchemaError("layer bias length mismatch");
            m.layers.push_back(std::move(layer));
            fan_in = fan_out;
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed model: ") + e.what());
    } catch (const InputError& e) {
        throw SchemaError(std::string("malformed model config: ") + e.what());
    }
}

void save_model(const MlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json(model).dump() << '\n';
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return model_from_json(j);
}

MlpModel load_model(const std::string& path, const MlpConfig& expected) {
    MlpModel m = load_model(path);
    const MlpConfig& c = m.config;
    if (c.input_dim != expected.input_dim || c.output_dim != expected.output_dim ||
        c.hidden_layers != expected.hidden_layers || c.hidden_width != expected.hidden_width ||
        c.ceiling != expected.ceiling || c.alpha != expected.alpha) {
        throw SchemaError(path + " holds a " + c.name + " network (" + std::to_string(c.input_dim) +
                          "->" + std::to_string(c.output_dim) + "), expected " + expected.name +
                          " (" + std::to_string(expected.input_dim) + "->" +
                          std::to_string(expected.output_dim) + ")");
    }
    return m;
}

}  // namespace gthemu::mlp
