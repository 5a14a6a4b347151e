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

#include "gthemu/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "gthemu/error.hpp"
#include "gthemu/seeds.hpp"

namespace gthemu::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json range_json(const datagen::Range& r) {
    return {{"start", r.start}, {"stop", r.stop}, {"step", r.step}};
}

datagen::Range range_from(const nlohmann::json& j, const datagen::Range& base) {
    datagen::Range r = base;
    r.start = j.value("start", r.start);
    r.stop = j.value("stop", r.stop);
    r.step = j.value("step", r.step);
    return r;
}

datagen::GridSpec grid_from(const nlohmann::json& j, const datagen::GridSpec& base) {
    datagen::GridSpec g = base;
    if (j.contains("lambda")) g.lambda = range_from(j["lambda"], g.lambda);
    if (j.contains("zeta")) g.zeta = range_from(j["zeta"], g.zeta);
    g.repeats_per_point = j.value("repeats", g.repeats_per_point);
    g.shots = j.value("shots", g.shots);
    return g;
}

mlp::MlpConfig nn_from(const nlohmann::json& j, const mlp::MlpConfig& base) {
    nlohmann::json merged = mlp::to_json(base);
    merged.update(j);
    return mlp::config_from_json(merged);
}

nlohmann::json summary_json(const NetworkSummary& s) {
    return {{"name", s.name},
            {"examples", s.examples},
            {"epochs", s.epochs},
            {"final_train_loss", s.final_train_loss},
            {"final_val_loss", s.final_val_loss},
            {"val_mse_per_output", s.val_mse_per_output}};
}

nlohmann::json gst_summary_json(const GstSummary& s) {
    return {{"qubits", s.qubits}, {"shots", s.shots}, {"seed", s.seed}};
}

// Persists artifacts under work_dir and, when resuming, finds earlier ones.
class Store {
public:
    explicit Store(const PipelineConfig& config) : dir_(config.work_dir), resume_(config.resume) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }
    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
    bool reusable(const std::string& name) const { return enabled() && resume_ && fs::exists(path(name)); }

private:
    std::string dir_;
    bool resume_;
};

std::int64_t device_shots(const Executor& executor, const std::vector<int>& qubits,
                          std::int64_t configured) {
    if (const auto* replay = dynamic_cast<const ReplayExecutor*>(&executor)) {
        return replay->shots_for(qubits);
    }
    return configured;
}

gst::GstOutcome device_gst(const Executor& executor, const Store& store, const std::string& name,
                           const gst::GstGateSet& gate_set, int n_qubits, std::int64_t shots,
                           std::uint64_t seed, const std::vector<int>& qubits,
                           std::map<std::string, std::string>& artifacts) {
    gst::GstOutcome outcome;
    if (store.reusable(name)) {
        outcome = gst::load_outcome(store.path(name));
        if (outcome.n_qubits != n_qubits || outcome.qubit_ids != qubits) {
            throw SchemaError(store.path(name) + " does not hold GST for the requested qubits");
        }
    } else {
        outcome = gst::estimate_gst(executor, gate_set, n_qubits, device_shots(executor, qubits, shots),
                                    seed, qubits);
        if (store.enabled()) gst::save_outcome(outcome, store.path(name));
    }
    if (store.enabled()) artifacts[name] = store.path(name);
    return outcome;
}

struct TrainedNetwork {
    mlp::MlpModel model;
    NetworkSummary summary;
};

TrainedNetwork train_or_load(const Store& store, const std::string& name, const mlp::MlpConfig& config,
                             const datagen::Dataset& dataset, std::uint64_t seed,
                             std::map<std::string, std::string>& artifacts) {
    TrainedNetwork out;
    if (store.reusable(name)) {
        out.model = mlp::load_model(store.path(name), config);
        out.summary = summarize(out.model, dataset, seed, nullptr);
    } else {
        mlp::TrainResult result = mlp::train(config, dataset, seed);
        out.summary = summarize(result.model, dataset, seed, &result);
        out.model = std::move(result.model);
        if (store.enabled()) mlp::save_model(out.model, store.path(name));
    }
    if (store.enabled()) artifacts[name] = store.path(name);
    return out;
}

void flag_lambda(const std::string& who, const channels::LambdaParams& l, std::vector<std::string>& warnings) {
    const char* names[] = {"d", "a", "f", "r"};
    const auto v = l.as_array();
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] > kLambdaExtrapolation) {
            warnings.push_back(who + " lambda_" + names[k] + " = " + nlohmann::json(v[k]).dump() +
                               " exceeds " + nlohmann::json(kLambdaExtrapolation).dump() +
                               "; prediction is an extrapolation");
        }
    }
}

}  // namespace

// Config

PipelineConfig PipelineConfig::paper_scale() { return PipelineConfig{}; }

PipelineConfig PipelineConfig::desk_scale() {
    PipelineConfig c;
    c.grid_1q = datagen::GridSpec::desk_scale();
    c.grid_2q = datagen::GridSpec::desk_scale();
    // The desk grids give ~1% of the paper-scale optimiser steps per epoch.
    c.nn1q.learning_rate = 1e-3;
    c.nn1q.epochs = 500;
    c.nn2q.learning_rate = 1e-3;
    return c;
}

void PipelineConfig::validate() const {
    if (qubits[0] == qubits[1]) throw InputError("the qubit pair must name two distinct qubits");
    grid_1q.validate();
    grid_2q.validate();
    nn1q.validate();
    nn2q.validate();
    if (nn1q.input_dim != datagen::kFeatureDim1q || nn1q.output_dim != 4) {
        throw InputError("NN-1Q must map 256 features to 4 outputs");
    }
    if (nn2q.input_dim != datagen::kFeatureDim2q || nn2q.output_dim != 1) {
        throw InputError("NN-2Q must map 512 features to 1 output");
    }
    if (hw_shots_1q < 1 || hw_shots_2q < 1) throw InputError("hardware shot counts must be >= 1");
    if (resume && work_dir.empty()) throw InputError("resume requires a work directory");
}

nlohmann::json to_json(const PipelineConfig& c) {
    return {{"qubits", c.qubits},
            {"grid_1q", {{"lambda", range_json(c.grid_1q.lambda)},
                         {"zeta", range_json(c.grid_1q.zeta)},
                         {"repeats", c.grid_1q.repeats_per_point},
                         {"shots", c.grid_1q.shots}}},
            {"grid_2q", {{"lambda", range_json(c.grid_2q.lambda)},
                         {"zeta", range_json(c.grid_2q.zeta)},
                         {"repeats", c.grid_2q.repeats_per_point},
                         {"shots", c.grid_2q.shots}}},
            {"nn1q", mlp::to_json(c.nn1q)},
            {"nn2q", mlp::to_json(c.nn2q)},
            {"hw_shots_1q", c.hw_shots_1q},
            {"hw_shots_2q", c.hw_shots_2q},
            {"master_seed", c.master_seed},
            {"readout_placement", channels::to_string(c.readout)},
            {"work_dir", c.work_dir},
            {"resume", c.resume}};
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const PipelineConfig& base) {
    try {
        PipelineConfig c = base;
        if (j.contains("qubits")) c.qubits = j["qubits"].get<std::array<int, 2>>();
        if (j.contains("grid_1q")) c.grid_1q = grid_from(j["grid_1q"], c.grid_1q);
        if (j.contains("grid_2q")) c.grid_2q = grid_from(j["grid_2q"], c.grid_2q);
        if (j.contains("nn1q")) c.nn1q = nn_from(j["nn1q"], c.nn1q);
        if (j.contains("nn2q")) c.nn2q = nn_from(j["nn2q"], c.nn2q);
        c.hw_shots_1q = j.value("hw_shots_1q", c.hw_shots_1q);
        c.hw_shots_2q = j.value("hw_shots_2q", c.hw_shots_2q);
        c.master_seed = j.value("master_seed", c.master_seed);
        if (j.contains("readout_placement")) {
            c.readout = channels::readout_placement_from_string(j["readout_placement"].get<std::string>());
        }
        c.work_dir = j.value("work_dir", c.work_dir);
        c.resume = j.value("resume", c.resume);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed pipeline config: ") + e.what());
    }
}

SeedTree SeedTree::derive(std::uint64_t master) {
    SeedTree s;
    s.datagen_1q = derive_seed(master, "datagen-1q");
    s.train_1q = derive_seed(master, "train-1q");
    s.gst_qi = derive_seed(master, "gst-1q-i");
    s.gst_qj = derive_seed(master, "gst-1q-j");
    s.datagen_2q = derive_seed(master, "datagen-2q");
    s.train_2q = derive_seed(master, "train-2q");
    s.gst_pair = derive_seed(master, "gst-2q");
    return s;
}

nlohmann::json to_json(const PipelineReport& r) {
    const SeedTree& s = r.seeds;
    return {{"config", r.config},
            {"executor", r.executor},
            {"seeds", {{"datagen_1q", s.datagen_1q},
                       {"train_1q", s.train_1q},
                       {"gst_qi", s.gst_qi},
                       {"gst_qj", s.gst_qj},
                       {"datagen_2q", s.datagen_2q},
                       {"train_2q", s.train_2q},
                       {"gst_pair", s.gst_pair}}},
            {"nn1q", summary_json(r.nn1q)},
            {"nn2q", summary_json(r.nn2q)},
            {"gst", {{"qi", gst_summary_json(r.gst_qi)},
                     {"qj", gst_summary_json(r.gst_qj)},
                     {"pair", gst_summary_json(r.gst_pair)}}},
            {"model", channels::to_json(r.model)},
            {"warnings", r.warnings},
            {"artifacts", r.artifacts}};
}

// Prediction

channels::LambdaParams predict_lambda(const mlp::MlpModel& nn1q, const gst::GstOutcome& outcome) {
    if (outcome.n_qubits != 1) throw DimensionError("predict_lambda needs a 1-qubit GST outcome");
    if (nn1q.config.output_dim != 4) throw DimensionError("predict_lambda needs a 4-output network");
    const std::vector<double> y = mlp::forward(nn1q, outcome.features());
    for (double v : y) {
        if (!(v > 0.0 && v < nn1q.config.ceiling)) {
            throw InternalError("NN-1Q output " + nlohmann::json(v).dump() +
                                " left (0, U); the model or its scaler is corrupt");
        }
    }
    return channels::LambdaParams::from_array(y);
}

channels::ZetaParams predict_zeta(const mlp::MlpModel& nn2q, const gst::GstOutcome& outcome) {
    if (outcome.n_qubits != 2) throw DimensionError("predict_zeta needs a 2-qubit GST outcome");
    if (nn2q.config.output_dim != 1) throw DimensionError("predict_zeta needs a 1-output network");
    const double z = mlp::forward(nn2q, outcome.features()).at(0);
    if (!(z > 0.0 && z < nn2q.config.ceiling)) {
        throw InternalError("NN-2Q output " + nlohmann::json(z).dump() +
                            " left (0, U); the model or its scaler is corrupt");
    }
    return channels::ZetaParams{z};
}

NetworkSummary summarize(const mlp::MlpModel& model, const datagen::Dataset& dataset,
                         std::uint64_t train_seed, const mlp::TrainResult* trained) {
    NetworkSummary s;
    s.name = model.config.name;
    s.examples = dataset.size();
    s.epochs = model.config.epochs;
    s.final_train_loss = trained && !trained->train_loss.empty() ? trained->train_loss.back() : kNaN;
    s.final_val_loss = trained && !trained->val_loss.empty() ? trained->val_loss.back() : kNaN;
    mlp::Matrix x, y;
    mlp::to_matrices(dataset, x, y);
    const auto val = trained ? trained->val_indices
                             : mlp::split_indices(dataset.size(), model.config.validation_split,
                                                  derive_seed(train_seed, "split"))
                                   .second;
    if (val.empty()) return s;
    mlp::Matrix xv(static_cast<Eigen::Index>(val.size()), x.cols());
    mlp::Matrix yv(static_cast<Eigen::Index>(val.size()), y.cols());
    for (std::size_t i = 0; i < val.size(); ++i) {
        xv.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(val[i]));
        yv.row(static_cast<Eigen::Index>(i)) = y.row(static_cast<Eigen::Index>(val[i]));
    }
    s.val_mse_per_output = mlp::evaluate(model, xv, yv).mse_per_output;
    return s;
}

// Orchestration

mlp::MlpModel train_nn1q(const PipelineConfig& config, NetworkSummary* summary) {
    config.validate();
    const SeedTree seeds = SeedTree::derive(config.master_seed);
    const Store store(config);
    std::map<std::string, std::string> artifacts;
    datagen::Dataset ds;
    if (store.reusable("dataset_1q.jsonl")) {
        ds = datagen::read_dataset(store.path("dataset_1q.jsonl"));
    } else {
        ds = datagen::generate_1q_dataset(config.grid_1q, gst::GstGateSet::single_qubit_set(), seeds.datagen_1q,
                                          config.readout);
        if (store.enabled()) datagen::write_dataset(ds, store.path("dataset_1q.jsonl"));
    }
    TrainedNetwork net = train_or_load(store, "nn1q.json", config.nn1q, ds, seeds.train_1q, artifacts);
    if (summary) *summary = net.summary;
    return std::move(net.model);
}

PipelineReport run_gth_pipeline(const Executor& executor, const PipelineConfig& config,
                                const std::optional<mlp::MlpModel>& pretrained_nn1q) {
    config.validate();
    const Store store(config);
    PipelineReport report;
    report.config = to_json(config);
    report.executor = executor.name();
    report.seeds = SeedTree::derive(config.master_seed);
    const SeedTree& seeds = report.seeds;
    const std::vector<int> qi{config.qubits[0]};
    const std::vector<int> qj{config.qubits[1]};
    const std::vector<int> pair{config.qubits[0], config.qubits[1]};

    // Lambda grid, 1q dataset, NN-1Q.
    mlp::MlpModel nn1q;
    if (pretrained_nn1q) {
        if (pretrained_nn1q->config.input_dim != datagen::kFeatureDim1q ||
            pretrained_nn1q->config.output_dim != 4) {
            throw SchemaError("supplied NN-1Q has the wrong shape");
        }
        nn1q = *pretrained_nn1q;
        report.nn1q.name = nn1q.config.name;
        report.nn1q.epochs = nn1q.config.epochs;
        report.nn1q.final_train_loss = kNaN;
        report.nn1q.final_val_loss = kNaN;
    } else {
        nn1q = train_nn1q(config, &report.nn1q);
        if (store.enabled()) {
            report.artifacts["dataset_1q.jsonl"] = store.path("dataset_1q.jsonl");
            report.artifacts["nn1q.json"] = store.path("nn1q.json");
        }
    }

    // Device GST on each qubit, lambda predictions.
    const gst::GstGateSet single_qubit_set = gst::GstGateSet::single_qubit_set();
    const gst::GstOutcome gst_i = device_gst(executor, store, "gst_qi.json", single_qubit_set, 1, config.hw_shots_1q,
                                             seeds.gst_qi, qi, report.artifacts);
    const gst::GstOutcome gst_j = device_gst(executor, store, "gst_qj.json", single_qubit_set, 1, config.hw_shots_1q,
                                             seeds.gst_qj, qj, report.artifacts);
    report.gst_qi = {qi, gst_i.shots, gst_i.seed};
    report.gst_qj = {qj, gst_j.shots, gst_j.seed};
    const channels::LambdaParams lambda_i = predict_lambda(nn1q, gst_i);
    const channels::LambdaParams lambda_j = predict_lambda(nn1q, gst_j);

    // Zeta grid and 2q dataset under N(lambda_i, lambda_j, zeta).
    datagen::Dataset ds2;
    bool have_ds2 = false;
    if (store.reusable("dataset_2q.jsonl")) {
        ds2 = datagen::read_dataset(store.path("dataset_2q.jsonl"));
        // A dataset conditioned on other lambdas is stale.
        have_ds2 = ds2.header.lambda_i == lambda_i && ds2.header.lambda_j == lambda_j &&
                   ds2.header.seed == seeds.datagen_2q;
    }
    const bool fresh_ds2 = !have_ds2;
    if (fresh_ds2) {
        ds2 = datagen::generate_2q_dataset(config.grid_2q, lambda_i, lambda_j, seeds.datagen_2q, config.readout);
        if (store.enabled()) datagen::write_dataset(ds2, store.path("dataset_2q.jsonl"));
    }
    if (store.enabled()) report.artifacts["dataset_2q.jsonl"] = store.path("dataset_2q.jsonl");

    // NN-2Q. A fresh dataset invalidates any stored network.
    TrainedNetwork nn2q;
    if (fresh_ds2 && store.enabled() && fs::exists(store.path("nn2q.json"))) {
        fs::remove(store.path("nn2q.json"));
    }
    nn2q = train_or_load(store, "nn2q.json", config.nn2q, ds2, seeds.train_2q, report.artifacts);
    report.nn2q = nn2q.summary;

    // Device GST on the pair, zeta prediction, assembly.
    const gst::GstOutcome gst_p = device_gst(executor, store, "gst_pair.json", gst::GstGateSet::cz_only(), 2,
                                             config.hw_shots_2q, seeds.gst_pair, pair, report.artifacts);
    report.gst_pair = {pair, gst_p.shots, gst_p.seed};
    const channels::ZetaParams zeta = predict_zeta(nn2q.model, gst_p);

    report.model.lambda_i = lambda_i;
    report.model.lambda_j = lambda_j;
    report.model.zeta = zeta;
    report.model.qubit_ids = config.qubits;
    report.model.validate();

    flag_lambda("qubit " + std::to_string(config.qubits[0]), lambda_i, report.warnings);
    flag_lambda("qubit " + std::to_string(config.qubits[1]), lambda_j, report.warnings);
    if (zeta.zeta > kZetaExtrapolation) {
        report.warnings.push_back("zeta = " + nlohmann::json(zeta.zeta).dump() + " exceeds " +
                                  nlohmann::json(kZetaExtrapolation).dump() +
                                  "; prediction is an extrapolation");
    }

    if (store.enabled()) {
        channels::save_gth_model(report.model, store.path("gth_model.json"));
        report.artifacts["gth_model.json"] = store.path("gth_model.json");
        report.artifacts["report.json"] = store.path("report.json");
        std::ofstream out(store.path("report.json"));
        if (!out) throw IoError("cannot write " + store.path("report.json"));
        out << to_json(report).dump(2) << '\n';
    }
    return report;
}

}  // namespace gthemu::pipeline
