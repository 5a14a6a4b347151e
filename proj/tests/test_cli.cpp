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
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "gthemu/datagen.hpp"
#include "gthemu/executor.hpp"
#include "gthemu/gst.hpp"
#include "gthemu/mlp.hpp"

using namespace gthemu;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "gthemu");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gthemu::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("gthemu_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

const char* kTruth =
    R"({"qubits":[1,4],"lambda_i":{"d":0.00924,"a":0.01415,"f":0.00228,"r":0.00434},)"
    R"("lambda_j":{"d":0.01203,"a":0.04505,"f":0.0017,"r":0.00081},"zeta":0.00014})";

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(invoke({"--help"}).code, gthemu::cli::kOk);
    const auto none = invoke({});
    EXPECT_EQ(none.code, gthemu::cli::kUsage);
    const auto rec = json::parse(none.err);
    EXPECT_EQ(rec["error"]["kind"], "usage");
    EXPECT_EQ(rec["error"]["exit_code"], gthemu::cli::kUsage);
    EXPECT_EQ(invoke({"heatmap", "--no-such-flag"}).code, gthemu::cli::kUsage);
}

TEST(Cli, DistinctExitCodes) {
    const auto dir = fresh_dir("codes");
    EXPECT_EQ(invoke({"--out-dir", dir.string(), "train"}).code, gthemu::cli::kInputError);
    EXPECT_EQ(invoke({"--out-dir", dir.string(), "evaluate", "--model", (dir / "none.json").string(), "--dataset",
                   (dir / "none.jsonl").string()})
                  .code,
              gthemu::cli::kIoError);
    write_text(dir / "broken.json", "{\"shots\": 10}");
    EXPECT_EQ(invoke({"--out-dir", dir.string(), "gst-ingest", "--counts", (dir / "broken.json").string()}).code,
              gthemu::cli::kSchemaError);
    EXPECT_EQ(invoke({"--out-dir", dir.string(), "datagen-1q", "--preset", "huge"}).code, gthemu::cli::kInputError);
    EXPECT_EQ(invoke({"--out-dir", dir.string(), "heatmap", "--steps", "abc"}).code, gthemu::cli::kInputError);
}

TEST(Cli, HeatmapGridAndByteIdenticalRerun) {
    const auto a = fresh_dir("heat_a"), b = fresh_dir("heat_b");
    ASSERT_EQ(invoke({"--out-dir", a.string(), "heatmap", "--steps", "3"}).code, 0);
    ASSERT_EQ(invoke({"--out-dir", b.string(), "heatmap", "--steps", "3"}).code, 0);
    const std::string csv = slurp(a / "heatmap.csv");
    EXPECT_EQ(csv, slurp(b / "heatmap.csv"));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "gate,channel,lambda,matrix,row,col,value");
    // 2 gates x 4 channels x 3 values x (g + U) x 16 entries, plus the header.
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 * 4 * 3 * 2 * 16 + 1);
    EXPECT_NE(csv.find("identity,r,0.5,U,"), std::string::npos);
    EXPECT_NE(csv.find("identity,d,1.0,U,"), std::string::npos);
    const auto report = json::parse(slurp(a / "report.json"));
    EXPECT_EQ(report["command"], "heatmap");
    EXPECT_EQ(report["config"]["steps"], 3);
    EXPECT_TRUE(report.contains("version"));
}

TEST(Cli, ConfigFileFlagsWin) {
    const auto dir = fresh_dir("config");
    write_text(dir / "cfg.json", R"({"seed": 5, "heatmap": {"steps": 4, "out": "h.csv"}})");
    ASSERT_EQ(invoke({"--config", (dir / "cfg.json").string(), "--out-dir", dir.string(), "heatmap"}).code, 0);
    auto report = json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["config"]["steps"], 4);
    EXPECT_EQ(report["config"]["seed"], 5);
    EXPECT_TRUE(fs::exists(dir / "h.csv"));
    ASSERT_EQ(invoke({"--config", (dir / "cfg.json").string(), "--out-dir", dir.string(), "heatmap", "--steps", "2"})
                  .code,
              0);
    report = json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["config"]["steps"], 2);
}

TEST(Cli, ExportSimulateIngestRoundTrip) {
    const auto dir = fresh_dir("gst");
    write_text(dir / "truth.json", kTruth);
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "gst-export", "--n-qubits", "2"}).code, 0);
    const auto exported = json::parse(slurp(dir / "gst_circuits.json"));
    EXPECT_EQ(exported["circuits"].size(), 288u);
    for (int n : {1, 2}) {
        const std::string counts = (dir / ("counts" + std::to_string(n) + ".json")).string();
        const std::string outcome = (dir / ("outcome" + std::to_string(n) + ".json")).string();
        ASSERT_EQ(invoke({"--out-dir", dir.string(), "gst-simulate", "--truth", (dir / "truth.json").string(),
                       "--n-qubits", std::to_string(n), "--shots", "700", "--seed", "13", "--out", counts})
                      .code,
                  0);
        ASSERT_EQ(invoke({"--out-dir", dir.string(), "gst-ingest", "--counts", counts, "--seed", "13", "--out",
                       outcome})
                      .code,
                  0);
        const auto hw = SyntheticHardware::from_model(channels::gth_model_from_json(json::parse(kTruth)));
        const std::vector<int> qubits = n == 1 ? std::vector<int>{1} : std::vector<int>{1, 4};
        const auto set = n == 1 ? gst::GstGateSet::single_qubit_set() : gst::GstGateSet::cz_only();
        const auto direct = gst::estimate_gst(hw, set, n, 700, 13, qubits);
        EXPECT_EQ(gst::to_json(gst::load_outcome(outcome)).dump(), gst::to_json(direct).dump());
    }
}

TEST(Cli, DatagenTrainEvaluateDeterministic) {
    const auto a = fresh_dir("train_a"), b = fresh_dir("train_b");
    for (const auto& dir : {a, b}) {
        ASSERT_EQ(invoke({"--out-dir", dir.string(), "datagen-1q", "--preset", "desk-scale", "--lambda-step", "0.05",
                       "--repeats", "1", "--shots", "300", "--seed", "4"})
                      .code,
                  0);
        ASSERT_EQ(invoke({"--out-dir", dir.string(), "train", "--preset", "desk-scale", "--dataset",
                       (dir / "dataset_1q.jsonl").string(), "--epochs", "3", "--seed", "4"})
                      .code,
                  0);
        ASSERT_EQ(invoke({"--out-dir", dir.string(), "evaluate", "--model", (dir / "model.json").string(), "--dataset",
                       (dir / "dataset_1q.jsonl").string()})
                      .code,
                  0);
    }
    for (const char* f : {"dataset_1q.jsonl", "model.json", "losses.csv", "pairs.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    const auto ds = datagen::read_dataset((a / "dataset_1q.jsonl").string());
    EXPECT_EQ(ds.size(), 16u);
    const std::string losses = slurp(a / "losses.csv");
    EXPECT_EQ(std::count(losses.begin(), losses.end(), '\n'), 4);
}

TEST(Cli, EvaluatePerfectModelGivesZeroError) {
    const auto dir = fresh_dir("perfect");
    const auto model = mlp::init_model(mlp::MlpConfig::nn_1q(), 8);
    auto ds = datagen::generate_1q_points({channels::LambdaParams{0.01, 0.02, 0.03, 0.04}}, 4, 200, 1);
    for (auto& ex : ds.examples) ex.label = mlp::forward(model, ex.features);
    datagen::write_dataset(ds, (dir / "ds.jsonl").string());
    mlp::save_model(model, (dir / "model.json").string());
    const auto r = invoke({"--out-dir", dir.string(), "evaluate", "--model", (dir / "model.json").string(), "--dataset",
                        (dir / "ds.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = json::parse(slurp(dir / "report.json"));
    for (const auto& [k, v] : report["outputs"]["mse"].items()) EXPECT_EQ(v.get<double>(), 0.0) << k;
    std::istringstream pairs(slurp(dir / "pairs.csv"));
    std::string line;
    std::getline(pairs, line);
    int rows = 0;
    while (std::getline(pairs, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), 9u);
        for (int k = 0; k < 4; ++k) EXPECT_EQ(cells[1 + 2 * k], cells[2 + 2 * k]);
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}

TEST(Cli, EmulateAndChem) {
    const auto dir = fresh_dir("emulate");
    write_text(dir / "truth.json", kTruth);
    write_text(dir / "circ.json",
               R"({"n_qubits":2,"meas_basis":"ZZ","label":"flip","ops":[{"gate":"prx","qubits":[0],"theta":3.141592653589793,"phi":0.0}]})");
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "emulate", "--circuit", (dir / "circ.json").string(), "--exact"}).code,
              0);
    auto out = json::parse(slurp(dir / "emulate.json"));
    EXPECT_NEAR(out["probabilities"]["10"].get<double>(), 1.0, 1e-12);
    EXPECT_FALSE(out.contains("counts"));
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "emulate", "--circuit", (dir / "circ.json").string(), "--model",
                   (dir / "truth.json").string(), "--shots", "500"})
                  .code,
              0);
    out = json::parse(slurp(dir / "emulate.json"));
    EXPECT_EQ(out["shots"], 500);
    EXPECT_LT(out["probabilities"]["10"].get<double>(), 1.0);

    ASSERT_EQ(invoke({"--out-dir", dir.string(), "chem-opt", "--exact", "--offset", "0.75366"}).code, 0);
    const auto opt = json::parse(slurp(dir / "report.json"))["outputs"];
    EXPECT_NEAR(opt["theta"].get<double>(), 0.2097, 1e-3);
    EXPECT_NEAR(opt["energy"].get<double>(), -1.1473029, 1e-3);
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "chem-sweep", "--points", "5", "--shots", "200"}).code, 0);
    const std::string first = slurp(dir / "sweep.csv");
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "chem-sweep", "--points", "5", "--shots", "200"}).code, 0);
    EXPECT_EQ(slurp(dir / "sweep.csv"), first);
    EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 6);
}

TEST(Cli, PipelineDeskScaleEndToEnd) {
    const auto dir = fresh_dir("pipeline");
    write_text(dir / "truth.json", kTruth);
    const auto r = invoke({"--out-dir", dir.string(), "pipeline", "--preset", "desk-scale", "--synthetic-truth",
                        (dir / "truth.json").string(), "--nn1q-epochs", "50", "--nn2q-epochs", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto model = channels::load_gth_model((dir / "gth_model.json").string());
    EXPECT_EQ(model.qubit_ids, (std::array<int, 2>{1, 4}));
    const auto report = json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(report["outputs"]["pipeline"]["executor"], "synthetic-hardware");
    EXPECT_TRUE(fs::exists(dir / "work" / "report.json"));
    const std::string first = slurp(dir / "gth_model.json");
    // Resuming from the stored intermediates reproduces the model and report.
    ASSERT_EQ(invoke({"--out-dir", dir.string(), "pipeline", "--preset", "desk-scale", "--synthetic-truth",
                   (dir / "truth.json").string(), "--nn1q-epochs", "50", "--nn2q-epochs", "50", "--resume"})
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "gth_model.json"), first);
}
