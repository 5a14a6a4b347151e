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

#include "gthemu/datagen.hpp"

#include <cmath>
#include <fstream>

#include "gthemu/error.hpp"
#include "gthemu/parallel.hpp"
#include "gthemu/seeds.hpp"

namespace gthemu::datagen {

namespace {

constexpr const char* kSchema = "gthemu-dataset/1";

// Simulates each distinct circuit once and re-samples it for every repeat.
// One instance per grid point; not shared between threads.
class CachedSimulator final : public Executor {
public:
    explicit CachedSimulator(channels::NoiseModel model) : model_(std::move(model)) {}

    qcore::Counts run(const qcore::Circuit& circuit, const std::vector<int>&, std::int64_t shots,
                      std::uint64_t seed) const override {
        auto it = cache_.find(circuit.label);
        if (it == cache_.end()) {
            it = cache_.emplace(circuit.label, channels::noisy_execute(circuit, model_)).first;
        }
        return qcore::sample_computational(it->second, circuit.meas_basis, shots, seed);
    }

    std::string name() const override { return "cached-simulator"; }

private:
    channels::NoiseModel model_;
    mutable std::map<std::string, qcore::DensityMatrix> cache_;
};

double snap(double v) { return std::round(v * 1e12) / 1e12; }

nlohmann::json range_to_json(const Range& r) {
    return {{"start", r.start}, {"stop", r.stop}, {"step", r.step}};
}

Range range_from_json(const nlohmann::json& j) {
    return Range{j.at("start").get<double>(), j.at("stop").get<double>(), j.at("step").get<double>()};
}

nlohmann::json lambda_json(const channels::LambdaParams& l) {
    return nlohmann::json::array({l.d, l.a, l.f, l.r});
}

}  // namespace

void Range::validate() const {
    if (!(step > 0.0)) throw InputError("grid step must be positive");
    if (start < 0.0 || stop > 1.0 || !(stop > start)) {
        throw InputError("grid range must satisfy 0 <= start < stop <= 1");
    }
}

std::vector<double> Range::values() const {
    validate();
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double v = snap(start + i * step);
        if (v >= stop - 1e-12) break;
        out.push_back(v);
    }
    return out;
}

GridSpec GridSpec::paper_scale() { return GridSpec{}; }

GridSpec GridSpec::desk_scale() {
    GridSpec g;
    g.lambda = Range{0.0, 0.1, 0.03};
    g.shots = 2000;
    g.repeats_per_point = 3;
    return g;
}

void GridSpec::validate() const {
    lambda.validate();
    zeta.validate();
    if (repeats_per_point < 1) throw InputError("repeats_per_point must be >= 1");
    if (shots < 1) throw InputError("shots must be >= 1");
}

std::vector<channels::LambdaParams> lambda_grid(const GridSpec& grid) {
    const std::vector<double> v = grid.lambda.values();
    std::vector<channels::LambdaParams> out;
    out.reserve(v.size() * v.size() * v.size() * v.size());
    for (double d : v)
        for (double a : v)
            for (double f : v)
                for (double r : v) out.push_back({d, a, f, r});
    return out;
}

Dataset generate_1q_points(const std::vector<channels::LambdaParams>& points, int repeats,
                           std::int64_t shots, std::uint64_t seed,
                           channels::ReadoutPlacement readout, const gst::GstGateSet& gate_set) {
    if (repeats < 1) throw InputError("repeats must be >= 1");
    for (const auto& p : points) p.validate();
    Dataset ds;
    ds.header.kind = "1q";
    ds.header.feature_dim = 16 * (1 + gate_set.size());
    ds.header.label_dim = 4;
    ds.header.seed = seed;
    ds.header.readout = readout;
    ds.header.grid.repeats_per_point = repeats;
    ds.header.grid.shots = shots;
    ds.examples.resize(points.size() * static_cast<std::size_t>(repeats));

    parallel_for(points.size(), [&](std::size_t i) {
        const CachedSimulator sim(channels::NoiseModel::single(points[i], readout));
        const auto label = points[i].as_array();
        for (int rep = 0; rep < repeats; ++rep) {
            const gst::GstOutcome o =
                gst::estimate_gst(sim, gate_set, 1, shots, derive_seed(seed, i, static_cast<std::uint64_t>(rep)));
            auto& ex = ds.examples[i * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(rep)];
            ex.features = o.features();
            ex.label.assign(label.begin(), label.end());
        }
    });
    return ds;
}

Dataset generate_1q_dataset(const GridSpec& grid, const gst::GstGateSet& gate_set,
                            std::uint64_t seed, channels::ReadoutPlacement readout) {
    grid.validate();
    Dataset ds = generate_1q_points(lambda_grid(grid), grid.repeats_per_point, grid.shots, seed,
                                    readout, gate_set);
    ds.header.grid = grid;
    return ds;
}

Dataset generate_2q_points(const std::vector<double>& zetas, int repeats, std::int64_t shots,
                           const channels::LambdaParams& lambda_i,
                           const channels::LambdaParams& lambda_j, std::uint64_t seed,
                           channels::ReadoutPlacement readout) {
    if (repeats < 1) throw InputError("repeats must be >= 1");
    lambda_i.validate();
    lambda_j.validate();
    const gst::GstGateSet gate_set = gst::GstGateSet::cz_only();
    Dataset ds;
    ds.header.kind = "2q";
    ds.header.feature_dim = kFeatureDim2q;
    ds.header.label_dim = 1;
    ds.header.seed = seed;
    ds.header.readout = readout;
    ds.header.lambda_i = lambda_i;
    ds.header.lambda_j = lambda_j;
    ds.header.grid.repeats_per_point = repeats;
    ds.header.grid.shots = shots;
    ds.examples.resize(zetas.size() * static_cast<std::size_t>(repeats));

    parallel_for(zetas.size(), [&](std::size_t i) {
        const channels::ZetaParams zeta{zetas[i]};
        const CachedSimulator sim(channels::NoiseModel::pair(lambda_i, lambda_j, zeta, readout));
        for (int rep = 0; rep < repeats; ++rep) {
            const gst::GstOutcome o =
                gst::estimate_gst(sim, gate_set, 2, shots, derive_seed(seed, i, static_cast<std::uint64_t>(rep)));
            auto& ex = ds.examples[i * static_cast<std::size_t>(repeats) + static_cast<std::size_t>(rep)];
            ex.features = o.features();
            ex.label = {zetas[i]};
        }
    });
    return ds;
}

Dataset generate_2q_dataset(const GridSpec& grid, const channels::LambdaParams& lambda_i,
                            const channels::LambdaParams& lambda_j, std::uint64_t seed,
                            channels::ReadoutPlacement readout) {
    grid.validate();
    Dataset ds = generate_2q_points(grid.zeta.values(), grid.repeats_per_point, grid.shots,
                                    lambda_i, lambda_j, seed, readout);
    ds.header.grid = grid;
    return ds;
}

// Persistence

nlohmann::json to_json(const GridSpec& grid) {
    return {{"lambda", range_to_json(grid.lambda)},
            {"zeta", range_to_json(grid.zeta)},
            {"repeats", grid.repeats_per_point},
            {"shots", grid.shots}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    g.lambda = range_from_json(j.at("lambda"));
    g.zeta = range_from_json(j.at("zeta"));
    g.repeats_per_point = j.at("repeats").get<int>();
    g.shots = j.at("shots").get<std::int64_t>();
    return g;
}

nlohmann::json to_json(const DatasetHeader& h) {
    nlohmann::json j = {{"schema", kSchema},
                        {"kind", h.kind},
                        {"feature_dim", h.feature_dim},
                        {"label_dim", h.label_dim},
                        {"grid", to_json(h.grid)},
                        {"seed", h.seed},
                        {"readout_placement", channels::to_string(h.readout)}};
    if (h.lambda_i) j["lambda_i"] = lambda_json(*h.lambda_i);
    if (h.lambda_j) j["lambda_j"] = lambda_json(*h.lambda_j);
    return j;
}

DatasetHeader header_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<std::string>() != kSchema) {
            throw SchemaError("unsupported dataset schema '" + j.at("schema").get<std::string>() + "'");
        }
        DatasetHeader h;
        h.kind = j.at("kind").get<std::string>();
        h.feature_dim = j.at("feature_dim").get<int>();
        h.label_dim = j.at("label_dim").get<int>();
        h.grid = grid_from_json(j.at("grid"));
        h.seed = j.at("seed").get<std::uint64_t>();
        h.readout = channels::readout_placement_from_string(j.at("readout_placement").get<std::string>());
        if (j.contains("lambda_i")) h.lambda_i = channels::LambdaParams::from_array(j["lambda_i"].get<std::vector<double>>());
        if (j.contains("lambda_j")) h.lambda_j = channels::LambdaParams::from_array(j["lambda_j"].get<std::vector<double>>());
        if (h.kind != "1q" && h.kind != "2q") throw SchemaError("dataset kind must be 1q or 2q");
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed dataset header: ") + e.what());
    }
}

void write_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << to_json(dataset.header).dump() << '\n';
    for (const TrainingExample& ex : dataset.examples) {
        out << nlohmann::json{{"label", ex.label}, {"features", ex.features}}.dump() << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": missing header line");
    Dataset ds;
    try {
        ds.header = header_from_json(nlohmann::json::parse(line));
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            TrainingExample ex;
            ex.label = j.at("label").get<std::vector<double>>();
            ex.features = j.at("features").get<std::vector<double>>();
            if (static_cast<int>(ex.features.size()) != ds.header.feature_dim) {
                throw SchemaError(path + ":" + std::to_string(line_no) + ": feature length " +
                                  std::to_string(ex.features.size()) + ", header declares " +
                                  std::to_string(ds.header.feature_dim));
            }
            if (static_cast<int>(ex.label.size()) != ds.header.label_dim) {
                throw SchemaError(path + ":" + std::to_string(line_no) + ": label length mismatch");
            }
            ds.examples.push_back(std::move(ex));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return ds;
}

}  // namespace gthemu::datagen
