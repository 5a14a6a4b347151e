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

#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gthemu/channels.hpp"
#include "gthemu/chem.hpp"
#include "gthemu/datagen.hpp"
#include "gthemu/error.hpp"
#include "gthemu/executor.hpp"
#include "gthemu/gst.hpp"
#include "gthemu/mlp.hpp"
#include "gthemu/pipeline.hpp"
#include "gthemu/version.hpp"

namespace gthemu::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Settings: built-in defaults, then the config file (top level, then the
// section named after the subcommand), then flags. Flags win.

enum class Kind { kString, kNumber, kInteger, kFlag, kNumbers, kIntegers, kStrings };

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError("--" + key + ": '" + text + "' is not a number");
    }
}

long long parse_integer(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw InputError("--" + key + ": '" + text + "' is not an integer");
    }
}

class Command {
public:
    using Handler = std::function<json(const json& settings, const fs::path& out_dir, std::ostream& out)>;

    Command(CLI::App& parent, const std::string& name, const std::string& description, json defaults)
        : name_(name), app_(parent.add_subcommand(name, description)), defaults_(std::move(defaults)) {}

    Command& opt(const std::string& key, Kind kind, const std::string& help) {
        kinds_[key] = kind;
        if (kind == Kind::kFlag) {
            options_[key] = app_->add_flag("--" + key, help);
        } else {
            options_[key] = app_->add_option("--" + key, raw_[key], help);
        }
        return *this;
    }

    Command& handler(Handler h) {
        handler_ = std::move(h);
        return *this;
    }

    const std::string& name() const { return name_; }
    bool parsed() const { return app_->parsed(); }
    const Handler& handle() const { return handler_; }

    json resolve(const json& file) const {
        json s = defaults_;
        const auto absorb = [&](const json& section) {
            if (!section.is_object()) return;
            for (const auto& [k, v] : section.items()) {
                if (kinds_.contains(k)) s[k] = v;
            }
        };
        absorb(file);
        if (file.contains(name_)) absorb(file[name_]);
        for (const auto& [key, option] : options_) {
            if (option->count() == 0) continue;
            s[key] = convert(key, kinds_.at(key));
        }
        return s;
    }

private:
    json convert(const std::string& key, Kind kind) const {
        const std::string text = raw_.contains(key) ? raw_.at(key) : std::string();
        switch (kind) {
            case Kind::kFlag: return true;
            case Kind::kString: return text;
            case Kind::kNumber: return parse_number(key, text);
            case Kind::kInteger: return parse_integer(key, text);
            case Kind::kNumbers: {
                json a = json::array();
                for (const auto& t : split(text)) a.push_back(parse_number(key, t));
                return a;
            }
            case Kind::kIntegers: {
                json a = json::array();
                for (const auto& t : split(text)) a.push_back(parse_integer(key, t));
                return a;
            }
            case Kind::kStrings: return split(text);
        }
        return text;
    }

    std::string name_;
    CLI::App* app_;
    json defaults_;
    std::map<std::string, Kind> kinds_;
    std::map<std::string, CLI::Option*> options_;
    std::map<std::string, std::string> raw_;
    Handler handler_;
};

// Typed access to resolved settings.

const json& need(const json& s, const std::string& key) {
    if (!s.contains(key) || s[key].is_null()) throw InputError("missing required option --" + key);
    return s[key];
}

template <typename T>
T get(const json& s, const std::string& key) {
    try {
        return need(s, key).get<T>();
    } catch (const json::exception&) {
        throw InputError("option --" + key + " has the wrong type: " + s[key].dump());
    }
}

bool has(const json& s, const std::string& key) {
    return s.contains(key) && !s[key].is_null() && !(s[key].is_string() && s[key].get<std::string>().empty());
}

std::string output_path(const fs::path& out_dir, const json& s, const std::string& key) {
    const fs::path p = get<std::string>(s, key);
    return (p.is_absolute() ? p : out_dir / p).string();
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

channels::ReadoutPlacement readout_of(const json& s) {
    return channels::readout_placement_from_string(get<std::string>(s, "readout"));
}

channels::LambdaParams lambda_of(const json& s, const std::string& key) {
    const auto v = get<std::vector<double>>(s, key);
    const auto l = channels::LambdaParams::from_array(v);
    l.validate();
    return l;
}

pipeline::PipelineConfig preset_of(const json& s) {
    const std::string preset = get<std::string>(s, "preset");
    if (preset == "desk-scale") return pipeline::PipelineConfig::desk_scale();
    if (preset == "paper-scale") return pipeline::PipelineConfig::paper_scale();
    throw InputError("unknown preset '" + preset + "' (expected desk-scale or paper-scale)");
}

datagen::GridSpec grid_of(const json& s, datagen::GridSpec g) {
    if (has(s, "lambda-start")) g.lambda.start = get<double>(s, "lambda-start");
    if (has(s, "lambda-stop")) g.lambda.stop = get<double>(s, "lambda-stop");
    if (has(s, "lambda-step")) g.lambda.step = get<double>(s, "lambda-step");
    if (has(s, "zeta-start")) g.zeta.start = get<double>(s, "zeta-start");
    if (has(s, "zeta-stop")) g.zeta.stop = get<double>(s, "zeta-stop");
    if (has(s, "zeta-step")) g.zeta.step = get<double>(s, "zeta-step");
    if (has(s, "shots")) g.shots = get<std::int64_t>(s, "shots");
    if (has(s, "repeats")) g.repeats_per_point = get<int>(s, "repeats");
    g.validate();
    return g;
}

std::optional<channels::GthNoiseModel> model_of(const json& s) {
    if (!has(s, "model")) return std::nullopt;
    return channels::load_gth_model(get<std::string>(s, "model"));
}

gst::GstGateSet gate_set_for(int n_qubits) {
    if (n_qubits == 1) return gst::GstGateSet::single_qubit_set();
    if (n_qubits == 2) return gst::GstGateSet::cz_only();
    throw InputError("GST width must be 1 or 2 qubits");
}

// Subcommands

json cmd_gst_export(const json& s, const fs::path& dir, std::ostream&) {
    const int n = get<int>(s, "n-qubits");
    const gst::GstGateSet gates = gate_set_for(n);
    json gate_list = json::array();
    for (const auto& g : gates.gates) gate_list.push_back(qcore::to_json(g));
    const auto circuits = gst::build_gst_circuits(gates, n);
    const std::string path = output_path(dir, s, "out");
    write_json({{"n_qubits", n}, {"gate_set", gate_list}, {"circuits", gst::circuits_to_json(circuits)}}, path);
    return {{"circuits", circuits.size()}, {"file", path}};
}

json cmd_gst_simulate(const json& s, const fs::path& dir, std::ostream&) {
    const int n = get<int>(s, "n-qubits");
    const auto truth = has(s, "truth") ? std::optional(channels::load_gth_model(get<std::string>(s, "truth")))
                                       : std::nullopt;
    std::vector<int> qubits;
    if (has(s, "qubits")) {
        qubits = get<std::vector<int>>(s, "qubits");
    } else if (truth) {
        qubits.assign(truth->qubit_ids.begin(), truth->qubit_ids.begin() + n);
    } else {
        for (int q = 0; q < n; ++q) qubits.push_back(q);
    }
    const std::int64_t shots = has(s, "shots") ? get<std::int64_t>(s, "shots") : (n == 1 ? 10000 : 1000);
    std::unique_ptr<Executor> exec;
    if (truth) {
        exec = std::make_unique<SyntheticHardware>(SyntheticHardware::from_model(*truth, readout_of(s)));
    } else {
        exec = std::make_unique<SimulatorExecutor>();
    }
    const auto doc = gst::collect_counts(*exec, gate_set_for(n), n, shots, get<std::uint64_t>(s, "seed"), qubits);
    const std::string path = output_path(dir, s, "out");
    write_json(gst::to_json(doc), path);
    return {{"records", doc.records.size()}, {"shots", shots}, {"qubits", qubits}, {"file", path}};
}

json cmd_gst_ingest(const json& s, const fs::path& dir, std::ostream&) {
    const auto doc = gst::counts_import_from_json(read_json(get<std::string>(s, "counts")));
    const int n = static_cast<int>(doc.qubits.size());
    const auto outcome = gst::outcome_from_counts(doc, gate_set_for(n), get<std::uint64_t>(s, "seed"));
    const std::string path = output_path(dir, s, "out");
    gst::save_outcome(outcome, path);
    return {{"n_qubits", n}, {"shots", doc.shots}, {"qubits", doc.qubits}, {"file", path}};
}

json cmd_datagen_1q(const json& s, const fs::path& dir, std::ostream&) {
    const auto grid = grid_of(s, preset_of(s).grid_1q);
    const auto ds = datagen::generate_1q_dataset(grid, gst::GstGateSet::single_qubit_set(), get<std::uint64_t>(s, "seed"),
                                                 readout_of(s));
    const std::string path = output_path(dir, s, "out");
    datagen::write_dataset(ds, path);
    return {{"examples", ds.size()}, {"grid", datagen::to_json(grid)}, {"file", path}};
}

json cmd_datagen_2q(const json& s, const fs::path& dir, std::ostream&) {
    const auto grid = grid_of(s, preset_of(s).grid_2q);
    const auto ds = datagen::generate_2q_dataset(grid, lambda_of(s, "lambda-i"), lambda_of(s, "lambda-j"),
                                                 get<std::uint64_t>(s, "seed"), readout_of(s));
    const std::string path = output_path(dir, s, "out");
    datagen::write_dataset(ds, path);
    return {{"examples", ds.size()}, {"grid", datagen::to_json(grid)}, {"file", path}};
}

json cmd_train(const json& s, const fs::path& dir, std::ostream&) {
    const auto ds = datagen::read_dataset(get<std::string>(s, "dataset"));
    const std::string network = has(s, "network") ? get<std::string>(s, "network")
                                                   : (ds.header.kind == "1q" ? "nn1q" : "nn2q");
    const auto preset = preset_of(s);
    mlp::MlpConfig config;
    if (network == "nn1q") {
        config = preset.nn1q;
    } else if (network == "nn2q") {
        config = preset.nn2q;
    } else {
        throw InputError("unknown network '" + network + "' (expected nn1q or nn2q)");
    }
    if (has(s, "epochs")) config.epochs = get<int>(s, "epochs");
    if (has(s, "learning-rate")) config.learning_rate = get<double>(s, "learning-rate");
    if (config.input_dim != ds.header.feature_dim || config.output_dim != ds.header.label_dim) {
        throw SchemaError("dataset of kind " + ds.header.kind + " does not fit " + config.name);
    }
    const std::uint64_t seed = get<std::uint64_t>(s, "seed");
    const auto result = mlp::train(config, ds, seed);
    const std::string model_path = output_path(dir, s, "out");
    mlp::save_model(result.model, model_path);
    const std::string loss_path = output_path(dir, s, "losses");
    std::ofstream losses(loss_path);
    if (!losses) throw IoError("cannot write " + loss_path);
    losses << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < result.train_loss.size(); ++e) {
        losses << e << ',' << json(result.train_loss[e]).dump() << ','
               << (e < result.val_loss.size() ? json(result.val_loss[e]).dump() : "") << '\n';
    }
    const auto summary = pipeline::summarize(result.model, ds, seed, &result);
    return {{"network", config.name},
            {"model", model_path},
            {"losses", loss_path},
            {"final_train_loss", summary.final_train_loss},
            {"final_val_loss", summary.final_val_loss},
            {"val_mse_per_output", summary.val_mse_per_output}};
}

json cmd_evaluate(const json& s, const fs::path& dir, std::ostream&) {
    const auto model = mlp::load_model(get<std::string>(s, "model"));
    const auto ds = datagen::read_dataset(get<std::string>(s, "dataset"));
    const auto eval = mlp::evaluate(model, ds);
    const std::vector<std::string> names =
        model.config.output_dim == 4 ? std::vector<std::string>{"lambda_d", "lambda_a", "lambda_f", "lambda_r"}
                                     : std::vector<std::string>{"zeta"};
    const std::string path = output_path(dir, s, "out");
    mlp::write_pairs_csv(eval, names, path);
    json mse = json::object();
    for (std::size_t k = 0; k < eval.mse_per_output.size(); ++k) {
        mse[k < names.size() ? names[k] : "y" + std::to_string(k)] = eval.mse_per_output[k];
    }
    return {{"examples", ds.size()}, {"mse", mse}, {"pairs", path}};
}

json cmd_pipeline(const json& s, const fs::path& dir, std::ostream&) {
    pipeline::PipelineConfig config = preset_of(s);
    config.master_seed = get<std::uint64_t>(s, "seed");
    config.readout = readout_of(s);
    if (has(s, "hw-shots-1q")) config.hw_shots_1q = get<std::int64_t>(s, "hw-shots-1q");
    if (has(s, "hw-shots-2q")) config.hw_shots_2q = get<std::int64_t>(s, "hw-shots-2q");
    if (has(s, "nn1q-epochs")) config.nn1q.epochs = get<int>(s, "nn1q-epochs");
    if (has(s, "nn2q-epochs")) config.nn2q.epochs = get<int>(s, "nn2q-epochs");
    config.work_dir = output_path(dir, s, "work-dir");
    config.resume = has(s, "resume") && get<bool>(s, "resume");

    std::unique_ptr<Executor> exec;
    if (has(s, "synthetic-truth")) {
        const auto truth = channels::load_gth_model(get<std::string>(s, "synthetic-truth"));
        config.qubits = truth.qubit_ids;
        exec = std::make_unique<SyntheticHardware>(SyntheticHardware::from_model(truth, config.readout));
    } else if (has(s, "counts")) {
        auto replay = std::make_unique<ReplayExecutor>();
        for (const auto& path : get<std::vector<std::string>>(s, "counts")) replay->add_file(path);
        exec = std::move(replay);
    } else {
        throw InputError("pipeline needs --synthetic-truth or --counts");
    }
    if (has(s, "qubits")) {
        const auto q = get<std::vector<int>>(s, "qubits");
        if (q.size() != 2) throw InputError("--qubits must name exactly two qubits");
        config.qubits = {q[0], q[1]};
    }
    std::optional<mlp::MlpModel> nn1q;
    if (has(s, "nn1q")) nn1q = mlp::load_model(get<std::string>(s, "nn1q"), config.nn1q);

    const auto report = pipeline::run_gth_pipeline(*exec, config, nn1q);
    const std::string model_path = output_path(dir, s, "out");
    channels::save_gth_model(report.model, model_path);
    return {{"model", model_path}, {"pipeline", pipeline::to_json(report)}};
}

json cmd_emulate(const json& s, const fs::path& dir, std::ostream&) {
    const auto circuit = qcore::circuit_from_json(read_json(get<std::string>(s, "circuit")));
    const auto model = model_of(s);
    std::optional<channels::NoiseModel> noise;
    if (model) {
        if (circuit.n_qubits == 1) {
            noise = channels::NoiseModel::single(model->lambda_i, readout_of(s));
        } else {
            noise = model->to_noise_model(readout_of(s));
        }
    }
    const auto rho = noise ? channels::noisy_execute(circuit, *noise) : qcore::simulate(circuit);
    const auto probs = qcore::probabilities(rho);
    json p = json::object();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        p[qcore::bitstring(static_cast<std::uint32_t>(i), circuit.n_qubits)] = probs[i];
    }
    json result = {{"circuit", circuit.label}, {"noise_model", model ? channels::to_json(*model) : json()},
                   {"probabilities", p}};
    if (!(has(s, "exact") && get<bool>(s, "exact"))) {
        const SimulatorExecutor exec = noise ? SimulatorExecutor(*noise) : SimulatorExecutor();
        const auto counts = exec.run(circuit, {}, get<std::int64_t>(s, "shots"), get<std::uint64_t>(s, "seed"));
        result["shots"] = counts.shots();
        result["counts"] = counts.histogram;
    }
    const std::string path = output_path(dir, s, "out");
    write_json(result, path);
    return {{"file", path}};
}

struct ChemSetup {
    chem::PauliHamiltonian h;
    chem::AnsatzVariant variant;
    std::optional<channels::NoiseModel> noise;
    std::unique_ptr<Executor> exec;
    bool exact;
};

ChemSetup chem_setup(const json& s) {
    ChemSetup c;
    c.h = chem::h2_hamiltonian(get<double>(s, "offset"));
    c.variant = chem::ansatz_variant_from_string(get<std::string>(s, "ansatz"));
    if (const auto model = model_of(s)) c.noise = model->to_noise_model(readout_of(s));
    c.exec = c.noise ? std::make_unique<SimulatorExecutor>(*c.noise) : std::make_unique<SimulatorExecutor>();
    c.exact = has(s, "exact") && get<bool>(s, "exact");
    return c;
}

json cmd_chem_sweep(const json& s, const fs::path& dir, std::ostream&) {
    const ChemSetup c = chem_setup(s);
    const auto thetas = chem::default_thetas(get<int>(s, "points"));
    const auto result = c.exact ? chem::exact_sweep(c.noise, thetas, c.h, c.variant)
                                : chem::sweep(*c.exec, thetas, get<std::int64_t>(s, "shots"),
                                              get<std::uint64_t>(s, "seed"), c.h, c.variant);
    const std::string path = output_path(dir, s, "out");
    chem::write_sweep_csv(result, path);
    std::size_t best = 0;
    for (std::size_t k = 0; k < result.points.size(); ++k) {
        if (result.points[k].energy < result.points[best].energy) best = k;
    }
    return {{"points", result.points.size()},
            {"executor", result.executor},
            {"min_theta", result.points[best].theta},
            {"min_energy", result.points[best].energy},
            {"file", path}};
}

json cmd_chem_opt(const json& s, const fs::path&, std::ostream&) {
    const ChemSetup c = chem_setup(s);
    const double tol = get<double>(s, "tolerance");
    const auto r = c.exact ? chem::optimize_theta_exact(c.noise, tol, c.h, c.variant)
                           : chem::optimize_theta(*c.exec, get<std::int64_t>(s, "shots"),
                                                  get<std::uint64_t>(s, "seed"), tol, c.h, c.variant);
    return {{"theta", r.theta},
            {"energy", r.energy},
            {"evaluations", r.evaluations},
            {"ground_energy", c.h.ground_energy()},
            {"gate_count", chem::ucc_circuit(r.theta, {qcore::Basis::kZ, qcore::Basis::kZ}, c.variant).ops.size()}};
}

json cmd_heatmap(const json& s, const fs::path& dir, std::ostream&) {
    const int steps = get<int>(s, "steps");
    if (steps < 2) throw InputError("--steps must be >= 2");
    const std::vector<std::pair<std::string, qcore::GateOp>> gates = {
        {"identity", qcore::GateOp::prx(0, 0.0, 0.0)},
        {"prx(pi/2,pi/2)", qcore::GateOp::prx(0, std::numbers::pi / 2.0, std::numbers::pi / 2.0)}};
    const std::vector<std::pair<char, double>> channels_span = {{'d', 1.0}, {'a', 1.0}, {'f', 1.0}, {'r', 0.5}};
    const std::string path = output_path(dir, s, "out");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "gate,channel,lambda,matrix,row,col,value\n";
    std::size_t rows = 0;
    for (const auto& [gate_name, gate] : gates) {
        gst::GstGateSet set;
        set.n_qubits = 1;
        set.gates = {gate};
        for (const auto& [ch, span] : channels_span) {
            for (int k = 0; k < steps; ++k) {
                const double v = span * k / (steps - 1);
                channels::LambdaParams l;
                (ch == 'd' ? l.d : ch == 'a' ? l.a : ch == 'f' ? l.f : l.r) = v;
                const auto o = gst::exact_gst(channels::NoiseModel::single(l, readout_of(s)), set, 1);
                const auto emit = [&](const char* name, const Eigen::MatrixXd& m) {
                    for (Eigen::Index r = 0; r < m.rows(); ++r) {
                        for (Eigen::Index c = 0; c < m.cols(); ++c) {
                            out << gate_name << ',' << ch << ',' << json(v).dump() << ',' << name << ',' << r << ','
                                << c << ',' << json(m(r, c)).dump() << '\n';
                            ++rows;
                        }
                    }
                };
                emit("g", o.g);
                emit("U", o.u_list.front());
            }
        }
    }
    if (!out) throw IoError("write failed for " + path);
    return {{"rows", rows}, {"file", path}};
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kInput: return kInputError;
        case ErrorKind::kDimension: return kDimensionError;
        case ErrorKind::kSchema: return kSchemaError;
        case ErrorKind::kIo: return kIoError;
        case ErrorKind::kCoverage: return kCoverageError;
        case ErrorKind::kTraining: return kTrainingError;
        case ErrorKind::kInternal: return kInternalError;
    }
    return kUnknownError;
}

int fail(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << '\n';
    return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app("Noisy quantum emulators from gate set tomography data", "gthemu");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "JSON settings file; flags override it");
    app.add_option("--out-dir", out_dir, "directory for outputs and report.json");

    const json common = {{"seed", 20240601}, {"readout", "per-gate"}};
    const auto with = [&](json extra) {
        json d = common;
        d.update(extra);
        return d;
    };
    std::vector<std::unique_ptr<Command>> commands;
    const auto add = [&](const std::string& name, const std::string& desc, json defaults) -> Command& {
        commands.push_back(std::make_unique<Command>(app, name, desc, with(std::move(defaults))));
        Command& c = *commands.back();
        c.opt("seed", Kind::kInteger, "master seed").opt("readout", Kind::kString, "per-gate or terminal");
        return c;
    };

    add("gst-export", "write the GST circuit batch for hardware execution", {{"n-qubits", 1}, {"out", "gst_circuits.json"}})
        .opt("n-qubits", Kind::kInteger, "1 (fifteen PRx gates) or 2 (CZ)")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_gst_export);
    add("gst-simulate", "run the GST batch on a synthetic device and write hardware-format counts",
        {{"n-qubits", 1}, {"out", "counts.json"}})
        .opt("n-qubits", Kind::kInteger, "1 or 2")
        .opt("truth", Kind::kString, "GthNoiseModel JSON planted in the device (noiseless if absent)")
        .opt("qubits", Kind::kIntegers, "device qubits, comma separated")
        .opt("shots", Kind::kInteger, "shots per circuit (default 10000 for 1q, 1000 for 2q)")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_gst_simulate);
    add("gst-ingest", "turn a counts-import document into a GST outcome", {{"seed", 0}, {"out", "gst_outcome.json"}})
        .opt("counts", Kind::kString, "counts-import JSON")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_gst_ingest);
    add("datagen-1q", "simulate labelled single-qubit GST data",
        {{"preset", "paper-scale"}, {"out", "dataset_1q.jsonl"}})
        .opt("preset", Kind::kString, "paper-scale or desk-scale")
        .opt("lambda-start", Kind::kNumber, "grid start")
        .opt("lambda-stop", Kind::kNumber, "grid stop (exclusive)")
        .opt("lambda-step", Kind::kNumber, "grid step")
        .opt("shots", Kind::kInteger, "shots per circuit")
        .opt("repeats", Kind::kInteger, "GST repetitions per grid point")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_datagen_1q);
    add("datagen-2q", "simulate labelled two-qubit GST data for a fixed lambda pair",
        {{"preset", "paper-scale"}, {"out", "dataset_2q.jsonl"}})
        .opt("preset", Kind::kString, "paper-scale or desk-scale")
        .opt("lambda-i", Kind::kNumbers, "d,a,f,r of the first qubit")
        .opt("lambda-j", Kind::kNumbers, "d,a,f,r of the second qubit")
        .opt("zeta-start", Kind::kNumber, "grid start")
        .opt("zeta-stop", Kind::kNumber, "grid stop (exclusive)")
        .opt("zeta-step", Kind::kNumber, "grid step")
        .opt("shots", Kind::kInteger, "shots per circuit")
        .opt("repeats", Kind::kInteger, "GST repetitions per grid point")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_datagen_2q);
    add("train", "train NN-1Q or NN-2Q on a dataset",
        {{"preset", "paper-scale"}, {"out", "model.json"}, {"losses", "losses.csv"}})
        .opt("dataset", Kind::kString, "dataset JSONL")
        .opt("network", Kind::kString, "nn1q or nn2q (default from the dataset kind)")
        .opt("preset", Kind::kString, "hyperparameter preset")
        .opt("epochs", Kind::kInteger, "training epochs")
        .opt("learning-rate", Kind::kNumber, "Adam learning rate")
        .opt("out", Kind::kString, "model file")
        .opt("losses", Kind::kString, "per-epoch loss CSV")
        .handler(cmd_train);
    add("evaluate", "score a model on a dataset and write predicted/true pairs", {{"out", "pairs.csv"}})
        .opt("model", Kind::kString, "model JSON")
        .opt("dataset", Kind::kString, "dataset JSONL")
        .opt("out", Kind::kString, "pairs CSV")
        .handler(cmd_evaluate);
    add("pipeline", "build a GthNoiseModel end to end",
        {{"preset", "paper-scale"}, {"work-dir", "work"}, {"out", "gth_model.json"}})
        .opt("preset", Kind::kString, "paper-scale or desk-scale")
        .opt("synthetic-truth", Kind::kString, "GthNoiseModel JSON planted in a synthetic device")
        .opt("counts", Kind::kStrings, "counts-import files from hardware, comma separated")
        .opt("qubits", Kind::kIntegers, "device qubit pair i,j")
        .opt("hw-shots-1q", Kind::kInteger, "device shots for 1-qubit GST")
        .opt("hw-shots-2q", Kind::kInteger, "device shots for 2-qubit GST")
        .opt("nn1q", Kind::kString, "pretrained NN-1Q model; skips the 1q dataset and training")
        .opt("nn1q-epochs", Kind::kInteger, "NN-1Q epochs")
        .opt("nn2q-epochs", Kind::kInteger, "NN-2Q epochs")
        .opt("work-dir", Kind::kString, "directory for intermediate artifacts")
        .opt("resume", Kind::kFlag, "reuse artifacts found in the work directory")
        .opt("out", Kind::kString, "final model file")
        .handler(cmd_pipeline);
    add("emulate", "run a circuit file under a GthNoiseModel",
        {{"shots", 10000}, {"out", "emulate.json"}})
        .opt("circuit", Kind::kString, "circuit JSON")
        .opt("model", Kind::kString, "GthNoiseModel JSON (noiseless if absent)")
        .opt("shots", Kind::kInteger, "shots")
        .opt("exact", Kind::kFlag, "probabilities only, no sampling")
        .opt("out", Kind::kString, "output file")
        .handler(cmd_emulate);
    const json chem_defaults = {{"shots", 10000}, {"offset", 0.0}, {"ansatz", "compact"}};
    auto chem_opts = [](Command& c) -> Command& {
        return c.opt("model", Kind::kString, "GthNoiseModel JSON (noiseless if absent)")
            .opt("shots", Kind::kInteger, "shots per circuit")
            .opt("offset", Kind::kNumber, "energy offset in Hartree added to every energy")
            .opt("ansatz", Kind::kString, "compact or generic")
            .opt("exact", Kind::kFlag, "infinite-shot expectations");
    };
    json sweep_defaults = chem_defaults;
    sweep_defaults.update({{"points", chem::kDefaultSweepPoints}, {"out", "sweep.csv"}});
    chem_opts(add("chem-sweep", "H2 energy over a theta grid", sweep_defaults))
        .opt("points", Kind::kInteger, "grid points over [-pi, pi]")
        .opt("out", Kind::kString, "sweep CSV")
        .handler(cmd_chem_sweep);
    json opt_defaults = chem_defaults;
    opt_defaults.update({{"tolerance", 1e-4}});
    chem_opts(add("chem-opt", "minimise the H2 energy over theta", opt_defaults))
        .opt("tolerance", Kind::kNumber, "golden-section bracket width")
        .handler(cmd_chem_opt);
    add("heatmap", "exact GST matrices while one noise parameter sweeps its range",
        {{"steps", 11}, {"out", "heatmap.csv"}})
        .opt("steps", Kind::kInteger, "values per channel")
        .opt("out", Kind::kString, "heatmap CSV")
        .handler(cmd_heatmap);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, "usage", e.what(), kUsage);
    }

    const Command* selected = nullptr;
    for (const auto& c : commands) {
        if (c->parsed()) selected = c.get();
    }
    if (selected == nullptr) return fail(err, "usage", "no subcommand given", kUsage);

    try {
        const json file = config_path.empty() ? json::object() : read_json(config_path);
        if (!file.is_object()) throw SchemaError(config_path + ": settings file must hold a JSON object");
        const json settings = selected->resolve(file);
        fs::create_directories(out_dir);
        const json outputs = selected->handle()(settings, out_dir, out);
        const json report = {{"command", selected->name()},
                             {"version", kVersion},
                             {"config", settings},
                             {"outputs", outputs}};
        write_json(report, (fs::path(out_dir) / "report.json").string());
        out << outputs.dump() << '\n';
        return kOk;
    } catch (const Error& e) {
        return fail(err, to_string(e.kind()), e.what(), exit_code_for(e.kind()));
    } catch (const fs::filesystem_error& e) {
        return fail(err, "io", e.what(), kIoError);
    } catch (const std::exception& e) {
        return fail(err, "unknown", e.what(), kUnknownError);
    }
}

}  // namespace gthemu::cli
