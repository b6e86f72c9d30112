#include "orient/experiment.hpp"

#include "orient/error.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace orient {

using nlohmann::json;

namespace {

constexpr std::uint64_t kShuffleSalt = 0x9E3779B97F4A7C15ULL;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw Error(ErrorKind::invalid_config, "unknown key '" + key + "' in " + where);
        }
    }
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json train{{"batch_size", c.train.batch_size},
               {"momentum", c.train.momentum},
               {"weight_decay", c.train.weight_decay},
               {"learning_rate", c.train.learning_rate},
               {"iterations", c.train.iterations},
               {"seed", c.train.seed},
               {"lr_drop", nullptr},
               {"max_grad_norm", nullptr}};
    if (c.train.lr_drop) {
        train["lr_drop"] = {{"at_iteration", c.train.lr_drop->at_iteration}, {"factor", c.train.lr_drop->factor}};
    }
    if (c.train.max_grad_norm) train["max_grad_norm"] = *c.train.max_grad_norm;
    return json{{"head", to_string(c.head)},
                {"network", {{"hidden", c.hidden}, {"init_std", c.init_std}}},
                {"train", std::move(train)},
                {"scheme", {{"n_classes", c.n_classes}, {"n_tasks", c.n_tasks}}},
                {"huber_delta", c.huber_delta},
                {"meanshift",
                 {{"nu", c.meanshift.nu},
                  {"tolerance", c.meanshift.tolerance},
                  {"max_iterations", c.meanshift.max_iterations}}},
                {"data", {{"train", c.train_data}, {"test", c.test_data}}}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    try {
        reject_unknown(j, {"head", "network", "train", "scheme", "huber_delta", "meanshift", "data", "output_dir"},
                       "config");
        if (j.contains("head")) c.head = parse_head(j["head"].get<std::string>());
        if (j.contains("network")) {
            const json& n = j["network"];
            reject_unknown(n, {"hidden", "init_std"}, "network");
            c.hidden = n.value("hidden", c.hidden);
            c.init_std = n.value("init_std", c.init_std);
        }
        if (j.contains("train")) {
            const json& t = j["train"];
            reject_unknown(t, {"batch_size", "momentum", "weight_decay", "learning_rate", "iterations", "seed",
                               "lr_drop", "max_grad_norm"},
                           "train");
            c.train.batch_size = t.value("batch_size", c.train.batch_size);
            c.train.momentum = t.value("momentum", c.train.momentum);
            c.train.weight_decay = t.value("weight_decay", c.train.weight_decay);
            c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
            c.train.iterations = t.value("iterations", c.train.iterations);
            c.train.seed = t.value("seed", c.train.seed);
            if (t.contains("lr_drop") && !t["lr_drop"].is_null()) {
                c.train.lr_drop = LrDrop{t["lr_drop"].at("at_iteration").get<std::size_t>(),
                                         t["lr_drop"].at("factor").get<double>()};
            }
            if (t.contains("max_grad_norm") && !t["max_grad_norm"].is_null()) {
                c.train.max_grad_norm = t["max_grad_norm"].get<double>();
            }
        }
        if (j.contains("scheme")) {
            reject_unknown(j["scheme"], {"n_classes", "n_tasks"}, "scheme");
            c.n_classes = j["scheme"].value("n_classes", c.n_classes);
            c.n_tasks = j["scheme"].value("n_tasks", c.n_tasks);
        }
        c.huber_delta = j.value("huber_delta", c.huber_delta);
        if (j.contains("meanshift")) {
            const json& m = j["meanshift"];
            reject_unknown(m, {"nu", "tolerance", "max_iterations"}, "meanshift");
            c.meanshift.nu = m.value("nu", c.meanshift.nu);
            c.meanshift.tolerance = m.value("tolerance", c.meanshift.tolerance);
            c.meanshift.max_iterations = m.value("max_iterations", c.meanshift.max_iterations);
        }
        if (j.contains("data")) {
            reject_unknown(j["data"], {"train", "test"}, "data");
            c.train_data = j["data"].value("train", c.train_data);
            c.test_data = j["data"].value("test", c.test_data);
        }
        c.output_dir = j.value("output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("bad experiment config: ") + e.what());
    }
    validate(c.train);
    validate(c.meanshift);
    validate(head_setup(c));
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io_error, "cannot open config '" + path.string() + "'");
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, "config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return experiment_config_from_json(j);
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint32_t h = 2166136261u;
    for (unsigned char ch : to_json(config).dump()) {
        h ^= ch;
        h *= 16777619u;
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", h);
    return buf;
}

HeadSetup head_setup(const ExperimentConfig& config) {
    HeadSetup setup;
    setup.head = config.head;
    setup.huber_delta = config.huber_delta;
    if (config.head == Head::discrete_meanshift) setup.scheme = build_scheme(config.n_classes, config.n_tasks);
    return setup;
}

NetworkSpec network_spec(const ExperimentConfig& config, std::size_t input_dim) {
    NetworkSpec spec;
    spec.layer_sizes.push_back(input_dim);
    spec.layer_sizes.insert(spec.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
    spec.layer_sizes.push_back(head_setup(config).output_size());
    spec.init_std = config.init_std;
    validate(spec);
    return spec;
}

TrainOutcome run_training(const ExperimentConfig& config, const Dataset& train_data) {
    if (train_data.empty()) throw Error(ErrorKind::invalid_input, "training dataset is empty");
    const HeadSetup setup = head_setup(config);
    ModelState model = init_model(network_spec(config, train_data.dim), config.train.seed);
    TrainConfig tc = config.train;
    tc.seed = config.train.seed ^ kShuffleSalt;
    TrainResult result = train(std::move(model), train_data, setup, tc);
    return TrainOutcome{Checkpoint{std::move(result.model), config.train.seed, to_json(config)},
                        std::move(result.log)};
}

EvalOutcome run_evaluation(const ModelState& model, const HeadSetup& setup, const MeanShiftConfig& meanshift,
                           const Dataset& data) {
    if (data.empty()) throw Error(ErrorKind::invalid_input, "evaluation dataset is empty");
    if (data.dim != model.input_size()) {
        throw Error(ErrorKind::invalid_config, "dataset has " + std::to_string(data.dim) +
                                                   " features, checkpoint expects " +
                                                   std::to_string(model.input_size()));
    }
    if (setup.output_size() != model.output_size()) {
        throw Error(ErrorKind::invalid_config, "checkpoint output size does not match the selected head");
    }
    const Predictions preds = predict(model, data, setup, meanshift);
    EvalOutcome out;
    std::vector<Angle> pred_angles;
    std::vector<Angle> truths;
    pred_angles.reserve(data.size());
    truths.reserve(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
        if (!preds[j]) ++out.undecodable;
        pred_angles.push_back(preds[j].value_or(canonicalize(0.0)));
        truths.push_back(data.samples[j].angle);
        out.predictions.push_back(pred_angles.back().degrees());
    }
    out.errors = angular_errors(pred_angles, truths);
    out.report = evaluate_errors(out.errors);
    return out;
}

ExperimentConfig config_from_checkpoint(const Checkpoint& checkpoint) {
    if (!checkpoint.metadata.is_object() || checkpoint.metadata.empty()) {
        throw Error(ErrorKind::invalid_config, "checkpoint carries no experiment config");
    }
    return experiment_config_from_json(checkpoint.metadata);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::io_error, "cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) throw Error(ErrorKind::io_error, "write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_loss_log(const std::filesystem::path& path, const TrainLog& log, const json& config) {
    std::ostringstream os;
    os << "# config: " << config.dump() << '\n';
    os << "iteration,loss,skipped,learning_rate\n";
    char buf[128];
    for (std::size_t i = 0; i < log.loss.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%.17g\n", i, log.loss[i], log.skipped[i], log.learning_rate[i]);
        os << buf;
    }
    write_text(path, os.str());
}

void write_error_table(const std::filesystem::path& path, const Dataset& data, const EvalOutcome& outcome,
                       const json& metadata) {
    std::ostringstream os;
    os << "# config: " << metadata.dump() << '\n';
    os << "index,truth,prediction,error\n";
    char buf[128];
    for (std::size_t j = 0; j < outcome.errors.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", j, data.samples[j].angle.degrees(),
                      outcome.predictions[j], outcome.errors[j]);
        os << buf;
    }
    write_text(path, os.str());
}

json eval_report_json(const EvalOutcome& outcome, const ExperimentConfig& config, const std::string& checkpoint,
                      const std::string& dataset) {
    return json{{"report", to_json(outcome.report)},
                {"undecodable", outcome.undecodable},
                {"decoder",
                 {{"head", to_string(config.head)},
                  {"nu", config.meanshift.nu},
                  {"tolerance", config.meanshift.tolerance},
                  {"max_iterations", config.meanshift.max_iterations}}},
                {"checkpoint", checkpoint},
                {"dataset", dataset},
                {"seed", config.train.seed},
                {"config", to_json(config)}};
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& base,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                                 const Dataset& train_data, const Dataset& test_data) {
    std::vector<SweepCell> out;
    for (const auto& [n, m] : cells) {
        SweepCell cell{n, m, std::nullopt, {}};
        try {
            ExperimentConfig c = base;
            c.head = Head::discrete_meanshift;
            c.n_classes = n;
            c.n_tasks = m;
            const TrainOutcome trained = run_training(c, train_data);
            cell.report = run_evaluation(trained.checkpoint.model, head_setup(c), c.meanshift, test_data).report;
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
        out.push_back(std::move(cell));
    }
    return out;
}

std::string format_sweep_table(const std::vector<SweepCell>& cells) {
    auto row = [&](const std::string& name, auto value) {
        std::string line = name;
        line.resize(12, ' ');
        for (const auto& c : cells) {
            std::string v = value(c);
            if (v.size() < 10) v.insert(0, 10 - v.size(), ' ');
            line += " |" + v;
        }
        return line + "\n";
    };
    auto metric = [](auto get) {
        return [get](const SweepCell& c) -> std::string {
            if (!c.report) return "failed";
            return get(*c.report);
        };
    };
    std::string t;
    t += row("N", [](const SweepCell& c) { return std::to_string(c.n_classes); });
    t += row("M", [](const SweepCell& c) { return std::to_string(c.n_tasks); });
    t += row("MeanAE", metric([](const EvalReport& r) { return fmt("%.2f", r.mean_ae); }));
    t += row("MedianAE", metric([](const EvalReport& r) { return fmt("%.2f", r.median_ae); }));
    t += row("Acc-22.5", metric([](const EvalReport& r) { return fmt("%.1f", 100.0 * r.acc_22_5); }));
    t += row("Acc-45", metric([](const EvalReport& r) { return fmt("%.1f", 100.0 * r.acc_45); }));
    return t;
}

json sweep_json(const std::vector<SweepCell>& cells, const ExperimentConfig& base) {
    json arr = json::array();
    for (const auto& c : cells) {
        json cell{{"n_classes", c.n_classes}, {"n_tasks", c.n_tasks}};
        if (c.report) {
            cell["report"] = to_json(*c.report);
        } else {
            cell["error"] = c.error;
        }
        arr.push_back(std::move(cell));
    }
    return json{{"cells", std::move(arr)}, {"seed", base.train.seed}, {"config", to_json(base)}};
}

std::vector<std::pair<std::size_t, std::size_t>> parse_cells(const std::string& text) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        try {
            if (x == std::string::npos) throw std::invalid_argument("no x");
            std::size_t used_n = 0;
            std::size_t used_m = 0;
            const auto n = std::stoul(item.substr(0, x), &used_n);
            const auto m = std::stoul(item.substr(x + 1), &used_m);
            if (used_n != x || used_m != item.size() - x - 1) throw std::invalid_argument("trailing");
            out.emplace_back(n, m);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::invalid_config, "bad sweep cell '" + item + "' (expected NxM)");
        }
    }
    if (out.empty()) throw Error(ErrorKind::invalid_config, "sweep grid is empty");
    return out;
}

}  // namespace orient
