#include "orient/data.hpp"
#include "orient/decoder.hpp"
#include "orient/error.hpp"
#include "orient/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateArgs {
    orient::SynthSpec spec;
    std::string shape = "wedge";
    bool mirror = false;
    bool raw = false;
    std::string out;
};

struct TrainArgs {
    std::string config;
    std::string head;
    std::size_t n_classes = 0;
    std::size_t n_tasks = 0;
    double nu = 0.0;
    double lr = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> hidden;
    std::size_t batch_size = 0;
    double momentum = 0.0;
    double weight_decay = 0.0;
    double init_std = 0.0;
    double max_grad_norm = 0.0;
    std::string train;
    std::string test;
    std::string out;
};

struct EvalArgs {
    std::string checkpoint;
    std::string data;
    std::string head;
    double nu = 0.0;
    double tolerance = 0.0;
    std::size_t max_iterations = 0;
    std::string out;
    std::string name = "eval";
};

struct SweepArgs {
    TrainArgs base;
    std::string cells;
    std::vector<std::size_t> n_list;
    std::vector<std::size_t> m_list;
};

struct DecodeArgs {
    std::string votes;
    double nu = orient::MeanShiftConfig{}.nu;
    double tolerance = orient::MeanShiftConfig{}.tolerance;
    std::size_t max_iterations = orient::MeanShiftConfig{}.max_iterations;
};

// Overrides that were given on the command line win over the config file.
void add_experiment_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--config", a.config, "experiment config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--head", a.head, "circle-huber | circle-angular | discrete-meanshift");
    cmd->add_option("--n-classes", a.n_classes, "discrete orientations per task (N)");
    cmd->add_option("--n-tasks", a.n_tasks, "staggered tasks (M)");
    cmd->add_option("--nu", a.nu, "von Mises concentration for mean-shift decoding");
    cmd->add_option("--lr", a.lr, "base learning rate");
    cmd->add_option("--iterations", a.iterations, "SGD iterations");
    cmd->add_option("--seed", a.seed, "init and shuffle seed");
    cmd->add_option("--hidden", a.hidden, "hidden layer widths")->delimiter(',');
    cmd->add_option("--batch-size", a.batch_size);
    cmd->add_option("--momentum", a.momentum);
    cmd->add_option("--weight-decay", a.weight_decay);
    cmd->add_option("--init-std", a.init_std);
    cmd->add_option("--max-grad-norm", a.max_grad_norm);
    cmd->add_option("--train", a.train, "training dataset");
    cmd->add_option("--test", a.test, "test dataset");
    cmd->add_option("--out", a.out, "output directory");
}

bool given(const CLI::App* cmd, const char* flag) { return cmd->count(flag) > 0; }

// Flat report text followed by the settings that produced it.
std::string report_text(const orient::EvalReport& report, const json& provenance) {
    return orient::to_key_value(report) + "# " + provenance.dump() + "\n";
}

orient::ExperimentConfig resolve_config(const CLI::App* cmd, const TrainArgs& a) {
    const orient::ExperimentConfig file =
        a.config.empty() ? orient::ExperimentConfig{} : orient::load_experiment_config(a.config);
    json j = orient::to_json(file);
    if (given(cmd, "--head")) j["head"] = a.head;
    if (given(cmd, "--n-classes")) j["scheme"]["n_classes"] = a.n_classes;
    if (given(cmd, "--n-tasks")) j["scheme"]["n_tasks"] = a.n_tasks;
    if (given(cmd, "--nu")) j["meanshift"]["nu"] = a.nu;
    if (given(cmd, "--lr")) j["train"]["learning_rate"] = a.lr;
    if (given(cmd, "--iterations")) j["train"]["iterations"] = a.iterations;
    if (given(cmd, "--seed")) j["train"]["seed"] = a.seed;
    if (given(cmd, "--batch-size")) j["train"]["batch_size"] = a.batch_size;
    if (given(cmd, "--momentum")) j["train"]["momentum"] = a.momentum;
    if (given(cmd, "--weight-decay")) j["train"]["weight_decay"] = a.weight_decay;
    if (given(cmd, "--max-grad-norm")) j["train"]["max_grad_norm"] = a.max_grad_norm;
    if (given(cmd, "--hidden")) j["network"]["hidden"] = a.hidden;
    if (given(cmd, "--init-std")) j["network"]["init_std"] = a.init_std;
    if (given(cmd, "--train")) j["data"]["train"] = a.train;
    if (given(cmd, "--test")) j["data"]["test"] = a.test;
    orient::ExperimentConfig c = orient::experiment_config_from_json(j);
    c.output_dir = given(cmd, "--out") ? a.out : file.output_dir;
    return c;
}

orient::Dataset load_required(const std::string& path, const char* role) {
    if (path.empty()) {
        throw orient::Error(orient::ErrorKind::invalid_config, std::string("no ") + role + " dataset given");
    }
    if (!fs::exists(path)) {
        throw orient::Error(orient::ErrorKind::io_error, std::string(role) + " dataset '" + path + "' not found");
    }
    return orient::load_dataset(path);
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

// --out names the run directory itself; otherwise a fresh one is made under output_dir.
fs::path run_directory(const CLI::App* cmd, const orient::ExperimentConfig& c) {
    fs::path dir = given(cmd, "--out") ? fs::path(c.output_dir)
                                       : fs::path(c.output_dir) / (timestamp() + "-" + orient::config_hash(c));
    fs::create_directories(dir);
    return dir;
}

int cmd_generate(const GenerateArgs& a) {
    orient::SynthSpec spec = a.spec;
    spec.shape = orient::parse_synth_shape(a.shape);
    spec.mean_subtract = !a.raw;
    orient::Dataset d = orient::generate_synthetic(spec);
    if (a.mirror) d = orient::mirror_augment(d);
    const fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    orient::save_dataset(d, out);
    json manifest{{"dataset", out.filename().string()},
                  {"samples", d.size()},
                  {"features", d.dim},
                  {"seed", spec.seed},
                  {"mirror", a.mirror},
                  {"spec",
                   {{"image_side", spec.image_side},
                    {"shape", orient::to_string(spec.shape)},
                    {"noise_std", spec.noise_std},
                    {"count", spec.count},
                    {"stratified", spec.stratified},
                    {"mean_subtract", spec.mean_subtract}}}};
    orient::write_json(out.string() + ".manifest.json", manifest);
    std::cout << "wrote " << d.size() << " samples (" << d.dim << " features) to " << out.string() << "\n";
    return 0;
}

int cmd_train(const CLI::App* cmd, const TrainArgs& a) {
    const orient::ExperimentConfig c = resolve_config(cmd, a);
    const orient::Dataset train_data = load_required(c.train_data, "training");
    const fs::path dir = run_directory(cmd, c);
    const json cj = orient::to_json(c);
    orient::write_json(dir / "config.json", cj);
    const orient::TrainOutcome trained = orient::run_training(c, train_data);
    orient::save_checkpoint(trained.checkpoint, dir / "checkpoint.json");
    orient::write_loss_log(dir / "loss.csv", trained.log, cj);
    std::cout << "trained " << orient::to_string(c.head) << " for " << trained.log.loss.size()
              << " iterations; loss " << trained.log.loss.front() << " -> " << trained.log.loss.back();
    if (trained.log.total_skipped) std::cout << " (" << trained.log.total_skipped << " degenerate samples skipped)";
    std::cout << "\nrun directory: " << dir.string() << "\n";
    if (!c.test_data.empty()) {
        const orient::Dataset test_data = load_required(c.test_data, "test");
        const auto outcome =
            orient::run_evaluation(trained.checkpoint.model, orient::head_setup(c), c.meanshift, test_data);
        json report = orient::eval_report_json(outcome, c, "checkpoint.json", c.test_data);
        orient::write_json(dir / "eval.json", report);
        report.erase("report");
        orient::write_text(dir / "eval.txt", report_text(outcome.report, report));
        orient::write_error_table(dir / "eval_errors.csv", test_data, outcome, report);
        std::cout << orient::to_key_value(outcome.report);
    }
    return 0;
}

int cmd_eval(const CLI::App* cmd, const EvalArgs& a) {
    if (!fs::exists(a.checkpoint)) {
        throw orient::Error(orient::ErrorKind::io_error, "checkpoint '" + a.checkpoint + "' not found");
    }
    const orient::Checkpoint ckpt = orient::load_checkpoint(a.checkpoint);
    orient::ExperimentConfig c = orient::config_from_checkpoint(ckpt);
    if (given(cmd, "--head") && orient::parse_head(a.head) != c.head) {
        throw orient::Error(orient::ErrorKind::invalid_config, "checkpoint was trained with head '" +
                                                                   std::string(orient::to_string(c.head)) +
                                                                   "', not '" + a.head + "'");
    }
    const bool decoder_flags = given(cmd, "--nu") || given(cmd, "--tolerance") || given(cmd, "--max-iterations");
    if (decoder_flags && c.head != orient::Head::discrete_meanshift) {
        throw orient::Error(orient::ErrorKind::invalid_config,
                            "mean-shift decoder flags given for head '" + std::string(orient::to_string(c.head)) + "'");
    }
    if (given(cmd, "--nu")) c.meanshift.nu = a.nu;
    if (given(cmd, "--tolerance")) c.meanshift.tolerance = a.tolerance;
    if (given(cmd, "--max-iterations")) c.meanshift.max_iterations = a.max_iterations;
    orient::validate(c.meanshift);

    const orient::Dataset data = load_required(a.data, "evaluation");
    const auto outcome = orient::run_evaluation(ckpt.model, orient::head_setup(c), c.meanshift, data);
    const fs::path dir = a.out.empty() ? fs::path(a.checkpoint).parent_path() : fs::path(a.out);
    if (!dir.empty()) fs::create_directories(dir);
    json report = orient::eval_report_json(outcome, c, fs::path(a.checkpoint).filename().string(), a.data);
    orient::write_json(dir / (a.name + ".json"), report);
    report.erase("report");
    orient::write_text(dir / (a.name + ".txt"), report_text(outcome.report, report));
    orient::write_error_table(dir / (a.name + "_errors.csv"), data, outcome, report);
    std::cout << orient::to_key_value(outcome.report);
    if (outcome.undecodable) std::cout << "undecodable = " << outcome.undecodable << "\n";
    return 0;
}

int cmd_sweep(const CLI::App* cmd, const SweepArgs& a) {
    orient::ExperimentConfig c = resolve_config(cmd, a.base);
    c.head = orient::Head::discrete_meanshift;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    if (!a.cells.empty()) {
        cells = orient::parse_cells(a.cells);
    } else {
        if (a.n_list.empty() || a.m_list.empty()) {
            throw orient::Error(orient::ErrorKind::invalid_config, "give --cells or both --n-list and --m-list");
        }
        for (std::size_t n : a.n_list) {
            for (std::size_t m : a.m_list) cells.emplace_back(n, m);
        }
    }
    const orient::Dataset train_data = load_required(c.train_data, "training");
    const orient::Dataset test_data = load_required(c.test_data, "test");
    const fs::path dir = run_directory(cmd, c);
    const auto results = orient::run_sweep(c, cells, train_data, test_data);
    const std::string table = orient::format_sweep_table(results);
    orient::write_json(dir / "config.json", orient::to_json(c));
    orient::write_text(dir / "sweep.txt", table + "# " + json{{"seed", c.train.seed}, {"config", orient::to_json(c)}}.dump() + "\n");
    orient::write_json(dir / "sweep.json", orient::sweep_json(results, c));
    std::cout << table;
    std::size_t failed = 0;
    for (const auto& cell : results) {
        if (!cell.report) {
            ++failed;
            std::cerr << "cell " << cell.n_classes << "x" << cell.n_tasks << " failed: " << cell.error << "\n";
        }
    }
    std::cout << "run directory: " << dir.string() << "\n";
    return failed ? 1 : 0;
}

// Vote file: one "angle,probability" pair per line; blank lines and '#' comments ignored.
orient::VoteSet read_votes(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw orient::Error(orient::ErrorKind::io_error, "cannot open vote file '" + path + "'");
    orient::VoteSet votes;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double angle = 0.0;
        double prob = 0.0;
        char comma = 0;
        if (!(ls >> angle >> comma >> prob) || comma != ',' || !(ls >> std::ws).eof()) {
            throw orient::ParseError(lineno, "expected 'angle,probability' in '" + path + "'");
        }
        votes.orientations.push_back(orient::canonicalize(angle).degrees());
        votes.probabilities.push_back(prob);
    }
    return votes;
}

int cmd_decode(const DecodeArgs& a) {
    orient::MeanShiftConfig config;
    config.nu = a.nu;
    config.tolerance = a.tolerance;
    config.max_iterations = a.max_iterations;
    const orient::Angle theta = orient::decode_meanshift(read_votes(a.votes), config);
    std::ostringstream os;
    os.precision(17);
    os << theta.degrees();
    std::cout << os.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orient: continuous orientation estimation experiments"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "render a synthetic dataset");
    generate->add_option("--count", gen.spec.count, "number of images");
    generate->add_option("--side", gen.spec.image_side, "image side in pixels");
    generate->add_option("--seed", gen.spec.seed);
    generate->add_option("--noise", gen.spec.noise_std, "Gaussian pixel noise std");
    generate->add_option("--shape", gen.shape, "wedge | ellipse_with_notch");
    generate->add_flag("--stratified", gen.spec.stratified, "one angle per equal-width bin");
    generate->add_flag("--mirror", gen.mirror, "append left-right mirrored copies");
    generate->add_flag("--raw", gen.raw, "skip per-feature mean subtraction");
    generate->add_option("--out", gen.out, "dataset file")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "train one head");
    add_experiment_flags(train, tr);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval->add_option("checkpoint", ev.checkpoint)->required();
    eval->add_option("dataset", ev.data)->required();
    eval->add_option("--head", ev.head, "expected head; mismatch is an error");
    eval->add_option("--nu", ev.nu);
    eval->add_option("--tolerance", ev.tolerance);
    eval->add_option("--max-iterations", ev.max_iterations);
    eval->add_option("--out", ev.out, "report directory (default: next to the checkpoint)");
    eval->add_option("--name", ev.name, "report file stem");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "train and evaluate a grid of (N, M) cells");
    add_experiment_flags(sweep, sw.base);
    sweep->add_option("--cells", sw.cells, "e.g. 8x1,8x3,8x9,72x1");
    sweep->add_option("--n-list", sw.n_list)->delimiter(',');
    sweep->add_option("--m-list", sw.m_list)->delimiter(',');

    DecodeArgs dc;
    auto* decode = app.add_subcommand("decode", "mean-shift decode a vote file");
    decode->add_option("votes", dc.votes)->required();
    decode->add_option("--nu", dc.nu);
    decode->add_option("--tolerance", dc.tolerance);
    decode->add_option("--max-iterations", dc.max_iterations);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) return cmd_generate(gen);
        if (*train) return cmd_train(train, tr);
        if (*eval) return cmd_eval(eval, ev);
        if (*sweep) return cmd_sweep(sweep, sw);
        if (*decode) return cmd_decode(dc);
    } catch (const orient::DivergenceError& e) {
        std::cerr << "error: " << e.what() << " (iteration " << e.iteration() << ")\n";
        return 1;
    } catch (const orient::Error& e) {
        std::cerr << "error [" << orient::to_string(e.kind()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
