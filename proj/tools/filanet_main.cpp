#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "filanet/image_io.hpp"
#include "filanet/learning.hpp"
#include "filanet/metrics.hpp"
#include "filanet/network.hpp"
#include "filanet/synthgen.hpp"

namespace fs = std::filesystem;
using namespace filanet;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trimmed(const std::string& s) {
    const auto from = s.find_first_not_of(" \t\r");
    if (from == std::string::npos) return "";
    return s.substr(from, s.find_last_not_of(" \t\r") - from + 1);
}

/// Flat key=value config support. Reads the file named by --config and
/// appends one --key=value token per entry the command line does not already
/// set, so explicit flags win over the file.
std::vector<std::string> with_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::set<std::string> given;
    for (const std::string& t : args) {
        if (t.rfind("--", 0) == 0) given.insert(t.substr(2, t.find('=') - 2));
    }

    std::ifstream in(path);
    if (!in) throw DataError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trimmed(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("config file " + path + " line " + std::to_string(lineno) +
                            ": expected key=value");
        }
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty()) {
            throw DataError("config file " + path + " line " + std::to_string(lineno) +
                            ": empty key");
        }
        if (key == "config" || given.count(key)) continue;
        // a flag's negated twin on the command line also overrides its entry
        const std::string twin = key.rfind("no-", 0) == 0 ? key.substr(3) : "no-" + key;
        if (given.count(twin)) continue;
        args.push_back("--" + key + "=" + value);
    }
    return args;
}

struct TrainArgs {
    std::string image, mask, model_out;
    int k = 5;
    TrainOptions opts;
};

int run_train(const TrainArgs& a) {
    const ImageFragment image = load_image(a.image);
    const LabelMask mask = load_mask(a.mask);
    const WindowConfig cfg(a.k);
    const TrainResult res = train(image, mask, cfg, a.opts);
    save_model(res.model, a.model_out);
    std::cout << "training_error: " << res.training_error << "\n";
    char rms[40];
    std::snprintf(rms, sizeof(rms), "%.6f", res.background_rms);
    std::cout << "background_rms: " << rms << "\n";
    return 0;
}

struct DetectArgs {
    std::string image, model, mask_out;
    bool pad = false;
    int bg_refit_override = -1;   // -1: keep the model's setting
    ForwardOptions forward_opts;
};

int run_detect(const DetectArgs& a) {
    const ImageFragment image = load_image(a.image);
    ModelWeights model = load_model(a.model);
    if (a.bg_refit_override >= 0) model.bg_refit = a.bg_refit_override != 0;

    const DetectionMask detection = forward(image, model, a.forward_opts);
    if (a.pad) {
        save_mask(pad_mask(detection, image.height(), image.width()), a.mask_out);
    } else {
        save_mask(detection, a.mask_out);
    }
    long filament_pixels = 0;
    for (const auto v : detection.labels.labels()) filament_pixels += v;
    std::cout << "filament_pixels: " << filament_pixels << "\n";
    return 0;
}

struct EvalArgs {
    std::string pred, truth;
    int k = 5;
};

// The ground truth for a predicted mask: a file of the same name, or the
// synth naming convention <stem>_mask<ext> when the truth directory holds
// image/mask pairs.
fs::path truth_for(const fs::path& pred_file, const fs::path& truth_dir) {
    const fs::path masked =
        truth_dir / (pred_file.stem().string() + "_mask" + pred_file.extension().string());
    if (fs::exists(masked)) return masked;
    const fs::path same = truth_dir / pred_file.filename();
    if (fs::exists(same)) return same;
    throw DataError("no ground truth for " + pred_file.filename().string() + " in " +
                    truth_dir.string());
}

Scores eval_pair(const fs::path& pred_path, const fs::path& truth_path, const WindowConfig& cfg) {
    const LabelMask pred = load_mask(pred_path);
    const LabelMask truth = load_mask(truth_path);
    return score(DetectionMask{pred, cfg.offset()}, truth, cfg);
}

int run_eval(const EvalArgs& a) {
    const WindowConfig cfg(a.k);
    std::cout << csv_header() << "\n";

    if (!fs::is_directory(a.pred)) {
        const Scores s = eval_pair(a.pred, a.truth, cfg);
        std::cout << csv_row(fs::path(a.pred).stem().string(), s) << "\n";
        return 0;
    }

    if (!fs::is_directory(a.truth)) {
        throw DataError("--pred is a directory, so --truth must be one too");
    }
    std::vector<fs::path> preds;
    for (const auto& entry : fs::directory_iterator(a.pred)) {
        if (entry.is_regular_file()) preds.push_back(entry.path());
    }
    std::sort(preds.begin(), preds.end());
    if (preds.empty()) {
        throw DataError("prediction directory " + a.pred + " is empty");
    }

    std::vector<Scores> all;
    for (const fs::path& p : preds) {
        const Scores s = eval_pair(p, truth_for(p, a.truth), cfg);
        std::cout << csv_row(p.stem().string(), s) << "\n";
        all.push_back(s);
    }
    std::cout << csv_mean_row(all) << "\n";
    return 0;
}

struct SynthArgs {
    std::string out;
    int count = 1;
    SynthParams base;
    CorpusRanges ranges;
    std::uint64_t seed = 0;
};

void write_manifest(const fs::path& path, const SynthArgs& a,
                    const std::vector<CorpusItem>& items) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path.string());

    out << "filanet corpus manifest\n";
    out << "count " << items.size() << "\n";
    out << "height " << a.base.height << "\n";
    out << "width " << a.base.width << "\n";
    out << "b0 " << fmt(a.base.b0) << "\n";
    out << "noise_sigma " << fmt(a.base.noise_sigma) << "\n";
    out << "seed " << a.seed << "\n";
    const CorpusRanges& r = a.ranges;
    out << "slope_x_max " << fmt(r.slope_x_max) << "\n";
    out << "slope_y_max " << fmt(r.slope_y_max) << "\n";
    out << "curve_x_max " << fmt(r.curve_x_max) << "\n";
    out << "curve_y_max " << fmt(r.curve_y_max) << "\n";
    out << "filaments " << r.filaments_min << " " << r.filaments_max << "\n";
    out << "depth " << fmt(r.depth_min) << " " << fmt(r.depth_max) << "\n";
    out << "half_width " << fmt(r.half_width_min) << " " << fmt(r.half_width_max) << "\n";
    out << "length_frac " << fmt(r.length_frac_min) << " " << fmt(r.length_frac_max) << "\n";
    out << "polyline_points " << r.polyline_points << "\n";
    out << "margin_frac " << fmt(r.margin_frac) << "\n";

    for (std::size_t i = 0; i < items.size(); ++i) {
        const SynthParams& p = items[i].params;
        char id[32];
        std::snprintf(id, sizeof(id), "fragment_%03zu", i);
        out << "\nfragment " << id << "\n";
        out << "image " << id << ".pgm\n";
        out << "mask " << id << "_mask.pgm\n";
        out << "noise_seed " << p.seed << "\n";
        out << "bx " << fmt(p.bx) << "\n";
        out << "by " << fmt(p.by) << "\n";
        out << "bxx " << fmt(p.bxx) << "\n";
        out << "byy " << fmt(p.byy) << "\n";
        for (const Filament& f : p.filaments) {
            out << "filament half_width " << fmt(f.half_width) << " depth " << fmt(f.depth)
                << " points";
            for (const auto& [row, col] : f.polyline) {
                out << " " << fmt(row) << "," << fmt(col);
            }
            out << "\n";
        }
    }
    if (!out) throw DataError("failed while writing manifest " + path.string());
}

int run_synth(const SynthArgs& a) {
    const std::vector<CorpusItem> items = corpus(a.count, a.base, a.seed, a.ranges);

    const fs::path dir(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string());

    for (std::size_t i = 0; i < items.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof(id), "fragment_%03zu", i);
        save_image(items[i].image, dir / (std::string(id) + ".pgm"));
        save_mask(items[i].mask, dir / (std::string(id) + "_mask.pgm"));
    }
    write_manifest(dir / "manifest.txt", a, items);
    std::cout << "fragments: " << items.size() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-neuron filament detector: window sums, a least-squares "
                 "background trend, and a perceptron-trained threshold."};
    app.require_subcommand(1);
    if (argc >= 1) app.name(fs::path(argv[0]).filename().string());

    // inert by parse time; with_config_args() has already expanded the file
    std::string config_file;
    const char* config_help = "Flat key=value file; explicit flags override it";

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model on one labelled fragment");
    train_cmd->add_option("--config", config_file, config_help);
    train_cmd->add_option("--image", train_args.image, "Fragment PGM")->required();
    train_cmd->add_option("--mask", train_args.mask, "Ground-truth mask PGM/PBM")->required();
    train_cmd->add_option("--model-out", train_args.model_out, "Model JSON output")->required();
    train_cmd->add_option("--k", train_args.k, "Window side (odd)")->capture_default_str();
    train_cmd->add_option("--degree", train_args.opts.degree, "Background degree")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    train_cmd->add_flag("--robust", train_args.opts.robust, "Huber-reweighted background fit");
    train_cmd->add_option("--huber-delta", train_args.opts.huber_delta,
                          "Huber threshold; <= 0 picks it from the residual MAD")
        ->capture_default_str();
    train_cmd->add_flag("--bg-refit,!--no-bg-refit", train_args.opts.bg_refit,
                        "Refit the background on each detected image (default on)");
    train_cmd->add_option("--lr", train_args.opts.perceptron.learning_rate, "Perceptron rate")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train_args.opts.perceptron.max_epochs, "Epoch limit")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_args.opts.perceptron.shuffle_seed, "Shuffle seed")
        ->capture_default_str();

    DetectArgs detect_args;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Detect filaments with a trained model");
    detect_cmd->add_option("--config", config_file, config_help);
    detect_cmd->add_option("--image", detect_args.image, "Fragment PGM")->required();
    detect_cmd->add_option("--model", detect_args.model, "Model JSON")->required();
    detect_cmd->add_option("--mask-out", detect_args.mask_out, "Detection mask PGM")->required();
    detect_cmd->add_flag("--pad", detect_args.pad,
                         "Write a full-size mask with a non-filament border");
    detect_cmd->add_flag("--bg-refit{1},--no-bg-refit{0}", detect_args.bg_refit_override,
                         "Override the model's background-refit setting");
    detect_cmd->add_flag("--robust", detect_args.forward_opts.robust_refit,
                         "Huber-reweighted background refit");
    detect_cmd->add_option("--huber-delta", detect_args.forward_opts.huber_delta,
                           "Huber threshold; <= 0 picks it from the residual MAD")
        ->capture_default_str();

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score detection masks against ground truth");
    eval_cmd->add_option("--config", config_file, config_help);
    eval_cmd->add_option("--pred", eval_args.pred, "Predicted mask file or directory")->required();
    eval_cmd->add_option("--truth", eval_args.truth, "Truth mask file or directory")->required();
    eval_cmd->add_option("--k", eval_args.k, "Window side used for detection")
        ->capture_default_str();

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate synthetic labelled fragments");
    synth_cmd->add_option("--config", config_file, config_help);
    synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();
    synth_cmd->add_option("--count", synth_args.count, "Number of fragments")
        ->capture_default_str();
    synth_cmd->add_option("--height", synth_args.base.height, "Fragment height")
        ->capture_default_str();
    synth_cmd->add_option("--width", synth_args.base.width, "Fragment width")
        ->capture_default_str();
    synth_cmd->add_option("--b0", synth_args.base.b0, "Base brightness")->capture_default_str();
    synth_cmd->add_option("--noise-sigma", synth_args.base.noise_sigma, "Gaussian noise sigma")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_args.seed, "Master seed")->capture_default_str();
    synth_cmd->add_option("--slope-x-max", synth_args.ranges.slope_x_max,
                          "Max |horizontal slope|")
        ->capture_default_str();
    synth_cmd->add_option("--slope-y-max", synth_args.ranges.slope_y_max, "Max |vertical slope|")
        ->capture_default_str();
    synth_cmd->add_option("--curve-x-max", synth_args.ranges.curve_x_max,
                          "Max |horizontal curvature|")
        ->capture_default_str();
    synth_cmd->add_option("--curve-y-max", synth_args.ranges.curve_y_max,
                          "Max |vertical curvature|")
        ->capture_default_str();
    synth_cmd->add_option("--filaments-min", synth_args.ranges.filaments_min,
                          "Min filaments per fragment")
        ->capture_default_str();
    synth_cmd->add_option("--filaments-max", synth_args.ranges.filaments_max,
                          "Max filaments per fragment")
        ->capture_default_str();
    synth_cmd->add_option("--depth-min", synth_args.ranges.depth_min, "Min filament depth")
        ->capture_default_str();
    synth_cmd->add_option("--depth-max", synth_args.ranges.depth_max, "Max filament depth")
        ->capture_default_str();
    synth_cmd->add_option("--half-width-min", synth_args.ranges.half_width_min,
                          "Min filament half-width")
        ->capture_default_str();
    synth_cmd->add_option("--half-width-max", synth_args.ranges.half_width_max,
                          "Max filament half-width")
        ->capture_default_str();

    try {
        std::vector<std::string> args = with_config_args(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_args);
        if (detect_cmd->parsed()) return run_detect(detect_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (synth_cmd->parsed()) return run_synth(synth_args);
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
