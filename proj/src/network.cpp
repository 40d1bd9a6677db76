#include "filanet/network.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "filanet/learning.hpp"

namespace filanet {

double hidden_sum(std::span<const std::uint8_t> column, const SummationWeights& w) {
    if (column.size() != w.weights.size()) {
        throw DataError("hidden_sum: column has " + std::to_string(column.size()) +
                        " pixels, weight vector has " + std::to_string(w.weights.size()));
    }
    double s = w.bias;
    for (std::size_t i = 0; i < column.size(); ++i) {
        s += w.weights[i] * column[i];
    }
    return s;
}

double normalize_index(int j, int q) {
    if (j < 0 || j >= q) {
        throw DataError("scan index " + std::to_string(j) + " out of range 0.." +
                        std::to_string(q - 1));
    }
    if (q == 1) return 0.0;
    return (2.0 * (j + 1) - (q + 1)) / (q - 1);
}

double background_eval(const BackgroundCoefficients& c, int j, int q) {
    const double t = normalize_index(j, q);
    return c.c0 + t * (c.c1 + t * c.c2);
}

bool output_decide(double s, double u, const OutputWeights& w, double scale) {
    if (!(scale > 0.0)) {
        throw DataError("feature scale must be positive");
    }
    return w.ws * (s / scale) + w.wu * (u / scale) >= w.w0;
}

DetectionMask forward(const ImageFragment& image, const ModelWeights& model,
                      const ForwardOptions& opts) {
    const WindowConfig& cfg = model.window;
    const ColumnMatrix cols = build_columns(image, cfg);
    const int q = cols.cols();

    std::vector<double> s(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
        s[static_cast<std::size_t>(j)] = hidden_sum(cols.column(j), model.summation);
    }

    // The background trend belongs to the image, not the model, so by default
    // it is re-estimated here; the flag freezes the trained coefficients.
    BackgroundCoefficients bg = model.background;
    if (model.bg_refit) {
        const FitReport fit =
            opts.robust_refit
                ? fit_background_robust(s, bg.degree, opts.huber_delta, opts.huber_max_iters)
                : fit_background(s, bg.degree);
        bg = fit.coefficients;
    }

    std::vector<std::uint8_t> labels(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
        const double u = background_eval(bg, j, q);
        labels[static_cast<std::size_t>(j)] =
            output_decide(s[static_cast<std::size_t>(j)], u, model.output,
                          model.feature_scale)
                ? 1
                : 0;
    }

    const int n = image.height();
    const int m = image.width();
    return DetectionMask{LabelMask(n - cfg.k + 1, m - cfg.k + 1, std::move(labels)),
                         cfg.offset()};
}

void save_model(const ModelWeights& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["k"] = model.window.k;
    j["summation_bias"] = model.summation.bias;
    j["summation_weights"] = model.summation.weights;
    j["bg_degree"] = model.background.degree;
    j["bg_c0"] = model.background.c0;
    j["bg_c1"] = model.background.c1;
    j["bg_c2"] = model.background.c2;
    j["bg_refit"] = model.bg_refit;
    j["out_w0"] = model.output.w0;
    j["out_ws"] = model.output.ws;
    j["out_wu"] = model.output.wu;
    j["feature_scale"] = model.feature_scale;

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    out << j.dump(2) << "\n";
    if (!out) {
        throw DataError(path.string() + ": write failed");
    }
}

ModelWeights load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(path.string() + ": cannot open file");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": invalid model JSON: " + e.what());
    }

    try {
        const int k = j.at("k").get<int>();
        ModelWeights model{
            WindowConfig(k),
            SummationWeights{j.at("summation_bias").get<double>(),
                             j.at("summation_weights").get<std::vector<double>>()},
            BackgroundCoefficients{j.at("bg_degree").get<int>(), j.at("bg_c0").get<double>(),
                                   j.at("bg_c1").get<double>(), j.at("bg_c2").get<double>()},
            j.at("bg_refit").get<bool>(),
            OutputWeights{j.at("out_w0").get<double>(), j.at("out_ws").get<double>(),
                          j.at("out_wu").get<double>()},
            j.at("feature_scale").get<double>()};
        if (model.summation.weights.size() != static_cast<std::size_t>(model.window.r())) {
            throw DataError(path.string() + ": summation_weights length " +
                            std::to_string(model.summation.weights.size()) +
                            " does not match k*k = " + std::to_string(model.window.r()));
        }
        if (model.background.degree != 1 && model.background.degree != 2) {
            throw DataError(path.string() + ": bg_degree must be 1 or 2");
        }
        if (!(model.feature_scale > 0.0)) {
            throw DataError(path.string() + ": feature_scale must be positive");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": invalid model JSON: " + e.what());
    }
}

} // namespace filanet
