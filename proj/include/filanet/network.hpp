#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "filanet/image.hpp"
#include "filanet/windowing.hpp"

namespace filanet {

/// Weights of the summation neuron: s = bias + dot(weights, window pixels).
/// The default configuration (unit weights, zero bias) makes s the plain sum
/// of the window.
struct SummationWeights {
    double bias = 0.0;
    std::vector<double> weights;

    static SummationWeights unit(int r) {
        return {0.0, std::vector<double>(static_cast<std::size_t>(r), 1.0)};
    }
};

double hidden_sum(std::span<const std::uint8_t> column, const SummationWeights& w);

/// Map a 0-based scan index onto t in [-1, 1]:
///   t = (2(j+1) - (q+1)) / (q-1),  t = 0 when q == 1.
/// The background polynomial is expressed in t rather than the raw index to
/// keep the normal equations well conditioned for large q.
double normalize_index(int j, int q);

/// Polynomial background trend over the normalized scan index:
///   u(t) = c0 + c1*t + c2*t^2,  with c2 = 0 for degree 1.
struct BackgroundCoefficients {
    int degree = 2;
    double c0 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

double background_eval(const BackgroundCoefficients& c, int j, int q);

/// Output neuron: class = filament iff ws*s' + wu*u' >= w0, where s' and u'
/// are the scaled features. The tie goes to filament.
struct OutputWeights {
    double w0 = 0.0;
    double ws = 0.0;
    double wu = 0.0;
};

bool output_decide(double s, double u, const OutputWeights& w, double scale);

/// The full three-neuron model plus the feature scaling constant.
/// feature_scale defaults to r*255, the largest possible window sum, so the
/// scaled features stay in [0, 1] regardless of window size.
///
/// bg_refit = true means detection refits the background coefficients on the
/// incoming image (the trend is image-specific); only the summation and
/// output weights transfer from training. With bg_refit = false the stored
/// coefficients are used as-is.
struct ModelWeights {
    WindowConfig window;
    SummationWeights summation;
    BackgroundCoefficients background;
    bool bg_refit = true;
    OutputWeights output;
    double feature_scale = 0.0;

    static double default_scale(const WindowConfig& cfg) {
        return static_cast<double>(cfg.r()) * 255.0;
    }
};

struct ForwardOptions {
    bool robust_refit = false;   // refit with Huber IRLS instead of plain OLS
    double huber_delta = 0.0;    // <= 0 selects the MAD-based delta
    int huber_max_iters = 10;
};

/// Run the network over every window of the image and classify each interior
/// pixel. The mask covers the (n-k+1)-by-(m-k+1) interior with offset k/2.
DetectionMask forward(const ImageFragment& image, const ModelWeights& model,
                      const ForwardOptions& opts = {});

/// Model file: flat JSON with fields {k, summation_bias, summation_weights,
/// bg_degree, bg_c0, bg_c1, bg_c2, bg_refit, out_w0, out_ws, out_wu,
/// feature_scale}; numbers keep full round-trip precision.
void save_model(const ModelWeights& model, const std::filesystem::path& path);
ModelWeights load_model(const std::filesystem::path& path);

} // namespace filanet
