#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "filanet/image.hpp"
#include "filanet/network.hpp"
#include "filanet/windowing.hpp"

namespace filanet {

struct FitReport {
    BackgroundCoefficients coefficients;
    double rms_residual = 0.0;
    int iterations = 1;       // number of least-squares solves
    bool reweighted = false;
};

/// Fit the background polynomial of the given degree (1 or 2) to the window
/// sums s by ordinary least squares over the normalized index t, minimizing
/// sum_j (u(t_j) - s_j)^2 via the (degree+1)-square normal equations.
/// Requires s.size() >= degree + 1.
FitReport fit_background(std::span<const double> s, int degree);

/// Iteratively reweighted least squares with Huber weights
/// w(res) = min(1, delta/|res|). The first solve is plain OLS; iteration
/// stops after max_iters solves or when no coefficient moves by more than
/// 1e-9. huber_delta <= 0 selects a per-iteration delta of 1.345 times the
/// MAD estimate of the residual scale.
FitReport fit_background_robust(std::span<const double> s, int degree,
                                double huber_delta = 0.0, int max_iters = 10);

struct PerceptronConfig {
    double learning_rate = 0.1;
    int max_epochs = 200;
    std::uint64_t shuffle_seed = 0;
    bool early_stop = true;      // stop once an epoch makes zero updates
};

/// One example per scan index: features (s_j/scale, u_j/scale) and the class
/// of the window's central pixel.
struct TrainingSet {
    std::vector<std::array<double, 2>> features;
    std::vector<std::uint8_t> targets;   // 1 = filament
    double scale = 0.0;
};

/// Assemble the training set for one labelled fragment: unit-weight window
/// sums, the OLS-fitted background of this image, targets from the mask at
/// each window center. Requires mask dimensions equal to the image's and at
/// least one interior pixel of each class.
TrainingSet build_training_set(const ImageFragment& image, const LabelMask& mask,
                               const WindowConfig& cfg, int degree);

struct PerceptronResult {
    OutputWeights weights;
    long error = 0;      // recognition error of the returned weights
    int epochs = 0;
};

/// Classic perceptron on the scaled features. Updates on a misclassified
/// example (f, t): ws += lr*(t-y)*f0, wu += lr*(t-y)*f1, w0 -= lr*(t-y).
/// Example order is reshuffled each epoch from shuffle_seed. Returns the
/// weight snapshot with the lowest recognition error (count of misclassified
/// examples) seen at any epoch boundary, so non-separable data yields the
/// best weights found rather than the last.
PerceptronResult train_perceptron(const TrainingSet& ts, const PerceptronConfig& cfg);

struct TrainOptions {
    int degree = 2;
    bool robust = false;
    double huber_delta = 0.0;    // <= 0: MAD-based
    int huber_max_iters = 10;
    bool bg_refit = true;        // stored in the resulting model
    PerceptronConfig perceptron;
};

struct TrainResult {
    ModelWeights model;
    long training_error = 0;     // recognition error on the training set
    double background_rms = 0.0;
};

/// Full training procedure for one labelled fragment: fit the background
/// neuron (robust if requested), fix unit summation weights, train the
/// output neuron, and bundle the model.
TrainResult train(const ImageFragment& image, const LabelMask& mask,
                  const WindowConfig& cfg, const TrainOptions& opts = {});

} // namespace filanet
