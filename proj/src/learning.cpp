#include "filanet/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace filanet {

namespace {

// Gaussian elimination with partial pivoting on the (degree+1)-square normal
// matrix. Extended precision keeps the projection invariants tight even for
// q around a million.
std::array<double, 3> solve_normal(std::array<std::array<long double, 3>, 3> a,
                                   std::array<long double, 3> b, int size) {
    for (int col = 0; col < size; ++col) {
        int pivot = col;
        for (int row = col + 1; row < size; ++row) {
            if (std::fabs(static_cast<double>(a[row][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = row;
            }
        }
        if (a[pivot][col] == 0.0L) {
            throw NumericError("singular normal matrix in background fit");
        }
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int row = col + 1; row < size; ++row) {
            const long double f = a[row][col] / a[col][col];
            for (int c = col; c < size; ++c) a[row][c] -= f * a[col][c];
            b[row] -= f * b[col];
        }
    }
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int row = size - 1; row >= 0; --row) {
        long double acc = b[row];
        for (int c = row + 1; c < size; ++c) acc -= a[row][c] * x[c];
        x[row] = static_cast<double>(acc / a[row][row]);
    }
    return x;
}

BackgroundCoefficients weighted_fit(std::span<const double> s, std::span<const double> w,
                                    int degree) {
    const int q = static_cast<int>(s.size());
    const int size = degree + 1;

    // Weighted moments of the basis {1, t, t^2} and of s against it.
    std::array<long double, 5> tm{};   // sum of w * t^p, p = 0..4
    std::array<long double, 3> sm{};   // sum of w * s * t^p, p = 0..2
    for (int j = 0; j < q; ++j) {
        const long double t = normalize_index(j, q);
        const long double wj = w.empty() ? 1.0L : static_cast<long double>(w[j]);
        const long double sj = s[j];
        long double tp = 1.0L;
        for (int p = 0; p <= 2 * degree; ++p) {
            tm[p] += wj * tp;
            if (p <= degree) sm[p] += wj * sj * tp;
            tp *= t;
        }
    }

    std::array<std::array<long double, 3>, 3> a{};
    std::array<long double, 3> b{};
    for (int row = 0; row < size; ++row) {
        for (int col = 0; col < size; ++col) a[row][col] = tm[row + col];
        b[row] = sm[row];
    }
    const std::array<double, 3> c = solve_normal(a, b, size);
    return BackgroundCoefficients{degree, c[0], c[1], degree == 2 ? c[2] : 0.0};
}

double rms_residual_of(std::span<const double> s, const BackgroundCoefficients& c) {
    const int q = static_cast<int>(s.size());
    long double acc = 0.0L;
    for (int j = 0; j < q; ++j) {
        const long double res = background_eval(c, j, q) - s[j];
        acc += res * res;
    }
    return static_cast<double>(std::sqrt(static_cast<double>(acc / q)));
}

void check_fit_args(std::span<const double> s, int degree) {
    if (degree != 1 && degree != 2) {
        throw DataError("background degree must be 1 or 2, got " + std::to_string(degree));
    }
    if (s.size() < static_cast<std::size_t>(degree) + 1) {
        throw DataError("background fit needs at least " + std::to_string(degree + 1) +
                        " samples, got " + std::to_string(s.size()));
    }
}

double median_inplace(std::vector<double>& v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
        return 0.5 * (v[mid - 1] + hi);
    }
    return hi;
}

} // namespace

FitReport fit_background(std::span<const double> s, int degree) {
    check_fit_args(s, degree);
    const BackgroundCoefficients c = weighted_fit(s, {}, degree);
    return FitReport{c, rms_residual_of(s, c), 1, false};
}

FitReport fit_background_robust(std::span<const double> s, int degree,
                                double huber_delta, int max_iters) {
    check_fit_args(s, degree);
    if (max_iters < 1) {
        throw DataError("robust fit needs max_iters >= 1");
    }

    const int q = static_cast<int>(s.size());
    BackgroundCoefficients c = weighted_fit(s, {}, degree);   // first solve is plain OLS
    int iters = 1;

    std::vector<double> res(static_cast<std::size_t>(q));
    std::vector<double> weights(static_cast<std::size_t>(q));
    while (iters < max_iters) {
        for (int j = 0; j < q; ++j) {
            res[static_cast<std::size_t>(j)] = background_eval(c, j, q) - s[j];
        }

        double delta = huber_delta;
        if (delta <= 0.0) {
            // 1.345 sigma with sigma from the MAD, the usual Huber tuning.
            std::vector<double> tmp = res;
            const double med = median_inplace(tmp);
            for (auto& v : tmp) v = std::fabs(v - med);
            const double mad = median_inplace(tmp);
            delta = 1.345 * 1.4826 * mad;
            double max_abs = 0.0;
            for (double v : res) max_abs = std::max(max_abs, std::fabs(v));
            if (delta <= 1e-12 * (1.0 + max_abs)) break;   // residuals already tight
        }

        for (int j = 0; j < q; ++j) {
            const double a = std::fabs(res[static_cast<std::size_t>(j)]);
            weights[static_cast<std::size_t>(j)] = a <= delta ? 1.0 : delta / a;
        }

        const BackgroundCoefficients next = weighted_fit(s, weights, degree);
        ++iters;
        const double change = std::max({std::fabs(next.c0 - c.c0), std::fabs(next.c1 - c.c1),
                                        std::fabs(next.c2 - c.c2)});
        c = next;
        if (change < 1e-9) break;
    }
    return FitReport{c, rms_residual_of(s, c), iters, true};
}

namespace {

TrainingSet assemble_training_set(const ImageFragment& image, const LabelMask& mask,
                                  const WindowConfig& cfg,
                                  const BackgroundCoefficients& bg,
                                  std::span<const double> s) {
    const int q = static_cast<int>(s.size());
    TrainingSet ts;
    ts.scale = ModelWeights::default_scale(cfg);
    ts.features.reserve(static_cast<std::size_t>(q));
    ts.targets.reserve(static_cast<std::size_t>(q));

    bool saw_pos = false;
    bool saw_neg = false;
    for (int j = 0; j < q; ++j) {
        const double u = background_eval(bg, j, q);
        ts.features.push_back({s[j] / ts.scale, u / ts.scale});
        const auto [row, col] = center_of(j, cfg, image.height(), image.width());
        const bool filament = mask.filament_at(row, col);
        ts.targets.push_back(filament ? 1 : 0);
        (filament ? saw_pos : saw_neg) = true;
    }
    if (!saw_pos || !saw_neg) {
        throw DataError("degenerate training fragment: interior holds only " +
                        std::string(saw_pos ? "filament" : "non-filament") + " pixels");
    }
    return ts;
}

std::vector<double> window_sums(const ImageFragment& image, const WindowConfig& cfg) {
    const ColumnMatrix cols = build_columns(image, cfg);
    const SummationWeights unit = SummationWeights::unit(cfg.r());
    std::vector<double> s(static_cast<std::size_t>(cols.cols()));
    for (int j = 0; j < cols.cols(); ++j) {
        s[static_cast<std::size_t>(j)] = hidden_sum(cols.column(j), unit);
    }
    return s;
}

void check_mask_dims(const ImageFragment& image, const LabelMask& mask) {
    if (mask.height() != image.height() || mask.width() != image.width()) {
        throw DataError("mask is " + std::to_string(mask.height()) + "x" +
                        std::to_string(mask.width()) + " but image is " +
                        std::to_string(image.height()) + "x" +
                        std::to_string(image.width()));
    }
}

} // namespace

TrainingSet build_training_set(const ImageFragment& image, const LabelMask& mask,
                               const WindowConfig& cfg, int degree) {
    check_mask_dims(image, mask);
    const std::vector<double> s = window_sums(image, cfg);
    const FitReport fit = fit_background(s, degree);
    return assemble_training_set(image, mask, cfg, fit.coefficients, s);
}

namespace {

long recognition_error(const TrainingSet& ts, const OutputWeights& w) {
    long err = 0;
    for (std::size_t i = 0; i < ts.features.size(); ++i) {
        const int y = w.ws * ts.features[i][0] + w.wu * ts.features[i][1] >= w.w0 ? 1 : 0;
        err += std::abs(y - static_cast<int>(ts.targets[i]));
    }
    return err;
}

} // namespace

PerceptronResult train_perceptron(const TrainingSet& ts, const PerceptronConfig& cfg) {
    if (ts.features.size() != ts.targets.size() || ts.features.empty()) {
        throw DataError("training set is empty or inconsistent");
    }
    if (!(cfg.learning_rate > 0.0) || cfg.max_epochs < 1) {
        throw DataError("perceptron config requires learning_rate > 0 and max_epochs >= 1");
    }

    const std::size_t h = ts.features.size();
    std::vector<std::size_t> order(h);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.shuffle_seed);

    OutputWeights w{};
    OutputWeights best_w = w;
    long best_err = recognition_error(ts, w);
    int epochs = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        int updates = 0;
        for (const std::size_t i : order) {
            const double f0 = ts.features[i][0];
            const double f1 = ts.features[i][1];
            const int y = w.ws * f0 + w.wu * f1 >= w.w0 ? 1 : 0;
            const int d = ts.targets[i] - y;
            if (d != 0) {
                w.ws += cfg.learning_rate * d * f0;
                w.wu += cfg.learning_rate * d * f1;
                w.w0 -= cfg.learning_rate * d;
                ++updates;
            }
        }
        ++epochs;
        const long err = recognition_error(ts, w);
        // <= keeps the latest of equally good snapshots; late planes have had
        // more corrections spread over the whole fragment and generalize better
        if (err <= best_err) {
            best_err = err;
            best_w = w;
        }
        if (cfg.early_stop && updates == 0) break;
    }
    return PerceptronResult{best_w, best_err, epochs};
}

TrainResult train(const ImageFragment& image, const LabelMask& mask,
                  const WindowConfig& cfg, const TrainOptions& opts) {
    check_mask_dims(image, mask);
    const std::vector<double> s = window_sums(image, cfg);
    const FitReport fit =
        opts.robust ? fit_background_robust(s, opts.degree, opts.huber_delta,
                                            opts.huber_max_iters)
                    : fit_background(s, opts.degree);
    const TrainingSet ts = assemble_training_set(image, mask, cfg, fit.coefficients, s);
    const PerceptronResult perceptron = train_perceptron(ts, opts.perceptron);

    ModelWeights model{cfg,
                       SummationWeights::unit(cfg.r()),
                       fit.coefficients,
                       opts.bg_refit,
                       perceptron.weights,
                       ts.scale};
    return TrainResult{std::move(model), perceptron.error, fit.rms_residual};
}

} // namespace filanet
