// Acceptance suite: the eight shipping criteria, one pass/fail line each.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "filanet/image_io.hpp"
#include "filanet/learning.hpp"
#include "filanet/metrics.hpp"
#include "filanet/network.hpp"
#include "filanet/synthgen.hpp"
#include "filanet/windowing.hpp"
#include "oracles.hpp"

using namespace filanet;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;
    bool (*run)(std::string& detail);
};

// ---- 1: windowing equivalence against a brute-force enumeration ------------

bool run_windowing(std::string& detail) {
    std::mt19937_64 rng(2001);
    std::uniform_int_distribution<int> pick_k(0, 2);
    std::uniform_int_distribution<int> pixel(1, 255);

    for (int trial = 0; trial < 100; ++trial) {
        const int k = std::array<int, 3>{1, 3, 5}[pick_k(rng)];
        std::uniform_int_distribution<int> dim(k, 12);
        const int n = dim(rng), m = dim(rng);
        std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n) * m);
        for (auto& p : pixels) p = static_cast<std::uint8_t>(pixel(rng));
        const ImageFragment img(n, m, pixels);
        const WindowConfig cfg(k);
        const ColumnMatrix Z = build_columns(img, cfg);

        const int q = (n - k + 1) * (m - k + 1);
        if (Z.cols() != q || column_count(cfg, n, m) != q) {
            detail = "column count mismatch";
            return false;
        }
        for (int wr = 0; wr <= n - k; ++wr) {
            for (int wc = 0; wc <= m - k; ++wc) {
                const int j = wr * (m - k + 1) + wc;
                for (int dr = 0; dr < k; ++dr) {
                    for (int dc = 0; dc < k; ++dc) {
                        if (Z.at(dr * k + dc, j) != img.at(wr + dr, wc + dc)) {
                            detail = "window content mismatch";
                            return false;
                        }
                    }
                }
            }
        }
    }
    detail = "100 fragments, exact match";
    return true;
}

// ---- 2: background fit vs planted truth and the grid-search oracle ---------

std::vector<double> parabola_t(int q, double c0, double c1, double c2) {
    std::vector<double> s(static_cast<std::size_t>(q));
    for (int j = 0; j < q; ++j) {
        const double t = oracle::normalized_t(j, q);
        s[static_cast<std::size_t>(j)] = c0 + c1 * t + c2 * t * t;
    }
    return s;
}

bool run_fit_exactness(std::string& detail) {
    {
        const FitReport fit = fit_background(parabola_t(101, 2.0, 3.0, 1.0), 2);
        if (std::fabs(fit.coefficients.c0 - 2.0) >= 1e-9 ||
            std::fabs(fit.coefficients.c1 - 3.0) >= 1e-9 ||
            std::fabs(fit.coefficients.c2 - 1.0) >= 1e-9 || fit.rms_residual >= 1e-9) {
            detail = "planted parabola not recovered";
            return false;
        }
    }
    {
        const FitReport fit = fit_background(parabola_t(57, 80.0, -11.0, 0.0), 1);
        if (std::fabs(fit.coefficients.c0 - 80.0) >= 1e-9 ||
            std::fabs(fit.coefficients.c1 + 11.0) >= 1e-9 || fit.rms_residual >= 1e-9) {
            detail = "planted line not recovered";
            return false;
        }
    }

    std::mt19937_64 rng(2002);
    std::normal_distribution<double> noise(0.0, 5.0);
    const std::array<double, 3> truth = {150.0, -30.0, 12.0};
    std::vector<double> s = parabola_t(1001, truth[0], truth[1], truth[2]);
    for (auto& v : s) v += noise(rng);

    const FitReport fit = fit_background(s, 2);
    const oracle::GridResult grid = oracle::grid_search_background(s, 2, truth);
    const double tol = 1.5 * grid.final_step;
    if (std::fabs(fit.coefficients.c0 - grid.coeffs[0]) > tol ||
        std::fabs(fit.coefficients.c1 - grid.coeffs[1]) > tol ||
        std::fabs(fit.coefficients.c2 - grid.coeffs[2]) > tol) {
        detail = "noisy fit and grid oracle disagree";
        return false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "grid oracle agrees within %.4g", tol);
    detail = buf;
    return true;
}

// ---- 3: projection invariants ----------------------------------------------

bool run_projection(std::string& detail) {
    std::mt19937_64 rng(2003);
    std::normal_distribution<double> noise(0.0, 10.0);
    std::uniform_real_distribution<double> coef(-60.0, 60.0);
    const int q = 1001;

    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> s = parabola_t(q, 130.0, 22.0, -9.0);
        for (auto& v : s) v += noise(rng);
        const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng);
        std::vector<double> shifted = s;
        for (int j = 0; j < q; ++j) {
            const double t = oracle::normalized_t(j, q);
            shifted[static_cast<std::size_t>(j)] += a0 + a1 * t + a2 * t * t;
        }
        const FitReport f1 = fit_background(s, 2);
        const FitReport f2 = fit_background(shifted, 2);
        for (int j = 0; j < q; ++j) {
            const double r1 = s[static_cast<std::size_t>(j)] - background_eval(f1.coefficients, j, q);
            const double r2 =
                shifted[static_cast<std::size_t>(j)] - background_eval(f2.coefficients, j, q);
            if (std::fabs(r1 - r2) >= 1e-8) {
                detail = "residual changed under in-family shift";
                return false;
            }
        }
        if (std::fabs(f2.coefficients.c0 - f1.coefficients.c0 - a0) >= 1e-8) {
            detail = "c0 did not shift by the added constant";
            return false;
        }
    }
    detail = "10 trials, residual drift < 1e-8";
    return true;
}

// ---- 4: robust fit beats OLS under spikes ----------------------------------

bool run_robustness(std::string& detail) {
    std::mt19937_64 rng(2004);
    const std::array<double, 3> truth = {160.0, -20.0, 9.0};
    int robust_wins = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s = parabola_t(800, truth[0], truth[1], truth[2]);
        std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
        for (std::size_t i = 0; i < s.size() / 20; ++i) s[pick(rng)] += 200.0;

        const FitReport ols = fit_background(s, 2);
        const FitReport rob = fit_background_robust(s, 2);
        auto err = [&](const BackgroundCoefficients& c) {
            return std::fabs(c.c0 - truth[0]) + std::fabs(c.c1 - truth[1]) +
                   std::fabs(c.c2 - truth[2]);
        };
        if (err(rob.coefficients) < err(ols.coefficients)) ++robust_wins;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "robust beat OLS on %d/100 trials", robust_wins);
    detail = buf;
    return robust_wins >= 95;
}

// ---- 5: perceptron convergence, determinism, scaling invariance ------------

bool run_perceptron(std::string& detail) {
    TrainingSet toy;
    toy.scale = 1.0;
    for (int i = 0; i < 50; ++i) {
        toy.features.push_back({0.9, 0.1});
        toy.targets.push_back(1);
        toy.features.push_back({0.1, 0.9});
        toy.targets.push_back(0);
    }
    const PerceptronResult a = train_perceptron(toy, {});
    if (a.error != 0 || a.epochs > 200) {
        detail = "separable toy set not learned";
        return false;
    }

    PerceptronConfig seeded;
    seeded.shuffle_seed = 77;
    const PerceptronResult b1 = train_perceptron(toy, seeded);
    const PerceptronResult b2 = train_perceptron(toy, seeded);
    if (b1.weights.w0 != b2.weights.w0 || b1.weights.ws != b2.weights.ws ||
        b1.weights.wu != b2.weights.wu) {
        detail = "training not deterministic for a fixed seed";
        return false;
    }

    std::mt19937_64 rng(2005);
    std::uniform_real_distribution<double> feat(0.0, 6375.0);
    std::uniform_real_distribution<double> weight(-5.0, 5.0);
    std::uniform_real_distribution<double> lambda(0.01, 100.0);
    for (int trial = 0; trial < 100000; ++trial) {
        const double s = feat(rng), u = feat(rng);
        const OutputWeights w{weight(rng), weight(rng), weight(rng)};
        const double l = lambda(rng);
        const OutputWeights scaled{w.w0 * l, w.ws * l, w.wu * l};
        if (output_decide(s, u, w, 6375.0) != output_decide(s, u, scaled, 6375.0)) {
            detail = "decision changed under positive weight scaling";
            return false;
        }
    }
    detail = "convergence, determinism, 100000 scaling triples";
    return true;
}

// ---- 6: the 1-train / 54-test protocol -------------------------------------

struct ProtocolResult {
    std::string csv;
    std::vector<std::vector<std::uint8_t>> masks;
    double mean_f1 = 0.0;
    double min_f1 = 1.0;
};

ProtocolResult run_protocol_corpus() {
    SynthParams base;
    base.height = 256;
    base.width = 256;
    const std::vector<CorpusItem> items = corpus(55, base, 42);
    const WindowConfig cfg(5);
    const TrainResult tr = train(items[0].image, items[0].mask, cfg, {});

    ProtocolResult out;
    out.csv = csv_header() + "\n";
    std::vector<Scores> all;
    for (std::size_t i = 1; i < items.size(); ++i) {
        const DetectionMask pred = forward(items[i].image, tr.model);
        const Scores s = score(pred, items[i].mask, cfg);
        char id[32];
        std::snprintf(id, sizeof(id), "fragment_%03zu", i);
        out.csv += csv_row(id, s) + "\n";
        all.push_back(s);
        out.masks.push_back(pred.labels.labels());
        out.mean_f1 += s.f1;
        out.min_f1 = std::min(out.min_f1, s.f1);
    }
    out.csv += csv_mean_row(all) + "\n";
    out.mean_f1 /= static_cast<double>(items.size() - 1);
    return out;
}

bool run_protocol(std::string& detail) {
    const ProtocolResult r = run_protocol_corpus();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "mean F1 %.3f (>= 0.85), min F1 %.3f (>= 0.6)", r.mean_f1,
                  r.min_f1);
    detail = buf;
    return r.mean_f1 >= 0.85 && r.min_f1 >= 0.6;
}

// ---- 7: four filaments on one 512x512 fragment -----------------------------

SynthParams four_filament_params() {
    SynthParams p;
    p.height = 512;
    p.width = 512;
    p.b0 = 165.0;
    p.bx = 5.0;
    p.by = 28.0;
    p.byy = -12.0;
    p.noise_sigma = 3.0;
    p.seed = 7;

    Filament f1;   // long horizontal arc in the upper part
    f1.polyline = {{80.0, 60.0}, {95.0, 190.0}, {85.0, 330.0}, {100.0, 450.0}};
    f1.half_width = 2.5;
    f1.depth = 62.0;
    Filament f2;   // steep diagonal
    f2.polyline = {{150.0, 400.0}, {240.0, 330.0}, {330.0, 290.0}};
    f2.half_width = 2.0;
    f2.depth = 66.0;
    Filament f3;   // lower horizontal
    f3.polyline = {{350.0, 40.0}, {360.0, 150.0}, {340.0, 260.0}};
    f3.half_width = 3.0;
    f3.depth = 58.0;
    Filament f4;   // short vertical near the bottom right
    f4.polyline = {{400.0, 430.0}, {460.0, 440.0}, {490.0, 420.0}};
    f4.half_width = 2.0;
    f4.depth = 64.0;
    p.filaments = {f1, f2, f3, f4};
    return p;
}

struct MultiResult {
    std::vector<std::uint8_t> mask;
    std::array<double, 4> recalls{};
};

MultiResult run_multi_filament() {
    const SynthParams p = four_filament_params();
    const auto [image, mask] = generate(p);
    const WindowConfig cfg(5);
    TrainOptions opts;
    opts.degree = 2;
    const TrainResult tr = train(image, mask, cfg, opts);
    const DetectionMask pred = forward(image, tr.model);
    const LabelMask full = pad_mask(pred, image.height(), image.width());

    MultiResult out;
    out.mask = pred.labels.labels();
    const int off = cfg.offset();
    for (std::size_t f = 0; f < p.filaments.size(); ++f) {
        const LabelMask region = rasterize_filament(p.height, p.width, p.filaments[f]);
        long covered = 0, hit = 0;
        for (int y = off; y < p.height - off; ++y) {
            for (int x = off; x < p.width - off; ++x) {
                if (!region.filament_at(y, x)) continue;
                ++covered;
                hit += full.filament_at(y, x) ? 1 : 0;
            }
        }
        out.recalls[f] = covered > 0 ? static_cast<double>(hit) / covered : 0.0;
    }
    return out;
}

bool run_multi(std::string& detail) {
    const MultiResult r = run_multi_filament();
    char buf[96];
    std::snprintf(buf, sizeof(buf), "per-filament recall %.3f %.3f %.3f %.3f (each >= 0.7)",
                  r.recalls[0], r.recalls[1], r.recalls[2], r.recalls[3]);
    detail = buf;
    return std::all_of(r.recalls.begin(), r.recalls.end(), [](double v) { return v >= 0.7; });
}

// ---- 8: end-to-end determinism ---------------------------------------------

bool run_determinism(std::string& detail) {
    const ProtocolResult a6 = run_protocol_corpus();
    const ProtocolResult b6 = run_protocol_corpus();
    if (a6.csv != b6.csv) {
        detail = "protocol CSV differs between runs";
        return false;
    }
    if (a6.masks != b6.masks) {
        detail = "protocol masks differ between runs";
        return false;
    }

    const MultiResult a7 = run_multi_filament();
    const MultiResult b7 = run_multi_filament();
    if (a7.mask != b7.mask) {
        detail = "multi-filament mask differs between runs";
        return false;
    }

    // the mask bytes written to disk must match too
    const fs::path dir = fs::temp_directory_path() / "filanet_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const LabelMask m(508, 508, a7.mask);
    save_mask(m, dir / "a.pgm");
    save_mask(LabelMask(508, 508, b7.mask), dir / "b.pgm");
    std::ifstream fa(dir / "a.pgm", std::ios::binary);
    std::ifstream fb(dir / "b.pgm", std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(fa)), {});
    const std::string bytes_b((std::istreambuf_iterator<char>(fb)), {});
    fs::remove_all(dir);
    if (bytes_a.empty() || bytes_a != bytes_b) {
        detail = "serialized masks differ between runs";
        return false;
    }
    detail = "54 masks, CSV, and multi-filament mask byte-identical";
    return true;
}

} // namespace

int main() {
    const Criterion criteria[] = {
        {1, "windowing oracle equivalence", 1.0, run_windowing},
        {2, "background-fit exactness", 10.0, run_fit_exactness},
        {3, "projection invariants", 10.0, run_projection},
        {4, "robustness ordering", 10.0, run_robustness},
        {5, "perceptron properties", 10.0, run_perceptron},
        {6, "1-train/54-test protocol", 60.0, run_protocol},
        {7, "multi-filament recall", 10.0, run_multi},
        {8, "end-to-end determinism", 130.0, run_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit_seconds) {
            ok = false;
            detail += " [over time limit]";
        }
        std::printf("criterion %d (%s): %s  -- %s (%.2fs)\n", c.number, c.name,
                    ok ? "PASS" : "FAIL", detail.c_str(), secs);
        failures += ok ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
