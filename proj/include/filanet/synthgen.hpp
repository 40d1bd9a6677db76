#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "filanet/image.hpp"

namespace filanet {

/// A dark elongated feature: every pixel within half_width of the polyline
/// is darkened by depth (brightness units) and labelled filament.
struct Filament {
    std::vector<std::pair<double, double>> polyline; // (row, col), pixel units
    double half_width = 1.5;                         // >= 1
    double depth = 60.0;                             // > 0
};

/// Parameters for one synthetic fragment. The background is a polynomial
/// over normalized coordinates u = x/width, v = y/height:
///   B(x, y) = b0 + bx*u + by*v + bxx*u^2 + byy*v^2
/// and each pixel is clamp_1..255(round(B - depth_if_covered + noise)).
struct SynthParams {
    int height = 256;
    int width = 256;
    double b0 = 160.0;
    double bx = 0.0;
    double by = 0.0;
    double bxx = 0.0;
    double byy = 0.0;
    std::vector<Filament> filaments;
    double noise_sigma = 3.0;
    std::uint64_t seed = 0;
};

/// Deterministic generation: identical params produce identical bytes.
/// Where filaments overlap, the deepest one applies; the mask is the union
/// of their regions.
std::pair<ImageFragment, LabelMask> generate(const SynthParams& params);

/// Geometric region of a single filament on its own: the within-half-width
/// pixels, independent of background and noise.
LabelMask rasterize_filament(int height, int width, const Filament& filament);

/// Per-fragment randomization bounds for corpus generation. Slopes and
/// curvatures are drawn uniformly from [-max, max]; the vertical terms may
/// swing far more than the horizontal ones because the background trend is
/// modelled along the row-major scan, which tracks the vertical drift.
struct CorpusRanges {
    double slope_x_max = 8.0;    // bx
    double slope_y_max = 40.0;   // by
    double curve_x_max = 4.0;    // bxx
    double curve_y_max = 20.0;   // byy
    int filaments_min = 2;
    int filaments_max = 4;
    double depth_min = 58.0;
    double depth_max = 70.0;
    double half_width_min = 1.5;
    double half_width_max = 3.0;
    double length_frac_min = 0.5;  // filament length / min(height, width)
    double length_frac_max = 0.9;
    int polyline_points = 4;
    double margin_frac = 0.08;   // keep-away border for filament placement
};

struct CorpusItem {
    SynthParams params;
    ImageFragment image;
    LabelMask mask;
};

/// Generate `count` fragments with randomized background gradients and
/// filament geometry. Dimensions, noise level, and the shared mean brightness
/// come from `base` (each fragment's constant term absorbs its gradient so
/// the fragment mean stays at base.b0); all per-fragment draws and noise
/// seeds derive deterministically from `seed`. Filament centers are spread
/// one per horizontal band.
std::vector<CorpusItem> corpus(int count, const SynthParams& base, std::uint64_t seed,
                               const CorpusRanges& ranges = {});

} // namespace filanet
