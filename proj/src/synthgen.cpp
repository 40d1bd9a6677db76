#include "filanet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace filanet {

namespace {

void validate(const SynthParams& p) {
    if (p.height < 1 || p.width < 1) {
        throw DataError("fragment dimensions must be at least 1x1");
    }
    if (p.b0 < 1.0 || p.b0 > 255.0) {
        throw DataError("base brightness b0 must lie in 1..255, got " + std::to_string(p.b0));
    }
    if (p.noise_sigma < 0.0) {
        throw DataError("noise_sigma must be >= 0");
    }
    for (const Filament& f : p.filaments) {
        if (!(f.depth > 0.0)) {
            throw DataError("filament depth must be > 0, got " + std::to_string(f.depth));
        }
        if (f.half_width < 1.0) {
            throw DataError("filament half-width must be >= 1, got " +
                            std::to_string(f.half_width));
        }
        if (f.polyline.empty()) {
            throw DataError("filament polyline must contain at least one point");
        }
    }
}

double point_segment_dist(double pr, double pc, std::pair<double, double> a,
                          std::pair<double, double> b) {
    const double dr = b.first - a.first;
    const double dc = b.second - a.second;
    const double len2 = dr * dr + dc * dc;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((pr - a.first) * dr + (pc - a.second) * dc) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double rr = a.first + t * dr - pr;
    const double cc = a.second + t * dc - pc;
    return std::sqrt(rr * rr + cc * cc);
}

double dist_to_polyline(double pr, double pc, const Filament& f) {
    if (f.polyline.size() == 1) {
        return point_segment_dist(pr, pc, f.polyline[0], f.polyline[0]);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < f.polyline.size(); ++i) {
        best = std::min(best, point_segment_dist(pr, pc, f.polyline[i], f.polyline[i + 1]));
    }
    return best;
}

} // namespace

LabelMask rasterize_filament(int height, int width, const Filament& filament) {
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(height) * width, 0);
    // Only sweep rows/cols near the polyline's bounding box.
    double rmin = 1e300, rmax = -1e300, cmin = 1e300, cmax = -1e300;
    for (const auto& [r, c] : filament.polyline) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    const int r0 = std::max(0, static_cast<int>(std::floor(rmin - filament.half_width)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(rmax + filament.half_width)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cmin - filament.half_width)));
    const int c1 = std::min(width - 1, static_cast<int>(std::ceil(cmax + filament.half_width)));
    for (int row = r0; row <= r1; ++row) {
        for (int col = c0; col <= c1; ++col) {
            if (dist_to_polyline(row, col, filament) <= filament.half_width) {
                labels[static_cast<std::size_t>(row) * width + col] = 1;
            }
        }
    }
    return LabelMask(height, width, std::move(labels));
}

std::pair<ImageFragment, LabelMask> generate(const SynthParams& params) {
    validate(params);
    const int n = params.height;
    const int m = params.width;

    // Depth field: deepest covering filament wins; mask is the union.
    std::vector<double> depth(static_cast<std::size_t>(n) * m, 0.0);
    for (const Filament& f : params.filaments) {
        const LabelMask region = rasterize_filament(n, m, f);
        for (std::size_t i = 0; i < depth.size(); ++i) {
            if (region.labels()[i]) depth[i] = std::max(depth[i], f.depth);
        }
    }

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> noise(0.0, params.noise_sigma > 0.0 ? params.noise_sigma : 1.0);

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n) * m);
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(n) * m);
    std::size_t i = 0;
    for (int row = 0; row < n; ++row) {
        const double v = static_cast<double>(row) / n;
        for (int col = 0; col < m; ++col, ++i) {
            const double u = static_cast<double>(col) / m;
            const double bg = params.b0 + params.bx * u + params.by * v +
                              params.bxx * u * u + params.byy * v * v;
            const double eps = params.noise_sigma > 0.0 ? noise(rng) : 0.0;
            const double value = std::round(bg - depth[i] + eps);
            pixels[i] = static_cast<std::uint8_t>(std::clamp(value, 1.0, 255.0));
            labels[i] = depth[i] > 0.0 ? 1 : 0;
        }
    }
    return {ImageFragment(n, m, std::move(pixels)), LabelMask(n, m, std::move(labels))};
}

namespace {

void validate(const CorpusRanges& r) {
    if (r.filaments_min < 1 || r.filaments_max < r.filaments_min) {
        throw DataError("corpus filament count range is invalid");
    }
    if (!(r.depth_min > 0.0) || r.depth_max < r.depth_min) {
        throw DataError("corpus depth range must satisfy 0 < min <= max");
    }
    if (r.half_width_min < 1.0 || r.half_width_max < r.half_width_min) {
        throw DataError("corpus half-width range must satisfy 1 <= min <= max");
    }
    if (!(r.length_frac_min > 0.0) || r.length_frac_max < r.length_frac_min) {
        throw DataError("corpus length fraction range is invalid");
    }
    if (r.polyline_points < 2) {
        throw DataError("corpus polyline_points must be >= 2");
    }
}

Filament draw_filament(std::mt19937_64& rng, int n, int m, const CorpusRanges& ranges,
                       double band_lo, double band_hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double margin = ranges.margin_frac * std::min(n, m);
    const double lo_r = margin, hi_r = n - 1 - margin;
    const double lo_c = margin, hi_c = m - 1 - margin;

    const double length = (ranges.length_frac_min +
                           unit(rng) * (ranges.length_frac_max - ranges.length_frac_min)) *
                          std::min(n, m);
    const double angle = unit(rng) * std::numbers::pi;
    const double cr = band_lo + unit(rng) * (band_hi - band_lo);
    const double cc = lo_c + unit(rng) * (hi_c - lo_c);

    const double dir_r = std::sin(angle);
    const double dir_c = std::cos(angle);
    // Perpendicular jitter bends the centerline into a gentle arc.
    const double wiggle = 0.03 * length;

    Filament f;
    f.half_width = ranges.half_width_min +
                   unit(rng) * (ranges.half_width_max - ranges.half_width_min);
    f.depth = ranges.depth_min + unit(rng) * (ranges.depth_max - ranges.depth_min);
    const int points = ranges.polyline_points;
    for (int p = 0; p < points; ++p) {
        const double along = (static_cast<double>(p) / (points - 1) - 0.5) * length;
        const double across = (unit(rng) * 2.0 - 1.0) * wiggle;
        double row = cr + along * dir_r + across * -dir_c;
        double col = cc + along * dir_c + across * dir_r;
        row = std::clamp(row, lo_r, hi_r);
        col = std::clamp(col, lo_c, hi_c);
        f.polyline.emplace_back(row, col);
    }
    return f;
}

} // namespace

std::vector<CorpusItem> corpus(int count, const SynthParams& base, std::uint64_t seed,
                               const CorpusRanges& ranges) {
    if (count < 1) {
        throw DataError("corpus count must be >= 1");
    }
    validate(base);
    validate(ranges);

    // Derive all per-fragment seeds up front so fragments are independent.
    std::mt19937_64 master(seed);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t geometry_seed = master();
        const std::uint64_t noise_seed = master();
        seeds.emplace_back(geometry_seed, noise_seed);
    }

    std::vector<CorpusItem> items;
    items.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::mt19937_64 rng(seeds[static_cast<std::size_t>(i)].first);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        SynthParams p = base;
        p.filaments.clear();
        p.seed = seeds[static_cast<std::size_t>(i)].second;
        p.bx = (unit(rng) * 2.0 - 1.0) * ranges.slope_x_max;
        p.by = (unit(rng) * 2.0 - 1.0) * ranges.slope_y_max;
        p.bxx = (unit(rng) * 2.0 - 1.0) * ranges.curve_x_max;
        p.byy = (unit(rng) * 2.0 - 1.0) * ranges.curve_y_max;

        // All fragments share the base mean brightness (one instrument, one
        // exposure); the drawn gradient terms tilt the background around it.
        const double mu = (p.width - 1.0) / (2.0 * p.width);
        const double mu2 = (p.width - 1.0) * (2.0 * p.width - 1.0) / (6.0 * p.width * p.width);
        const double mv = (p.height - 1.0) / (2.0 * p.height);
        const double mv2 =
            (p.height - 1.0) * (2.0 * p.height - 1.0) / (6.0 * p.height * p.height);
        p.b0 = base.b0 - p.bx * mu - p.bxx * mu2 - p.by * mv - p.byy * mv2;

        std::uniform_int_distribution<int> count_dist(ranges.filaments_min,
                                                      ranges.filaments_max);
        const int filaments = count_dist(rng);
        const double margin = ranges.margin_frac * std::min(p.height, p.width);
        const double lo_r = margin, hi_r = p.height - 1 - margin;
        for (int f = 0; f < filaments; ++f) {
            // one filament center per horizontal band, so the set spreads
            // over the fragment's full vertical extent
            const double band_lo = lo_r + (hi_r - lo_r) * f / filaments;
            const double band_hi = lo_r + (hi_r - lo_r) * (f + 1) / filaments;
            p.filaments.push_back(
                draw_filament(rng, p.height, p.width, ranges, band_lo, band_hi));
        }

        auto [image, mask] = generate(p);
        items.push_back(CorpusItem{std::move(p), std::move(image), std::move(mask)});
    }
    return items;
}

} // namespace filanet
