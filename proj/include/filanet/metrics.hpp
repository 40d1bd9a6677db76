#pragma once

#include <string>
#include <vector>

#include "filanet/image.hpp"
#include "filanet/windowing.hpp"

namespace filanet {

/// Pixel counts over the interior region. Filament is the positive class.
struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
};

/// Confusion counts plus the derived metrics. A metric whose denominator is
/// zero reports 0 with its defined flag cleared, so corpus aggregation stays
/// total instead of producing NaN.
struct Scores {
    Confusion counts;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

/// Score a detection mask against ground truth. The truth mask may cover the
/// full source image (it is cropped to the interior first) or exactly the
/// interior region.
Scores score(const DetectionMask& pred, const LabelMask& truth, const WindowConfig& cfg);

Scores derive_scores(const Confusion& counts);

/// CSV helpers shared by the eval command and the test drivers, so repeated
/// runs are byte-comparable.
std::string csv_header();
std::string csv_row(const std::string& fragment_id, const Scores& s);
std::string csv_mean_row(const std::vector<Scores>& all);

} // namespace filanet
