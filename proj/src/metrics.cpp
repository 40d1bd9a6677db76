#include "filanet/metrics.hpp"

#include <cstdio>
#include <string>

namespace filanet {

namespace {

// Truth label at interior position (i, j): either the truth mask covers the
// full source image, or it is already interior-sized.
bool truth_covers(const DetectionMask& pred, const LabelMask& truth) {
    const int ph = pred.labels.height();
    const int pw = pred.labels.width();
    const int off = pred.offset;
    return (truth.height() == ph + 2 * off && truth.width() == pw + 2 * off) ||
           (truth.height() == ph && truth.width() == pw);
}

} // namespace

Scores score(const DetectionMask& pred, const LabelMask& truth, const WindowConfig& cfg) {
    if (pred.offset != cfg.offset()) {
        throw DataError("detection mask offset " + std::to_string(pred.offset) +
                        " does not match k=" + std::to_string(cfg.k));
    }
    if (!truth_covers(pred, truth)) {
        throw DataError("truth mask " + std::to_string(truth.height()) + "x" +
                        std::to_string(truth.width()) + " does not cover a " +
                        std::to_string(pred.labels.height()) + "x" +
                        std::to_string(pred.labels.width()) + " interior with offset " +
                        std::to_string(pred.offset));
    }
    const int off = truth.height() == pred.labels.height() ? 0 : pred.offset;

    Confusion counts;
    for (int i = 0; i < pred.labels.height(); ++i) {
        for (int j = 0; j < pred.labels.width(); ++j) {
            const bool p = pred.labels.filament_at(i, j);
            const bool t = truth.filament_at(i + off, j + off);
            if (p && t) ++counts.tp;
            else if (p && !t) ++counts.fp;
            else if (!p && t) ++counts.fn;
            else ++counts.tn;
        }
    }
    return derive_scores(counts);
}

Scores derive_scores(const Confusion& counts) {
    Scores s;
    s.counts = counts;
    if (counts.tp + counts.fp > 0) {
        s.precision = static_cast<double>(counts.tp) / (counts.tp + counts.fp);
    } else {
        s.precision_defined = false;
    }
    if (counts.tp + counts.fn > 0) {
        s.recall = static_cast<double>(counts.tp) / (counts.tp + counts.fn);
    } else {
        s.recall_defined = false;
    }
    if (s.precision + s.recall > 0.0) {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    } else {
        s.f1_defined = false;
        s.f1 = 0.0;
    }
    const long total = counts.total();
    s.accuracy = total > 0 ? static_cast<double>(counts.tp + counts.tn) / total : 0.0;
    return s;
}

std::string csv_header() {
    return "fragment_id,tp,fp,tn,fn,precision,recall,f1,accuracy";
}

namespace {

std::string format_metrics(double precision, double recall, double f1, double accuracy) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f", precision, recall, f1, accuracy);
    return buf;
}

} // namespace

std::string csv_row(const std::string& fragment_id, const Scores& s) {
    return fragment_id + "," + std::to_string(s.counts.tp) + "," +
           std::to_string(s.counts.fp) + "," + std::to_string(s.counts.tn) + "," +
           std::to_string(s.counts.fn) + "," +
           format_metrics(s.precision, s.recall, s.f1, s.accuracy);
}

std::string csv_mean_row(const std::vector<Scores>& all) {
    double tp = 0, fp = 0, tn = 0, fn = 0;
    double precision = 0, recall = 0, f1 = 0, accuracy = 0;
    for (const Scores& s : all) {
        tp += static_cast<double>(s.counts.tp);
        fp += static_cast<double>(s.counts.fp);
        tn += static_cast<double>(s.counts.tn);
        fn += static_cast<double>(s.counts.fn);
        precision += s.precision;
        recall += s.recall;
        f1 += s.f1;
        accuracy += s.accuracy;
    }
    const double n = all.empty() ? 1.0 : static_cast<double>(all.size());
    char counts[160];
    std::snprintf(counts, sizeof(counts), "mean,%.2f,%.2f,%.2f,%.2f,", tp / n, fp / n,
                  tn / n, fn / n);
    return counts + format_metrics(precision / n, recall / n, f1 / n, accuracy / n);
}

} // namespace filanet
