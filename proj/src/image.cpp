#include "filanet/image.hpp"

#include <string>

namespace filanet {

namespace {

void check_dims(int height, int width, std::size_t size, const char* what) {
    if (height < 1 || width < 1) {
        throw DataError(std::string(what) + ": dimensions must be at least 1x1, got " +
                        std::to_string(height) + "x" + std::to_string(width));
    }
    const auto expected = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    if (size != expected) {
        throw DataError(std::string(what) + ": buffer holds " + std::to_string(size) +
                        " values, expected " + std::to_string(expected));
    }
}

} // namespace

ImageFragment::ImageFragment(int height, int width, std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
    check_dims(height, width, pixels_.size(), "ImageFragment");
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        if (pixels_[i] == 0) {
            throw DataError("ImageFragment: pixel " + std::to_string(i) +
                            " is 0, brightness must lie in 1..255");
        }
    }
}

ImageFragment ImageFragment::filled(int height, int width, std::uint8_t value) {
    return ImageFragment(
        height, width,
        std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width, value));
}

LabelMask::LabelMask(int height, int width, std::vector<std::uint8_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
    check_dims(height, width, labels_.size(), "LabelMask");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] > 1) {
            throw DataError("LabelMask: label " + std::to_string(i) +
                            " is " + std::to_string(labels_[i]) + ", expected 0 or 1");
        }
    }
}

LabelMask LabelMask::filled(int height, int width, bool filament) {
    return LabelMask(height, width,
                     std::vector<std::uint8_t>(static_cast<std::size_t>(height) * width,
                                               filament ? 1 : 0));
}

LabelMask pad_mask(const DetectionMask& mask, int height, int width) {
    const int off = mask.offset;
    if (mask.labels.height() + 2 * off != height || mask.labels.width() + 2 * off != width) {
        throw DataError("pad_mask: interior " + std::to_string(mask.labels.height()) + "x" +
                        std::to_string(mask.labels.width()) + " with offset " +
                        std::to_string(off) + " does not fit " + std::to_string(height) +
                        "x" + std::to_string(width));
    }
    std::vector<std::uint8_t> full(static_cast<std::size_t>(height) * width, 0);
    for (int i = 0; i < mask.labels.height(); ++i) {
        for (int j = 0; j < mask.labels.width(); ++j) {
            full[static_cast<std::size_t>(i + off) * width + (j + off)] =
                mask.labels.filament_at(i, j) ? 1 : 0;
        }
    }
    return LabelMask(height, width, std::move(full));
}

} // namespace filanet
