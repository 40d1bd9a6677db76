#pragma once

#include <cstdint>
#include <vector>

#include "filanet/errors.hpp"

namespace filanet {

/// Grayscale image fragment. Pixels are stored row-major and every value
/// lies in 1..255; a brightness of 0 does not exist in this model.
class ImageFragment {
public:
    ImageFragment(int height, int width, std::vector<std::uint8_t> pixels);

    static ImageFragment filled(int height, int width, std::uint8_t value);

    int height() const { return height_; }
    int width() const { return width_; }

    std::uint8_t at(int row, int col) const {
        return pixels_[static_cast<std::size_t>(row) * width_ + col];
    }

    const std::vector<std::uint8_t>& pixels() const { return pixels_; }

private:
    int height_;
    int width_;
    std::vector<std::uint8_t> pixels_;
};

/// Binary class map over an image region. Label 1 = filament, 0 = non-filament.
class LabelMask {
public:
    LabelMask(int height, int width, std::vector<std::uint8_t> labels);

    static LabelMask filled(int height, int width, bool filament);

    int height() const { return height_; }
    int width() const { return width_; }

    bool filament_at(int row, int col) const {
        return labels_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }

    const std::vector<std::uint8_t>& labels() const { return labels_; }

    bool operator==(const LabelMask& other) const = default;

private:
    int height_;
    int width_;
    std::vector<std::uint8_t> labels_;
};

/// Classification result over the interior region of an image: the pixels
/// that have a full k-by-k neighbourhood. For a source image of n-by-m the
/// mask is (n-k+1)-by-(m-k+1) and `offset` = k/2 gives the row/column shift
/// of the mask origin within the source image.
struct DetectionMask {
    LabelMask labels;
    int offset = 0;
};

/// Embed an interior mask into a full height-by-width mask; the border ring
/// is non-filament.
LabelMask pad_mask(const DetectionMask& mask, int height, int width);

} // namespace filanet
