#pragma once

#include <filesystem>

#include "filanet/image.hpp"

namespace filanet {

/// Read a PGM file (P2 plain or P5 raw, maxval <= 255). Pixel value 0 is
/// clamped to 1, the model's brightness floor. Malformed input raises
/// DataError with the byte offset of the problem.
ImageFragment load_image(const std::filesystem::path& path);

/// Read a mask from PBM (P1) or PGM (P2/P5). Zero decodes to non-filament,
/// any nonzero value (or a PBM 1 bit) to filament.
LabelMask load_mask(const std::filesystem::path& path);

/// Write a mask as raw PGM (P5, maxval 255): filament = 255, non-filament = 0.
/// Round-trips through load_mask.
void save_mask(const LabelMask& mask, const std::filesystem::path& path);
void save_mask(const DetectionMask& mask, const std::filesystem::path& path);

/// Write a fragment as raw PGM (P5, maxval 255).
void save_image(const ImageFragment& image, const std::filesystem::path& path);

} // namespace filanet
