#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "filanet/image.hpp"

namespace filanet {

/// Square sliding-window geometry. The side length k must be odd so the
/// window has a central pixel; r = k*k is the window area.
struct WindowConfig {
    explicit WindowConfig(int k);

    int k;
    int r() const { return k * k; }
    /// 0-based index of the central pixel within an unrolled column.
    int center_index() const { return (r() - 1) / 2; }
    /// Row/column shift between a window's top-left corner and its center.
    int offset() const { return k / 2; }
};

/// The column matrix: every valid k-by-k window of the source image
/// unrolled row-major into one column. Columns are ordered by the row-major
/// scan of window centers (left to right within a row, rows top to bottom),
/// so column j of a source n-by-m image holds the window centered at
/// (j / (m-k+1) + k/2, j % (m-k+1) + k/2). q = (n-k+1)(m-k+1).
class ColumnMatrix {
public:
    ColumnMatrix(int rows, int cols, int source_height, int source_width,
                 std::vector<std::uint8_t> data);

    int rows() const { return rows_; }       // r = k*k
    int cols() const { return cols_; }       // q
    int source_height() const { return source_height_; }
    int source_width() const { return source_width_; }

    /// Contiguous view of column j (0-based scan index).
    std::span<const std::uint8_t> column(int j) const {
        return {data_.data() + static_cast<std::size_t>(j) * rows_,
                static_cast<std::size_t>(rows_)};
    }

    std::uint8_t at(int i, int j) const {
        return data_[static_cast<std::size_t>(j) * rows_ + i];
    }

private:
    int rows_;
    int cols_;
    int source_height_;
    int source_width_;
    std::vector<std::uint8_t> data_; // column-contiguous, rows_ * cols_
};

/// Number of valid window positions for an n-by-m image.
int column_count(const WindowConfig& cfg, int height, int width);

/// Unroll every valid window of the image into the column matrix.
/// Requires height >= k and width >= k.
ColumnMatrix build_columns(const ImageFragment& image, const WindowConfig& cfg);

/// Image coordinate (row, col), 0-based, of the central pixel of scan index j.
std::pair<int, int> center_of(int j, const WindowConfig& cfg, int height, int width);

/// Inverse of center_of: the scan index whose window is centered at (row, col).
int scan_index_of(int row, int col, const WindowConfig& cfg, int height, int width);

} // namespace filanet
