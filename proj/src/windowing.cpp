#include "filanet/windowing.hpp"

#include <string>

namespace filanet {

WindowConfig::WindowConfig(int k_) : k(k_) {
    if (k < 1 || k % 2 == 0) {
        throw DataError("window size k must be odd and >= 1, got " + std::to_string(k));
    }
}

ColumnMatrix::ColumnMatrix(int rows, int cols, int source_height, int source_width,
                           std::vector<std::uint8_t> data)
    : rows_(rows), cols_(cols), source_height_(source_height),
      source_width_(source_width), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(rows_) * cols_) {
        throw DataError("ColumnMatrix: data size does not match r*q");
    }
}

int column_count(const WindowConfig& cfg, int height, int width) {
    if (height < cfg.k || width < cfg.k) {
        throw DataError("fragment " + std::to_string(height) + "x" + std::to_string(width) +
                        " is smaller than the " + std::to_string(cfg.k) + "x" +
                        std::to_string(cfg.k) + " window");
    }
    return (height - cfg.k + 1) * (width - cfg.k + 1);
}

ColumnMatrix build_columns(const ImageFragment& image, const WindowConfig& cfg) {
    const int n = image.height();
    const int m = image.width();
    const int q = column_count(cfg, n, m);
    const int r = cfg.r();
    const int k = cfg.k;

    std::vector<std::uint8_t> data(static_cast<std::size_t>(r) * q);
    std::size_t out = 0;
    for (int top = 0; top <= n - k; ++top) {
        for (int left = 0; left <= m - k; ++left) {
            for (int wr = 0; wr < k; ++wr) {
                const std::uint8_t* src = &image.pixels()[
                    static_cast<std::size_t>(top + wr) * m + left];
                for (int wc = 0; wc < k; ++wc) {
                    data[out++] = src[wc];
                }
            }
        }
    }
    return ColumnMatrix(r, q, n, m, std::move(data));
}

std::pair<int, int> center_of(int j, const WindowConfig& cfg, int height, int width) {
    const int q = column_count(cfg, height, width);
    if (j < 0 || j >= q) {
        throw DataError("scan index " + std::to_string(j) + " out of range 0.." +
                        std::to_string(q - 1));
    }
    const int per_row = width - cfg.k + 1;
    return {j / per_row + cfg.offset(), j % per_row + cfg.offset()};
}

int scan_index_of(int row, int col, const WindowConfig& cfg, int height, int width) {
    column_count(cfg, height, width); // validates dims
    const int off = cfg.offset();
    if (row < off || row >= height - off || col < off || col >= width - off) {
        throw DataError("(" + std::to_string(row) + ", " + std::to_string(col) +
                        ") is not an interior pixel for k=" + std::to_string(cfg.k));
    }
    const int per_row = width - cfg.k + 1;
    return (row - off) * per_row + (col - off);
}

} // namespace filanet
