#include <doctest.h>

#include <random>
#include <vector>

#include "filanet/windowing.hpp"

using namespace filanet;

namespace {

ImageFragment random_fragment(std::mt19937& rng, int n, int m) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(n) * m);
    for (auto& v : px) v = 1 + rng() % 255;
    return ImageFragment(n, m, px);
}

ImageFragment counting_fragment(int n, int m) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(n) * m);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(i + 1);
    return ImageFragment(n, m, px);
}

// Brute-force enumeration of windows, deliberately separate from the
// implementation path it checks.
void check_against_bruteforce(const ImageFragment& img, const WindowConfig& cfg) {
    const ColumnMatrix z = build_columns(img, cfg);
    const int k = cfg.k;
    REQUIRE(z.cols() == (img.height() - k + 1) * (img.width() - k + 1));
    REQUIRE(z.rows() == k * k);
    int j = 0;
    for (int top = 0; top <= img.height() - k; ++top) {
        for (int left = 0; left <= img.width() - k; ++left, ++j) {
            for (int wr = 0; wr < k; ++wr) {
                for (int wc = 0; wc < k; ++wc) {
                    REQUIRE(z.at(wr * k + wc, j) == img.at(top + wr, left + wc));
                }
            }
        }
    }
}

} // namespace

TEST_CASE("window config validates oddness") {
    CHECK_THROWS_AS(WindowConfig(2), DataError);
    CHECK_THROWS_AS(WindowConfig(0), DataError);
    CHECK_THROWS_AS(WindowConfig(-3), DataError);
    CHECK(WindowConfig(1).r() == 1);
    CHECK(WindowConfig(5).r() == 25);
    CHECK(WindowConfig(5).center_index() == 12);
}

TEST_CASE("a k-by-k fragment yields the single unrolled column") {
    const ImageFragment img = counting_fragment(3, 3);
    const ColumnMatrix z = build_columns(img, WindowConfig(3));
    CHECK(z.cols() == 1);
    for (int i = 0; i < 9; ++i) CHECK(z.at(i, 0) == i + 1);
    // central pixel sits at position (r+1)/2, i.e. index 4
    CHECK(z.at(WindowConfig(3).center_index(), 0) == img.at(1, 1));
}

TEST_CASE("4x4 fragment with k=3 produces the documented columns") {
    const ImageFragment img = counting_fragment(4, 4);
    const ColumnMatrix z = build_columns(img, WindowConfig(3));
    CHECK(z.cols() == 4);
    const std::vector<std::uint8_t> first = {1, 2, 3, 5, 6, 7, 9, 10, 11};
    for (int i = 0; i < 9; ++i) CHECK(z.at(i, 0) == first[static_cast<std::size_t>(i)]);
    check_against_bruteforce(img, WindowConfig(3));
}

TEST_CASE("build_columns matches brute force on random fragments") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 1 + 2 * static_cast<int>(rng() % 3); // 1, 3, 5
        const int n = k + static_cast<int>(rng() % (13 - k));
        const int m = k + static_cast<int>(rng() % (13 - k));
        check_against_bruteforce(random_fragment(rng, n, m), WindowConfig(k));
    }
}

TEST_CASE("fragment smaller than the window is rejected") {
    const ImageFragment img = counting_fragment(2, 5);
    CHECK_THROWS_AS(build_columns(img, WindowConfig(3)), DataError);
}

TEST_CASE("center_of maps the first and last scan index") {
    const WindowConfig cfg(3);
    // 0-based (1, 1), i.e. (2, 2) in 1-based coordinates
    CHECK(center_of(0, cfg, 6, 8) == std::pair{1, 1});
    const int q = column_count(cfg, 6, 8);
    CHECK(center_of(q - 1, cfg, 6, 8) == std::pair{4, 6});
    CHECK_THROWS_AS(center_of(q, cfg, 6, 8), DataError);
    CHECK_THROWS_AS(center_of(-1, cfg, 6, 8), DataError);
}

TEST_CASE("center_of is a bijection onto the interior of a 7x9 fragment") {
    const WindowConfig cfg(3);
    const int n = 7, m = 9;
    const int q = column_count(cfg, n, m);
    std::vector<int> seen(static_cast<std::size_t>(n) * m, 0);
    for (int j = 0; j < q; ++j) {
        const auto [row, col] = center_of(j, cfg, n, m);
        CHECK(scan_index_of(row, col, cfg, n, m) == j);
        seen[static_cast<std::size_t>(row) * m + col] += 1;
    }
    int interior = 0;
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < m; ++col) {
            const int hits = seen[static_cast<std::size_t>(row) * m + col];
            const bool is_interior = row >= 1 && row <= n - 2 && col >= 1 && col <= m - 2;
            CHECK(hits == (is_interior ? 1 : 0));
            interior += is_interior ? 1 : 0;
        }
    }
    CHECK(interior == q);
}

TEST_CASE("central positions of all columns reproduce the interior crop") {
    std::mt19937 rng(11);
    const ImageFragment img = random_fragment(rng, 9, 12);
    const WindowConfig cfg(5);
    const ColumnMatrix z = build_columns(img, cfg);
    for (int j = 0; j < z.cols(); ++j) {
        const auto [row, col] = center_of(j, cfg, img.height(), img.width());
        CHECK(z.at(cfg.center_index(), j) == img.at(row, col));
    }
}
