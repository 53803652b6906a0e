#pragma once

#include <array>
#include <vector>

#include "camid/types.hpp"

namespace camid {

inline constexpr int kBlockEdge = 8;
inline constexpr int kAcPositions = 63;
inline constexpr int kJpegFeatureDim = 2 * kAcPositions;  // means then variances

using Block = std::array<double, 64>;  // 8x8, row-major

struct BlockSet {
    int cropped_height = 0;
    int cropped_width = 0;
    std::vector<Block> blocks;

    std::size_t count() const { return blocks.size(); }
};

// Per-AC-position statistics in raster order over (u,v), DC excluded.
struct BlockDctStats {
    std::array<double, kAcPositions> means{};
    std::array<double, kAcPositions> variances{};
};

struct JpegFeature {
    std::array<double, kJpegFeatureDim> v{};
};

// Keeps the top-left H'xW' region, H' = H - (H mod 8), W' = W - (W mod 8).
// Throws Error("image too small for block analysis") if H < 8 or W < 8.
RasterImage crop_to_block_multiple(const RasterImage& gray);

// Non-overlapping 8x8 blocks in raster order; input dims must be multiples of 8.
BlockSet partition_into_blocks(const RasterImage& gray_cropped);

// Orthonormal 2-D DCT-II with alpha(0) = 1/sqrt(8), alpha(k) = 1/2 for k >= 1.
Block dct2_8x8(const Block& pixels);
Block idct2_8x8(const Block& coefficients);

// Empirical mean and unbiased variance (divisor M-1) of each AC coefficient
// over the given coefficient blocks. Requires M >= 2.
BlockDctStats block_stats(const BlockSet& coefficient_blocks);

// crop -> partition -> DCT per block -> stats -> [63 means || 63 variances].
JpegFeature jpeg_feature_vector(const RasterImage& gray);

}  // namespace camid
