#include "camid/jpeg_features.hpp"

#include <cmath>

namespace camid {

namespace {

// Orthonormal 1-D DCT-II basis: T[u][x] = a(u) cos((2x+1) u pi / 16),
// a(0) = 1/sqrt(8), a(k) = 1/2.
const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> t{};
        const double pi = 3.141592653589793238462643383279502884;
        for (int u = 0; u < 8; ++u) {
            const double a = u == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
            for (int x = 0; x < 8; ++x)
                t[u][x] = a * std::cos((2.0 * x + 1.0) * u * pi / 16.0);
        }
        return t;
    }();
    return basis;
}

}  // namespace

RasterImage crop_to_block_multiple(const RasterImage& gray) {
    if (gray.channels != 1) throw Error("block analysis expects a grayscale image");
    if (gray.height < kBlockEdge || gray.width < kBlockEdge)
        throw Error("image too small for block analysis (need at least 8x8, got " +
                    std::to_string(gray.height) + "x" + std::to_string(gray.width) + ")");
    const int h = gray.height - gray.height % kBlockEdge;
    const int w = gray.width - gray.width % kBlockEdge;
    if (h == gray.height && w == gray.width) return gray;
    RasterImage out = RasterImage::make(h, w, 1, gray.range);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(y, x) = gray.at(y, x);
    return out;
}

BlockSet partition_into_blocks(const RasterImage& gray_cropped) {
    if (gray_cropped.channels != 1) throw Error("block analysis expects a grayscale image");
    if (gray_cropped.height % kBlockEdge != 0 || gray_cropped.width % kBlockEdge != 0)
        throw Error("image dimensions must be multiples of 8");
    BlockSet set;
    set.cropped_height = gray_cropped.height;
    set.cropped_width = gray_cropped.width;
    const int by = gray_cropped.height / kBlockEdge;
    const int bx = gray_cropped.width / kBlockEdge;
    set.blocks.resize(static_cast<std::size_t>(by) * bx);
    std::size_t m = 0;
    for (int y = 0; y < by; ++y) {
        for (int x = 0; x < bx; ++x, ++m) {
            Block& b = set.blocks[m];
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    b[r * 8 + c] = gray_cropped.at(y * 8 + r, x * 8 + c);
        }
    }
    return set;
}

Block dct2_8x8(const Block& pixels) {
    const auto& t = dct_basis();
    // rows first: tmp[x][v] = sum_y b[x][y] T[v][y]
    std::array<double, 64> tmp{};
    for (int x = 0; x < 8; ++x) {
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int y = 0; y < 8; ++y) acc += pixels[x * 8 + y] * t[v][y];
            tmp[x * 8 + v] = acc;
        }
    }
    Block out{};
    for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int x = 0; x < 8; ++x) acc += t[u][x] * tmp[x * 8 + v];
            out[u * 8 + v] = acc;
        }
    }
    return out;
}

Block idct2_8x8(const Block& coefficients) {
    const auto& t = dct_basis();
    // transpose passes of the orthonormal transform
    std::array<double, 64> tmp{};
    for (int u = 0; u < 8; ++u) {
        for (int y = 0; y < 8; ++y) {
            double acc = 0.0;
            for (int v = 0; v < 8; ++v) acc += coefficients[u * 8 + v] * t[v][y];
            tmp[u * 8 + y] = acc;
        }
    }
    Block out{};
    for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
            double acc = 0.0;
            for (int u = 0; u < 8; ++u) acc += t[u][x] * tmp[u * 8 + y];
            out[x * 8 + y] = acc;
        }
    }
    return out;
}

BlockDctStats block_stats(const BlockSet& coefficient_blocks) {
    const std::size_t m = coefficient_blocks.count();
    if (m < 2) throw Error("insufficient blocks for variance (need M >= 2)");

    BlockDctStats stats;
    // raster order over (u,v), DC slot (0,0) excluded: ac index = u*8+v-1
    for (int ac = 0; ac < kAcPositions; ++ac) {
        const int pos = ac + 1;
        double sum = 0.0;
        for (const Block& b : coefficient_blocks.blocks) sum += b[pos];
        const double mean = sum / static_cast<double>(m);
        double ss = 0.0;
        for (const Block& b : coefficient_blocks.blocks) {
            const double d = b[pos] - mean;
            ss += d * d;
        }
        stats.means[ac] = mean;
        stats.variances[ac] = ss / static_cast<double>(m - 1);
    }
    return stats;
}

JpegFeature jpeg_feature_vector(const RasterImage& gray) {
    BlockSet set = partition_into_blocks(crop_to_block_multiple(gray));
    for (Block& b : set.blocks) b = dct2_8x8(b);
    const BlockDctStats stats = block_stats(set);
    JpegFeature f;
    for (int i = 0; i < kAcPositions; ++i) {
        f.v[i] = stats.means[i];
        f.v[kAcPositions + i] = stats.variances[i];
    }
    return f;
}

}  // namespace camid
