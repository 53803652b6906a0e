#pragma once

// Independent oracles the implementations are checked against: the naive
// quadruple-sum DCT, full 2-D gaussian convolution, per-pixel bilinear
// gather, windowed moments, and central finite differences for the CNN.
// These must stay free of the fast paths they verify.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "camid/cnn.hpp"
#include "camid/gaussian.hpp"
#include "camid/jpeg_features.hpp"
#include "camid/rng.hpp"
#include "camid/types.hpp"

namespace oracles {

constexpr double kPi = 3.141592653589793238462643383279502884;

// direct evaluation of the quadruple sum
inline camid::Block naive_dct2_8x8(const camid::Block& b) {
    camid::Block out{};
    for (int u = 0; u < 8; ++u) {
        const double au = u == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
        for (int v = 0; v < 8; ++v) {
            const double av = v == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
            double acc = 0.0;
            for (int x = 0; x < 8; ++x)
                for (int y = 0; y < 8; ++y)
                    acc += b[x * 8 + y] * std::cos((2.0 * x + 1.0) * u * kPi / 16.0) *
                           std::cos((2.0 * y + 1.0) * v * kPi / 16.0);
            out[u * 8 + v] = au * av * acc;
        }
    }
    return out;
}

inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// full 2-D convolution with the outer-product kernel, same reflect border
inline camid::Grid naive_gaussian_2d(const camid::Grid& in, double sigma) {
    const std::vector<double> k = camid::gaussian_kernel_1d(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    camid::Grid out = camid::Grid::zeros(in.rows, in.cols);
    for (int r = 0; r < in.rows; ++r) {
        for (int c = 0; c < in.cols; ++c) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    acc += k[dy + radius] * k[dx + radius] *
                           in.at(reflect(r + dy, in.rows), reflect(c + dx, in.cols));
            out.at(r, c) = acc;
        }
    }
    return out;
}

// windowed gaussian mean/variance at one point
struct PointMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline PointMoments naive_moments_at(const camid::Grid& g, double sigma, int r, int c) {
    const std::vector<double> k = camid::gaussian_kernel_1d(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    double mean = 0.0, second = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double w = k[dy + radius] * k[dx + radius];
            const double v = g.at(reflect(r + dy, g.rows), reflect(c + dx, g.cols));
            mean += w * v;
            second += w * v * v;
        }
    }
    PointMoments m;
    m.mean = mean;
    m.variance = std::max(0.0, second - mean * mean);
    return m;
}

// per-output-pixel 4-tap gather with the same half-pixel mapping
inline camid::RasterImage naive_resize_bilinear(const camid::RasterImage& rgb, int dst_h,
                                                int dst_w) {
    camid::RasterImage out =
        camid::RasterImage::make(dst_h, dst_w, 3, camid::PixelRange::Unit);
    const double scale_y = static_cast<double>(rgb.height) / dst_h;
    const double scale_x = static_cast<double>(rgb.width) / dst_w;
    for (int y = 0; y < dst_h; ++y) {
        double sy = (y + 0.5) * scale_y - 0.5;
        sy = std::min(static_cast<double>(rgb.height - 1), std::max(0.0, sy));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, rgb.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < dst_w; ++x) {
            double sx = (x + 0.5) * scale_x - 0.5;
            sx = std::min(static_cast<double>(rgb.width - 1), std::max(0.0, sx));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, rgb.width - 1);
            const double fx = sx - x0;
            for (int c = 0; c < 3; ++c) {
                const double v = (1.0 - fy) * ((1.0 - fx) * rgb.at(y0, x0, c) + fx * rgb.at(y0, x1, c)) +
                                 fy * ((1.0 - fx) * rgb.at(y1, x0, c) + fx * rgb.at(y1, x1, c));
                out.at(y, x, c) = v / 255.0;
            }
        }
    }
    return out;
}

inline camid::Block random_block(std::mt19937_64& gen, double lo = 0.0, double hi = 255.0) {
    camid::Block b{};
    for (double& v : b) v = camid::uniform_range(gen, lo, hi);
    return b;
}

inline camid::Grid random_grid(std::mt19937_64& gen, int rows, int cols, double lo, double hi) {
    camid::Grid g = camid::Grid::zeros(rows, cols);
    for (double& v : g.v) v = camid::uniform_range(gen, lo, hi);
    return g;
}

// ---------------------------------------------------------------------------
// CNN finite differences
// ---------------------------------------------------------------------------

struct GradCheck {
    double max_tensor_rel_error = 0.0;
    std::string worst_tensor;
};

// central differences with step eps on every parameter entry; the error is
// the per-tensor L2 ratio ||analytic - numeric|| / max(||numeric||, 1e-12)
inline GradCheck finite_difference_check(const camid::CnnSpec& spec, camid::CnnParams params,
                                         const std::vector<camid::RasterImage>& images,
                                         const std::vector<int>& labels, double eps) {
    std::vector<const camid::RasterImage*> batch;
    for (const auto& img : images) batch.push_back(&img);
    const camid::Grid y = camid::one_hot(labels, spec.num_classes);

    auto loss_at = [&](const camid::CnnParams& p) {
        const camid::Grid probs = camid::cnn_forward(spec, p, batch, nullptr, 1);
        return camid::cross_entropy(probs, y);
    };

    camid::BatchActivations cache;
    camid::cnn_forward(spec, params, batch, &cache, 1);
    const camid::CnnParams analytic = camid::cnn_backward(spec, params, cache, y, 1);

    static const char* names[] = {"conv_w", "conv_b", "dense1_w", "dense1_b", "dense2_w",
                                  "dense2_b"};
    GradCheck result;
    auto tensors = params.tensors();
    auto analytic_tensors = analytic.tensors();
    const std::size_t conv_count = analytic.conv_w.size();
    for (std::size_t t = 0; t < tensors.size(); ++t) {
        double diff2 = 0.0, num2 = 0.0;
        for (std::size_t i = 0; i < tensors[t]->v.size(); ++i) {
            const double saved = tensors[t]->v[i];
            tensors[t]->v[i] = saved + eps;
            const double up = loss_at(params);
            tensors[t]->v[i] = saved - eps;
            const double down = loss_at(params);
            tensors[t]->v[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double d = analytic_tensors[t]->v[i] - numeric;
            diff2 += d * d;
            num2 += numeric * numeric;
        }
        const double rel = std::sqrt(diff2) / std::max(std::sqrt(num2), 1e-12);
        if (rel > result.max_tensor_rel_error) {
            result.max_tensor_rel_error = rel;
            std::string label;
            if (t < conv_count)
                label = std::string(names[0]) + std::to_string(t);
            else if (t < 2 * conv_count)
                label = std::string(names[1]) + std::to_string(t - conv_count);
            else
                label = names[2 + (t - 2 * conv_count)];
            result.worst_tensor = label;
        }
    }
    return result;
}

// smooth random [0,1] images for gradient checks
inline std::vector<camid::RasterImage> random_unit_images(std::mt19937_64& gen, int count, int h,
                                                          int w, int channels) {
    std::vector<camid::RasterImage> out;
    for (int i = 0; i < count; ++i) {
        camid::RasterImage img = camid::RasterImage::make(h, w, channels, camid::PixelRange::Unit);
        for (double& p : img.pixels) p = camid::uniform_range(gen, 0.05, 0.95);
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace oracles
