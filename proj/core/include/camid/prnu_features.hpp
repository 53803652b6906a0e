#pragma once

#include <vector>

#include "camid/types.hpp"

namespace camid {

struct PrnuConfig {
    double sigma1 = 1.0;     // residual smoothing std
    double sigma_w = 2.0;    // local moment window std
    double sigma_n2 = 0.01;  // noise floor added to the Wiener denominator
    int crop = 512;          // fixed analysis size
    int stride = 8;          // grid subsampling factor of the flattened pattern

    int output_dim() const { return (crop / stride) * (crop / stride); }

    // sigma > 0, sigma_n2 > 0, crop >= 1 and divisible by stride
    void validate() const;
};

struct NoiseResidual {
    Grid r;
};

struct LocalMoments {
    Grid mean;
    Grid variance;  // clamped at 0
};

struct PrnuPattern {
    Grid k;
};

struct PrnuFeature {
    std::vector<double> g;
};

// Top-left-biased center crop: offsets floor((H-size)/2), floor((W-size)/2).
RasterImage center_crop(const RasterImage& gray, int size);

// R = I - G_sigma1 * I on a [0,1] grayscale image already cropped to
// cfg.crop. Throws Error("image too small for PRNU analysis") on a size
// mismatch.
NoiseResidual residual(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg);

// mu = G_w * R, var = max(0, G_w * R^2 - mu^2)
LocalMoments local_moments(const NoiseResidual& res, const PrnuConfig& cfg);

// Rhat(x) = (R(x) - mu(x)) * var(x) / (var(x) + sigma_n2)
Grid wiener_shrink(const NoiseResidual& res, const LocalMoments& moments, double sigma_n2);

struct PrnuBreakdown {
    NoiseResidual residual;
    LocalMoments moments;
    Grid wiener;  // Rhat
    PrnuPattern pattern;
};

// Full chain on a pre-cropped [0,1] image; pattern.k(x) == residual(x) - wiener(x)
// holds bitwise by construction.
PrnuBreakdown prnu_breakdown(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg);
PrnuPattern prnu_pattern(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg);

// center-crop -> K -> flatten row-major -> keep every (stride^2)-th entry,
// giving exactly (crop/stride)^2 values.
PrnuFeature prnu_feature_vector(const RasterImage& gray_unit, const PrnuConfig& cfg);

// Normalized cross-correlation of two equally-sized grids (mean-removed).
double pattern_correlation(const Grid& a, const Grid& b);

}  // namespace camid
