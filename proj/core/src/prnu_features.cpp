#include "camid/prnu_features.hpp"

#include <cmath>

#include "camid/gaussian.hpp"
#include "camid/ingest.hpp"

namespace camid {

void PrnuConfig::validate() const {
    if (!(sigma1 > 0.0) || !(sigma_w > 0.0)) throw ConfigError("prnu sigmas must be > 0");
    if (!(sigma_n2 > 0.0)) throw ConfigError("prnu noise floor sigma_n2 must be > 0");
    if (crop < 1) throw ConfigError("prnu crop must be >= 1");
    if (stride < 1 || crop % stride != 0)
        throw ConfigError("prnu stride must divide the crop size");
}

RasterImage center_crop(const RasterImage& gray, int size) {
    if (gray.channels != 1) throw Error("center_crop expects a grayscale image");
    if (gray.height < size || gray.width < size)
        throw Error("image too small for PRNU analysis (need " + std::to_string(size) + "x" +
                    std::to_string(size) + ", got " + std::to_string(gray.height) + "x" +
                    std::to_string(gray.width) + ")");
    const int oy = (gray.height - size) / 2;
    const int ox = (gray.width - size) / 2;
    RasterImage out = RasterImage::make(size, size, 1, gray.range);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) out.at(y, x) = gray.at(oy + y, ox + x);
    return out;
}

NoiseResidual residual(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg) {
    cfg.validate();
    if (gray_unit_cropped.channels != 1 || gray_unit_cropped.range != PixelRange::Unit)
        throw Error("residual expects a [0,1] grayscale image");
    if (gray_unit_cropped.height != cfg.crop || gray_unit_cropped.width != cfg.crop)
        throw Error("image too small for PRNU analysis (expected the configured crop size)");

    const Grid img = to_grid(gray_unit_cropped);
    const Grid smooth = gaussian_filter(img, cfg.sigma1);
    NoiseResidual res;
    res.r = Grid::zeros(img.rows, img.cols);
    for (std::size_t i = 0; i < img.v.size(); ++i) res.r.v[i] = img.v[i] - smooth.v[i];
    return res;
}

LocalMoments local_moments(const NoiseResidual& res, const PrnuConfig& cfg) {
    LocalMoments m;
    m.mean = gaussian_filter(res.r, cfg.sigma_w);
    Grid squared = Grid::zeros(res.r.rows, res.r.cols);
    for (std::size_t i = 0; i < res.r.v.size(); ++i) squared.v[i] = res.r.v[i] * res.r.v[i];
    Grid smooth_sq = gaussian_filter(squared, cfg.sigma_w);
    m.variance = Grid::zeros(res.r.rows, res.r.cols);
    for (std::size_t i = 0; i < smooth_sq.v.size(); ++i) {
        const double var = smooth_sq.v[i] - m.mean.v[i] * m.mean.v[i];
        m.variance.v[i] = var > 0.0 ? var : 0.0;  // clamp float cancellation
    }
    return m;
}

Grid wiener_shrink(const NoiseResidual& res, const LocalMoments& moments, double sigma_n2) {
    if (!(sigma_n2 > 0.0)) throw ConfigError("sigma_n2 must be > 0");
    Grid out = Grid::zeros(res.r.rows, res.r.cols);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double var = moments.variance.v[i];
        out.v[i] = (res.r.v[i] - moments.mean.v[i]) * (var / (var + sigma_n2));
    }
    return out;
}

PrnuBreakdown prnu_breakdown(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg) {
    PrnuBreakdown b;
    b.residual = residual(gray_unit_cropped, cfg);
    b.moments = local_moments(b.residual, cfg);
    b.wiener = wiener_shrink(b.residual, b.moments, cfg.sigma_n2);
    b.pattern.k = Grid::zeros(b.residual.r.rows, b.residual.r.cols);
    for (std::size_t i = 0; i < b.pattern.k.v.size(); ++i)
        b.pattern.k.v[i] = b.residual.r.v[i] - b.wiener.v[i];
    return b;
}

PrnuPattern prnu_pattern(const RasterImage& gray_unit_cropped, const PrnuConfig& cfg) {
    return prnu_breakdown(gray_unit_cropped, cfg).pattern;
}

PrnuFeature prnu_feature_vector(const RasterImage& gray_unit, const PrnuConfig& cfg) {
    cfg.validate();
    const RasterImage cropped = center_crop(gray_unit, cfg.crop);
    const PrnuPattern pattern = prnu_pattern(cropped, cfg);

    // flat step stride^2 over the row-major pattern gives (crop/stride)^2 entries
    const std::size_t step = static_cast<std::size_t>(cfg.stride) * cfg.stride;
    const int dim = cfg.output_dim();
    PrnuFeature f;
    f.g.resize(dim);
    for (int i = 0; i < dim; ++i) f.g[i] = pattern.k.v[static_cast<std::size_t>(i) * step];
    return f;
}

double pattern_correlation(const Grid& a, const Grid& b) {
    if (a.rows != b.rows || a.cols != b.cols) throw Error("correlation needs equal grid sizes");
    const std::size_t n = a.v.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.v[i];
        mb += b.v[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xa = a.v[i] - ma;
        const double xb = b.v[i] - mb;
        num += xa * xb;
        da += xa * xa;
        db += xb * xb;
    }
    const double denom = std::sqrt(da) * std::sqrt(db);
    return denom > 0.0 ? num / denom : 0.0;
}

}  // namespace camid
