#include <doctest.h>

#include <cmath>

#include "camid/gaussian.hpp"
#include "camid/ingest.hpp"
#include "camid/prnu_features.hpp"
#include "camid/synth.hpp"
#include "oracles.hpp"

using namespace camid;

namespace {

RasterImage unit_image_from(const Grid& g) {
    RasterImage img = grid_to_image(g, PixelRange::Unit);
    return img;
}

PrnuConfig small_config(int crop) {
    PrnuConfig cfg;
    cfg.crop = crop;
    cfg.stride = crop >= 8 ? 8 : 1;
    return cfg;
}

}  // namespace

TEST_CASE("gaussian_kernel_1d shape and normalization") {
    const auto k = gaussian_kernel_1d(1.0);
    CHECK(k.size() == 9);  // radius ceil(4*sigma) = 4
    double sum = 0.0;
    for (double w : k) sum += w;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k[4] == *std::max_element(k.begin(), k.end()));
    CHECK(gaussian_kernel_1d(2.5).size() == 2 * 10 + 1);
    CHECK_THROWS_AS(gaussian_kernel_1d(0.0), ConfigError);
    CHECK_THROWS_AS(gaussian_kernel_1d(-1.0), ConfigError);
}

TEST_CASE("gaussian_filter preserves constants bitwise") {
    Grid g = Grid::zeros(13, 17);
    for (double& v : g.v) v = 0.4711;
    const Grid out = gaussian_filter(g, 1.3);
    for (double v : out.v) CHECK(v == 0.4711);
}

TEST_CASE("gaussian_filter impulse response and 2-D oracle") {
    SUBCASE("centered impulse: center equals the squared 1-D center weight") {
        Grid g = Grid::zeros(21, 21);
        g.at(10, 10) = 1.0;
        const Grid out = gaussian_filter(g, 1.0);
        const auto k = gaussian_kernel_1d(1.0);
        CHECK(out.at(10, 10) == doctest::Approx(k[4] * k[4]).epsilon(1e-12));
        CHECK(out.at(10, 9) == doctest::Approx(k[4] * k[3]).epsilon(1e-12));
    }

    SUBCASE("separable equals the full 2-D convolution") {
        std::mt19937_64 gen(8);
        const Grid g = oracles::random_grid(gen, 32, 32, -1.0, 1.0);
        const Grid fast = gaussian_filter(g, 1.5);
        const Grid naive = oracles::naive_gaussian_2d(g, 1.5);
        for (std::size_t i = 0; i < g.v.size(); ++i)
            CHECK(std::abs(fast.v[i] - naive.v[i]) < 1e-10);
    }
}

TEST_CASE("residual of a constant image is exactly zero") {
    const PrnuConfig cfg = small_config(32);
    Grid g = Grid::zeros(32, 32);
    for (double& v : g.v) v = 0.6;
    const NoiseResidual res = residual(unit_image_from(g), cfg);
    for (double v : res.r.v) CHECK(v == 0.0);
}

TEST_CASE("residual is a high-pass") {
    const PrnuConfig cfg = small_config(32);

    SUBCASE("single bright pixel: positive spike, negative ring, near-zero sum") {
        Grid g = Grid::zeros(32, 32);
        for (double& v : g.v) v = 0.2;
        g.at(16, 16) = 0.9;
        const NoiseResidual res = residual(unit_image_from(g), cfg);
        CHECK(res.r.at(16, 16) > 0.0);
        CHECK(res.r.at(16, 15) < 0.0);
        CHECK(res.r.at(15, 16) < 0.0);
        double sum = 0.0;
        for (double v : res.r.v) sum += v;
        CHECK(std::abs(sum) < 1e-9);  // reflect borders conserve mass
    }

    SUBCASE("checkerboard carries far more residual energy than a smooth ramp") {
        Grid checker = Grid::zeros(32, 32);
        Grid ramp = Grid::zeros(32, 32);
        for (int r = 0; r < 32; ++r)
            for (int c = 0; c < 32; ++c) {
                checker.at(r, c) = ((r + c) % 2 == 0) ? 1.0 : 0.0;
                ramp.at(r, c) = static_cast<double>(c) / 31.0;  // same [0,1] span
            }
        auto energy = [&](const Grid& g) {
            const NoiseResidual res = residual(unit_image_from(g), cfg);
            double e = 0.0;
            for (double v : res.r.v) e += v * v;
            return e;
        };
        CHECK(energy(checker) > 25.0 * energy(ramp));
    }
}

TEST_CASE("local_moments identities and oracle") {
    const PrnuConfig cfg = small_config(32);

    SUBCASE("zero residual gives zero moments") {
        NoiseResidual res;
        res.r = Grid::zeros(32, 32);
        const LocalMoments m = local_moments(res, cfg);
        for (double v : m.mean.v) CHECK(v == 0.0);
        for (double v : m.variance.v) CHECK(v == 0.0);
    }

    SUBCASE("constant residual: mean c, variance 0, both exact") {
        NoiseResidual res;
        res.r = Grid::zeros(32, 32);
        for (double& v : res.r.v) v = -0.125;
        const LocalMoments m = local_moments(res, cfg);
        for (double v : m.mean.v) CHECK(v == -0.125);
        for (double v : m.variance.v) CHECK(v == 0.0);
    }

    SUBCASE("random residual: nonnegative variance, windowed oracle at points") {
        std::mt19937_64 gen(12);
        NoiseResidual res;
        res.r = oracles::random_grid(gen, 32, 32, -0.5, 0.5);
        const LocalMoments m = local_moments(res, cfg);
        for (double v : m.variance.v) CHECK(v >= 0.0);
        for (const auto [r, c] : {std::pair{0, 0}, {5, 19}, {16, 16}, {31, 31}, {2, 30}}) {
            const auto point = oracles::naive_moments_at(res.r, cfg.sigma_w, r, c);
            CHECK(m.mean.at(r, c) == doctest::Approx(point.mean).epsilon(1e-8));
            CHECK(m.variance.at(r, c) == doctest::Approx(point.variance).epsilon(1e-8));
        }
    }
}

TEST_CASE("wiener_shrink pointwise contract") {
    NoiseResidual res;
    res.r = Grid::zeros(1, 3);
    LocalMoments m;
    m.mean = Grid::zeros(1, 3);
    m.variance = Grid::zeros(1, 3);

    // R=2, mu=0, var=3, sigma_n2=1 -> 1.5
    res.r.at(0, 0) = 2.0;
    m.variance.at(0, 0) = 3.0;
    // var = 0 -> 0 regardless of R
    res.r.at(0, 1) = 42.0;
    // var >> sigma_n2 -> gain ~ 1
    res.r.at(0, 2) = 1.0;
    m.variance.at(0, 2) = 1e9;

    const Grid shrunk = wiener_shrink(res, m, 1.0);
    CHECK(shrunk.at(0, 0) == 1.5);
    CHECK(shrunk.at(0, 1) == 0.0);
    CHECK(shrunk.at(0, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(wiener_shrink(res, m, 0.0), ConfigError);
}

TEST_CASE("prnu pattern identities") {
    const PrnuConfig cfg = small_config(32);
    std::mt19937_64 gen(21);
    const Grid g = oracles::random_grid(gen, 32, 32, 0.0, 1.0);
    const RasterImage img = unit_image_from(g);

    const PrnuBreakdown b = prnu_breakdown(img, cfg);

    SUBCASE("K(x) == R(x) - Rhat(x) bitwise everywhere") {
        for (std::size_t i = 0; i < b.pattern.k.v.size(); ++i)
            CHECK(b.pattern.k.v[i] == b.residual.r.v[i] - b.wiener.v[i]);
    }

    SUBCASE("wiener gain lies in [0,1), so |Rhat| <= |R - mu|") {
        for (std::size_t i = 0; i < b.wiener.v.size(); ++i) {
            const double var = b.moments.variance.v[i];
            const double gain = var / (var + cfg.sigma_n2);
            CHECK(gain >= 0.0);
            CHECK(gain < 1.0);
            CHECK(std::abs(b.wiener.v[i]) <=
                  std::abs(b.residual.r.v[i] - b.moments.mean.v[i]) + 1e-15);
        }
    }

    SUBCASE("constant image: pattern and feature vector exactly zero") {
        Grid flat = Grid::zeros(32, 32);
        for (double& v : flat.v) v = 0.25;
        const PrnuPattern p = prnu_pattern(unit_image_from(flat), cfg);
        for (double v : p.k.v) CHECK(v == 0.0);
        const PrnuFeature f = prnu_feature_vector(unit_image_from(flat), cfg);
        CHECK(f.g.size() == static_cast<std::size_t>(cfg.output_dim()));
        for (double v : f.g) CHECK(v == 0.0);
    }
}

TEST_CASE("prnu_feature_vector contract") {
    SUBCASE("configured output dimension: crop 512 stride 8 -> 4096") {
        PrnuConfig cfg;
        CHECK(cfg.output_dim() == 4096);
        cfg.crop = 64;
        CHECK(cfg.output_dim() == 64);
    }

    SUBCASE("center crop and determinism") {
        const PrnuConfig cfg = small_config(32);
        std::mt19937_64 gen(22);
        const Grid g = oracles::random_grid(gen, 48, 40, 0.0, 1.0);
        const RasterImage img = unit_image_from(g);
        const PrnuFeature a = prnu_feature_vector(img, cfg);
        const PrnuFeature b = prnu_feature_vector(img, cfg);
        CHECK(a.g.size() == 16);  // (32/8)^2
        CHECK(a.g == b.g);        // bitwise
    }

    SUBCASE("undersized image is rejected") {
        const PrnuConfig cfg = small_config(64);
        const RasterImage img = RasterImage::make(32, 80, 1, PixelRange::Unit);
        CHECK_THROWS_WITH_AS(prnu_feature_vector(img, cfg), doctest::Contains("too small"),
                             Error);
    }

    SUBCASE("stride must divide the crop") {
        PrnuConfig cfg;
        cfg.crop = 30;
        cfg.stride = 8;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("same-device patterns correlate above cross-device patterns") {
    SynthConfig cfg;
    cfg.mode = SynthMode::Prnu;
    cfg.devices = 2;
    cfg.per_device = 2;
    cfg.size = 128;
    cfg.strength = 0.02;
    cfg.seed = 1234;
    const auto specs = make_device_specs(cfg);

    PrnuConfig prnu = small_config(128);
    auto pattern_of = [&](int device, int index) {
        const RasterImage rgb =
            cfg.mode == SynthMode::Prnu ? gen_prnu_image(specs[device], cfg, device, index)
                                        : RasterImage{};
        const RasterImage gray = to_unit_range(to_grayscale(rgb));
        return prnu_pattern(center_crop(gray, prnu.crop), prnu).k;
    };

    const Grid same_a = pattern_of(0, 0);
    const Grid same_b = pattern_of(0, 1);
    const Grid other = pattern_of(1, 0);

    const double same_corr = pattern_correlation(same_a, same_b);
    const double cross_corr = pattern_correlation(same_a, other);
    CHECK(same_corr > cross_corr + 0.1);  // margin from the module invariant
}
