#include "camid/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "camid/gaussian.hpp"
#include "camid/ingest.hpp"
#include "camid/jpeg_features.hpp"
#include "camid/rng.hpp"

namespace camid {

namespace {

// seed-domain tags keep the per-purpose streams apart
constexpr std::uint64_t kSceneDomain = 0x5ce7e;
constexpr std::uint64_t kPatternDomain = 0x9a77e47;
constexpr std::uint64_t kNoiseDomain = 0x70153;

}  // namespace

void SyntheticDeviceSpec::validate() const {
    for (int q : quant_table)
        if (q < 1) throw ConfigError("quantization table entries must be >= 1");
    if (pattern_strength < 0.0 || pattern_strength > 0.1)
        throw ConfigError("pattern strength must be in [0, 0.1]");
}

void SynthConfig::validate() const {
    if (devices < 1 || devices > 99) throw ConfigError("devices must be in [1, 99]");
    if (per_device < 1) throw ConfigError("per-device image count must be >= 1");
    if (size < 8 || size % 8 != 0) throw ConfigError("image size must be a positive multiple of 8");
    if (strength < 0.0 || strength > 0.1) throw ConfigError("strength must be in [0, 0.1]");
    if (!(base_sigma > 0.0) || !(base_amplitude > 0.0) || readout_noise < 0.0)
        throw ConfigError("invalid synth scene parameters");
}

std::vector<SyntheticDeviceSpec> make_device_specs(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<SyntheticDeviceSpec> specs;
    specs.reserve(cfg.devices);
    char name[16];
    for (int d = 0; d < cfg.devices; ++d) {
        std::snprintf(name, sizeof(name), "dev%02d", d);
        SyntheticDeviceSpec spec;
        spec.name = name;
        // geometric base step with a per-device frequency tilt; device 0 is
        // the identity table
        const double step = std::pow(3.0, static_cast<double>(d));
        const double tilt = 0.5 * d;
        for (int u = 0; u < 8; ++u) {
            for (int v = 0; v < 8; ++v) {
                const double q = step * (1.0 + tilt * (u + v) / 14.0);
                spec.quant_table[u * 8 + v] = std::max(1, static_cast<int>(std::lround(q)));
            }
        }
        spec.pattern_seed = mix_seed(cfg.seed, kPatternDomain, static_cast<std::uint64_t>(d));
        spec.pattern_strength = cfg.strength;
        spec.validate();
        specs.push_back(std::move(spec));
    }
    return specs;
}

Grid base_scene(int size, std::uint64_t scene_seed, double sigma, double amplitude) {
    std::mt19937_64 gen(scene_seed);
    Grid noise = Grid::zeros(size, size);
    for (double& v : noise.v) v = normal_draw(gen);
    Grid smooth = gaussian_filter(noise, sigma);

    double mean = 0.0;
    for (double v : smooth.v) mean += v;
    mean /= static_cast<double>(smooth.v.size());
    double var = 0.0;
    for (double v : smooth.v) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(smooth.v.size());
    const double scale = var > 0.0 ? amplitude / std::sqrt(var) : 0.0;

    for (double& v : smooth.v) {
        const double value = 128.0 + scale * (v - mean);
        v = std::min(255.0, std::max(0.0, value));
    }
    return smooth;
}

Grid device_pattern(int size, std::uint64_t pattern_seed) {
    std::mt19937_64 gen(pattern_seed);
    Grid k = Grid::zeros(size, size);
    for (double& v : k.v) v = normal_draw(gen);
    return k;
}

namespace {

RasterImage gray_grid_to_rgb_u8(const Grid& g) {
    RasterImage img = RasterImage::make(g.rows, g.cols, 3, PixelRange::U8);
    for (int y = 0; y < g.rows; ++y) {
        for (int x = 0; x < g.cols; ++x) {
            const double v =
                std::min(255.0, std::max(0.0, std::round(g.at(y, x))));
            img.at(y, x, 0) = v;
            img.at(y, x, 1) = v;
            img.at(y, x, 2) = v;
        }
    }
    return img;
}

}  // namespace

std::uint64_t scene_seed(const SynthConfig& cfg, int device_index, int image_index) {
    return mix_seed(mix_seed(cfg.seed, kSceneDomain, static_cast<std::uint64_t>(device_index)),
                    static_cast<std::uint64_t>(image_index));
}

RasterImage gen_quantized_image(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                                int device_index, int image_index) {
    device.validate();
    cfg.validate();
    Grid scene = base_scene(cfg.size, scene_seed(cfg, device_index, image_index),
                            cfg.base_sigma, cfg.base_amplitude);
    // integer pixels before the block pipeline, like a decoded capture
    for (double& v : scene.v) v = std::round(v);

    const int blocks = cfg.size / kBlockEdge;
    for (int by = 0; by < blocks; ++by) {
        for (int bx = 0; bx < blocks; ++bx) {
            Block b{};
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c) b[r * 8 + c] = scene.at(by * 8 + r, bx * 8 + c);
            Block coeff = dct2_8x8(b);
            for (int i = 0; i < 64; ++i) {
                const double q = static_cast<double>(device.quant_table[i]);
                coeff[i] = std::round(coeff[i] / q) * q;
            }
            const Block rec = idct2_8x8(coeff);
            for (int r = 0; r < 8; ++r)
                for (int c = 0; c < 8; ++c)
                    scene.at(by * 8 + r, bx * 8 + c) =
                        std::min(255.0, std::max(0.0, rec[r * 8 + c]));
        }
    }
    return gray_grid_to_rgb_u8(scene);
}

Grid gen_prnu_image_real(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                         int device_index, int image_index) {
    device.validate();
    cfg.validate();
    const Grid scene = base_scene(cfg.size, scene_seed(cfg, device_index, image_index),
                                  cfg.base_sigma, cfg.base_amplitude);
    const Grid pattern = device_pattern(cfg.size, device.pattern_seed);

    std::mt19937_64 noise_gen(
        mix_seed(mix_seed(cfg.seed, kNoiseDomain, static_cast<std::uint64_t>(device_index)),
                 static_cast<std::uint64_t>(image_index)));
    Grid out = Grid::zeros(cfg.size, cfg.size);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double theta = cfg.readout_noise > 0.0 ? cfg.readout_noise * normal_draw(noise_gen) : 0.0;
        out.v[i] = scene.v[i] * (1.0 + device.pattern_strength * pattern.v[i]) + theta;
    }
    return out;
}

RasterImage gen_prnu_image(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                           int device_index, int image_index) {
    return gray_grid_to_rgb_u8(gen_prnu_image_real(device, cfg, device_index, image_index));
}

LabeledImages gen_dataset(const SynthConfig& cfg) {
    const auto specs = make_device_specs(cfg);
    std::vector<std::string> names;
    names.reserve(specs.size());
    for (const auto& s : specs) names.push_back(s.name);

    LabeledImages out;
    out.device_labels = make_labels(names);
    for (int d = 0; d < cfg.devices; ++d) {
        for (int i = 0; i < cfg.per_device; ++i) {
            out.images.push_back(cfg.mode == SynthMode::Quantization
                                     ? gen_quantized_image(specs[d], cfg, d, i)
                                     : gen_prnu_image(specs[d], cfg, d, i));
            out.labels.push_back(d);
        }
    }
    return out;
}

void write_synthetic_dataset(const SynthConfig& cfg, const std::filesystem::path& out_root) {
    namespace fs = std::filesystem;
    cfg.validate();
    const auto specs = make_device_specs(cfg);

    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec || !fs::is_directory(out_root))
        throw ConfigError("cannot create output directory " + out_root.string());

    char filename[32];
    for (int d = 0; d < cfg.devices; ++d) {
        const fs::path dir = out_root / specs[d].name;
        fs::create_directories(dir);
        for (int i = 0; i < cfg.per_device; ++i) {
            const RasterImage img = cfg.mode == SynthMode::Quantization
                                        ? gen_quantized_image(specs[d], cfg, d, i)
                                        : gen_prnu_image(specs[d], cfg, d, i);
            std::snprintf(filename, sizeof(filename), "img%04d.ppm", i);
            write_ppm(img, dir / filename);
        }
    }

    nlohmann::json manifest;
    manifest["mode"] = cfg.mode == SynthMode::Quantization ? "quantization" : "prnu";
    manifest["seed"] = cfg.seed;
    manifest["size"] = cfg.size;
    manifest["per_device"] = cfg.per_device;
    manifest["strength"] = cfg.strength;
    manifest["base_sigma"] = cfg.base_sigma;
    manifest["base_amplitude"] = cfg.base_amplitude;
    manifest["readout_noise"] = cfg.readout_noise;
    nlohmann::json devices = nlohmann::json::array();
    for (const auto& spec : specs) {
        nlohmann::json d;
        d["name"] = spec.name;
        d["pattern_seed"] = spec.pattern_seed;
        d["pattern_strength"] = spec.pattern_strength;
        if (cfg.mode == SynthMode::Quantization) d["quant_table"] = spec.quant_table;
        devices.push_back(std::move(d));
    }
    manifest["devices"] = std::move(devices);

    std::ofstream out(out_root / "manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write manifest.json");
    out << manifest.dump(2) << "\n";
}

}  // namespace camid
