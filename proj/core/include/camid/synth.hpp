#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "camid/types.hpp"

namespace camid {

// One synthetic camera. Quantization devices differ by their 8x8 table,
// PRNU devices by a fixed per-device multiplicative pattern.
struct SyntheticDeviceSpec {
    std::string name;
    std::array<int, 64> quant_table{};  // entries >= 1
    std::uint64_t pattern_seed = 0;
    double pattern_strength = 0.0;  // in [0, 0.1]

    void validate() const;
};

enum class SynthMode { Quantization, Prnu };

struct SynthConfig {
    SynthMode mode = SynthMode::Quantization;
    int devices = 4;
    int per_device = 50;
    int size = 512;  // square images, must be a multiple of 8
    double strength = 0.02;
    std::uint64_t seed = 42;
    double base_sigma = 8.0;      // smoothness of the base scenes
    double base_amplitude = 28.0; // gray-level std around mid gray
    double readout_noise = 1.0;   // additive noise, gray levels (prnu mode)

    void validate() const;
};

std::vector<SyntheticDeviceSpec> make_device_specs(const SynthConfig& cfg);

// Seed of the base scene behind image (device_index, image_index).
std::uint64_t scene_seed(const SynthConfig& cfg, int device_index, int image_index);

// Seeded smooth random field: low-pass-filtered white noise rescaled to
// mean 128, std `amplitude`, clamped to [0,255].
Grid base_scene(int size, std::uint64_t scene_seed, double sigma, double amplitude);

// Per-device iid standard normal grid.
Grid device_pattern(int size, std::uint64_t pattern_seed);

// base scene -> block DCT -> quantize/dequantize with the device table ->
// inverse DCT -> clamp to [0,255] -> round to 8-bit values.
RasterImage gen_quantized_image(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                                int device_index, int image_index);

// I = I0 * (1 + strength * K_device) + gaussian readout noise, before
// clamping/rounding. Exposed for the model-structure checks.
Grid gen_prnu_image_real(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                         int device_index, int image_index);
RasterImage gen_prnu_image(const SyntheticDeviceSpec& device, const SynthConfig& cfg,
                           int device_index, int image_index);

struct LabeledImages {
    std::vector<RasterImage> images;  // RGB, [0,255]
    std::vector<int> labels;
    std::vector<DeviceLabel> device_labels;
};

// In-memory generation, deterministic given (cfg.seed, device, image index).
LabeledImages gen_dataset(const SynthConfig& cfg);

// Writes the standard <root>/<device>/*.ppm layout plus manifest.json with
// the full device specs and seeds.
void write_synthetic_dataset(const SynthConfig& cfg, const std::filesystem::path& out_root);

}  // namespace camid
