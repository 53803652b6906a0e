#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "camid/types.hpp"

namespace camid {

// CNN input contract: 128x128, bilinear with half-pixel centers.
struct ResizeSpec {
    int target_height = 128;
    int target_width = 128;
};

struct ScanSummary {
    int skipped_unsupported = 0;
    std::vector<std::string> warnings;
};

struct ScanResult {
    Dataset dataset;
    ScanSummary summary;
};

// Layout on disk: <root>/<device-name>/*.{jpg,jpeg,png,ppm} (case-insensitive).
bool is_supported_image_file(const std::filesystem::path& path);

// One ImageRecord per supported file; labels sorted lexicographically;
// record order sorted by path. Unsupported files are counted as warnings.
// Throws ConfigError on a missing root, Error on a class directory with no
// supported images.
ScanResult scan_dataset(const std::filesystem::path& root);

// Decodes JPEG/PNG/PPM to 3-channel RGB in [0,255]. HEIC/HEIF input raises
// a DecodeError asking for pre-conversion. Decode warnings (truncated
// streams) are treated as errors.
RasterImage decode_image(const std::filesystem::path& path);

// ITU-R BT.601 luma: Y = 0.299 R + 0.587 G + 0.114 B. Grayscale input
// passes through unchanged.
RasterImage to_grayscale(const RasterImage& img);

// U8 -> Unit by dividing by 255. Unit input passes through unchanged.
RasterImage to_unit_range(const RasterImage& img);

// Bilinear resample with src = (dst + 0.5) * scale - 0.5 and edge clamping,
// then division by 255: output is RGB in [0,1]. Input must be RGB in [0,255].
RasterImage resize_bilinear(const RasterImage& rgb, const ResizeSpec& spec);

// Binary PPM (P6), 8-bit. Unit-range input is scaled by 255 first;
// grayscale input is replicated to three channels.
void write_ppm(const RasterImage& img, const std::filesystem::path& path);

enum class DecodeErrorPolicy { Skip, Abort };

// Decodes every record once (in parallel) to weed out undecodable files
// before a benchmark: Skip drops bad records (warnings recorded), Abort
// rethrows the first decode error. Keeps label set intact; a class losing
// all images surfaces later as a split error.
Dataset validate_decodable(const Dataset& dataset, DecodeErrorPolicy policy, int threads,
                           ScanSummary* summary = nullptr);

// Conversions between single-channel images and plain grids.
Grid to_grid(const RasterImage& gray);
RasterImage grid_to_image(const Grid& grid, PixelRange range);

}  // namespace camid
