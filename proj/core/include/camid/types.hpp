#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace camid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration, bad CLI usage, missing dataset root. The CLI maps this
// to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    DecodeError(const std::string& message, std::filesystem::path path)
        : Error(message + " [" + path.string() + "]"), path_(std::move(path)) {}
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Documented value range of a pixel grid.
enum class PixelRange { U8, Unit };  // [0,255] vs [0,1]

// Decoded pixel grid, row-major, channel-interleaved. Pixels are stored as
// double; 8-bit integers exist only at the decode/encode boundary.
// Immutable by convention once built: safe to share across workers.
struct RasterImage {
    int height = 0;
    int width = 0;
    int channels = 1;
    PixelRange range = PixelRange::U8;
    std::vector<double> pixels;

    static RasterImage make(int h, int w, int c, PixelRange r, double fill = 0.0);

    double& at(int y, int x, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t value_count() const { return pixels.size(); }

    // Debug audit: does the range tag match the actual min/max?
    bool range_consistent(double slack = 1e-9) const;
};

// Single-channel real-valued field (residuals, patterns, synthetic scenes).
// Unlike RasterImage it carries no value-range contract.
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    static Grid zeros(int rows, int cols);

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t size() const { return v.size(); }
};

// Device class. `index` is the rank of `name` in the lexicographically
// sorted device-name list of the dataset.
struct DeviceLabel {
    std::string name;
    int index = -1;

    bool operator==(const DeviceLabel&) const = default;
};

// Sorts names, assigns indices by rank. Throws on duplicates or empty input.
std::vector<DeviceLabel> make_labels(std::vector<std::string> names);

struct ImageRecord {
    std::filesystem::path path;
    DeviceLabel label;
    std::optional<RasterImage> decoded;  // populated lazily by pipelines
};

struct Dataset {
    std::vector<ImageRecord> records;
    std::vector<DeviceLabel> labels;  // sorted by name, index == rank

    int n_classes() const { return static_cast<int>(labels.size()); }
    std::vector<int> label_indices() const;
    std::vector<int> per_class_counts() const;
};

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
    std::uint64_t seed = 0;
    double ratio = 0.0;
};

// Batch feature container; rows are samples, cols the feature dimension.
struct FeatureMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;       // row-major
    std::vector<int> label_indices;   // one per row

    static FeatureMatrix zeros(int rows, int cols);

    double* row(int i) { return values.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return values.data() + static_cast<std::size_t>(i) * cols; }

    FeatureMatrix select_rows(const std::vector<int>& indices) const;

    // Throws Error if any entry is NaN or infinite.
    void ensure_finite(const std::string& what) const;
};

}  // namespace camid
