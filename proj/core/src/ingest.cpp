#include "camid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "camid/threading.hpp"

namespace camid {

ScanResult scan_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw ConfigError("dataset root does not exist: " + root.string());

    std::vector<fs::path> device_dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (!name.empty() && name.front() == '.') continue;
        device_dirs.push_back(entry.path());
    }
    std::sort(device_dirs.begin(), device_dirs.end());
    if (device_dirs.empty())
        throw Error("no device directories under " + root.string());

    ScanResult result;
    std::vector<std::string> names;
    names.reserve(device_dirs.size());
    for (const auto& dir : device_dirs) names.push_back(dir.filename().string());
    result.dataset.labels = make_labels(std::move(names));

    for (const auto& label : result.dataset.labels) {
        const fs::path dir = root / label.name;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            if (is_supported_image_file(entry.path())) {
                files.push_back(entry.path());
            } else {
                result.summary.skipped_unsupported++;
                result.summary.warnings.push_back("skipped unsupported file: " +
                                                  entry.path().string());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw Error("device directory has no supported images: " + dir.string());
        for (auto& f : files)
            result.dataset.records.push_back({std::move(f), label, std::nullopt});
    }
    return result;
}

RasterImage to_grayscale(const RasterImage& img) {
    if (img.channels == 1) return img;
    if (img.channels != 3) throw Error("to_grayscale expects 1 or 3 channels");
    RasterImage out = RasterImage::make(img.height, img.width, 1, img.range);
    const double* src = img.pixels.data();
    double* dst = out.pixels.data();
    const std::size_t n = out.pixels.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = src + 3 * i;
        dst[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return out;
}

RasterImage to_unit_range(const RasterImage& img) {
    if (img.range == PixelRange::Unit) return img;
    RasterImage out = img;
    out.range = PixelRange::Unit;
    for (double& p : out.pixels) p /= 255.0;
    return out;
}

namespace {

// a + t*(b - a): exact for t == 0 and constant inputs; clamped to the
// endpoint interval so convexity survives rounding.
inline double lerp_clamped(double a, double b, double t) {
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    const double value = a + t * (b - a);
    return std::min(hi, std::max(lo, value));
}

}  // namespace

RasterImage resize_bilinear(const RasterImage& rgb, const ResizeSpec& spec) {
    if (rgb.channels != 3) throw Error("resize_bilinear expects an RGB image");
    if (rgb.range != PixelRange::U8) throw Error("resize_bilinear expects [0,255] input");
    if (spec.target_height < 1 || spec.target_width < 1)
        throw ConfigError("resize target must be >= 1");

    const int src_h = rgb.height, src_w = rgb.width;
    const int dst_h = spec.target_height, dst_w = spec.target_width;
    const double scale_y = static_cast<double>(src_h) / dst_h;
    const double scale_x = static_cast<double>(src_w) / dst_w;

    struct Tap {
        int lo = 0, hi = 0;
        double frac = 0.0;
    };
    auto make_taps = [](int dst, int src, double scale) {
        std::vector<Tap> taps(dst);
        for (int i = 0; i < dst; ++i) {
            double pos = (i + 0.5) * scale - 0.5;
            pos = std::min(static_cast<double>(src - 1), std::max(0.0, pos));
            const int lo = static_cast<int>(pos);
            taps[i] = {lo, std::min(lo + 1, src - 1), pos - lo};
        }
        return taps;
    };
    const std::vector<Tap> tx = make_taps(dst_w, src_w, scale_x);
    const std::vector<Tap> ty = make_taps(dst_h, src_h, scale_y);

    // horizontal pass at source height, then vertical pass
    RasterImage horizontal = RasterImage::make(src_h, dst_w, 3, PixelRange::U8);
    for (int y = 0; y < src_h; ++y) {
        for (int x = 0; x < dst_w; ++x) {
            const Tap& t = tx[x];
            for (int c = 0; c < 3; ++c)
                horizontal.at(y, x, c) = lerp_clamped(rgb.at(y, t.lo, c), rgb.at(y, t.hi, c), t.frac);
        }
    }

    RasterImage out = RasterImage::make(dst_h, dst_w, 3, PixelRange::Unit);
    for (int y = 0; y < dst_h; ++y) {
        const Tap& t = ty[y];
        for (int x = 0; x < dst_w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double v =
                    lerp_clamped(horizontal.at(t.lo, x, c), horizontal.at(t.hi, x, c), t.frac);
                out.at(y, x, c) = v / 255.0;
            }
        }
    }
    return out;
}

Dataset validate_decodable(const Dataset& dataset, DecodeErrorPolicy policy, int threads,
                           ScanSummary* summary) {
    const long n = static_cast<long>(dataset.records.size());
    std::vector<char> ok(n, 0);
    std::vector<std::string> messages(n);
    parallel_for(0, n, threads, [&](long i) {
        try {
            decode_image(dataset.records[i].path);
            ok[i] = 1;
        } catch (const std::exception& e) {
            messages[i] = e.what();
        }
    });

    Dataset out;
    out.labels = dataset.labels;
    for (long i = 0; i < n; ++i) {
        if (ok[i]) {
            out.records.push_back(dataset.records[i]);
        } else if (policy == DecodeErrorPolicy::Abort) {
            throw DecodeError("decode failed: " + messages[i], dataset.records[i].path);
        } else if (summary) {
            summary->warnings.push_back("skipped undecodable file: " + messages[i]);
        }
    }
    if (out.records.empty()) throw Error("no decodable images in dataset");
    return out;
}

Grid to_grid(const RasterImage& gray) {
    if (gray.channels != 1) throw Error("to_grid expects a single-channel image");
    Grid g;
    g.rows = gray.height;
    g.cols = gray.width;
    g.v = gray.pixels;
    return g;
}

RasterImage grid_to_image(const Grid& grid, PixelRange range) {
    RasterImage img = RasterImage::make(grid.rows, grid.cols, 1, range);
    img.pixels = grid.v;
    return img;
}

}  // namespace camid
