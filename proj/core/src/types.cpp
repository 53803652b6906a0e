#include "camid/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace camid {

RasterImage RasterImage::make(int h, int w, int c, PixelRange r, double fill) {
    if (h < 1 || w < 1 || (c != 1 && c != 3))
        throw Error("invalid image dimensions " + std::to_string(h) + "x" + std::to_string(w) +
                    "x" + std::to_string(c));
    RasterImage img;
    img.height = h;
    img.width = w;
    img.channels = c;
    img.range = r;
    img.pixels.assign(static_cast<std::size_t>(h) * w * c, fill);
    return img;
}

bool RasterImage::range_consistent(double slack) const {
    const double hi = range == PixelRange::U8 ? 255.0 : 1.0;
    for (double p : pixels) {
        if (!std::isfinite(p) || p < -slack || p > hi + slack) return false;
    }
    return true;
}

Grid Grid::zeros(int rows, int cols) {
    Grid g;
    g.rows = rows;
    g.cols = cols;
    g.v.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    return g;
}

std::vector<DeviceLabel> make_labels(std::vector<std::string> names) {
    if (names.empty()) throw Error("no device names");
    std::sort(names.begin(), names.end());
    for (std::size_t i = 1; i < names.size(); ++i) {
        if (names[i] == names[i - 1]) throw Error("duplicate device name: " + names[i]);
    }
    std::vector<DeviceLabel> labels;
    labels.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        labels.push_back({names[i], static_cast<int>(i)});
    return labels;
}

std::vector<int> Dataset::label_indices() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(rec.label.index);
    return out;
}

std::vector<int> Dataset::per_class_counts() const {
    std::vector<int> counts(labels.size(), 0);
    for (const auto& rec : records) counts.at(rec.label.index)++;
    return counts;
}

FeatureMatrix FeatureMatrix::zeros(int rows, int cols) {
    FeatureMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    m.label_indices.assign(rows, -1);
    return m;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<int>& indices) const {
    FeatureMatrix out = FeatureMatrix::zeros(static_cast<int>(indices.size()), cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const int src = indices[i];
        if (src < 0 || src >= rows) throw Error("row index out of range");
        std::copy(row(src), row(src) + cols, out.row(static_cast<int>(i)));
        out.label_indices[i] = label_indices[src];
    }
    return out;
}

void FeatureMatrix::ensure_finite(const std::string& what) const {
    for (double x : values) {
        if (!std::isfinite(x)) throw Error("non-finite entry in " + what);
    }
}

}  // namespace camid
