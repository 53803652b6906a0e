#include "camid/feature_io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace camid {

void write_feature_csv(const FeatureMatrix& features, const std::vector<DeviceLabel>& labels,
                       const std::string& column_prefix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());

    int width = 0;
    for (int v = features.cols - 1; v > 0; v /= 10) ++width;
    width = std::max(width, 3);

    out << "label";
    char buf[64];
    for (int j = 0; j < features.cols; ++j) {
        std::snprintf(buf, sizeof(buf), ",%s%0*d", column_prefix.c_str(), width, j);
        out << buf;
    }
    out << "\n";
    for (int r = 0; r < features.rows; ++r) {
        const int label = features.label_indices[r];
        if (label < 0 || label >= static_cast<int>(labels.size()))
            throw Error("feature row carries an unknown label index");
        out << labels[label].name;
        const double* row = features.row(r);
        for (int j = 0; j < features.cols; ++j) {
            std::snprintf(buf, sizeof(buf), ",%.17g", row[j]);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw Error("write failed for " + path.string());
}

void write_feature_sidecar(const FeatureSidecar& sidecar, const std::filesystem::path& path) {
    nlohmann::json j;
    j["method"] = sidecar.method;
    j["dataset_root"] = sidecar.dataset_root;
    j["rows"] = sidecar.rows;
    j["cols"] = sidecar.cols;
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : sidecar.labels) labels.push_back({{"name", l.name}, {"index", l.index}});
    j["labels"] = std::move(labels);
    if (sidecar.prnu) {
        j["prnu"] = {{"sigma1", sidecar.prnu->sigma1},
                     {"sigma_w", sidecar.prnu->sigma_w},
                     {"sigma_n2", sidecar.prnu->sigma_n2},
                     {"crop", sidecar.prnu->crop},
                     {"stride", sidecar.prnu->stride}};
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace camid
