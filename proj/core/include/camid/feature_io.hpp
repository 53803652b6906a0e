#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "camid/prnu_features.hpp"
#include "camid/types.hpp"

namespace camid {

// CSV with header "label,<prefix>000..": label column holds the device name,
// feature columns are zero-padded to the width of the last index (min 3).
void write_feature_csv(const FeatureMatrix& features, const std::vector<DeviceLabel>& labels,
                       const std::string& column_prefix, const std::filesystem::path& path);

struct FeatureSidecar {
    std::string method;
    std::string dataset_root;
    int rows = 0;
    int cols = 0;
    std::vector<DeviceLabel> labels;
    std::optional<PrnuConfig> prnu;  // set for the prnu method
};

// JSON sidecar recording the extraction parameters next to the CSV.
void write_feature_sidecar(const FeatureSidecar& sidecar, const std::filesystem::path& path);

}  // namespace camid
