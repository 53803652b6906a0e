#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "camid/cnn.hpp"
#include "camid/ingest.hpp"
#include "camid/prnu_features.hpp"
#include "camid/svm.hpp"
#include "camid/types.hpp"

namespace camid {

enum class ModelKind { JpegSvm, PrnuSvm, Cnn };

const char* model_kind_name(ModelKind kind);

struct SvmPipelineModel {
    Standardizer standardizer;
    MulticlassSvmModel svm;
    PrnuConfig prnu;  // meaningful for PrnuSvm only
};

struct CnnPipelineModel {
    CnnSpec spec;
    CnnParams params;
    ResizeSpec resize;
    std::uint64_t train_seed = 0;
    std::vector<double> loss_history;
};

// Serializable classifier plus its preprocessing; predictions are class ids
// into `labels`.
struct TrainedModel {
    ModelKind kind = ModelKind::JpegSvm;
    std::vector<DeviceLabel> labels;
    std::variant<SvmPipelineModel, CnnPipelineModel> payload;
};

// Runs the full pipeline (decode -> preprocess -> features -> classify) on
// the selected records.
std::vector<int> predict_dataset(const TrainedModel& model, const Dataset& dataset,
                                 const std::vector<int>& record_indices, int threads);

// Versioned binary container; round-trips bit-identically.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace camid
