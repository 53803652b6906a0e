#include "camid/model.hpp"

#include "camid/eval.hpp"
#include "camid/threading.hpp"

namespace camid {

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::JpegSvm: return "jpeg-svm";
        case ModelKind::PrnuSvm: return "prnu-svm";
        case ModelKind::Cnn: return "cnn";
    }
    return "unknown";
}

std::vector<int> predict_dataset(const TrainedModel& model, const Dataset& dataset,
                                 const std::vector<int>& record_indices, int threads) {
    if (record_indices.empty()) return {};
    if (threads <= 0) threads = default_thread_count();

    if (model.kind == ModelKind::Cnn) {
        const auto& payload = std::get<CnnPipelineModel>(model.payload);
        const std::vector<RasterImage> inputs =
            prepare_cnn_inputs(dataset, record_indices, payload.resize, threads);
        return predict_cnn(payload.spec, payload.params, inputs, threads);
    }

    const auto& payload = std::get<SvmPipelineModel>(model.payload);
    const FeatureMatrix features =
        model.kind == ModelKind::JpegSvm
            ? extract_jpeg_features(dataset, record_indices, threads)
            : extract_prnu_features(dataset, record_indices, payload.prnu, threads);
    return predict(payload.svm, payload.standardizer.apply(features));
}

}  // namespace camid
