#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camid/cnn.hpp"
#include "camid/ingest.hpp"
#include "camid/model.hpp"
#include "camid/prnu_features.hpp"
#include "camid/svm.hpp"
#include "camid/types.hpp"

namespace camid {

// Per class: seeded shuffle, first floor(ratio * n_c) indices -> train,
// rest -> test. Throws on ratio outside (0,1) or a class with < 2 samples.
SplitIndices stratified_split(const std::vector<int>& label_indices, int n_classes,
                              double ratio, std::uint64_t seed);
SplitIndices stratified_split(const Dataset& dataset, double ratio, std::uint64_t seed);

// Mean of the indicator of matches; throws on empty or mismatched input.
double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted);

struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<long> counts;        // n x n row-major, counts[true][pred]
    std::vector<double> normalized;  // rows sum to 1; zero-sample rows stay 0
    std::vector<bool> zero_rows;     // flagged rows with no test samples

    long count_at(int t, int p) const { return counts[static_cast<std::size_t>(t) * n_classes + p]; }
    double at(int t, int p) const { return normalized[static_cast<std::size_t>(t) * n_classes + p]; }
};

ConfusionMatrix confusion_matrix_normalized(const std::vector<int>& truth,
                                            const std::vector<int>& predicted, int n_classes);

std::string render_confusion_text(const ConfusionMatrix& matrix,
                                  const std::vector<DeviceLabel>& labels);

enum class Method { Jpeg, Prnu, Cnn };

const char* method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

struct SvmOptions {
    double c = 1.0;
    std::optional<double> gamma;  // rbf only; unset -> default_rbf_gamma
    SvmTrainOptions train;
};

struct BenchmarkOptions {
    std::vector<Method> methods{Method::Jpeg, Method::Prnu, Method::Cnn};
    double ratio = 0.7;
    std::uint64_t seed = 42;
    int threads = 0;  // 0 -> default_thread_count()
    PrnuConfig prnu;
    SvmOptions jpeg_svm;  // RBF kernel
    SvmOptions prnu_svm;  // linear kernel
    CnnSpec cnn_spec = default_cnn_spec();
    CnnTrainOptions cnn_train;
    ResizeSpec resize;
};

struct EvaluationReport {
    std::string method;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    std::vector<int> per_class_test_counts;
    std::uint64_t split_seed = 0;
    double split_ratio = 0.0;
    // Identity of the SplitIndices instance this report was computed from;
    // equal across all methods of one benchmark run.
    std::uintptr_t split_token = 0;
};

struct MethodFailure {
    std::string method;
    std::string message;
};

struct BenchmarkResult {
    std::vector<EvaluationReport> reports;
    std::vector<MethodFailure> failures;
    std::vector<DeviceLabel> labels;
    SplitIndices split;
};

// One shared split drives every selected method; per-method failures are
// isolated and recorded.
BenchmarkResult run_benchmark(const Dataset& dataset, const BenchmarkOptions& options);

// Building blocks (also used by the CLI's extract/train commands).
FeatureMatrix extract_jpeg_features(const Dataset& dataset, const std::vector<int>& record_indices,
                                    int threads);
FeatureMatrix extract_prnu_features(const Dataset& dataset, const std::vector<int>& record_indices,
                                    const PrnuConfig& cfg, int threads);
std::vector<RasterImage> prepare_cnn_inputs(const Dataset& dataset,
                                            const std::vector<int>& record_indices,
                                            const ResizeSpec& spec, int threads);

TrainedModel train_method(Method method, const Dataset& dataset, const SplitIndices& split,
                          const BenchmarkOptions& options);
EvaluationReport evaluate_method(Method method, const Dataset& dataset, const SplitIndices& split,
                                 const BenchmarkOptions& options);

}  // namespace camid
