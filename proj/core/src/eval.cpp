#include "camid/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "camid/jpeg_features.hpp"
#include "camid/rng.hpp"
#include "camid/threading.hpp"

namespace camid {

SplitIndices stratified_split(const std::vector<int>& label_indices, int n_classes, double ratio,
                              std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
    if (n_classes < 1) throw Error("split needs at least one class");

    std::vector<std::vector<int>> per_class(n_classes);
    for (std::size_t i = 0; i < label_indices.size(); ++i) {
        const int c = label_indices[i];
        if (c < 0 || c >= n_classes) throw Error("label index out of range");
        per_class[c].push_back(static_cast<int>(i));
    }

    SplitIndices split;
    split.seed = seed;
    split.ratio = ratio;
    std::mt19937_64 gen(seed);
    for (int c = 0; c < n_classes; ++c) {
        auto& members = per_class[c];
        if (members.size() < 2)
            throw Error("class " + std::to_string(c) + " has fewer than 2 samples");
        deterministic_shuffle(members, gen);
        // +1e-9 so exact rationals like 0.7*10 floor to the intended integer
        const auto n_train =
            static_cast<std::size_t>(std::floor(ratio * static_cast<double>(members.size()) + 1e-9));
        for (std::size_t i = 0; i < members.size(); ++i)
            (i < n_train ? split.train : split.test).push_back(members[i]);
    }
    return split;
}

SplitIndices stratified_split(const Dataset& dataset, double ratio, std::uint64_t seed) {
    const auto counts = dataset.per_class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] < 2)
            throw Error("device class '" + dataset.labels[c].name + "' has fewer than 2 images");
    }
    return stratified_split(dataset.label_indices(), dataset.n_classes(), ratio, seed);
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.empty()) throw Error("accuracy of an empty prediction set");
    if (truth.size() != predicted.size()) throw Error("accuracy length mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == predicted[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ConfusionMatrix confusion_matrix_normalized(const std::vector<int>& truth,
                                            const std::vector<int>& predicted, int n_classes) {
    if (truth.size() != predicted.size()) throw Error("confusion matrix length mismatch");
    if (n_classes < 1) throw Error("confusion matrix needs at least one class");
    ConfusionMatrix m;
    m.n_classes = n_classes;
    m.counts.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
    m.normalized.assign(m.counts.size(), 0.0);
    m.zero_rows.assign(n_classes, false);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = predicted[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
            throw Error("label out of range for confusion matrix");
        m.counts[static_cast<std::size_t>(t) * n_classes + p]++;
    }
    for (int t = 0; t < n_classes; ++t) {
        long row_total = 0;
        for (int p = 0; p < n_classes; ++p) row_total += m.count_at(t, p);
        if (row_total == 0) {
            m.zero_rows[t] = true;  // row stays all-zero
            continue;
        }
        for (int p = 0; p < n_classes; ++p)
            m.normalized[static_cast<std::size_t>(t) * n_classes + p] =
                static_cast<double>(m.count_at(t, p)) / static_cast<double>(row_total);
    }
    return m;
}

std::string render_confusion_text(const ConfusionMatrix& matrix,
                                  const std::vector<DeviceLabel>& labels) {
    std::size_t width = 8;
    for (const auto& l : labels) width = std::max(width, l.name.size() + 2);
    std::ostringstream out;
    out << std::string(width, ' ');
    for (const auto& l : labels) {
        out << std::string(width > l.name.size() ? width - l.name.size() : 1, ' ') << l.name;
    }
    out << "\n";
    char buf[64];
    for (int t = 0; t < matrix.n_classes; ++t) {
        const std::string& name = labels[t].name;
        out << name << std::string(width > name.size() ? width - name.size() : 1, ' ');
        for (int p = 0; p < matrix.n_classes; ++p) {
            std::snprintf(buf, sizeof(buf), "%*.*f", static_cast<int>(width), 2, matrix.at(t, p));
            out << buf;
        }
        if (matrix.zero_rows[t]) out << "  (no test samples)";
        out << "\n";
    }
    return out.str();
}

const char* method_name(Method method) {
    switch (method) {
        case Method::Jpeg: return "jpeg";
        case Method::Prnu: return "prnu";
        case Method::Cnn: return "cnn";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "jpeg") return Method::Jpeg;
    if (name == "prnu") return Method::Prnu;
    if (name == "cnn") return Method::Cnn;
    return std::nullopt;
}

namespace {

RasterImage decode_record(const ImageRecord& record) {
    if (record.decoded) return *record.decoded;
    return decode_image(record.path);
}

FeatureMatrix extract_matrix(const Dataset& dataset, const std::vector<int>& record_indices,
                             int dim, int threads,
                             const std::function<void(const RasterImage&, double*)>& extract) {
    FeatureMatrix out = FeatureMatrix::zeros(static_cast<int>(record_indices.size()), dim);
    parallel_for(0, static_cast<long>(record_indices.size()), threads, [&](long i) {
        const ImageRecord& record = dataset.records.at(record_indices[i]);
        const RasterImage rgb = decode_record(record);
        extract(rgb, out.row(static_cast<int>(i)));
        out.label_indices[i] = record.label.index;
    });
    return out;
}

}  // namespace

FeatureMatrix extract_jpeg_features(const Dataset& dataset, const std::vector<int>& record_indices,
                                    int threads) {
    FeatureMatrix m = extract_matrix(dataset, record_indices, kJpegFeatureDim, threads,
                                     [](const RasterImage& rgb, double* row) {
                                         const JpegFeature f = jpeg_feature_vector(to_grayscale(rgb));
                                         std::copy(f.v.begin(), f.v.end(), row);
                                     });
    m.ensure_finite("jpeg features");
    return m;
}

FeatureMatrix extract_prnu_features(const Dataset& dataset, const std::vector<int>& record_indices,
                                    const PrnuConfig& cfg, int threads) {
    cfg.validate();
    FeatureMatrix m = extract_matrix(dataset, record_indices, cfg.output_dim(), threads,
                                     [&cfg](const RasterImage& rgb, double* row) {
                                         const RasterImage gray = to_unit_range(to_grayscale(rgb));
                                         const PrnuFeature f = prnu_feature_vector(gray, cfg);
                                         std::copy(f.g.begin(), f.g.end(), row);
                                     });
    m.ensure_finite("prnu features");
    return m;
}

std::vector<RasterImage> prepare_cnn_inputs(const Dataset& dataset,
                                            const std::vector<int>& record_indices,
                                            const ResizeSpec& spec, int threads) {
    std::vector<RasterImage> out(record_indices.size());
    parallel_for(0, static_cast<long>(record_indices.size()), threads, [&](long i) {
        const ImageRecord& record = dataset.records.at(record_indices[i]);
        out[i] = resize_bilinear(decode_record(record), spec);
    });
    return out;
}

TrainedModel train_method(Method method, const Dataset& dataset, const SplitIndices& split,
                          const BenchmarkOptions& options) {
    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    if (split.train.empty()) throw Error("empty training split");

    TrainedModel model;
    model.labels = dataset.labels;

    if (method == Method::Jpeg || method == Method::Prnu) {
        const bool jpeg = method == Method::Jpeg;
        FeatureMatrix train_x =
            jpeg ? extract_jpeg_features(dataset, split.train, threads)
                 : extract_prnu_features(dataset, split.train, options.prnu, threads);
        SvmPipelineModel payload;
        payload.prnu = options.prnu;
        payload.standardizer = fit_standardizer(train_x);
        const FeatureMatrix standardized = payload.standardizer.apply(train_x);

        KernelSpec kernel;
        const SvmOptions& svm_options = jpeg ? options.jpeg_svm : options.prnu_svm;
        if (jpeg) {
            kernel.kind = KernelSpec::Kind::Rbf;
            kernel.gamma = svm_options.gamma ? *svm_options.gamma : default_rbf_gamma(standardized);
        } else {
            kernel.kind = KernelSpec::Kind::Linear;
        }
        SvmTrainOptions train_options = svm_options.train;
        train_options.c = svm_options.c;
        payload.svm = train_multiclass(standardized, kernel, train_options);

        model.kind = jpeg ? ModelKind::JpegSvm : ModelKind::PrnuSvm;
        model.payload = std::move(payload);
        return model;
    }

    // CNN
    CnnPipelineModel payload;
    payload.spec = options.cnn_spec;
    payload.spec.num_classes = dataset.n_classes();
    payload.spec.input_height = options.resize.target_height;
    payload.spec.input_width = options.resize.target_width;
    payload.resize = options.resize;
    payload.train_seed = options.cnn_train.seed;
    payload.params = glorot_init(payload.spec, options.cnn_train.seed);

    const std::vector<RasterImage> inputs =
        prepare_cnn_inputs(dataset, split.train, options.resize, threads);
    std::vector<int> labels;
    labels.reserve(split.train.size());
    for (int idx : split.train) labels.push_back(dataset.records[idx].label.index);

    CnnTrainOptions train_options = options.cnn_train;
    train_options.threads = threads;
    CnnTrainResult trained = train_cnn(payload.spec, payload.params, inputs, labels, train_options);
    payload.loss_history = std::move(trained.loss_history);

    model.kind = ModelKind::Cnn;
    model.payload = std::move(payload);
    return model;
}

EvaluationReport evaluate_method(Method method, const Dataset& dataset, const SplitIndices& split,
                                 const BenchmarkOptions& options) {
    const int threads = options.threads > 0 ? options.threads : default_thread_count();
    const TrainedModel model = train_method(method, dataset, split, options);
    const std::vector<int> predicted = predict_dataset(model, dataset, split.test, threads);

    std::vector<int> truth;
    truth.reserve(split.test.size());
    for (int idx : split.test) truth.push_back(dataset.records[idx].label.index);

    EvaluationReport report;
    report.method = method_name(method);
    report.accuracy = accuracy(truth, predicted);
    report.confusion = confusion_matrix_normalized(truth, predicted, dataset.n_classes());
    report.per_class_test_counts.assign(dataset.n_classes(), 0);
    for (int t : truth) report.per_class_test_counts[t]++;
    report.split_seed = split.seed;
    report.split_ratio = split.ratio;
    report.split_token = reinterpret_cast<std::uintptr_t>(&split);
    return report;
}

BenchmarkResult run_benchmark(const Dataset& dataset, const BenchmarkOptions& options) {
    if (options.methods.empty()) throw ConfigError("no methods selected");

    BenchmarkResult result;
    result.labels = dataset.labels;
    result.split = stratified_split(dataset, options.ratio, options.seed);

    // the one split instance shared by every method
    const SplitIndices& split = result.split;
    for (Method method : options.methods) {
        try {
            result.reports.push_back(evaluate_method(method, dataset, split, options));
        } catch (const std::exception& e) {
            result.failures.push_back({method_name(method), e.what()});
        }
    }
    return result;
}

}  // namespace camid
