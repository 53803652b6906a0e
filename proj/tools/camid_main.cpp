// camid: source camera identification toolkit (JPEG-artifact, PRNU and CNN
// pipelines over a directory-per-device dataset).
//
// Exit codes: 0 success, 1 runtime/partial-method failure, 2 usage or
// configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camid/eval.hpp"
#include "camid/feature_io.hpp"
#include "camid/model.hpp"
#include "camid/report_io.hpp"
#include "camid/synth.hpp"
#include "camid/threading.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string data;
    std::string out = ".";
    std::uint64_t seed = 42;
    double ratio = 0.7;
    std::string methods = "jpeg,prnu,cnn";
    int threads = 0;  // 0 -> hardware default
    std::string on_decode_error = "abort";

    double prnu_sigma1 = 1.0;
    double prnu_sigma_w = 2.0;
    double prnu_noise_floor = 0.01;
    int prnu_crop = 512;
    int prnu_stride = 8;

    double svm_c = 1.0;
    double rbf_gamma = 0.0;  // 0 -> the 1/(d*Var(X)) default

    int cnn_epochs = 5;
    int cnn_batch_size = 8;
    double cnn_lr = 1e-3;
};

std::vector<camid::Method> parse_methods(const std::string& csv) {
    std::vector<camid::Method> methods;
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        const auto method = camid::parse_method(token);
        if (!method)
            throw camid::ConfigError("unknown method '" + token +
                                     "' (expected jpeg, prnu or cnn)");
        methods.push_back(*method);
    }
    if (methods.empty()) throw camid::ConfigError("no methods selected");
    return methods;
}

camid::DecodeErrorPolicy parse_decode_policy(const std::string& value) {
    if (value == "skip") return camid::DecodeErrorPolicy::Skip;
    if (value == "abort") return camid::DecodeErrorPolicy::Abort;
    throw camid::ConfigError("--on-decode-error must be 'skip' or 'abort'");
}

camid::BenchmarkOptions benchmark_options(const GlobalOptions& g) {
    camid::BenchmarkOptions options;
    options.methods = parse_methods(g.methods);
    options.ratio = g.ratio;
    options.seed = g.seed;
    options.threads = g.threads;
    options.prnu.sigma1 = g.prnu_sigma1;
    options.prnu.sigma_w = g.prnu_sigma_w;
    options.prnu.sigma_n2 = g.prnu_noise_floor;
    options.prnu.crop = g.prnu_crop;
    options.prnu.stride = g.prnu_stride;
    options.prnu.validate();
    options.jpeg_svm.c = g.svm_c;
    if (g.rbf_gamma > 0.0) options.jpeg_svm.gamma = g.rbf_gamma;
    options.prnu_svm.c = g.svm_c;
    options.cnn_train.epochs = g.cnn_epochs;
    options.cnn_train.batch_size = g.cnn_batch_size;
    options.cnn_train.adam.lr = g.cnn_lr;
    options.cnn_train.seed = g.seed;
    return options;
}

camid::ConfigEcho config_echo(const GlobalOptions& g) {
    camid::ConfigEcho echo;
    echo["data"] = g.data;
    echo["out"] = g.out;
    echo["seed"] = std::to_string(g.seed);
    echo["ratio"] = std::to_string(g.ratio);
    echo["methods"] = g.methods;
    echo["threads"] = std::to_string(g.threads);
    echo["on-decode-error"] = g.on_decode_error;
    echo["prnu-sigma1"] = std::to_string(g.prnu_sigma1);
    echo["prnu-sigma-w"] = std::to_string(g.prnu_sigma_w);
    echo["prnu-noise-floor"] = std::to_string(g.prnu_noise_floor);
    echo["prnu-crop"] = std::to_string(g.prnu_crop);
    echo["prnu-stride"] = std::to_string(g.prnu_stride);
    echo["svm-c"] = std::to_string(g.svm_c);
    echo["rbf-gamma"] = g.rbf_gamma > 0.0 ? std::to_string(g.rbf_gamma) : std::string("auto");
    echo["cnn-epochs"] = std::to_string(g.cnn_epochs);
    echo["cnn-batch-size"] = std::to_string(g.cnn_batch_size);
    echo["cnn-lr"] = std::to_string(g.cnn_lr);
    return echo;
}

camid::Dataset scan_and_validate(const GlobalOptions& g, camid::ScanSummary* summary_out) {
    if (g.data.empty()) throw camid::ConfigError("--data is required");
    camid::ScanResult scan = camid::scan_dataset(g.data);
    const int threads = g.threads > 0 ? g.threads : camid::default_thread_count();
    camid::Dataset dataset = camid::validate_decodable(
        scan.dataset, parse_decode_policy(g.on_decode_error), threads, &scan.summary);
    if (summary_out) *summary_out = scan.summary;
    return dataset;
}

void ensure_out_dir(const GlobalOptions& g) {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (!fs::is_directory(g.out))
        throw camid::ConfigError("cannot create output directory " + g.out);
}

int cmd_scan(const GlobalOptions& g) {
    if (g.data.empty()) throw camid::ConfigError("--data is required");
    camid::ScanResult scan = camid::scan_dataset(g.data);
    std::cout << "dataset: " << g.data << "\n";
    std::cout << "devices: " << scan.dataset.labels.size() << ", images: "
              << scan.dataset.records.size() << ", skipped unsupported: "
              << scan.summary.skipped_unsupported << "\n";
    const auto counts = scan.dataset.per_class_counts();
    for (const auto& label : scan.dataset.labels)
        std::cout << "  " << label.index << "  " << label.name << "  " << counts[label.index]
                  << " images\n";
    for (const auto& w : scan.summary.warnings) std::cout << "warning: " << w << "\n";
    return 0;
}

int cmd_extract(const GlobalOptions& g, const std::string& method_name) {
    const auto method = camid::parse_method(method_name);
    if (!method || *method == camid::Method::Cnn)
        throw camid::ConfigError("extract supports --method jpeg or prnu");
    ensure_out_dir(g);
    const camid::Dataset dataset = scan_and_validate(g, nullptr);
    const int threads = g.threads > 0 ? g.threads : camid::default_thread_count();
    const auto options = benchmark_options(g);

    std::vector<int> all(dataset.records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    camid::FeatureMatrix features;
    camid::FeatureSidecar sidecar;
    std::string prefix, stem;
    if (*method == camid::Method::Jpeg) {
        features = camid::extract_jpeg_features(dataset, all, threads);
        prefix = "f";
        stem = "jpeg_features";
    } else {
        features = camid::extract_prnu_features(dataset, all, options.prnu, threads);
        prefix = "g";
        stem = "prnu_features";
        sidecar.prnu = options.prnu;
    }
    sidecar.method = method_name;
    sidecar.dataset_root = g.data;
    sidecar.rows = features.rows;
    sidecar.cols = features.cols;
    sidecar.labels = dataset.labels;

    const fs::path csv = fs::path(g.out) / (stem + ".csv");
    camid::write_feature_csv(features, dataset.labels, prefix, csv);
    camid::write_feature_sidecar(sidecar, fs::path(g.out) / (stem + ".json"));
    std::cout << "wrote " << csv.string() << " (" << features.rows << " rows x " << features.cols
              << " features)\n";
    return 0;
}

int cmd_train(const GlobalOptions& g, const std::string& method_name) {
    const auto method = camid::parse_method(method_name);
    if (!method) throw camid::ConfigError("unknown method '" + method_name + "'");
    ensure_out_dir(g);
    const camid::Dataset dataset = scan_and_validate(g, nullptr);
    const auto options = benchmark_options(g);
    const camid::SplitIndices split = camid::stratified_split(dataset, options.ratio, options.seed);

    const camid::TrainedModel model = camid::train_method(*method, dataset, split, options);
    const fs::path model_path = fs::path(g.out) / ("model_" + method_name + ".camid");
    camid::save_model(model, model_path);
    std::cout << "trained " << method_name << " on " << split.train.size()
              << " images; model written to " << model_path.string() << "\n";

    if (model.kind == camid::ModelKind::Cnn) {
        const auto& payload = std::get<camid::CnnPipelineModel>(model.payload);
        const fs::path loss_path = fs::path(g.out) / "loss_history_cnn.csv";
        std::ofstream out(loss_path, std::ios::trunc);
        out << "step,loss\n";
        char buf[64];
        for (std::size_t i = 0; i < payload.loss_history.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, payload.loss_history[i]);
            out << buf;
        }
        std::cout << "loss history written to " << loss_path.string() << "\n";
    }
    return 0;
}

int cmd_benchmark(const GlobalOptions& g, bool save_models) {
    ensure_out_dir(g);
    camid::ScanSummary summary;
    const camid::Dataset dataset = scan_and_validate(g, &summary);
    const auto options = benchmark_options(g);

    const camid::BenchmarkResult result = camid::run_benchmark(dataset, options);

    const auto echo = config_echo(g);
    camid::write_report_json(result, g.data, echo, fs::path(g.out) / "report.json");
    for (const auto& report : result.reports)
        camid::write_confusion_csv(report, result.labels,
                                   fs::path(g.out) / ("confusion_" + report.method + ".csv"));
    const std::string summary_text = camid::render_summary(result, g.data);
    {
        std::ofstream out(fs::path(g.out) / "summary.txt", std::ios::trunc);
        out << summary_text;
    }
    std::cout << summary_text;

    if (save_models) {
        for (const auto& report : result.reports) {
            const auto method = camid::parse_method(report.method);
            const camid::TrainedModel model =
                camid::train_method(*method, dataset, result.split, options);
            camid::save_model(model, fs::path(g.out) / ("model_" + report.method + ".camid"));
        }
    }

    if (!result.failures.empty()) {
        for (const auto& f : result.failures)
            std::cerr << "method " << f.method << " failed: " << f.message << "\n";
        return 1;
    }
    return 0;
}

int cmd_synth(const GlobalOptions& g, const std::string& mode, int devices, int per_device,
              int size, double strength) {
    camid::SynthConfig cfg;
    if (mode == "quantization")
        cfg.mode = camid::SynthMode::Quantization;
    else if (mode == "prnu")
        cfg.mode = camid::SynthMode::Prnu;
    else
        throw camid::ConfigError("--mode must be 'quantization' or 'prnu'");
    cfg.devices = devices;
    cfg.per_device = per_device;
    cfg.size = size;
    cfg.strength = strength;
    cfg.seed = g.seed;
    cfg.validate();

    camid::write_synthetic_dataset(cfg, g.out);
    std::cout << "wrote " << devices * per_device << " images (" << devices << " devices x "
              << per_device << ") to " << g.out << "\n";
    return 0;
}

int cmd_report(const std::string& in_path) {
    std::cout << camid::summarize_report_file(in_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"source camera identification toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.set_config("--config", "", "flat key=value configuration file (flags win)");
    app.add_option("--data", g.data, "dataset root (<root>/<device>/*.{jpg,jpeg,png,ppm})");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--seed", g.seed, "random seed recorded in every report");
    app.add_option("--ratio", g.ratio, "train fraction of the stratified split");
    app.add_option("--methods", g.methods, "comma-separated subset of jpeg,prnu,cnn");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware default)");
    app.add_option("--on-decode-error", g.on_decode_error, "skip|abort on undecodable images");
    app.add_option("--prnu-sigma1", g.prnu_sigma1, "residual smoothing std");
    app.add_option("--prnu-sigma-w", g.prnu_sigma_w, "local moment window std");
    app.add_option("--prnu-noise-floor", g.prnu_noise_floor, "Wiener noise floor sigma_n^2");
    app.add_option("--prnu-crop", g.prnu_crop, "PRNU analysis crop size");
    app.add_option("--prnu-stride", g.prnu_stride, "PRNU subsampling stride");
    app.add_option("--svm-c", g.svm_c, "SVM regularization C");
    app.add_option("--rbf-gamma", g.rbf_gamma, "RBF gamma (0 = 1/(d*Var(X)) default)");
    app.add_option("--cnn-epochs", g.cnn_epochs, "CNN training epochs");
    app.add_option("--cnn-batch-size", g.cnn_batch_size, "CNN mini-batch size");
    app.add_option("--cnn-lr", g.cnn_lr, "Adam learning rate");

    auto* scan = app.add_subcommand("scan", "scan a dataset tree and print a summary");

    auto* extract = app.add_subcommand("extract", "write per-method feature CSV files");
    std::string extract_method = "jpeg";
    extract->add_option("--method", extract_method, "jpeg or prnu");

    auto* train = app.add_subcommand("train", "train one method and save the model");
    std::string train_method_name = "jpeg";
    train->add_option("--method", train_method_name, "jpeg, prnu or cnn");

    auto* benchmark = app.add_subcommand("benchmark", "train and evaluate methods on one split");
    bool save_models = false;
    benchmark->add_flag("--save-models", save_models, "also write model files");

    auto* synth = app.add_subcommand("synth", "generate a synthetic device dataset");
    std::string synth_mode = "quantization";
    int synth_devices = 4, synth_per_device = 50, synth_size = 512;
    double synth_strength = 0.02;
    synth->add_option("--mode", synth_mode, "quantization or prnu");
    synth->add_option("--devices", synth_devices, "number of synthetic devices");
    synth->add_option("--per-device", synth_per_device, "images per device");
    synth->add_option("--size", synth_size, "square image size (multiple of 8)");
    synth->add_option("--strength", synth_strength, "PRNU pattern strength");

    auto* report = app.add_subcommand("report", "render the summary of an existing report.json");
    std::string report_in;
    report->add_option("--in", report_in, "path to report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*scan) return cmd_scan(g);
        if (*extract) return cmd_extract(g, extract_method);
        if (*train) return cmd_train(g, train_method_name);
        if (*benchmark) return cmd_benchmark(g, save_models);
        if (*synth)
            return cmd_synth(g, synth_mode, synth_devices, synth_per_device, synth_size,
                             synth_strength);
        if (*report) return cmd_report(report_in);
    } catch (const camid::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
