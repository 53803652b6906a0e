#include "camid/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace camid {

namespace {

using nlohmann::json;

json matrix_rows(const ConfusionMatrix& m, bool normalized) {
    json rows = json::array();
    for (int t = 0; t < m.n_classes; ++t) {
        json row = json::array();
        for (int p = 0; p < m.n_classes; ++p) {
            if (normalized)
                row.push_back(m.at(t, p));
            else
                row.push_back(m.count_at(t, p));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json report_to_json(const EvaluationReport& report) {
    json j;
    j["method"] = report.method;
    j["accuracy"] = report.accuracy;
    j["confusion"] = matrix_rows(report.confusion, true);
    j["confusion_counts"] = matrix_rows(report.confusion, false);
    j["zero_rows"] = report.confusion.zero_rows;
    j["per_class_test_counts"] = report.per_class_test_counts;
    j["split_seed"] = report.split_seed;
    j["split_ratio"] = report.split_ratio;
    return j;
}

std::string format_accuracy(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

}  // namespace

std::string config_hash(const ConfigEcho& config) {
    // FNV-1a 64 over canonical "key=value\n" lines
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [key, value] : config) {
        feed(key);
        feed("=");
        feed(value);
        feed("\n");
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string report_json_string(const BenchmarkResult& result, const std::string& dataset_root,
                               const ConfigEcho& config) {
    json j;
    j["schema_version"] = 1;
    j["dataset_root"] = dataset_root;
    j["seed"] = result.split.seed;
    j["ratio"] = result.split.ratio;
    json labels = json::array();
    for (const auto& l : result.labels) labels.push_back(l.name);
    j["labels"] = std::move(labels);
    j["split"] = {{"train_count", result.split.train.size()},
                  {"test_count", result.split.test.size()}};
    j["config"] = config;
    j["config_hash"] = config_hash(config);
    json reports = json::array();
    for (const auto& r : result.reports) reports.push_back(report_to_json(r));
    j["reports"] = std::move(reports);
    json failures = json::array();
    for (const auto& f : result.failures)
        failures.push_back({{"method", f.method}, {"message", f.message}});
    j["failures"] = std::move(failures);
    return j.dump(2) + "\n";
}

void write_report_json(const BenchmarkResult& result, const std::string& dataset_root,
                       const ConfigEcho& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << report_json_string(result, dataset_root, config);
    if (!out) throw Error("write failed for " + path.string());
}

void write_confusion_csv(const EvaluationReport& report, const std::vector<DeviceLabel>& labels,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << "true\\predicted";
    for (const auto& l : labels) out << "," << l.name;
    out << "\n";
    char buf[64];
    for (int t = 0; t < report.confusion.n_classes; ++t) {
        out << labels[t].name;
        for (int p = 0; p < report.confusion.n_classes; ++p) {
            std::snprintf(buf, sizeof(buf), ",%.17g", report.confusion.at(t, p));
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw Error("write failed for " + path.string());
}

std::string render_summary(const BenchmarkResult& result, const std::string& dataset_root) {
    std::ostringstream out;
    out << "source camera identification benchmark\n";
    out << "dataset: " << dataset_root << "\n";
    out << "seed: " << result.split.seed << "  split: " << result.split.ratio << " train ratio"
        << " (per-class floor), train=" << result.split.train.size()
        << " test=" << result.split.test.size() << "\n";
    out << "devices:";
    for (const auto& l : result.labels) out << " " << l.name;
    out << "\n\n";

    out << "method    accuracy\n";
    for (const auto& r : result.reports)
        out << r.method << std::string(r.method.size() < 10 ? 10 - r.method.size() : 1, ' ')
            << format_accuracy(r.accuracy) << "\n";
    for (const auto& f : result.failures)
        out << f.method << std::string(f.method.size() < 10 ? 10 - f.method.size() : 1, ' ')
            << "FAILED: " << f.message << "\n";
    out << "\n";

    for (const auto& r : result.reports) {
        out << "confusion matrix [" << r.method << "] (rows = true device, row-normalized):\n";
        out << render_confusion_text(r.confusion, result.labels) << "\n";
    }
    return out.str();
}

std::string summarize_report_file(const std::filesystem::path& report_json) {
    std::ifstream in(report_json);
    if (!in) throw ConfigError("cannot open report file " + report_json.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("malformed report file: " + std::string(e.what()));
    }

    BenchmarkResult result;
    for (const auto& name : j.at("labels"))
        result.labels.push_back(
            {name.get<std::string>(), static_cast<int>(result.labels.size())});
    result.split.seed = j.at("seed").get<std::uint64_t>();
    result.split.ratio = j.at("ratio").get<double>();
    result.split.train.resize(j.at("split").at("train_count").get<std::size_t>());
    result.split.test.resize(j.at("split").at("test_count").get<std::size_t>());
    for (const auto& rj : j.at("reports")) {
        EvaluationReport r;
        r.method = rj.at("method").get<std::string>();
        r.accuracy = rj.at("accuracy").get<double>();
        const auto& rows = rj.at("confusion");
        r.confusion.n_classes = static_cast<int>(rows.size());
        for (const auto& row : rows)
            for (const auto& cell : row) r.confusion.normalized.push_back(cell.get<double>());
        r.confusion.counts.assign(r.confusion.normalized.size(), 0);
        r.confusion.zero_rows = rj.at("zero_rows").get<std::vector<bool>>();
        r.per_class_test_counts = rj.at("per_class_test_counts").get<std::vector<int>>();
        result.reports.push_back(std::move(r));
    }
    for (const auto& fj : j.at("failures"))
        result.failures.push_back(
            {fj.at("method").get<std::string>(), fj.at("message").get<std::string>()});
    return render_summary(result, j.at("dataset_root").get<std::string>());
}

}  // namespace camid
