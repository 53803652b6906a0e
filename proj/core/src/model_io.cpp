#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "camid/model.hpp"

namespace camid {

namespace {

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

constexpr char kMagic[8] = {'C', 'A', 'M', 'I', 'D', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

void write_bytes(std::ostream& out, const void* data, std::size_t count) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(count));
}

template <class T>
void write_scalar(std::ostream& out, T value) {
    write_bytes(out, &value, sizeof(value));
}

void write_doubles(std::ostream& out, const std::vector<double>& values) {
    write_scalar<std::uint64_t>(out, values.size());
    write_bytes(out, values.data(), values.size() * sizeof(double));
}

void read_bytes(std::istream& in, void* data, std::size_t count) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) throw Error("truncated model file");
}

template <class T>
T read_scalar(std::istream& in) {
    T value{};
    read_bytes(in, &value, sizeof(value));
    return value;
}

std::vector<double> read_doubles(std::istream& in) {
    const auto count = read_scalar<std::uint64_t>(in);
    std::vector<double> values(count);
    read_bytes(in, values.data(), count * sizeof(double));
    return values;
}

json labels_to_json(const std::vector<DeviceLabel>& labels) {
    json out = json::array();
    for (const auto& l : labels) out.push_back({{"name", l.name}, {"index", l.index}});
    return out;
}

std::vector<DeviceLabel> labels_from_json(const json& j) {
    std::vector<DeviceLabel> labels;
    for (const auto& e : j) labels.push_back({e.at("name").get<std::string>(), e.at("index").get<int>()});
    return labels;
}

json kernel_to_json(const KernelSpec& spec) {
    return {{"kind", spec.kind == KernelSpec::Kind::Linear ? "linear" : "rbf"},
            {"gamma", spec.gamma}};
}

KernelSpec kernel_from_json(const json& j) {
    KernelSpec spec;
    spec.kind = j.at("kind").get<std::string>() == "linear" ? KernelSpec::Kind::Linear
                                                            : KernelSpec::Kind::Rbf;
    spec.gamma = j.at("gamma").get<double>();
    return spec;
}

json prnu_to_json(const PrnuConfig& cfg) {
    return {{"sigma1", cfg.sigma1},
            {"sigma_w", cfg.sigma_w},
            {"sigma_n2", cfg.sigma_n2},
            {"crop", cfg.crop},
            {"stride", cfg.stride}};
}

PrnuConfig prnu_from_json(const json& j) {
    PrnuConfig cfg;
    cfg.sigma1 = j.at("sigma1").get<double>();
    cfg.sigma_w = j.at("sigma_w").get<double>();
    cfg.sigma_n2 = j.at("sigma_n2").get<double>();
    cfg.crop = j.at("crop").get<int>();
    cfg.stride = j.at("stride").get<int>();
    return cfg;
}

json cnn_spec_to_json(const CnnSpec& spec) {
    json blocks = json::array();
    for (const auto& b : spec.conv_blocks)
        blocks.push_back({{"filters", b.filters}, {"pool", b.pool_after}});
    return {{"input_height", spec.input_height},
            {"input_width", spec.input_width},
            {"input_channels", spec.input_channels},
            {"conv_blocks", blocks},
            {"dense_units", spec.dense_units},
            {"num_classes", spec.num_classes}};
}

CnnSpec cnn_spec_from_json(const json& j) {
    CnnSpec spec;
    spec.input_height = j.at("input_height").get<int>();
    spec.input_width = j.at("input_width").get<int>();
    spec.input_channels = j.at("input_channels").get<int>();
    spec.conv_blocks.clear();
    for (const auto& b : j.at("conv_blocks"))
        spec.conv_blocks.push_back({b.at("filters").get<int>(), b.at("pool").get<bool>()});
    spec.dense_units = j.at("dense_units").get<int>();
    spec.num_classes = j.at("num_classes").get<int>();
    return spec;
}

void write_binary_svm(std::ostream& out, const BinarySvmModel& model) {
    write_scalar<double>(out, model.bias);
    write_scalar<double>(out, model.c);
    write_scalar<std::uint64_t>(out, model.support_vectors.size());
    write_scalar<std::uint64_t>(out,
                                model.support_vectors.empty() ? 0 : model.support_vectors[0].size());
    for (const auto& sv : model.support_vectors) write_bytes(out, sv.data(), sv.size() * sizeof(double));
    write_doubles(out, model.alpha);
    std::vector<double> labels(model.sv_labels.begin(), model.sv_labels.end());
    write_doubles(out, labels);
}

BinarySvmModel read_binary_svm(std::istream& in, const KernelSpec& kernel) {
    BinarySvmModel model;
    model.kernel = kernel;
    model.bias = read_scalar<double>(in);
    model.c = read_scalar<double>(in);
    const auto count = read_scalar<std::uint64_t>(in);
    const auto dim = read_scalar<std::uint64_t>(in);
    model.support_vectors.resize(count);
    for (auto& sv : model.support_vectors) {
        sv.resize(dim);
        read_bytes(in, sv.data(), dim * sizeof(double));
    }
    model.alpha = read_doubles(in);
    const std::vector<double> labels = read_doubles(in);
    model.sv_labels.assign(labels.begin(), labels.end());
    return model;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (int d : t.shape) write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    write_doubles(out, t.v);
}

Tensor read_tensor(std::istream& in) {
    Tensor t;
    const auto ndims = read_scalar<std::uint32_t>(in);
    t.shape.resize(ndims);
    for (auto& d : t.shape) d = static_cast<int>(read_scalar<std::uint32_t>(in));
    t.v = read_doubles(in);
    return t;
}

}  // namespace

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file " + path.string());

    json header;
    header["kind"] = model_kind_name(model.kind);
    header["labels"] = labels_to_json(model.labels);
    if (model.kind == ModelKind::Cnn) {
        const auto& payload = std::get<CnnPipelineModel>(model.payload);
        header["cnn_spec"] = cnn_spec_to_json(payload.spec);
        header["resize"] = {{"height", payload.resize.target_height},
                            {"width", payload.resize.target_width}};
        header["train_seed"] = payload.train_seed;
        header["loss_history"] = payload.loss_history;
    } else {
        const auto& payload = std::get<SvmPipelineModel>(model.payload);
        header["kernel"] = kernel_to_json(payload.svm.per_class.empty()
                                              ? KernelSpec{}
                                              : payload.svm.per_class[0].kernel);
        header["n_classes"] = payload.svm.n_classes;
        header["prnu"] = prnu_to_json(payload.prnu);
    }
    const std::string header_text = header.dump();

    write_bytes(out, kMagic, sizeof(kMagic));
    write_scalar<std::uint32_t>(out, kVersion);
    write_scalar<std::uint64_t>(out, header_text.size());
    write_bytes(out, header_text.data(), header_text.size());

    if (model.kind == ModelKind::Cnn) {
        const auto& payload = std::get<CnnPipelineModel>(model.payload);
        const auto tensors = payload.params.tensors();
        write_scalar<std::uint64_t>(out, tensors.size());
        for (const Tensor* t : tensors) write_tensor(out, *t);
    } else {
        const auto& payload = std::get<SvmPipelineModel>(model.payload);
        write_doubles(out, payload.standardizer.mean);
        write_doubles(out, payload.standardizer.stddev);
        write_scalar<std::uint64_t>(out, payload.svm.per_class.size());
        for (const auto& binary : payload.svm.per_class) write_binary_svm(out, binary);
    }
    if (!out) throw Error("write failed for model file " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file " + path.string());

    char magic[8];
    read_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("not a camid model file: " + path.string());
    const auto version = read_scalar<std::uint32_t>(in);
    if (version != kVersion)
        throw Error("unsupported model file version " + std::to_string(version));

    const auto header_len = read_scalar<std::uint64_t>(in);
    std::string header_text(header_len, '\0');
    read_bytes(in, header_text.data(), header_len);
    const json header = json::parse(header_text);

    TrainedModel model;
    model.labels = labels_from_json(header.at("labels"));
    const std::string kind = header.at("kind").get<std::string>();

    if (kind == "cnn") {
        model.kind = ModelKind::Cnn;
        CnnPipelineModel payload;
        payload.spec = cnn_spec_from_json(header.at("cnn_spec"));
        payload.resize.target_height = header.at("resize").at("height").get<int>();
        payload.resize.target_width = header.at("resize").at("width").get<int>();
        payload.train_seed = header.at("train_seed").get<std::uint64_t>();
        payload.loss_history = header.at("loss_history").get<std::vector<double>>();

        const auto tensor_count = read_scalar<std::uint64_t>(in);
        payload.params = glorot_init(payload.spec, 0);  // shapes only; overwritten below
        auto tensors = payload.params.tensors();
        if (tensor_count != tensors.size()) throw Error("model tensor count mismatch");
        for (Tensor* t : tensors) *t = read_tensor(in);
        model.payload = std::move(payload);
        return model;
    }

    model.kind = kind == "jpeg-svm" ? ModelKind::JpegSvm : ModelKind::PrnuSvm;
    SvmPipelineModel payload;
    payload.prnu = prnu_from_json(header.at("prnu"));
    const KernelSpec kernel = kernel_from_json(header.at("kernel"));
    payload.standardizer.mean = read_doubles(in);
    payload.standardizer.stddev = read_doubles(in);
    payload.svm.n_classes = header.at("n_classes").get<int>();
    const auto class_count = read_scalar<std::uint64_t>(in);
    payload.svm.per_class.reserve(class_count);
    for (std::uint64_t i = 0; i < class_count; ++i)
        payload.svm.per_class.push_back(read_binary_svm(in, kernel));
    model.payload = std::move(payload);
    return model;
}

}  // namespace camid
