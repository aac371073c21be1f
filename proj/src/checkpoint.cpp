#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sysdse/model.hpp"

namespace sysdse {

namespace {

constexpr const char* kFormat = "sysdse-checkpoint";

void append_le(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>(bits & 0xffU));
        bits >>= 8;
    }
}

double read_le(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(p[i]);
    return std::bit_cast<double>(bits);
}

struct TensorRef {
    std::string name;
    std::vector<std::size_t> shape;
    const std::vector<double>* data;
};

std::vector<TensorRef> tensors_of(const RecommenderModel& m) {
    const auto& s = m.spec;
    std::vector<TensorRef> out;
    for (std::size_t f = 0; f < m.params.embeddings.size(); ++f) {
        out.push_back({"embedding." + std::to_string(f), {s.encoder.features[f].vocab, s.embedding_dim},
                       &m.params.embeddings[f]});
    }
    out.push_back({"hidden.weight", {s.hidden_units, s.input_dim()}, &m.params.hidden_w});
    out.push_back({"hidden.bias", {s.hidden_units}, &m.params.hidden_b});
    out.push_back({"output.weight", {s.num_classes, s.hidden_units}, &m.params.output_w});
    out.push_back({"output.bias", {s.num_classes}, &m.params.output_b});
    if (s.baseline_mode) {
        out.push_back({"input.mean", {s.arity()}, &m.input_mean});
        out.push_back({"input.scale", {s.arity()}, &m.input_scale});
    }
    return out;
}

std::size_t numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

nlohmann::json spec_to_json(const ModelSpec& s) {
    return {{"encoder", to_json(s.encoder)},
            {"embedding_dim", s.embedding_dim},
            {"hidden_units", s.hidden_units},
            {"num_classes", s.num_classes},
            {"baseline_mode", s.baseline_mode}};
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec s;
    s.encoder = encoder_from_json(j.at("encoder"));
    s.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    s.hidden_units = j.at("hidden_units").get<std::size_t>();
    s.num_classes = j.at("num_classes").get<std::size_t>();
    s.baseline_mode = j.at("baseline_mode").get<bool>();
    return s;
}

}  // namespace

std::string checkpoint_bytes(const RecommenderModel& model) {
    const auto tensors = tensors_of(model);
    nlohmann::json header;
    header["format"] = kFormat;
    header["version"] = kCheckpointVersion;
    header["spec"] = spec_to_json(model.spec);
    header["label_space"] = model.label_space;
    nlohmann::json list = nlohmann::json::array();
    std::size_t total = 0;
    for (const auto& t : tensors) {
        if (t.data->size() != numel(t.shape)) throw CheckpointError("tensor " + t.name + " does not match its shape");
        list.push_back({{"name", t.name}, {"shape", t.shape}});
        total += t.data->size();
    }
    header["tensors"] = list;

    std::string out = header.dump();
    out.push_back('\n');
    out.reserve(out.size() + total * 8);
    for (const auto& t : tensors) {
        for (double v : *t.data) append_le(out, v);
    }
    return out;
}

void save_checkpoint(const RecommenderModel& model, const std::filesystem::path& path) {
    const std::string bytes = checkpoint_bytes(model);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("failed writing " + path.string());
}

RecommenderModel checkpoint_from_bytes(const std::string& bytes) {
    const auto nl = bytes.find('\n');
    if (nl == std::string::npos) throw CheckpointError("checkpoint header is truncated");

    RecommenderModel model;
    nlohmann::json header;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> declared;
    try {
        header = nlohmann::json::parse(bytes.substr(0, nl));
        if (header.at("format").get<std::string>() != kFormat) throw CheckpointError("not a sysdse checkpoint");
        const int version = header.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
        }
        model.spec = spec_from_json(header.at("spec"));
        model.label_space = header.value("label_space", nlohmann::json::object());
        for (const auto& t : header.at("tensors")) {
            declared.emplace_back(t.at("name").get<std::string>(), t.at("shape").get<std::vector<std::size_t>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
    }
    try {
        model.spec.validate();
    } catch (const ParameterError& e) {
        throw CheckpointError(std::string("inconsistent model spec: ") + e.what());
    }

    // Allocate the expected tensors, then check the declared list agrees.
    const auto& s = model.spec;
    auto& p = model.params;
    if (!s.baseline_mode) {
        for (const auto& f : s.encoder.features) p.embeddings.emplace_back(std::size_t{f.vocab} * s.embedding_dim);
    } else {
        model.input_mean.resize(s.arity());
        model.input_scale.resize(s.arity());
    }
    p.hidden_w.resize(s.hidden_units * s.input_dim());
    p.hidden_b.resize(s.hidden_units);
    p.output_w.resize(s.num_classes * s.hidden_units);
    p.output_b.resize(s.num_classes);

    const auto expected = tensors_of(model);
    if (expected.size() != declared.size()) throw CheckpointError("checkpoint tensor list does not match its spec");
    std::size_t total = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i].name != declared[i].first || expected[i].shape != declared[i].second) {
            throw CheckpointError("tensor " + declared[i].first + " is inconsistent with the model spec");
        }
        total += numel(expected[i].shape);
    }
    const std::size_t payload = bytes.size() - nl - 1;
    if (payload != total * 8) {
        throw CheckpointError("checkpoint payload has " + std::to_string(payload) + " bytes, expected " +
                              std::to_string(total * 8));
    }

    const char* cursor = bytes.data() + nl + 1;
    for (const auto& t : expected) {
        auto& data = const_cast<std::vector<double>&>(*t.data);
        for (auto& v : data) {
            v = read_le(cursor);
            cursor += 8;
            if (!std::isfinite(v)) throw CheckpointError("tensor " + t.name + " holds a non-finite value");
        }
    }
    return model;
}

RecommenderModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return checkpoint_from_bytes(ss.str());
}

}  // namespace sysdse
