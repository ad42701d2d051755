#include "icae/model_io.hpp"

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "icae/errors.hpp"

namespace icae {

namespace {

constexpr const char* kMagic = "icae model";

std::string format_number(double v) {
    // 17 significant digits round-trip doubles exactly
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string checksum_string(const std::string& body) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return buf;
}

const char* kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::linear: return "linear";
    case LayerKind::batch_power_norm: return "batch_power_norm";
    case LayerKind::softmax: return "softmax";
    }
    return "?";
}

void serialize_network(std::ostringstream& out, const char* name, const Network& net) {
    out << "network " << name << " layers " << net.layers.size() << "\n";
    for (const Layer& layer : net.layers) {
        out << "layer " << kind_name(layer.spec.kind) << " " << layer.spec.in_width << " " << layer.spec.out_width;
        if (layer.spec.kind == LayerKind::batch_power_norm) out << " " << to_string(layer.spec.norm_mode);
        out << "\n";
        if (layer.spec.kind == LayerKind::dense) {
            out << "weights " << layer.spec.in_width << " " << layer.spec.out_width << "\n";
            for (int r = 0; r < layer.spec.in_width; ++r) {
                for (int c = 0; c < layer.spec.out_width; ++c) {
                    if (c > 0) out << " ";
                    out << format_number(layer.params.weights.at(r, c));
                }
                out << "\n";
            }
            out << "bias " << layer.spec.out_width << "\n";
            for (int c = 0; c < layer.spec.out_width; ++c) {
                if (c > 0) out << " ";
                out << format_number(layer.params.bias[c]);
            }
            out << "\n";
        } else if (layer.spec.kind == LayerKind::batch_power_norm) {
            out << "norm_running_scale " << format_number(layer.params.norm_running_scale) << "\n";
            out << "norm_momentum " << format_number(layer.params.norm_momentum) << "\n";
        }
    }
}

std::string serialize_body(const TrainedPair& pair) {
    std::ostringstream out;
    out << "model_kind = " << to_string(pair.model_kind) << "\n";
    out << "k = " << pair.arch.k << "\n";
    out << "n = " << pair.arch.n << "\n";
    out << "encoder_hidden = " << pair.arch.encoder_hidden << "\n";
    out << "decoder_hidden = " << pair.arch.decoder_hidden << "\n";
    out << "power_mode = " << to_string(pair.arch.power_mode) << "\n";
    out << "train_alpha = " << format_number(pair.train_alpha) << "\n";
    out << "snr_low_db = " << format_number(pair.snr_low_db) << "\n";
    out << "snr_high_db = " << format_number(pair.snr_high_db) << "\n";
    out << "seed = " << pair.seed << "\n";
    serialize_network(out, "encoder1", pair.encoder1);
    serialize_network(out, "decoder1", pair.decoder1);
    serialize_network(out, "encoder2", pair.encoder2);
    serialize_network(out, "decoder2", pair.decoder2);
    out << "end\n";
    return out.str();
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// --- loading ---

struct LineReader {
    std::istringstream in;
    std::string path;
    int line_number = 0;

    explicit LineReader(std::string body, std::string file) : in(std::move(body)), path(std::move(file)) {}

    std::string next() {
        std::string line;
        if (!std::getline(in, line)) {
            throw ModelFileError(path + ": unexpected end of file at line " + std::to_string(line_number + 1));
        }
        ++line_number;
        return line;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ModelFileError(path + ":" + std::to_string(line_number) + ": " + message);
    }
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string token;
    while (ss >> token) out.push_back(token);
    return out;
}

double read_double(LineReader& reader, const std::string& token) {
    double v = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), v);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
        reader.fail("expected a number, got '" + token + "'");
    }
    return v;
}

long long read_int(LineReader& reader, const std::string& token) {
    long long v = 0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), v);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
        reader.fail("expected an integer, got '" + token + "'");
    }
    return v;
}

std::string expect_field(LineReader& reader, const std::string& key) {
    const std::string line = reader.next();
    const std::string prefix = key + " = ";
    if (line.rfind(prefix, 0) != 0) reader.fail("expected '" + key + " = ...', got '" + line + "'");
    return line.substr(prefix.size());
}

Network parse_network(LineReader& reader, const std::string& expected_name) {
    auto header = split_ws(reader.next());
    if (header.size() != 4 || header[0] != "network" || header[2] != "layers") {
        reader.fail("expected 'network " + expected_name + " layers N'");
    }
    if (header[1] != expected_name) reader.fail("expected network '" + expected_name + "', got '" + header[1] + "'");
    const long long layer_count = read_int(reader, header[3]);
    if (layer_count < 1 || layer_count > 64) reader.fail("implausible layer count");

    Network net;
    for (long long i = 0; i < layer_count; ++i) {
        auto tokens = split_ws(reader.next());
        if (tokens.size() < 4 || tokens[0] != "layer") reader.fail("expected a 'layer KIND IN OUT' line");
        Layer layer;
        const std::string& kind = tokens[1];
        layer.spec.in_width = static_cast<int>(read_int(reader, tokens[2]));
        layer.spec.out_width = static_cast<int>(read_int(reader, tokens[3]));
        if (layer.spec.in_width < 1 || layer.spec.out_width < 1) reader.fail("layer widths must be >= 1");

        if (kind == "dense") {
            layer.spec.kind = LayerKind::dense;
            auto wheader = split_ws(reader.next());
            if (wheader.size() != 3 || wheader[0] != "weights") reader.fail("expected 'weights R C'");
            const int wr = static_cast<int>(read_int(reader, wheader[1]));
            const int wc = static_cast<int>(read_int(reader, wheader[2]));
            if (wr != layer.spec.in_width || wc != layer.spec.out_width) {
                reader.fail("weights dimensions disagree with the layer widths");
            }
            layer.params.weights = Tensor2(wr, wc);
            for (int r = 0; r < wr; ++r) {
                auto values = split_ws(reader.next());
                if (static_cast<int>(values.size()) != wc) reader.fail("weights row has wrong length");
                for (int c = 0; c < wc; ++c) layer.params.weights.at(r, c) = read_double(reader, values[c]);
            }
            auto bheader = split_ws(reader.next());
            if (bheader.size() != 2 || bheader[0] != "bias") reader.fail("expected 'bias C'");
            if (static_cast<int>(read_int(reader, bheader[1])) != wc) reader.fail("bias length disagrees with layer width");
            auto values = split_ws(reader.next());
            if (static_cast<int>(values.size()) != wc) reader.fail("bias row has wrong length");
            layer.params.bias.resize(wc);
            for (int c = 0; c < wc; ++c) layer.params.bias[c] = read_double(reader, values[c]);
        } else if (kind == "relu" || kind == "linear" || kind == "softmax") {
            layer.spec.kind = kind == "relu" ? LayerKind::relu : (kind == "linear" ? LayerKind::linear : LayerKind::softmax);
        } else if (kind == "batch_power_norm") {
            layer.spec.kind = LayerKind::batch_power_norm;
            if (tokens.size() != 5) reader.fail("batch_power_norm layer line requires a mode");
            if (tokens[4] == "batch_average") layer.spec.norm_mode = PowerMode::batch_average;
            else if (tokens[4] == "per_codeword") layer.spec.norm_mode = PowerMode::per_codeword;
            else reader.fail("unknown power mode '" + tokens[4] + "'");
            auto scale_tokens = split_ws(reader.next());
            if (scale_tokens.size() != 2 || scale_tokens[0] != "norm_running_scale") reader.fail("expected 'norm_running_scale V'");
            layer.params.norm_running_scale = read_double(reader, scale_tokens[1]);
            auto momentum_tokens = split_ws(reader.next());
            if (momentum_tokens.size() != 2 || momentum_tokens[0] != "norm_momentum") reader.fail("expected 'norm_momentum V'");
            layer.params.norm_momentum = read_double(reader, momentum_tokens[1]);
            if (layer.params.norm_running_scale <= 0.0) reader.fail("norm_running_scale must be > 0");
            layer.params.norm_seeded = true; // stored statistics are authoritative
        } else {
            reader.fail("unknown layer kind '" + kind + "'");
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

void check_network_shape(const Network& net, const Network& reference, const std::string& name, const std::string& path) {
    if (net.layers.size() != reference.layers.size()) {
        throw ModelFileError(path + ": " + name + " has " + std::to_string(net.layers.size()) + " layers, architecture requires " + std::to_string(reference.layers.size()));
    }
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& got = net.layers[i].spec;
        const auto& want = reference.layers[i].spec;
        if (got.kind != want.kind || got.in_width != want.in_width || got.out_width != want.out_width) {
            throw ModelFileError(path + ": " + name + " layer " + std::to_string(i) + " (" + kind_name(got.kind) + " " +
                                 std::to_string(got.in_width) + "x" + std::to_string(got.out_width) + ") does not match the declared architecture");
        }
    }
}

} // namespace

std::string model_checksum(const TrainedPair& pair) {
    return checksum_string(serialize_body(pair));
}

void save_model(const TrainedPair& pair, const std::string& path) {
    const std::string body = serialize_body(pair);
    std::ostringstream out;
    out << kMagic << " " << pair.format_version << "\n";
    out << "created = " << timestamp_utc() << "\n";
    out << "checksum = " << checksum_string(body) << "\n";
    out << body;

    const std::filesystem::path target(path);
    const std::filesystem::path temp = target.string() + ".tmp";
    {
        std::ofstream file(temp, std::ios::trunc);
        if (!file) throw ModelFileError("cannot write '" + temp.string() + "'");
        file << out.str();
        if (!file.flush()) throw ModelFileError("write failed for '" + temp.string() + "'");
    }
    std::filesystem::rename(temp, target);
}

TrainedPair load_model(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ModelFileError("cannot open model file '" + path + "'");
    std::ostringstream raw;
    raw << file.rdbuf();
    const std::string text = raw.str();

    // header: magic+version, created, checksum; everything after is the body
    std::size_t pos = 0;
    auto take_line = [&](const char* what) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) throw ModelFileError(path + ": truncated header (" + std::string(what) + ")");
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };
    const std::string magic_line = take_line("magic");
    const std::string magic_prefix = std::string(kMagic) + " ";
    if (magic_line.rfind(magic_prefix, 0) != 0) throw ModelFileError(path + ": not an icae model file");
    const std::string version_text = magic_line.substr(magic_prefix.size());
    long long version = 0;
    const auto vres = std::from_chars(version_text.data(), version_text.data() + version_text.size(), version);
    if (vres.ec != std::errc{} || vres.ptr != version_text.data() + version_text.size()) {
        throw ModelFileError(path + ": malformed format version '" + version_text + "'");
    }
    if (version != kModelFormatVersion) {
        throw ModelFileError(path + ": unsupported format version " + std::to_string(version));
    }
    const std::string created_line = take_line("created");
    if (created_line.rfind("created = ", 0) != 0) throw ModelFileError(path + ": missing created line");
    const std::string checksum_line = take_line("checksum");
    if (checksum_line.rfind("checksum = ", 0) != 0) throw ModelFileError(path + ": missing checksum line");
    const std::string stored_checksum = checksum_line.substr(std::string("checksum = ").size());

    const std::string body = text.substr(pos);
    if (checksum_string(body) != stored_checksum) {
        throw ModelFileError(path + ": checksum mismatch (file corrupt or truncated)");
    }

    LineReader reader(body, path);
    TrainedPair pair;
    pair.format_version = static_cast<int>(version);

    const std::string kind = expect_field(reader, "model_kind");
    if (kind == "twin") pair.model_kind = ModelKind::twin;
    else if (kind == "siamese") pair.model_kind = ModelKind::siamese;
    else reader.fail("unknown model_kind '" + kind + "'");

    pair.arch.k = static_cast<int>(read_int(reader, expect_field(reader, "k")));
    pair.arch.n = static_cast<int>(read_int(reader, expect_field(reader, "n")));
    pair.arch.encoder_hidden = static_cast<int>(read_int(reader, expect_field(reader, "encoder_hidden")));
    pair.arch.decoder_hidden = static_cast<int>(read_int(reader, expect_field(reader, "decoder_hidden")));
    const std::string power_mode = expect_field(reader, "power_mode");
    if (power_mode == "batch_average") pair.arch.power_mode = PowerMode::batch_average;
    else if (power_mode == "per_codeword") pair.arch.power_mode = PowerMode::per_codeword;
    else reader.fail("unknown power_mode '" + power_mode + "'");
    try {
        pair.arch.validate();
    } catch (const ConfigError& e) {
        throw ModelFileError(path + ": invalid architecture: " + e.what());
    }
    pair.train_alpha = read_double(reader, expect_field(reader, "train_alpha"));
    pair.snr_low_db = read_double(reader, expect_field(reader, "snr_low_db"));
    pair.snr_high_db = read_double(reader, expect_field(reader, "snr_high_db"));
    pair.seed = static_cast<std::uint64_t>(read_int(reader, expect_field(reader, "seed")));

    pair.encoder1 = parse_network(reader, "encoder1");
    pair.decoder1 = parse_network(reader, "decoder1");
    pair.encoder2 = parse_network(reader, "encoder2");
    pair.decoder2 = parse_network(reader, "decoder2");
    if (reader.next() != "end") reader.fail("expected 'end'");

    // shape consistency against the declared architecture
    const TrainedPair reference = build_pair(pair.arch, 0);
    check_network_shape(pair.encoder1, reference.encoder1, "encoder1", path);
    check_network_shape(pair.decoder1, reference.decoder1, "decoder1", path);
    check_network_shape(pair.encoder2, reference.encoder2, "encoder2", path);
    check_network_shape(pair.decoder2, reference.decoder2, "decoder2", path);
    return pair;
}

} // namespace icae
