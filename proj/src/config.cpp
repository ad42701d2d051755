#include "icae/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "icae/errors.hpp"

namespace icae {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto result = std::from_chars(begin, end, out);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    }
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto result = std::from_chars(begin, end, out);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const auto result = std::from_chars(begin, end, out);
    if (result.ec != std::errc{} || result.ptr != end) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("key '" + key + "': empty list element");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ",";
        out += format_number(values[i]);
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const {
    training.validate();
    stop.validate();
    if (eval_snrs_db.empty()) throw ConfigError("eval_snrs_db must be non-empty");
    if (eval_alphas.empty()) throw ConfigError("eval_alphas must be non-empty");
    for (double a : eval_alphas) {
        if (a < 0.0) throw ConfigError("eval_alphas entries must be >= 0");
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (out_dir.empty()) throw ConfigError("out_dir must be non-empty");
}

ExperimentConfig default_config() {
    return ExperimentConfig{};
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
    TrainingConfig& t = config.training;
    if (key == "model_kind") {
        if (value == "twin") t.model_kind = ModelKind::twin;
        else if (value == "siamese") t.model_kind = ModelKind::siamese;
        else throw ConfigError("key 'model_kind': expected twin or siamese, got '" + value + "'");
    } else if (key == "k") {
        t.arch.k = static_cast<int>(parse_int(key, value));
    } else if (key == "n") {
        t.arch.n = static_cast<int>(parse_int(key, value));
    } else if (key == "encoder_hidden") {
        t.arch.encoder_hidden = static_cast<int>(parse_int(key, value));
    } else if (key == "decoder_hidden") {
        t.arch.decoder_hidden = static_cast<int>(parse_int(key, value));
    } else if (key == "power_mode") {
        if (value == "batch_average") t.arch.power_mode = PowerMode::batch_average;
        else if (value == "per_codeword") t.arch.power_mode = PowerMode::per_codeword;
        else throw ConfigError("key 'power_mode': expected batch_average or per_codeword, got '" + value + "'");
    } else if (key == "alpha") {
        t.alpha = parse_double(key, value);
    } else if (key == "snr_low_db") {
        t.snr_low_db = parse_double(key, value);
    } else if (key == "snr_high_db") {
        t.snr_high_db = parse_double(key, value);
    } else if (key == "epochs") {
        t.epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "batches_per_epoch") {
        t.batches_per_epoch = static_cast<int>(parse_int(key, value));
    } else if (key == "batch_size") {
        t.batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "optimizer") {
        if (value == "adam") t.optimizer.kind = OptKind::adam;
        else if (value == "sgd") t.optimizer.kind = OptKind::sgd;
        else throw ConfigError("key 'optimizer': expected adam or sgd, got '" + value + "'");
    } else if (key == "learning_rate") {
        t.optimizer.learning_rate = parse_double(key, value);
    } else if (key == "adam_beta1") {
        t.optimizer.beta1 = parse_double(key, value);
    } else if (key == "adam_beta2") {
        t.optimizer.beta2 = parse_double(key, value);
    } else if (key == "adam_epsilon") {
        t.optimizer.epsilon = parse_double(key, value);
    } else if (key == "seed") {
        t.seed = parse_u64(key, value);
    } else if (key == "eval_snrs_db") {
        config.eval_snrs_db = parse_list(key, value);
    } else if (key == "eval_alphas") {
        config.eval_alphas = parse_list(key, value);
    } else if (key == "min_errors") {
        config.stop.min_errors = parse_int(key, value);
    } else if (key == "max_frames") {
        config.stop.max_frames = parse_int(key, value);
    } else if (key == "threads") {
        config.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "out_dir") {
        config.out_dir = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

ExperimentConfig parse_config_file(const std::string& path) {
    ExperimentConfig config = default_config();
    if (path.empty()) return config;

    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");

    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(line_number) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(line_number) + ": empty key");
        apply_override(config, key, value);
    }
    return config;
}

std::string render_config(const ExperimentConfig& config) {
    const TrainingConfig& t = config.training;
    std::ostringstream out;
    out << "model_kind = " << to_string(t.model_kind) << "\n";
    out << "k = " << t.arch.k << "\n";
    out << "n = " << t.arch.n << "\n";
    out << "encoder_hidden = " << t.arch.encoder_hidden << "\n";
    out << "decoder_hidden = " << t.arch.decoder_hidden << "\n";
    out << "power_mode = " << to_string(t.arch.power_mode) << "\n";
    out << "alpha = " << format_number(t.alpha) << "\n";
    out << "snr_low_db = " << format_number(t.snr_low_db) << "\n";
    out << "snr_high_db = " << format_number(t.snr_high_db) << "\n";
    out << "epochs = " << t.epochs << "\n";
    out << "batches_per_epoch = " << t.batches_per_epoch << "\n";
    out << "batch_size = " << t.batch_size << "\n";
    out << "optimizer = " << (t.optimizer.kind == OptKind::adam ? "adam" : "sgd") << "\n";
    out << "learning_rate = " << format_number(t.optimizer.learning_rate) << "\n";
    out << "adam_beta1 = " << format_number(t.optimizer.beta1) << "\n";
    out << "adam_beta2 = " << format_number(t.optimizer.beta2) << "\n";
    out << "adam_epsilon = " << format_number(t.optimizer.epsilon) << "\n";
    out << "seed = " << t.seed << "\n";
    out << "eval_snrs_db = " << format_list(config.eval_snrs_db) << "\n";
    out << "eval_alphas = " << format_list(config.eval_alphas) << "\n";
    out << "min_errors = " << config.stop.min_errors << "\n";
    out << "max_frames = " << config.stop.max_frames << "\n";
    out << "threads = " << config.threads << "\n";
    out << "out_dir = " << config.out_dir << "\n";
    return out.str();
}

} // namespace icae
