#include "icae/model.hpp"

#include <array>

#include "icae/errors.hpp"

namespace icae {

std::string to_string(ModelKind kind) {
    return kind == ModelKind::twin ? "twin" : "siamese";
}

std::string to_string(PowerMode mode) {
    return mode == PowerMode::batch_average ? "batch_average" : "per_codeword";
}

void ArchitectureSpec::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (n < k) throw ConfigError("n must be >= k");
    if (k > 20) throw ConfigError("k > 20 is not supported (message table would be huge)");
    if (encoder_hidden < 1 || decoder_hidden < 1) throw ConfigError("hidden widths must be >= 1");
}

MessageBatch random_messages(int batch, int message_count, RngStream& rng) {
    MessageBatch out;
    out.indices.resize(batch);
    out.one_hot = Tensor2(batch, message_count, 0.0);
    for (int r = 0; r < batch; ++r) {
        const int m = rng.uniform_index(message_count);
        out.indices[r] = m;
        out.one_hot.at(r, m) = 1.0;
    }
    return out;
}

MessageBatch all_messages(int message_count) {
    MessageBatch out;
    out.indices.resize(message_count);
    out.one_hot = Tensor2(message_count, message_count, 0.0);
    for (int m = 0; m < message_count; ++m) {
        out.indices[m] = m;
        out.one_hot.at(m, m) = 1.0;
    }
    return out;
}

double mean_square_row_norm(const CodeBook& codebook) {
    double total = 0.0;
    for (double v : codebook.matrix.data()) total += v * v;
    return total / codebook.matrix.rows();
}

Network& TrainedPair::encoder(int user) {
    if (user == 1) return encoder1;
    if (user == 2) return encoder2;
    throw UsageError("user must be 1 or 2");
}

Network& TrainedPair::decoder(int user) {
    if (user == 1) return decoder1;
    if (user == 2) return decoder2;
    throw UsageError("user must be 1 or 2");
}

const Network& TrainedPair::encoder(int user) const {
    return const_cast<TrainedPair*>(this)->encoder(user);
}

const Network& TrainedPair::decoder(int user) const {
    return const_cast<TrainedPair*>(this)->decoder(user);
}

bool TrainedPair::all_finite() const {
    return encoder1.all_finite() && decoder1.all_finite() && encoder2.all_finite() && decoder2.all_finite();
}

namespace {

std::vector<LayerSpec> encoder_specs(const ArchitectureSpec& arch) {
    const int m = arch.message_count();
    const int h = arch.encoder_hidden;
    return {
        {LayerKind::dense, m, h},
        {LayerKind::relu, h, h},
        {LayerKind::dense, h, arch.n},
        {LayerKind::linear, arch.n, arch.n},
        {LayerKind::batch_power_norm, arch.n, arch.n, arch.power_mode},
    };
}

std::vector<LayerSpec> decoder_specs(const ArchitectureSpec& arch) {
    const int m = arch.message_count();
    const int h = arch.decoder_hidden;
    return {
        {LayerKind::dense, arch.n, h},
        {LayerKind::relu, h, h},
        {LayerKind::dense, h, h},
        {LayerKind::linear, h, h},
        {LayerKind::dense, h, m},
        {LayerKind::softmax, m, m},
    };
}

} // namespace

TrainedPair build_pair(const ArchitectureSpec& arch, std::uint64_t seed) {
    arch.validate();
    TrainedPair pair;
    pair.arch = arch;
    pair.seed = seed;

    const auto enc = encoder_specs(arch);
    const auto dec = decoder_specs(arch);
    std::array<Network*, 4> nets = {&pair.encoder1, &pair.decoder1, &pair.encoder2, &pair.decoder2};
    for (int i = 0; i < 4; ++i) {
        RngStream rng(seed, streams::net_init(i));
        *nets[i] = make_network(i % 2 == 0 ? std::span<const LayerSpec>(enc) : std::span<const LayerSpec>(dec), rng);
    }
    return pair;
}

Tensor2 encode_infer(const TrainedPair& pair, int user, const MessageBatch& batch) {
    for (int m : batch.indices) {
        if (m < 0 || m >= pair.arch.message_count()) throw UsageError("message index out of range");
    }
    return infer(pair.encoder(user), batch.one_hot);
}

Tensor2 decode_infer(const TrainedPair& pair, int user, const Tensor2& received) {
    if (received.cols() != pair.arch.n) {
        throw UsageError("received width " + std::to_string(received.cols()) + " does not match n = " + std::to_string(pair.arch.n));
    }
    return infer(pair.decoder(user), received);
}

int hard_decision(std::span<const double> posterior) {
    if (posterior.empty()) throw UsageError("empty posterior");
    int best = 0;
    for (int i = 1; i < static_cast<int>(posterior.size()); ++i) {
        if (posterior[i] > posterior[best]) best = i;
    }
    return best;
}

CodeBook extract_codebook(const TrainedPair& pair, int user) {
    const MessageBatch batch = all_messages(pair.arch.message_count());
    return CodeBook{encode_infer(pair, user, batch)};
}

} // namespace icae
