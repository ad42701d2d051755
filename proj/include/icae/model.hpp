#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "icae/nn.hpp"
#include "icae/rng.hpp"
#include "icae/tensor.hpp"

namespace icae {

enum class ModelKind { twin, siamese };

std::string to_string(ModelKind kind);
std::string to_string(PowerMode mode);

// Block code geometry: 2^k messages carried over n real symbols.
struct ArchitectureSpec {
    int k = 4;
    int n = 8;
    int encoder_hidden = 32;
    int decoder_hidden = 32;
    PowerMode power_mode = PowerMode::batch_average;

    int message_count() const { return 1 << k; }
    double rate() const { return static_cast<double>(k) / n; }
    void validate() const;
};

struct MessageBatch {
    std::vector<int> indices;
    Tensor2 one_hot;
};

MessageBatch random_messages(int batch, int message_count, RngStream& rng);
// all messages once, in index order
MessageBatch all_messages(int message_count);

// One user's 2^k x n codeword matrix, row b = infer-mode encoding of message b.
struct CodeBook {
    Tensor2 matrix;
};

double mean_square_row_norm(const CodeBook& codebook);

inline constexpr int kModelFormatVersion = 1;

// The four networks of one two-user system plus the metadata needed to
// reproduce and persist it. Immutable once training finishes.
struct TrainedPair {
    ArchitectureSpec arch;
    Network encoder1;
    Network decoder1;
    Network encoder2;
    Network decoder2;
    double train_alpha = 0.0;
    double snr_low_db = 1.0;
    double snr_high_db = 12.0;
    std::uint64_t seed = 0;
    ModelKind model_kind = ModelKind::twin;
    int format_version = kModelFormatVersion;

    Network& encoder(int user);
    Network& decoder(int user);
    const Network& encoder(int user) const;
    const Network& decoder(int user) const;
    bool all_finite() const;
};

// Freshly initialized pair: encoder is
//   one_hot(2^k) -> dense+relu(hidden) -> dense(n) -> linear -> power norm,
// decoder is
//   y(n) -> dense+relu(hidden) -> dense+linear(hidden) -> dense -> softmax(2^k).
// Both users share the architecture, never the parameters.
TrainedPair build_pair(const ArchitectureSpec& arch, std::uint64_t seed);

Tensor2 encode_infer(const TrainedPair& pair, int user, const MessageBatch& batch);
Tensor2 decode_infer(const TrainedPair& pair, int user, const Tensor2& received);

// argmax with lowest-index tie-break
int hard_decision(std::span<const double> posterior);

CodeBook extract_codebook(const TrainedPair& pair, int user);

} // namespace icae
