#include "icae/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "icae/channel.hpp"
#include "icae/errors.hpp"

namespace icae {

namespace {

constexpr int kFramesPerChunk = 4096;

} // namespace

void StopRule::validate() const {
    if (min_errors < 1) throw ConfigError("min_errors must be >= 1");
    if (max_frames < 1) throw ConfigError("max_frames must be >= 1");
}

double q_function(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double bpsk_ber(double eb_n0_db) {
    return q_function(std::sqrt(2.0 * std::pow(10.0, eb_n0_db / 10.0)));
}

double tdma_bpsk_bler(double eb_n0_db, int k) {
    if (k < 1) throw ConfigError("k must be >= 1");
    const double ber = bpsk_ber(eb_n0_db);
    // 1 - (1 - ber)^k, stable for tiny ber
    return -std::expm1(static_cast<double>(k) * std::log1p(-ber));
}

BlerPoint simulate_bler(const TrainedPair& pair, double alpha_eval, double eb_n0_db, const StopRule& stop, RngStream rng) {
    stop.validate();
    if (alpha_eval < 0.0) throw ConfigError("alpha must be >= 0");
    if (!pair.all_finite()) {
        throw NumericalError("model contains non-finite parameters; refusing to evaluate");
    }

    const int message_count = pair.arch.message_count();
    const double sigma = noise_sigma(eb_n0_db, pair.arch.rate());
    // infer-mode encoders are pure per message, so the codebook stands in
    const Tensor2 cb1 = extract_codebook(pair, 1).matrix;
    const Tensor2 cb2 = extract_codebook(pair, 2).matrix;

    BlerPoint point;
    point.eb_n0_db = eb_n0_db;
    point.alpha_eval = alpha_eval;

    std::vector<int> m1(kFramesPerChunk), m2(kFramesPerChunk);
    while (point.frames < stop.max_frames && (point.errors_user1 < stop.min_errors || point.errors_user2 < stop.min_errors)) {
        const int chunk = static_cast<int>(std::min<long long>(kFramesPerChunk, stop.max_frames - point.frames));
        Tensor2 y1(chunk, pair.arch.n);
        Tensor2 y2(chunk, pair.arch.n);
        for (int r = 0; r < chunk; ++r) {
            m1[r] = rng.uniform_index(message_count);
            m2[r] = rng.uniform_index(message_count);
            auto row1 = y1.row(r);
            auto row2 = y2.row(r);
            auto c1 = cb1.row(m1[r]);
            auto c2 = cb2.row(m2[r]);
            for (int j = 0; j < pair.arch.n; ++j) {
                row1[j] = c1[j] + alpha_eval * c2[j] + sigma * rng.normal();
                row2[j] = c2[j] + alpha_eval * c1[j] + sigma * rng.normal();
            }
        }
        const Tensor2 post1 = infer(pair.decoder1, y1);
        const Tensor2 post2 = infer(pair.decoder2, y2);
        for (int r = 0; r < chunk; ++r) {
            if (hard_decision(post1.row(r)) != m1[r]) ++point.errors_user1;
            if (hard_decision(post2.row(r)) != m2[r]) ++point.errors_user2;
        }
        point.frames += chunk;
    }

    point.bler_user1 = static_cast<double>(point.errors_user1) / point.frames;
    point.bler_user2 = static_cast<double>(point.errors_user2) / point.frames;
    return point;
}

BlerPoint simulate_bpsk_bler(int k, double eb_n0_db, const StopRule& stop, RngStream rng) {
    stop.validate();
    if (k < 1) throw ConfigError("k must be >= 1");
    const double sigma = noise_sigma(eb_n0_db, 1.0); // uncoded: one symbol per bit

    BlerPoint point;
    point.eb_n0_db = eb_n0_db;
    point.alpha_eval = 0.0;

    while (point.frames < stop.max_frames && point.errors_user1 < stop.min_errors) {
        const int chunk = static_cast<int>(std::min<long long>(kFramesPerChunk, stop.max_frames - point.frames));
        for (int r = 0; r < chunk; ++r) {
            bool block_error = false;
            for (int j = 0; j < k; ++j) {
                const double symbol = rng.next_u64() & 1 ? 1.0 : -1.0;
                const double received = symbol + sigma * rng.normal();
                if ((received >= 0.0) != (symbol > 0.0)) block_error = true;
            }
            if (block_error) ++point.errors_user1;
        }
        point.frames += chunk;
    }

    point.errors_user2 = point.errors_user1;
    point.bler_user1 = static_cast<double>(point.errors_user1) / point.frames;
    point.bler_user2 = point.bler_user1;
    return point;
}

SweepResult mismatch_sweep(const TrainedPair& pair, const std::vector<double>& alphas_eval, const std::vector<double>& snrs_db,
                           const StopRule& stop, std::uint64_t seed, int threads) {
    stop.validate();
    if (alphas_eval.empty() || snrs_db.empty()) throw ConfigError("sweep grids must be non-empty");
    if (threads < 1) throw ConfigError("threads must be >= 1");

    SweepResult result;
    result.model_kind = pair.model_kind;
    result.train_alpha = pair.train_alpha;
    result.alphas_eval = alphas_eval;
    result.snrs_db = snrs_db;
    result.points.resize(alphas_eval.size() * snrs_db.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= result.points.size() || failed.load()) return;
            const double alpha = alphas_eval[index / snrs_db.size()];
            const double snr = snrs_db[index % snrs_db.size()];
            try {
                result.points[index] = simulate_bler(pair, alpha, snr, stop, RngStream(seed, streams::eval_point(index)));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure = e.what();
                return;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min<int>(threads, static_cast<int>(result.points.size()));
        pool.reserve(count);
        for (int i = 0; i < count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw NumericalError("sweep point failed: " + failure);
    return result;
}

} // namespace icae
