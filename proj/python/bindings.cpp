#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "icae/channel.hpp"
#include "icae/errors.hpp"
#include "icae/evaluation.hpp"
#include "icae/latent.hpp"
#include "icae/model.hpp"
#include "icae/model_io.hpp"
#include "icae/training.hpp"

namespace py = pybind11;
using namespace icae;

namespace {

py::array_t<double> to_numpy(const Tensor2& t) {
    py::array_t<double> out({t.rows(), t.cols()});
    auto view = out.mutable_unchecked<2>();
    for (int r = 0; r < t.rows(); ++r) {
        for (int c = 0; c < t.cols(); ++c) view(r, c) = t.at(r, c);
    }
    return out;
}

Tensor2 from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw UsageError("expected a 2-D array");
    Tensor2 t(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    auto view = a.unchecked<2>();
    for (int r = 0; r < t.rows(); ++r) {
        for (int c = 0; c < t.cols(); ++c) t.at(r, c) = view(r, c);
    }
    return t;
}

ModelKind parse_kind(const std::string& kind) {
    if (kind == "twin") return ModelKind::twin;
    if (kind == "siamese") return ModelKind::siamese;
    throw ConfigError("model_kind must be 'twin' or 'siamese', got '" + kind + "'");
}

TrainingConfig make_training_config(const std::string& kind, int k, int n, double alpha, int epochs, int batches_per_epoch,
                                    int batch_size, std::uint64_t seed, double snr_low_db, double snr_high_db,
                                    int encoder_hidden, int decoder_hidden, const std::string& power_mode, double learning_rate) {
    TrainingConfig config;
    config.model_kind = parse_kind(kind);
    config.arch.k = k;
    config.arch.n = n;
    config.arch.encoder_hidden = encoder_hidden;
    config.arch.decoder_hidden = decoder_hidden;
    if (power_mode == "batch_average") config.arch.power_mode = PowerMode::batch_average;
    else if (power_mode == "per_codeword") config.arch.power_mode = PowerMode::per_codeword;
    else throw ConfigError("power_mode must be 'batch_average' or 'per_codeword'");
    config.alpha = alpha;
    config.epochs = epochs;
    config.batches_per_epoch = batches_per_epoch;
    config.batch_size = batch_size;
    config.seed = seed;
    config.snr_low_db = snr_low_db;
    config.snr_high_db = snr_high_db;
    config.optimizer.learning_rate = learning_rate;
    return config;
}

py::dict point_to_dict(const BlerPoint& p) {
    py::dict d;
    d["eb_n0_db"] = p.eb_n0_db;
    d["alpha_eval"] = p.alpha_eval;
    d["frames"] = p.frames;
    d["errors_user1"] = p.errors_user1;
    d["errors_user2"] = p.errors_user2;
    d["bler_user1"] = p.bler_user1;
    d["bler_user2"] = p.bler_user2;
    return d;
}

} // namespace

PYBIND11_MODULE(icae, m) {
    m.doc() = "Neural encoder/decoder pairs for the two-user interference channel";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ModelFileError>(m, "ModelFileError", PyExc_IOError);

    py::class_<TrainedPair>(m, "Model")
        .def_property_readonly("model_kind", [](const TrainedPair& p) { return to_string(p.model_kind); })
        .def_property_readonly("k", [](const TrainedPair& p) { return p.arch.k; })
        .def_property_readonly("n", [](const TrainedPair& p) { return p.arch.n; })
        .def_property_readonly("train_alpha", [](const TrainedPair& p) { return p.train_alpha; })
        .def_property_readonly("seed", [](const TrainedPair& p) { return p.seed; })
        .def("codebook", [](const TrainedPair& p, int user) { return to_numpy(extract_codebook(p, user).matrix); },
             py::arg("user") = 1)
        .def("encode", [](const TrainedPair& p, const std::vector<int>& messages, int user) {
                 MessageBatch batch;
                 batch.indices = messages;
                 batch.one_hot = Tensor2(static_cast<int>(messages.size()), p.arch.message_count(), 0.0);
                 for (std::size_t r = 0; r < messages.size(); ++r) {
                     if (messages[r] < 0 || messages[r] >= p.arch.message_count()) throw UsageError("message index out of range");
                     batch.one_hot.at(static_cast<int>(r), messages[r]) = 1.0;
                 }
                 return to_numpy(encode_infer(p, user, batch));
             },
             py::arg("messages"), py::arg("user") = 1)
        .def("decode", [](const TrainedPair& p, const py::array_t<double, py::array::c_style | py::array::forcecast>& received, int user) {
                 return to_numpy(decode_infer(p, user, from_numpy(received)));
             },
             py::arg("received"), py::arg("user") = 1)
        .def("save", [](const TrainedPair& p, const std::string& path) { save_model(p, path); }, py::arg("path"))
        .def("checksum", &model_checksum);

    m.def("train",
          [](const std::string& model_kind, int k, int n, double alpha, int epochs, int batches_per_epoch, int batch_size,
             std::uint64_t seed, double snr_low_db, double snr_high_db, int encoder_hidden, int decoder_hidden,
             const std::string& power_mode, double learning_rate) {
              const TrainingConfig config = make_training_config(model_kind, k, n, alpha, epochs, batches_per_epoch, batch_size,
                                                                 seed, snr_low_db, snr_high_db, encoder_hidden, decoder_hidden,
                                                                 power_mode, learning_rate);
              TrainingResult result = train(config);
              py::dict trace;
              trace["loss_user1"] = result.trace.loss_user1;
              trace["loss_user2"] = result.trace.loss_user2;
              trace["mean_ebn0_db"] = result.trace.mean_ebn0_db;
              trace["seconds"] = result.trace.seconds;
              return py::make_tuple(result.pair, trace);
          },
          py::arg("model_kind"), py::arg("k") = 4, py::arg("n") = 8, py::arg("alpha") = 1.0, py::arg("epochs") = 100,
          py::arg("batches_per_epoch") = 200, py::arg("batch_size") = 256, py::arg("seed") = 1,
          py::arg("snr_low_db") = 1.0, py::arg("snr_high_db") = 12.0, py::arg("encoder_hidden") = 32,
          py::arg("decoder_hidden") = 32, py::arg("power_mode") = "batch_average", py::arg("learning_rate") = 1e-3,
          "Train a model pair; returns (model, trace dict)");

    m.def("load_model", &load_model, py::arg("path"));

    m.def("simulate_bler",
          [](const TrainedPair& pair, double alpha_eval, double eb_n0_db, long long min_errors, long long max_frames, std::uint64_t seed) {
              StopRule stop{min_errors, max_frames};
              return point_to_dict(simulate_bler(pair, alpha_eval, eb_n0_db, stop, RngStream(seed, streams::eval_point(0))));
          },
          py::arg("model"), py::arg("alpha_eval"), py::arg("eb_n0_db"), py::arg("min_errors") = 200,
          py::arg("max_frames") = 2'000'000, py::arg("seed") = 1);

    m.def("sweep",
          [](const TrainedPair& pair, const std::vector<double>& alphas, const std::vector<double>& snrs_db, long long min_errors,
             long long max_frames, std::uint64_t seed, int threads) {
              StopRule stop{min_errors, max_frames};
              const SweepResult result = mismatch_sweep(pair, alphas, snrs_db, stop, seed, threads);
              py::list points;
              for (const BlerPoint& p : result.points) points.append(point_to_dict(p));
              return points;
          },
          py::arg("model"), py::arg("alphas"), py::arg("snrs_db"), py::arg("min_errors") = 200,
          py::arg("max_frames") = 2'000'000, py::arg("seed") = 1, py::arg("threads") = 1);

    m.def("analyze", [](const TrainedPair& pair) {
        const AnalysisReport report = analysis_report(pair);
        py::dict d;
        d["min_d_self"] = report.distances.min_self();
        d["min_d_cross"] = report.distances.min_cross();
        d["mean_d_cross"] = report.distances.cross.mean;
        d["max_abs_r_cross"] = report.correlations.max_abs_cross;
        d["r_cross_min"] = report.correlations.r_cross_min;
        d["r_cross_max"] = report.correlations.r_cross_max;
        d["near_zero_self_pairs"] = report.correlations.near_zero_self_pairs;
        d["r_cross"] = to_numpy(report.correlations.r_cross);
        return d;
    });

    m.def("q_function", &q_function, py::arg("x"));
    m.def("tdma_bpsk_bler", &tdma_bpsk_bler, py::arg("eb_n0_db"), py::arg("k") = 4);
    m.def("bpsk_ber", &bpsk_ber, py::arg("eb_n0_db"));
    m.def("noise_sigma", &noise_sigma, py::arg("eb_n0_db"), py::arg("rate"));
}
