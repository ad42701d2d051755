#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"

#include "icae/config.hpp"
#include "icae/errors.hpp"
#include "icae/model_io.hpp"
#include "icae/results_io.hpp"
#include "test_support.hpp"

using namespace icae;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("icae_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

} // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("empty config file yields the documented defaults") {
    TempDir dir;
    write_file(dir.file("empty.cfg"), "");
    const ExperimentConfig config = parse_config_file(dir.file("empty.cfg"));
    CHECK(config.training.arch.k == 4);
    CHECK(config.training.arch.n == 8);
    CHECK(config.training.snr_low_db == 1.0);
    CHECK(config.training.snr_high_db == 12.0);
    CHECK(config.training.epochs == 100);
    CHECK(config.training.batches_per_epoch == 200);
    CHECK(config.training.batch_size == 256);
    CHECK(config.training.optimizer.kind == OptKind::adam);
    CHECK(config.training.optimizer.learning_rate == 1e-3);
    CHECK(config.stop.min_errors == 200);
    CHECK(config.stop.max_frames == 2'000'000);
    CHECK(config.eval_snrs_db.size() == 9);
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("config parsing errors") {
    TempDir dir;
    SUBCASE("inverted snr range fails validation") {
        write_file(dir.file("bad.cfg"), "snr_low_db = 12\nsnr_high_db = 1\n");
        const ExperimentConfig config = parse_config_file(dir.file("bad.cfg"));
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
    SUBCASE("unknown keys are rejected by name") {
        write_file(dir.file("bad.cfg"), "epoch = 7\n");
        try {
            parse_config_file(dir.file("bad.cfg"));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("epoch") != std::string::npos);
        }
    }
    SUBCASE("type errors name the key") {
        write_file(dir.file("bad.cfg"), "alpha = banana\n");
        try {
            parse_config_file(dir.file("bad.cfg"));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("alpha") != std::string::npos);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(parse_config_file(dir.file("nope.cfg")), ConfigError);
    }
}

TEST_CASE("override changes exactly the requested key") {
    ExperimentConfig base = default_config();
    ExperimentConfig changed = default_config();
    apply_override(changed, "alpha", "10");
    CHECK(changed.training.alpha == 10.0);
    changed.training.alpha = base.training.alpha;
    CHECK(render_config(changed) == render_config(base));

    CHECK_THROWS_AS(apply_override(base, "nonsense", "1"), ConfigError);
}

TEST_CASE("config render/parse round trip") {
    TempDir dir;
    ExperimentConfig config = default_config();
    apply_override(config, "model_kind", "siamese");
    apply_override(config, "alpha", "2.5");
    apply_override(config, "eval_snrs_db", "0,4,8");
    apply_override(config, "power_mode", "per_codeword");
    write_file(dir.file("echo.cfg"), render_config(config));
    const ExperimentConfig parsed = parse_config_file(dir.file("echo.cfg"));
    CHECK(render_config(parsed) == render_config(config));
}

TEST_CASE("model save/load round trip is lossless") {
    TempDir dir;
    TrainedPair pair = build_pair(ArchitectureSpec{}, 321);
    pair.model_kind = ModelKind::siamese;
    pair.train_alpha = 2.0;
    // give the norm layers non-default statistics so the round trip is honest
    pair.encoder1.layers.back().params.norm_running_scale = 1.2345678901234567;

    const std::string path = dir.file("model.icae");
    save_model(pair, path);
    const TrainedPair loaded = load_model(path);

    CHECK(loaded.model_kind == ModelKind::siamese);
    CHECK(loaded.train_alpha == 2.0);
    CHECK(loaded.seed == 321);
    CHECK(model_checksum(loaded) == model_checksum(pair));
    CHECK(extract_codebook(loaded, 1).matrix == extract_codebook(pair, 1).matrix);
    CHECK(extract_codebook(loaded, 2).matrix == extract_codebook(pair, 2).matrix);

    // saving again produces the same checksum line (timestamp excluded)
    save_model(pair, dir.file("again.icae"));
    const TrainedPair reloaded = load_model(dir.file("again.icae"));
    CHECK(model_checksum(reloaded) == model_checksum(loaded));
}

TEST_CASE("model file corruption is refused") {
    TempDir dir;
    const TrainedPair pair = build_pair(ArchitectureSpec{}, 5);
    const std::string path = dir.file("model.icae");
    save_model(pair, path);

    SUBCASE("truncation") {
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        write_file(dir.file("trunc.icae"), text.substr(0, text.size() / 2));
        CHECK_THROWS_AS(load_model(dir.file("trunc.icae")), ModelFileError);
    }
    SUBCASE("flipped payload byte") {
        std::ifstream in(path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
        write_file(dir.file("flip.icae"), text);
        CHECK_THROWS_AS(load_model(dir.file("flip.icae")), ModelFileError);
    }
    SUBCASE("wrong magic") {
        write_file(dir.file("junk.icae"), "not a model\n");
        CHECK_THROWS_AS(load_model(dir.file("junk.icae")), ModelFileError);
    }
    SUBCASE("shape inconsistent with declared architecture") {
        TrainedPair wrong = build_pair(ArchitectureSpec{.k = 3, .n = 8}, 5);
        wrong.arch.k = 4; // declared k disagrees with the stored networks
        save_model(wrong, dir.file("shape.icae"));
        try {
            load_model(dir.file("shape.icae"));
            FAIL("expected ModelFileError");
        } catch (const ModelFileError& e) {
            CHECK(std::string(e.what()).find("encoder1") != std::string::npos);
        }
    }
}

TEST_CASE("csv writers emit stable headers") {
    TempDir dir;
    TrainingTrace trace;
    trace.loss_user1 = {1.0, 0.5};
    trace.loss_user2 = {1.1, 0.6};
    trace.mean_ebn0_db = {6.5, 6.4};
    write_loss_trace_csv(dir.file("loss.csv"), trace);
    std::ifstream loss(dir.file("loss.csv"));
    std::string header;
    std::getline(loss, header);
    CHECK(header == "epoch,loss_user1,loss_user2");

    write_baseline_csv(dir.file("base.csv"), 4, {0.0, 8.0});
    std::ifstream base(dir.file("base.csv"));
    std::getline(base, header);
    CHECK(header == "eb_n0_db,ber_bpsk,bler_tdma_analytic");
    std::string row;
    std::getline(base, row);
    CHECK(row.rfind("0,0.078649", 0) == 0);

    std::vector<BlerPoint> points(1);
    points[0].eb_n0_db = 4.0;
    points[0].alpha_eval = 1.0;
    points[0].frames = 100;
    points[0].errors_user1 = 7;
    points[0].errors_user2 = 5;
    points[0].bler_user1 = 0.07;
    points[0].bler_user2 = 0.05;
    write_bler_csv(dir.file("bler.csv"), ModelKind::twin, 1.0, 4, points);
    std::ifstream bler(dir.file("bler.csv"));
    std::getline(bler, header);
    CHECK(header == "model_kind,train_alpha,eval_alpha,eb_n0_db,frames,errors_u1,errors_u2,bler_u1,bler_u2,bler_tdma_analytic");
    std::getline(bler, row);
    CHECK(row.rfind("twin,1,1,4,100,7,5,", 0) == 0);
}

TEST_SUITE_END();
