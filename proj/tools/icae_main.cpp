#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "icae/config.hpp"
#include "icae/errors.hpp"
#include "icae/model_io.hpp"
#include "icae/results_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitModelFile = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string model_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool needs_model) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--set", args.overrides, "override one config key, key=value (repeatable)");
    if (needs_model) cmd->add_option("--model", args.model_path, "trained model file")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed (shorthand for --set seed=N)");
    cmd->add_option("--threads", args.threads, "evaluation worker threads");
}

icae::ExperimentConfig resolve_config(const CommonArgs& args) {
    icae::ExperimentConfig config = icae::parse_config_file(args.config_path);
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw icae::ConfigError("--set expects key=value, got '" + kv + "'");
        icae::apply_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed) config.training.seed = *args.seed;
    if (args.threads) config.threads = *args.threads;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    config.validate();
    return config;
}

std::string out_path(const icae::ExperimentConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

void echo_config(const icae::ExperimentConfig& config) {
    std::filesystem::create_directories(config.out_dir);
    icae::write_text_file(out_path(config, "config_echo.txt"), icae::render_config(config));
}

int cmd_train(const CommonArgs& args) {
    const icae::ExperimentConfig config = resolve_config(args);
    echo_config(config);
    const icae::TrainingResult result = icae::train(config.training);
    icae::save_model(result.pair, out_path(config, "model.icae"));
    icae::write_loss_trace_csv(out_path(config, "loss_trace.csv"), result.trace);
    std::cout << "trained " << icae::to_string(config.training.model_kind) << " model (alpha=" << config.training.alpha
              << ", seed=" << config.training.seed << ") in " << result.trace.seconds << " s\n"
              << "  final loss: user1=" << result.trace.loss_user1.back() << " user2=" << result.trace.loss_user2.back() << "\n"
              << "  checksum:   " << icae::model_checksum(result.pair) << "\n"
              << "  wrote " << out_path(config, "model.icae") << "\n";
    return kExitOk;
}

int cmd_evaluate(const CommonArgs& args) {
    const icae::ExperimentConfig config = resolve_config(args);
    const icae::TrainedPair pair = icae::load_model(args.model_path);
    echo_config(config);
    // matched-interference evaluation over the SNR grid
    const auto sweep = icae::mismatch_sweep(pair, {pair.train_alpha}, config.eval_snrs_db, config.stop, config.training.seed, config.threads);
    icae::write_bler_csv(out_path(config, "bler.csv"), pair.model_kind, pair.train_alpha, pair.arch.k, sweep.points);
    std::cout << "evaluated " << sweep.points.size() << " points -> " << out_path(config, "bler.csv") << "\n";
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
    const icae::ExperimentConfig config = resolve_config(args);
    const icae::TrainedPair pair = icae::load_model(args.model_path);
    echo_config(config);
    const auto sweep = icae::mismatch_sweep(pair, config.eval_alphas, config.eval_snrs_db, config.stop, config.training.seed, config.threads);
    icae::write_bler_csv(out_path(config, "sweep.csv"), pair.model_kind, pair.train_alpha, pair.arch.k, sweep.points);
    std::cout << "swept " << sweep.points.size() << " points -> " << out_path(config, "sweep.csv") << "\n";
    return kExitOk;
}

int cmd_analyze(const CommonArgs& args) {
    const icae::ExperimentConfig config = resolve_config(args);
    const icae::TrainedPair pair = icae::load_model(args.model_path);
    echo_config(config);
    const icae::AnalysisReport report = icae::analysis_report(pair);
    icae::write_distances_csv(out_path(config, "distances.csv"), icae::extract_codebook(pair, 1), icae::extract_codebook(pair, 2));
    icae::write_correlations_csv(out_path(config, "correlations.csv"), report);
    icae::write_summary_json(out_path(config, "summary.json"), pair, report);
    std::cout << "min d_self=" << report.distances.min_self() << " min d_cross=" << report.distances.min_cross()
              << " max|R_cross|=" << report.correlations.max_abs_cross << "\n"
              << "wrote " << out_path(config, "summary.json") << "\n";
    return kExitOk;
}

int cmd_baseline(const CommonArgs& args) {
    const icae::ExperimentConfig config = resolve_config(args);
    echo_config(config);
    icae::write_baseline_csv(out_path(config, "tdma_baseline.csv"), config.training.arch.k, config.eval_snrs_db);
    std::cout << "wrote " << out_path(config, "tdma_baseline.csv") << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural encoder/decoder pairs for the two-user interference channel"};
    app.require_subcommand(1);

    CommonArgs train_args, eval_args, sweep_args, analyze_args, baseline_args;
    CLI::App* train = app.add_subcommand("train", "train a twin or siamese model pair");
    add_common_flags(train, train_args, false);
    CLI::App* evaluate = app.add_subcommand("evaluate", "measure BLER at the trained interference strength");
    add_common_flags(evaluate, eval_args, true);
    CLI::App* sweep = app.add_subcommand("sweep", "BLER grid over eval_alphas x eval_snrs_db");
    add_common_flags(sweep, sweep_args, true);
    CLI::App* analyze = app.add_subcommand("analyze", "codebook distance and correlation report");
    add_common_flags(analyze, analyze_args, true);
    CLI::App* baseline = app.add_subcommand("baseline", "analytic TDMA/BPSK reference curve");
    add_common_flags(baseline, baseline_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error category=config detail=\"" << e.what() << "\"\n";
        return kExitConfig;
    }

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (evaluate->parsed()) return cmd_evaluate(eval_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (analyze->parsed()) return cmd_analyze(analyze_args);
        if (baseline->parsed()) return cmd_baseline(baseline_args);
        std::cerr << "error category=config detail=\"no subcommand\"\n";
        return kExitConfig;
    } catch (const icae::ConfigError& e) {
        std::cerr << "error category=config detail=\"" << e.what() << "\"\n";
        return kExitConfig;
    } catch (const icae::UsageError& e) {
        std::cerr << "error category=config detail=\"" << e.what() << "\"\n";
        return kExitConfig;
    } catch (const icae::ModelFileError& e) {
        std::cerr << "error category=model_file detail=\"" << e.what() << "\"\n";
        return kExitModelFile;
    } catch (const icae::NumericalError& e) {
        std::cerr << "error category=numerical detail=\"" << e.what() << "\"\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error category=internal detail=\"" << e.what() << "\"\n";
        return kExitNumerical;
    }
}
