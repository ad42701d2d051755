#pragma once

#include <string>
#include <vector>

#include "icae/evaluation.hpp"
#include "icae/training.hpp"

namespace icae {

// Everything a run needs: training settings plus evaluation grids, stop rule
// and output policy. Parsed from `key = value` text; unknown keys are
// rejected so typos cannot silently fall back to defaults.
struct ExperimentConfig {
    TrainingConfig training;
    std::vector<double> eval_snrs_db = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> eval_alphas = {1, 10, 20}; // sweep grid
    StopRule stop;
    int threads = 1;
    std::string out_dir = "out";

    void validate() const;
};

ExperimentConfig default_config();

// Parses a config file; empty path yields the defaults.
ExperimentConfig parse_config_file(const std::string& path);

// Applies one `key=value` override (the --set flag).
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);

// Renders the effective config in the same key = value syntax it is parsed
// from, suitable as the run echo.
std::string render_config(const ExperimentConfig& config);

} // namespace icae
