#pragma once

#include <string>
#include <vector>

#include "icae/evaluation.hpp"
#include "icae/latent.hpp"
#include "icae/training.hpp"

namespace icae {

// CSV/JSON result writers. Column orders are fixed; all writes are atomic
// (temp file + rename) so partially written results never land.

// header: epoch,loss_user1,loss_user2
void write_loss_trace_csv(const std::string& path, const TrainingTrace& trace);

// header: model_kind,train_alpha,eval_alpha,eb_n0_db,frames,errors_u1,errors_u2,bler_u1,bler_u2,bler_tdma_analytic
void write_bler_csv(const std::string& path, ModelKind kind, double train_alpha, int k, const std::vector<BlerPoint>& points);

// header: eb_n0_db,ber_bpsk,bler_tdma_analytic
void write_baseline_csv(const std::string& path, int k, const std::vector<double>& snrs_db);

// header: kind,user_a,msg_a,user_b,msg_b,distance  (kind: self|cross)
void write_distances_csv(const std::string& path, const CodeBook& cb1, const CodeBook& cb2);

// header: kind,msg_a,msg_b,correlation  (kind: self1|self2|cross)
void write_correlations_csv(const std::string& path, const AnalysisReport& report);

// Table-shaped JSON summary of the distance/correlation diagnostics.
void write_summary_json(const std::string& path, const TrainedPair& pair, const AnalysisReport& report);

void write_text_file(const std::string& path, const std::string& content);

} // namespace icae
