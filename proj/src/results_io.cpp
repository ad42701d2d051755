#include "icae/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icae/errors.hpp"
#include "json.hpp"

namespace icae {

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double row_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

} // namespace

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    const std::filesystem::path temp = target.string() + ".tmp";
    {
        std::ofstream file(temp, std::ios::trunc);
        if (!file) throw ConfigError("cannot write '" + temp.string() + "'");
        file << content;
        if (!file.flush()) throw ConfigError("write failed for '" + temp.string() + "'");
    }
    std::filesystem::rename(temp, target);
}

void write_loss_trace_csv(const std::string& path, const TrainingTrace& trace) {
    std::ostringstream out;
    out << "epoch,loss_user1,loss_user2\n";
    for (std::size_t e = 0; e < trace.loss_user1.size(); ++e) {
        out << e << "," << format_number(trace.loss_user1[e]) << "," << format_number(trace.loss_user2[e]) << "\n";
    }
    write_text_file(path, out.str());
}

void write_bler_csv(const std::string& path, ModelKind kind, double train_alpha, int k, const std::vector<BlerPoint>& points) {
    std::ostringstream out;
    out << "model_kind,train_alpha,eval_alpha,eb_n0_db,frames,errors_u1,errors_u2,bler_u1,bler_u2,bler_tdma_analytic\n";
    for (const BlerPoint& p : points) {
        out << to_string(kind) << "," << format_number(train_alpha) << "," << format_number(p.alpha_eval) << ","
            << format_number(p.eb_n0_db) << "," << p.frames << "," << p.errors_user1 << "," << p.errors_user2 << ","
            << format_number(p.bler_user1) << "," << format_number(p.bler_user2) << ","
            << format_number(tdma_bpsk_bler(p.eb_n0_db, k)) << "\n";
    }
    write_text_file(path, out.str());
}

void write_baseline_csv(const std::string& path, int k, const std::vector<double>& snrs_db) {
    std::ostringstream out;
    out << "eb_n0_db,ber_bpsk,bler_tdma_analytic\n";
    for (double snr : snrs_db) {
        out << format_number(snr) << "," << format_number(bpsk_ber(snr)) << "," << format_number(tdma_bpsk_bler(snr, k)) << "\n";
    }
    write_text_file(path, out.str());
}

void write_distances_csv(const std::string& path, const CodeBook& cb1, const CodeBook& cb2) {
    std::ostringstream out;
    out << "kind,user_a,msg_a,user_b,msg_b,distance\n";
    for (int user = 1; user <= 2; ++user) {
        const Tensor2& m = (user == 1 ? cb1 : cb2).matrix;
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = i + 1; j < m.rows(); ++j) {
                out << "self," << user << "," << i << "," << user << "," << j << "," << format_number(row_distance(m.row(i), m.row(j))) << "\n";
            }
        }
    }
    for (int i = 0; i < cb1.matrix.rows(); ++i) {
        for (int j = 0; j < cb2.matrix.rows(); ++j) {
            out << "cross,1," << i << ",2," << j << "," << format_number(row_distance(cb1.matrix.row(i), cb2.matrix.row(j))) << "\n";
        }
    }
    write_text_file(path, out.str());
}

void write_correlations_csv(const std::string& path, const AnalysisReport& report) {
    std::ostringstream out;
    out << "kind,msg_a,msg_b,correlation\n";
    auto dump = [&](const char* kind, const Tensor2& m) {
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                out << kind << "," << i << "," << j << "," << format_number(m.at(i, j)) << "\n";
            }
        }
    };
    dump("self1", report.correlations.r_self_user1);
    dump("self2", report.correlations.r_self_user2);
    dump("cross", report.correlations.r_cross);
    write_text_file(path, out.str());
}

void write_summary_json(const std::string& path, const TrainedPair& pair, const AnalysisReport& report) {
    nlohmann::json j;
    j["model_kind"] = to_string(pair.model_kind);
    j["train_alpha"] = pair.train_alpha;
    j["k"] = pair.arch.k;
    j["n"] = pair.arch.n;
    j["power_mode"] = to_string(pair.arch.power_mode);

    const auto& d = report.distances;
    j["distances"]["min_d_cross"] = d.cross.min;
    j["distances"]["min_d_self"] = d.min_self();
    j["distances"]["cross"] = {{"min", d.cross.min}, {"max", d.cross.max}, {"mean", d.cross.mean}};
    j["distances"]["self_user1"] = {{"min", d.self_user1.min}, {"max", d.self_user1.max}, {"mean", d.self_user1.mean}};
    j["distances"]["self_user2"] = {{"min", d.self_user2.min}, {"max", d.self_user2.max}, {"mean", d.self_user2.mean}};

    const auto& c = report.correlations;
    j["correlations"]["r_cross_min"] = c.r_cross_min;
    j["correlations"]["r_cross_max"] = c.r_cross_max;
    j["correlations"]["max_abs_r_cross"] = c.max_abs_cross;
    j["correlations"]["near_zero_self_pairs"] = c.near_zero_self_pairs;

    write_text_file(path, j.dump(2) + "\n");
}

} // namespace icae
