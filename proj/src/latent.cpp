#include "icae/latent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icae/errors.hpp"

namespace icae {

namespace {

double row_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

DistanceStats stats_of(const std::vector<double>& values) {
    DistanceStats s;
    s.min = values.front();
    s.max = values.back();
    double total = 0.0;
    for (double v : values) total += v;
    s.mean = total / values.size();
    return s;
}

std::vector<double> row_norms(const Tensor2& m, const char* which) {
    std::vector<double> norms(m.rows());
    for (int i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (double v : m.row(i)) sum += v * v;
        norms[i] = std::sqrt(sum);
        if (norms[i] == 0.0) {
            throw NumericalError(std::string("degenerate codeword: zero-norm row for message ") + std::to_string(i) + " in " + which + " codebook");
        }
    }
    return norms;
}

} // namespace

std::vector<double> self_distances(const CodeBook& codebook) {
    const Tensor2& m = codebook.matrix;
    if (m.rows() < 2) throw UsageError("self_distances needs at least two codewords");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.rows()) * (m.rows() - 1) / 2);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = i + 1; j < m.rows(); ++j) {
            out.push_back(row_distance(m.row(i), m.row(j)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> cross_distances(const CodeBook& a, const CodeBook& b) {
    if (a.matrix.cols() != b.matrix.cols()) throw UsageError("cross_distances: codeword widths differ");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(a.matrix.rows()) * b.matrix.rows());
    for (int i = 0; i < a.matrix.rows(); ++i) {
        for (int j = 0; j < b.matrix.rows(); ++j) {
            out.push_back(row_distance(a.matrix.row(i), b.matrix.row(j)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Tensor2 correlations(const CodeBook& a, const CodeBook& b) {
    if (a.matrix.cols() != b.matrix.cols()) throw UsageError("correlations: codeword widths differ");
    const auto norms_a = row_norms(a.matrix, "first");
    const auto norms_b = row_norms(b.matrix, "second");
    Tensor2 out(a.matrix.rows(), b.matrix.rows());
    for (int i = 0; i < a.matrix.rows(); ++i) {
        auto ra = a.matrix.row(i);
        for (int j = 0; j < b.matrix.rows(); ++j) {
            auto rb = b.matrix.row(j);
            double dot = 0.0;
            for (std::size_t t = 0; t < ra.size(); ++t) dot += ra[t] * rb[t];
            out.at(i, j) = dot / (norms_a[i] * norms_b[j]);
        }
    }
    return out;
}

AnalysisReport analysis_report(const TrainedPair& pair) {
    const CodeBook cb1 = extract_codebook(pair, 1);
    const CodeBook cb2 = extract_codebook(pair, 2);

    AnalysisReport report;
    const auto self1 = self_distances(cb1);
    const auto self2 = self_distances(cb2);
    report.distances.self_user1 = stats_of(self1);
    report.distances.self_user2 = stats_of(self2);
    report.distances.cross_distances = cross_distances(cb1, cb2);
    report.distances.cross = stats_of(report.distances.cross_distances);
    report.distances.self_distances = self1;
    report.distances.self_distances.insert(report.distances.self_distances.end(), self2.begin(), self2.end());
    std::sort(report.distances.self_distances.begin(), report.distances.self_distances.end());

    auto& corr = report.correlations;
    corr.r_self_user1 = correlations(cb1, cb1);
    corr.r_self_user2 = correlations(cb2, cb2);
    corr.r_cross = correlations(cb1, cb2);

    corr.r_cross_min = corr.r_cross.data()[0];
    corr.r_cross_max = corr.r_cross.data()[0];
    for (double v : corr.r_cross.data()) {
        corr.r_cross_min = std::min(corr.r_cross_min, v);
        corr.r_cross_max = std::max(corr.r_cross_max, v);
    }
    corr.max_abs_cross = std::max(std::abs(corr.r_cross_min), std::abs(corr.r_cross_max));

    corr.near_zero_self_pairs = 0;
    for (const Tensor2* self : {&corr.r_self_user1, &corr.r_self_user2}) {
        for (int i = 0; i < self->rows(); ++i) {
            for (int j = i + 1; j < self->cols(); ++j) {
                if (std::abs(self->at(i, j)) < 0.05) ++corr.near_zero_self_pairs;
            }
        }
    }
    return report;
}

} // namespace icae
