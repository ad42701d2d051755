#pragma once

#include <vector>

#include "icae/model.hpp"
#include "icae/tensor.hpp"

namespace icae {

// Codeword-geometry diagnostics: intra-user (self) and inter-user (cross)
// pairwise distances, and cosine correlations between codewords.

struct DistanceStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

struct DistanceReport {
    DistanceStats self_user1;
    DistanceStats self_user2;
    DistanceStats cross;
    // both users' self distances pooled, sorted; length 2 * C(2^k, 2)
    std::vector<double> self_distances;
    // all 2^k x 2^k ordered cross pairs, sorted
    std::vector<double> cross_distances;

    double min_self() const { return self_user1.min < self_user2.min ? self_user1.min : self_user2.min; }
    double min_cross() const { return cross.min; }
};

struct CorrelationReport {
    Tensor2 r_self_user1; // symmetric, unit diagonal
    Tensor2 r_self_user2;
    Tensor2 r_cross;
    double r_cross_min = 0.0;
    double r_cross_max = 0.0;
    double max_abs_cross = 0.0;
    // off-diagonal self pairs with |R| < 0.05, both users pooled
    int near_zero_self_pairs = 0;
};

struct AnalysisReport {
    DistanceReport distances;
    CorrelationReport correlations;
};

// Euclidean distances over all unordered message pairs of one codebook, sorted.
std::vector<double> self_distances(const CodeBook& codebook);

// Euclidean distances over all ordered (message of a, message of b) pairs,
// equal indices included, sorted.
std::vector<double> cross_distances(const CodeBook& a, const CodeBook& b);

// entry (i, j) = <row_a(i), row_b(j)> / (||row_a(i)|| ||row_b(j)||)
Tensor2 correlations(const CodeBook& a, const CodeBook& b);

AnalysisReport analysis_report(const TrainedPair& pair);

} // namespace icae
