#include "icae/tensor.hpp"

#include <cmath>
#include <string>

#include "icae/errors.hpp"

namespace icae {

namespace {

std::size_t checked_size(int rows, int cols) {
    if (rows < 1 || cols < 1) {
        throw UsageError("Tensor2 requires rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    return static_cast<std::size_t>(rows) * cols;
}

} // namespace

Tensor2::Tensor2(int rows, int cols, double fill) : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

bool Tensor2::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols() != b.rows()) {
        throw UsageError("matmul shape mismatch: " + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()));
    }
    Tensor2 out(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double* out_row = out.row(i).data();
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a.at(i, k);
            const double* b_row = b.row(k).data();
            for (int j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b) {
    if (a.rows() != b.rows()) {
        throw UsageError("matmul_at_b shape mismatch: " + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
    }
    Tensor2 out(a.cols(), b.cols(), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        const double* a_row = a.row(r).data();
        const double* b_row = b.row(r).data();
        for (int i = 0; i < a.cols(); ++i) {
            double* out_row = out.row(i).data();
            const double ari = a_row[i];
            for (int j = 0; j < b.cols(); ++j) out_row[j] += ari * b_row[j];
        }
    }
    return out;
}

Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b) {
    if (a.cols() != b.cols()) {
        throw UsageError("matmul_a_bt shape mismatch: " + std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
    }
    Tensor2 out(a.rows(), b.rows(), 0.0);
    for (int r = 0; r < a.rows(); ++r) {
        const double* a_row = a.row(r).data();
        double* out_row = out.row(r).data();
        for (int i = 0; i < b.rows(); ++i) {
            const double* b_row = b.row(i).data();
            double acc = 0.0;
            for (int j = 0; j < a.cols(); ++j) acc += a_row[j] * b_row[j];
            out_row[i] = acc;
        }
    }
    return out;
}

} // namespace icae
