#pragma once

#include <span>
#include <vector>

namespace icae {

// Row-major batch-by-feature matrix of doubles. Carries message one-hots,
// codewords, received vectors and gradients. All arithmetic is 64-bit.
class Tensor2 {
public:
    Tensor2() = default;
    Tensor2(int rows, int cols, double fill = 0.0);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const double> row(int r) const { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const Tensor2& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }
    bool all_finite() const;

    bool operator==(const Tensor2& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// a (R x K) times b (K x C)
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// transpose(a) times b, i.e. (K x R)(R x C); the weight-gradient product
Tensor2 matmul_at_b(const Tensor2& a, const Tensor2& b);
// a times transpose(b), i.e. (R x K)(C x K)^T; the input-gradient product
Tensor2 matmul_a_bt(const Tensor2& a, const Tensor2& b);

} // namespace icae
