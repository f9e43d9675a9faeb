#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tryon/common.hpp"

namespace tryon {

// Dense N-dimensional array with row-major storage. The sole numeric carrier
// for latents, tokens, feature maps and parameters.
template <typename Scalar>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), data_(checked_numel(shape_), Scalar(0)) {}

    Tensor(std::vector<std::size_t> shape, std::vector<Scalar> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (checked_numel(shape_) != data_.size())
            throw ShapeError("Tensor: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string(shape_));
    }

    static Tensor full(std::vector<std::size_t> shape, Scalar v) {
        Tensor t(std::move(shape));
        std::fill(t.data_.begin(), t.data_.end(), v);
        return t;
    }

    static Tensor scalar(Scalar v) { return Tensor({1}, {v}); }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t d) const { return shape_.at(d); }
    std::size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    Scalar* data() { return data_.data(); }
    const Scalar* data() const { return data_.data(); }
    std::vector<Scalar>& values() { return data_; }
    const std::vector<Scalar>& values() const { return data_; }

    Scalar& operator[](std::size_t i) { return data_[i]; }
    Scalar operator[](std::size_t i) const { return data_[i]; }

    // Indexed access for ranks 2 and 3 (row-major).
    Scalar& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    Scalar at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
    Scalar& at(std::size_t c, std::size_t y, std::size_t x) {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }
    Scalar at(std::size_t c, std::size_t y, std::size_t x) const {
        return data_[(c * shape_[1] + y) * shape_[2] + x];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    Tensor reshaped(std::vector<std::size_t> shape) const {
        if (checked_numel(shape) != numel())
            throw ShapeError("reshape: element count mismatch for " + shape_string(shape));
        return Tensor(std::move(shape), data_);
    }

    bool all_finite() const {
        for (Scalar v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    static std::string shape_string(const std::vector<std::size_t>& s) {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
        os << "]";
        return os.str();
    }
    std::string shape_string() const { return shape_string(shape_); }

    // Eigen views over the buffer (matrix view requires rank 2).
    using MatrixMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using ConstMatrixMap =
        Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    using ArrayMap = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
    using ConstArrayMap = Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>>;

    MatrixMap matrix() {
        require_rank2();
        return MatrixMap(data_.data(), static_cast<Eigen::Index>(shape_[0]),
                         static_cast<Eigen::Index>(shape_[1]));
    }
    ConstMatrixMap matrix() const {
        require_rank2();
        return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(shape_[0]),
                              static_cast<Eigen::Index>(shape_[1]));
    }
    // Arbitrary [rows, cols] matrix view, for tensors whose trailing dims flatten.
    MatrixMap matrix_view(std::size_t rows, std::size_t cols) {
        if (rows * cols != numel()) throw ShapeError("matrix_view: element count mismatch");
        return MatrixMap(data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    ConstMatrixMap matrix_view(std::size_t rows, std::size_t cols) const {
        if (rows * cols != numel()) throw ShapeError("matrix_view: element count mismatch");
        return ConstMatrixMap(data_.data(), static_cast<Eigen::Index>(rows),
                              static_cast<Eigen::Index>(cols));
    }
    ArrayMap array() { return ArrayMap(data_.data(), static_cast<Eigen::Index>(numel())); }
    ConstArrayMap array() const {
        return ConstArrayMap(data_.data(), static_cast<Eigen::Index>(numel()));
    }

private:
    void require_rank2() const {
        if (rank() != 2) throw ShapeError("matrix(): tensor is not rank-2, shape " + shape_string());
    }

    static std::size_t checked_numel(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (std::size_t e : shape) {
            if (e == 0) throw ShapeError("Tensor: zero extent in shape " + shape_string(shape));
            n *= e;
        }
        return shape.empty() ? 0 : n;
    }

    std::vector<std::size_t> shape_;
    std::vector<Scalar> data_;
};

using Tensord = Tensor<double>;
using Tensorf = Tensor<float>;

template <typename Scalar>
void ensure_finite(const Tensor<Scalar>& t, const char* where) {
    if (!t.all_finite())
        throw NumericError(std::string(where) + ": non-finite values in tensor " + t.shape_string());
}

// --- small elementwise helpers used across modules ---

template <typename Scalar>
Tensor<Scalar> operator+(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
    if (!a.same_shape(b)) throw ShapeError("tensor +: shape mismatch");
    Tensor<Scalar> r = a;
    r.array() += b.array();
    return r;
}

template <typename Scalar>
Tensor<Scalar> operator-(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
    if (!a.same_shape(b)) throw ShapeError("tensor -: shape mismatch");
    Tensor<Scalar> r = a;
    r.array() -= b.array();
    return r;
}

template <typename Scalar>
Tensor<Scalar> operator*(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
    if (!a.same_shape(b)) throw ShapeError("tensor *: shape mismatch");
    Tensor<Scalar> r = a;
    r.array() *= b.array();
    return r;
}

template <typename Scalar>
Tensor<Scalar> operator*(Scalar c, const Tensor<Scalar>& a) {
    Tensor<Scalar> r = a;
    r.array() *= c;
    return r;
}

template <typename Scalar>
Scalar max_abs_diff(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
    if (!a.same_shape(b)) throw ShapeError("max_abs_diff: shape mismatch");
    return (a.array() - b.array()).abs().maxCoeff();
}

template <typename Scalar>
bool bit_identical(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data(), b.data(), a.numel() * sizeof(Scalar)) == 0;
}

}  // namespace tryon
