#pragma once

#include <cmath>

#include "tryon/tensor.hpp"

namespace tryon {

// Convolution output extent: floor((in + 2*pad - k) / stride) + 1.
inline std::size_t conv_out_extent(std::size_t in, std::size_t k, int stride, int pad) {
    const long long span = static_cast<long long>(in) + 2LL * pad - static_cast<long long>(k);
    if (span < 0) throw ShapeError("conv2d: kernel larger than padded input");
    return static_cast<std::size_t>(span / stride) + 1;
}

namespace kernels {

// Unrolls k*k*C patches of a [C,H,W] tensor into a [C*k*k, Ho*Wo] matrix
// (zero padding), so convolution becomes a single matrix product.
template <typename Scalar>
Tensor<Scalar> im2col(const Tensor<Scalar>& x, std::size_t k, int stride, int pad) {
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    const std::size_t Ho = conv_out_extent(H, k, stride, pad);
    const std::size_t Wo = conv_out_extent(W, k, stride, pad);
    Tensor<Scalar> cols({C * k * k, Ho * Wo});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t dy = 0; dy < k; ++dy) {
            for (std::size_t dx = 0; dx < k; ++dx) {
                const std::size_t row = (c * k + dy) * k + dx;
                Scalar* out = cols.data() + row * Ho * Wo;
                for (std::size_t oy = 0; oy < Ho; ++oy) {
                    const long long iy = static_cast<long long>(oy) * stride - pad + static_cast<long long>(dy);
                    for (std::size_t ox = 0; ox < Wo; ++ox) {
                        const long long ix = static_cast<long long>(ox) * stride - pad + static_cast<long long>(dx);
                        Scalar v = 0;
                        if (iy >= 0 && iy < static_cast<long long>(H) && ix >= 0 &&
                            ix < static_cast<long long>(W))
                            v = x.at(c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix));
                        out[oy * Wo + ox] = v;
                    }
                }
            }
        }
    }
    return cols;
}

// Adjoint of im2col: scatter-adds column gradients back onto the input grid.
template <typename Scalar>
Tensor<Scalar> col2im(const Tensor<Scalar>& cols, std::size_t C, std::size_t H, std::size_t W,
                      std::size_t k, int stride, int pad) {
    const std::size_t Ho = conv_out_extent(H, k, stride, pad);
    const std::size_t Wo = conv_out_extent(W, k, stride, pad);
    Tensor<Scalar> x({C, H, W});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t dy = 0; dy < k; ++dy) {
            for (std::size_t dx = 0; dx < k; ++dx) {
                const std::size_t row = (c * k + dy) * k + dx;
                const Scalar* in = cols.data() + row * Ho * Wo;
                for (std::size_t oy = 0; oy < Ho; ++oy) {
                    const long long iy = static_cast<long long>(oy) * stride - pad + static_cast<long long>(dy);
                    if (iy < 0 || iy >= static_cast<long long>(H)) continue;
                    for (std::size_t ox = 0; ox < Wo; ++ox) {
                        const long long ix = static_cast<long long>(ox) * stride - pad + static_cast<long long>(dx);
                        if (ix < 0 || ix >= static_cast<long long>(W)) continue;
                        x.at(c, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix)) +=
                            in[oy * Wo + ox];
                    }
                }
            }
        }
    }
    return x;
}

// Cross-correlation of a [C,H,W] input with an [O,C,k,k] kernel (this is the
// framework convention: the kernel is not flipped). Bias may be empty.
template <typename Scalar>
Tensor<Scalar> conv2d(const Tensor<Scalar>& x, const Tensor<Scalar>& w, const Tensor<Scalar>& b,
                      int stride, int pad) {
    if (x.rank() != 3) throw ShapeError("conv2d: input must be [C,H,W], got " + x.shape_string());
    if (w.rank() != 4) throw ShapeError("conv2d: weight must be [O,C,k,k], got " + w.shape_string());
    const std::size_t O = w.extent(0), C = w.extent(1), k = w.extent(2);
    if (w.extent(3) != k) throw ShapeError("conv2d: kernel must be square");
    if (k % 2 == 0) throw ShapeError("conv2d: kernel side must be odd");
    if (stride < 1) throw ValueError("conv2d: stride must be >= 1");
    if (pad < 0) throw ValueError("conv2d: padding must be >= 0");
    if (x.extent(0) != C)
        throw ShapeError("conv2d: input channels " + std::to_string(x.extent(0)) +
                         " != kernel channels " + std::to_string(C));
    if (!b.empty() && (b.rank() != 1 || b.extent(0) != O))
        throw ShapeError("conv2d: bias length must equal out channels");

    const std::size_t Ho = conv_out_extent(x.extent(1), k, stride, pad);
    const std::size_t Wo = conv_out_extent(x.extent(2), k, stride, pad);
    Tensor<Scalar> cols = im2col(x, k, stride, pad);
    Tensor<Scalar> y({O, Ho, Wo});
    y.matrix_view(O, Ho * Wo).noalias() = w.matrix_view(O, C * k * k) * cols.matrix();
    if (!b.empty())
        for (std::size_t o = 0; o < O; ++o) {
            Scalar* p = y.data() + o * Ho * Wo;
            for (std::size_t i = 0; i < Ho * Wo; ++i) p[i] += b[o];
        }
    return y;
}

// Row-wise softmax with the usual max-shift.
template <typename Scalar>
Tensor<Scalar> softmax_rows(const Tensor<Scalar>& m) {
    if (m.rank() != 2) throw ShapeError("softmax_rows: expects rank-2, got " + m.shape_string());
    Tensor<Scalar> y = m;
    const std::size_t R = m.extent(0), Cc = m.extent(1);
    for (std::size_t r = 0; r < R; ++r) {
        Scalar* row = y.data() + r * Cc;
        Scalar mx = row[0];
        for (std::size_t c = 1; c < Cc; ++c) mx = std::max(mx, row[c]);
        Scalar sum = 0;
        for (std::size_t c = 0; c < Cc; ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (std::size_t c = 0; c < Cc; ++c) row[c] /= sum;
    }
    return y;
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
    return Scalar(1) / (Scalar(1) + std::exp(-x));
}

}  // namespace kernels
}  // namespace tryon
