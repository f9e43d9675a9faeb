#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tryon/kernels.hpp"
#include "tryon/tensor.hpp"

namespace tryon {

// A named trainable tensor. Gradients accumulate into `grad` when a Tape that
// references the parameter runs backward().
template <typename Scalar>
struct Param {
    std::string name;
    Tensor<Scalar> value;
    Tensor<Scalar> grad;

    Param() = default;
    Param(std::string n, Tensor<Scalar> v) : name(std::move(n)), value(std::move(v)) {}

    void zero_grad() { grad = Tensor<Scalar>(value.shape()); }
    void sgd_step(Scalar lr) {
        if (grad.empty()) return;
        value.array() -= lr * grad.array();
    }
};

using Paramd = Param<double>;

// Minimal reverse-mode accumulator over Tensor values. Build a graph with the
// op methods, call backward() on a scalar node, then read gradients back via
// grad() or scatter them into bound Params.
//
// Forward values are computed eagerly; backward closures are only recorded
// for nodes that can reach a parameter, so running a tape without calling
// backward() is an ordinary forward evaluation.
template <typename Scalar>
class Tape {
public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    // --- graph leaves ---

    Var constant(Tensor<Scalar> v) { return push(std::move(v), false, {}, nullptr); }

    // Leaf that participates in backward without being a Param (read its
    // gradient back with grad()).
    Var input(Tensor<Scalar> v) { return push(std::move(v), true, {}, nullptr); }

    Var param(Param<Scalar>& p) {
        auto it = param_ids_.find(&p);
        if (it != param_ids_.end()) return Var{it->second};
        Var v = push(p.value, true, {}, nullptr);
        param_ids_.emplace(&p, v.id);
        return v;
    }

    const Tensor<Scalar>& value(Var v) const { return nodes_[v.id].value; }

    const Tensor<Scalar>& grad(Var v) {
        Node& n = nodes_[v.id];
        if (n.grad.empty()) n.grad = Tensor<Scalar>(n.value.shape());
        return n.grad;
    }

    // --- elementwise ---

    Var add(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (!ta.same_shape(tb)) throw ShapeError("tape add: shape mismatch");
        Tensor<Scalar> out = ta;
        out.array() += tb.array();
        return push(std::move(out), needs(a, b), {a.id, b.id}, [](Tape& t, int self) {
            t.accumulate(t.parent(self, 0), t.nodes_[self].grad.array());
            t.accumulate(t.parent(self, 1), t.nodes_[self].grad.array());
        });
    }

    Var sub(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (!ta.same_shape(tb)) throw ShapeError("tape sub: shape mismatch");
        Tensor<Scalar> out = ta;
        out.array() -= tb.array();
        return push(std::move(out), needs(a, b), {a.id, b.id}, [](Tape& t, int self) {
            t.accumulate(t.parent(self, 0), t.nodes_[self].grad.array());
            t.accumulate(t.parent(self, 1), -t.nodes_[self].grad.array());
        });
    }

    Var mul(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (!ta.same_shape(tb)) throw ShapeError("tape mul: shape mismatch");
        Tensor<Scalar> out = ta;
        out.array() *= tb.array();
        return push(std::move(out), needs(a, b), {a.id, b.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            t.accumulate(t.parent(self, 0), g.array() * t.nodes_[t.parent(self, 1)].value.array());
            t.accumulate(t.parent(self, 1), g.array() * t.nodes_[t.parent(self, 0)].value.array());
        });
    }

    Var scale(Var a, Scalar c) {
        Tensor<Scalar> out = value(a);
        out.array() *= c;
        return push(std::move(out), needs(a), {a.id}, [c](Tape& t, int self) {
            t.accumulate(t.parent(self, 0), c * t.nodes_[self].grad.array());
        });
    }

    // Broadcast multiply by a [1]-shaped variable (learnable scalar gates).
    Var mul_scalar(Var a, Var s) {
        const Tensor<Scalar>& ts = value(s);
        if (ts.numel() != 1) throw ShapeError("tape mul_scalar: scale must have one element");
        Tensor<Scalar> out = value(a);
        out.array() *= ts[0];
        return push(std::move(out), needs(a, s), {a.id, s.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const auto& av = t.nodes_[t.parent(self, 0)].value;
            const Scalar sv = t.nodes_[t.parent(self, 1)].value[0];
            t.accumulate(t.parent(self, 0), sv * g.array());
            Tensor<Scalar> ds({1});
            ds[0] = (g.array() * av.array()).sum();
            t.accumulate(t.parent(self, 1), ds.array());
        });
    }

    Var tanh_(Var a) {
        Tensor<Scalar> out = value(a);
        out.array() = out.array().tanh();
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& y = t.nodes_[self].value;
            t.accumulate(t.parent(self, 0),
                         t.nodes_[self].grad.array() * (Scalar(1) - y.array().square()));
        });
    }

    Var silu(Var a) {
        const Tensor<Scalar>& x = value(a);
        Tensor<Scalar> out(x.shape());
        for (std::size_t i = 0; i < x.numel(); ++i) out[i] = x[i] * kernels::sigmoid(x[i]);
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& x = t.nodes_[t.parent(self, 0)].value;
            const auto& g = t.nodes_[self].grad;
            Tensor<Scalar> dx(x.shape());
            for (std::size_t i = 0; i < x.numel(); ++i) {
                const Scalar s = kernels::sigmoid(x[i]);
                dx[i] = g[i] * s * (Scalar(1) + x[i] * (Scalar(1) - s));
            }
            t.accumulate(t.parent(self, 0), dx.array());
        });
    }

    Var abs_(Var a) {
        Tensor<Scalar> out = value(a);
        out.array() = out.array().abs();
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& x = t.nodes_[t.parent(self, 0)].value;
            const auto& g = t.nodes_[self].grad;
            Tensor<Scalar> dx(x.shape());
            for (std::size_t i = 0; i < x.numel(); ++i)
                dx[i] = x[i] > 0 ? g[i] : (x[i] < 0 ? -g[i] : Scalar(0));
            t.accumulate(t.parent(self, 0), dx.array());
        });
    }

    // --- shape ---

    Var reshape(Var a, std::vector<std::size_t> shape) {
        Tensor<Scalar> out = value(a).reshaped(std::move(shape));
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            t.accumulate(t.parent(self, 0), g.array());
        });
    }

    Var transpose(Var a) {
        const Tensor<Scalar>& x = value(a);
        if (x.rank() != 2) throw ShapeError("tape transpose: expects rank-2");
        Tensor<Scalar> out({x.extent(1), x.extent(0)});
        out.matrix() = x.matrix().transpose();
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            Tensor<Scalar> dx({g.extent(1), g.extent(0)});
            dx.matrix() = g.matrix().transpose();
            t.accumulate(t.parent(self, 0), dx.array());
        });
    }

    // Concatenate along the leading axis (rows for rank-2, channels for rank-3).
    Var concat0(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (ta.rank() != tb.rank() || ta.rank() == 0) throw ShapeError("tape concat0: rank mismatch");
        std::vector<std::size_t> shape = ta.shape();
        for (std::size_t d = 1; d < shape.size(); ++d)
            if (tb.extent(d) != shape[d]) throw ShapeError("tape concat0: trailing extent mismatch");
        shape[0] += tb.extent(0);
        Tensor<Scalar> out(shape);
        std::copy(ta.data(), ta.data() + ta.numel(), out.data());
        std::copy(tb.data(), tb.data() + tb.numel(), out.data() + ta.numel());
        const std::size_t na = ta.numel();
        return push(std::move(out), needs(a, b), {a.id, b.id}, [na](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int pa = t.parent(self, 0), pb = t.parent(self, 1);
            Tensor<Scalar> ga(t.nodes_[pa].value.shape());
            Tensor<Scalar> gb(t.nodes_[pb].value.shape());
            std::copy(g.data(), g.data() + na, ga.data());
            std::copy(g.data() + na, g.data() + g.numel(), gb.data());
            t.accumulate(pa, ga.array());
            t.accumulate(pb, gb.array());
        });
    }

    // Rows [r0, r1) along the leading axis.
    Var slice0(Var a, std::size_t r0, std::size_t r1) {
        const Tensor<Scalar>& x = value(a);
        if (x.rank() == 0 || r0 >= r1 || r1 > x.extent(0)) throw ShapeError("tape slice0: bad range");
        std::vector<std::size_t> shape = x.shape();
        shape[0] = r1 - r0;
        std::size_t inner = 1;
        for (std::size_t d = 1; d < shape.size(); ++d) inner *= shape[d];
        Tensor<Scalar> out(shape);
        std::copy(x.data() + r0 * inner, x.data() + r1 * inner, out.data());
        return push(std::move(out), needs(a), {a.id}, [r0, inner](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int p = t.parent(self, 0);
            Tensor<Scalar> dx(t.nodes_[p].value.shape());
            std::copy(g.data(), g.data() + g.numel(), dx.data() + r0 * inner);
            t.accumulate(p, dx.array());
        });
    }

    // Columns [c0, c1) of a rank-2 tensor.
    Var slice_cols(Var a, std::size_t c0, std::size_t c1) {
        const Tensor<Scalar>& x = value(a);
        if (x.rank() != 2 || c0 >= c1 || c1 > x.extent(1)) throw ShapeError("tape slice_cols: bad range");
        const std::size_t R = x.extent(0), Cin = x.extent(1), Cw = c1 - c0;
        Tensor<Scalar> out({R, Cw});
        for (std::size_t r = 0; r < R; ++r)
            std::copy(x.data() + r * Cin + c0, x.data() + r * Cin + c1, out.data() + r * Cw);
        return push(std::move(out), needs(a), {a.id}, [c0, Cin, Cw](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int p = t.parent(self, 0);
            Tensor<Scalar> dx(t.nodes_[p].value.shape());
            const std::size_t R = dx.extent(0);
            for (std::size_t r = 0; r < R; ++r)
                std::copy(g.data() + r * Cw, g.data() + (r + 1) * Cw, dx.data() + r * Cin + c0);
            t.accumulate(p, dx.array());
        });
    }

    Var concat_cols(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (ta.rank() != 2 || tb.rank() != 2 || ta.extent(0) != tb.extent(0))
            throw ShapeError("tape concat_cols: row mismatch");
        const std::size_t R = ta.extent(0), Ca = ta.extent(1), Cb = tb.extent(1);
        Tensor<Scalar> out({R, Ca + Cb});
        for (std::size_t r = 0; r < R; ++r) {
            std::copy(ta.data() + r * Ca, ta.data() + (r + 1) * Ca, out.data() + r * (Ca + Cb));
            std::copy(tb.data() + r * Cb, tb.data() + (r + 1) * Cb, out.data() + r * (Ca + Cb) + Ca);
        }
        return push(std::move(out), needs(a, b), {a.id, b.id}, [Ca, Cb](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int pa = t.parent(self, 0), pb = t.parent(self, 1);
            Tensor<Scalar> ga(t.nodes_[pa].value.shape());
            Tensor<Scalar> gb(t.nodes_[pb].value.shape());
            const std::size_t R = ga.extent(0);
            for (std::size_t r = 0; r < R; ++r) {
                std::copy(g.data() + r * (Ca + Cb), g.data() + r * (Ca + Cb) + Ca, ga.data() + r * Ca);
                std::copy(g.data() + r * (Ca + Cb) + Ca, g.data() + (r + 1) * (Ca + Cb),
                          gb.data() + r * Cb);
            }
            t.accumulate(pa, ga.array());
            t.accumulate(pb, gb.array());
        });
    }

    // --- linear algebra ---

    Var matmul(Var a, Var b) {
        const Tensor<Scalar>& ta = value(a);
        const Tensor<Scalar>& tb = value(b);
        if (ta.rank() != 2 || tb.rank() != 2 || ta.extent(1) != tb.extent(0))
            throw ShapeError("tape matmul: " + ta.shape_string() + " x " + tb.shape_string());
        Tensor<Scalar> out({ta.extent(0), tb.extent(1)});
        out.matrix().noalias() = ta.matrix() * tb.matrix();
        return push(std::move(out), needs(a, b), {a.id, b.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int pa = t.parent(self, 0), pb = t.parent(self, 1);
            const auto& av = t.nodes_[pa].value;
            const auto& bv = t.nodes_[pb].value;
            Tensor<Scalar> ga(av.shape());
            ga.matrix().noalias() = g.matrix() * bv.matrix().transpose();
            Tensor<Scalar> gb(bv.shape());
            gb.matrix().noalias() = av.matrix().transpose() * g.matrix();
            t.accumulate(pa, ga.array());
            t.accumulate(pb, gb.array());
        });
    }

    // x[M,N] + row vector b[N], broadcast over rows.
    Var add_rowvec(Var a, Var b) {
        const Tensor<Scalar>& x = value(a);
        const Tensor<Scalar>& bv = value(b);
        if (x.rank() != 2 || bv.rank() != 1 || bv.extent(0) != x.extent(1))
            throw ShapeError("tape add_rowvec: shape mismatch");
        Tensor<Scalar> out = x;
        out.matrix().rowwise() += bv.matrix_view(1, bv.extent(0)).row(0);
        return push(std::move(out), needs(a, b), {a.id, b.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            t.accumulate(t.parent(self, 0), g.array());
            const int pb = t.parent(self, 1);
            Tensor<Scalar> db(t.nodes_[pb].value.shape());
            db.matrix_view(1, db.extent(0)) = g.matrix().colwise().sum();
            t.accumulate(pb, db.array());
        });
    }

    // x[C,H,W] + per-channel bias b[C].
    Var add_channel_bias(Var a, Var b) {
        const Tensor<Scalar>& x = value(a);
        const Tensor<Scalar>& bv = value(b);
        if (x.rank() != 3 || bv.rank() != 1 || bv.extent(0) != x.extent(0))
            throw ShapeError("tape add_channel_bias: shape mismatch");
        const std::size_t C = x.extent(0), HW = x.extent(1) * x.extent(2);
        Tensor<Scalar> out = x;
        for (std::size_t c = 0; c < C; ++c) {
            Scalar* p = out.data() + c * HW;
            for (std::size_t i = 0; i < HW; ++i) p[i] += bv[c];
        }
        return push(std::move(out), needs(a, b), {a.id, b.id}, [C, HW](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            t.accumulate(t.parent(self, 0), g.array());
            const int pb = t.parent(self, 1);
            Tensor<Scalar> db({C});
            for (std::size_t c = 0; c < C; ++c) {
                Scalar s = 0;
                const Scalar* p = g.data() + c * HW;
                for (std::size_t i = 0; i < HW; ++i) s += p[i];
                db[c] = s;
            }
            t.accumulate(pb, db.array());
        });
    }

    Var softmax_rows(Var a) {
        Tensor<Scalar> out = kernels::softmax_rows(value(a));
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& y = t.nodes_[self].value;
            const auto& g = t.nodes_[self].grad;
            const std::size_t R = y.extent(0), C = y.extent(1);
            Tensor<Scalar> dx(y.shape());
            for (std::size_t r = 0; r < R; ++r) {
                const Scalar* yr = y.data() + r * C;
                const Scalar* gr = g.data() + r * C;
                Scalar dot = 0;
                for (std::size_t c = 0; c < C; ++c) dot += yr[c] * gr[c];
                Scalar* dr = dx.data() + r * C;
                for (std::size_t c = 0; c < C; ++c) dr[c] = yr[c] * (gr[c] - dot);
            }
            t.accumulate(t.parent(self, 0), dx.array());
        });
    }

    // --- convolution & resampling ---

    Var conv2d(Var x, Var w, Var b, int stride, int pad) {
        const Tensor<Scalar>& xv = value(x);
        const Tensor<Scalar>& wv = value(w);
        const Tensor<Scalar>& bv = value(b);
        Tensor<Scalar> out = kernels::conv2d(xv, wv, bv, stride, pad);
        // im2col matrix is recomputed in the backward pass; saving it would
        // hold k*k copies of every activation for the life of the tape.
        const std::size_t k = wv.extent(2);
        return push(std::move(out), needs(x, w) || needs(b), {x.id, w.id, b.id},
                    [stride, pad, k](Tape& t, int self) {
                        const auto& g = t.nodes_[self].grad;
                        const int px = t.parent(self, 0), pw = t.parent(self, 1), pb = t.parent(self, 2);
                        const auto& xv = t.nodes_[px].value;
                        const auto& wv = t.nodes_[pw].value;
                        const std::size_t O = wv.extent(0), C = wv.extent(1);
                        const std::size_t HoWo = g.extent(1) * g.extent(2);
                        Tensor<Scalar> cols = kernels::im2col(xv, k, stride, pad);
                        Tensor<Scalar> gw(wv.shape());
                        gw.matrix_view(O, C * k * k).noalias() =
                            g.matrix_view(O, HoWo) * cols.matrix().transpose();
                        t.accumulate(pw, gw.array());
                        if (!t.nodes_[pb].value.empty()) {
                            Tensor<Scalar> gb({O});
                            for (std::size_t o = 0; o < O; ++o) {
                                Scalar s = 0;
                                const Scalar* p = g.data() + o * HoWo;
                                for (std::size_t i = 0; i < HoWo; ++i) s += p[i];
                                gb[o] = s;
                            }
                            t.accumulate(pb, gb.array());
                        }
                        Tensor<Scalar> gcols(cols.shape());
                        gcols.matrix().noalias() =
                            wv.matrix_view(O, C * k * k).transpose() * g.matrix_view(O, HoWo);
                        Tensor<Scalar> gx = kernels::col2im(gcols, C, xv.extent(1), xv.extent(2), k,
                                                            stride, pad);
                        t.accumulate(px, gx.array());
                    });
    }

    Var upsample_nearest2x(Var a) {
        const Tensor<Scalar>& x = value(a);
        if (x.rank() != 3) throw ShapeError("tape upsample: expects [C,H,W]");
        const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
        Tensor<Scalar> out({C, 2 * H, 2 * W});
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < 2 * H; ++y)
                for (std::size_t xx = 0; xx < 2 * W; ++xx)
                    out.at(c, y, xx) = x.at(c, y / 2, xx / 2);
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int p = t.parent(self, 0);
            const auto& xv = t.nodes_[p].value;
            Tensor<Scalar> dx(xv.shape());
            const std::size_t C = xv.extent(0), H = xv.extent(1), W = xv.extent(2);
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t y = 0; y < 2 * H; ++y)
                    for (std::size_t xx = 0; xx < 2 * W; ++xx)
                        dx.at(c, y / 2, xx / 2) += g.at(c, y, xx);
            t.accumulate(p, dx.array());
        });
    }

    Var avgpool2x(Var a) {
        const Tensor<Scalar>& x = value(a);
        if (x.rank() != 3) throw ShapeError("tape avgpool: expects [C,H,W]");
        const std::size_t C = x.extent(0), H = x.extent(1) / 2, W = x.extent(2) / 2;
        if (H == 0 || W == 0 || x.extent(1) % 2 || x.extent(2) % 2)
            throw ShapeError("tape avgpool: extents must be even");
        Tensor<Scalar> out({C, H, W});
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < H; ++y)
                for (std::size_t xx = 0; xx < W; ++xx)
                    out.at(c, y, xx) = (x.at(c, 2 * y, 2 * xx) + x.at(c, 2 * y, 2 * xx + 1) +
                                        x.at(c, 2 * y + 1, 2 * xx) + x.at(c, 2 * y + 1, 2 * xx + 1)) /
                                       Scalar(4);
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const auto& g = t.nodes_[self].grad;
            const int p = t.parent(self, 0);
            Tensor<Scalar> dx(t.nodes_[p].value.shape());
            const std::size_t C = g.extent(0), H = g.extent(1), W = g.extent(2);
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t y = 0; y < H; ++y)
                    for (std::size_t xx = 0; xx < W; ++xx) {
                        const Scalar q = g.at(c, y, xx) / Scalar(4);
                        dx.at(c, 2 * y, 2 * xx) += q;
                        dx.at(c, 2 * y, 2 * xx + 1) += q;
                        dx.at(c, 2 * y + 1, 2 * xx) += q;
                        dx.at(c, 2 * y + 1, 2 * xx + 1) += q;
                    }
            t.accumulate(p, dx.array());
        });
    }

    // --- reductions ---

    Var sum(Var a) {
        Tensor<Scalar> out({1});
        out[0] = value(a).array().sum();
        return push(std::move(out), needs(a), {a.id}, [](Tape& t, int self) {
            const Scalar g = t.nodes_[self].grad[0];
            const int p = t.parent(self, 0);
            Tensor<Scalar> dx = Tensor<Scalar>::full(t.nodes_[p].value.shape(), g);
            t.accumulate(p, dx.array());
        });
    }

    Var mean(Var a) { return scale(sum(a), Scalar(1) / static_cast<Scalar>(value(a).numel())); }

    Var mse(Var pred, Var target) {
        Var d = sub(pred, target);
        return mean(mul(d, d));
    }

    // --- driver ---

    void backward(Var loss) {
        Node& ln = nodes_[loss.id];
        if (ln.value.numel() != 1) throw ShapeError("backward: loss must be scalar");
        if (ln.grad.empty()) ln.grad = Tensor<Scalar>(ln.value.shape());
        ln.grad[0] += Scalar(1);
        for (int i = loss.id; i >= 0; --i) {
            Node& n = nodes_[i];
            if (n.backward && !n.grad.empty()) n.backward(*this, i);
        }
        for (auto& [p, id] : param_ids_) {
            Node& n = nodes_[id];
            if (n.grad.empty()) continue;
            if (p->grad.empty()) p->grad = Tensor<Scalar>(p->value.shape());
            p->grad.array() += n.grad.array();
        }
    }

    std::size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Tensor<Scalar> value;
        Tensor<Scalar> grad;  // lazily allocated
        std::vector<int> parents;
        std::function<void(Tape&, int)> backward;
        bool requires_grad = false;
    };

    bool needs(Var a) const { return nodes_[a.id].requires_grad; }
    bool needs(Var a, Var b) const { return needs(a) || needs(b); }

    int parent(int self, std::size_t i) const { return nodes_[self].parents[i]; }

    template <typename Expr>
    void accumulate(int id, const Expr& e) {
        Node& n = nodes_[id];
        if (!n.requires_grad && !n.backward && n.parents.empty()) return;  // constant leaf
        if (n.grad.empty()) n.grad = Tensor<Scalar>(n.value.shape());
        n.grad.array() += e;
    }

    Var push(Tensor<Scalar> value, bool requires_grad, std::vector<int> parents,
             std::function<void(Tape&, int)> backward) {
        Node n;
        n.value = std::move(value);
        n.parents = std::move(parents);
        n.requires_grad = requires_grad;
        if (requires_grad) n.backward = std::move(backward);
        nodes_.push_back(std::move(n));
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    std::vector<Node> nodes_;
    std::unordered_map<Param<Scalar>*, int> param_ids_;
};

template <typename Scalar>
using TapeVar = typename Tape<Scalar>::Var;

using Taped = Tape<double>;

}  // namespace tryon
