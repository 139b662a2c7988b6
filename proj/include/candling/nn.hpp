// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_NN_HPP
#define CANDLING_NN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "candling/errors.hpp"
#include "candling/rng.hpp"
#include "candling/tensor.hpp"

namespace candling::nn {

/**
 * @brief Static computation graph with reverse-mode differentiation.
 *
 * The graph is built once per architecture (node list in topological
 * order), parameters live in a separate store, and forward/backward walk
 * the node list with per-node scratch kept in a reusable workspace.
 * Everything is templated on the scalar so training runs in float while
 * gradient verification runs the identical code in double.
 */

enum class Op {
    input,
    conv,
    batchnorm,
    relu,
    relu6,
    maxpool,
    avgpool,
    global_avgpool,
    dense,
    flatten,
    add,
    concat,
    dropout,
};

enum class PadMode { same, valid };

enum class ParamKind { weight, stat };

struct ParamSpec {
    std::string name;
    std::vector<int> shape;
    ParamKind kind = ParamKind::weight;
    std::string block;

    std::size_t numel() const {
        std::size_t n = 1;
        for (int d : shape) n *= static_cast<std::size_t>(d);
        return n;
    }
};

struct Node {
    Op op = Op::input;
    std::vector<int> inputs;
    std::vector<int> out_shape;  // per-sample shape: {C,H,W} or {F}

    // conv / pool attributes
    int out_c = 0, kh = 0, kw = 0, sh = 1, sw = 1;
    int pt = 0, pb = 0, pl = 0, pr = 0;
    int groups = 1;
    bool has_bias = false;
    double rate = 0.0;  // dropout

    // parameter indices (-1 = none)
    int w = -1, b = -1;
    int gamma = -1, beta = -1, mean = -1, var = -1;
};

class GraphDef {
public:
    std::vector<Node> nodes;
    std::vector<ParamSpec> params;
    std::vector<std::string> block_order;
    int input_node = -1;
    int output_node = -1;
    int in_c = 0, in_h = 0, in_w = 0;

    /// Every parameter registered until the next call lands in this block.
    void block(const std::string& name) {
        current_block_ = name;
        if (std::find(block_order.begin(), block_order.end(), name) ==
            block_order.end())
            block_order.push_back(name);
    }

    int input(int c, int h, int w) {
        if (input_node >= 0) throw ConfigError("graph already has an input");
        in_c = c;
        in_h = h;
        in_w = w;
        Node n;
        n.op = Op::input;
        n.out_shape = {c, h, w};
        nodes.push_back(n);
        input_node = static_cast<int>(nodes.size()) - 1;
        return input_node;
    }

    int conv(int x, int out_c, int k, int stride, PadMode pad,
             const std::string& name, int groups = 1, bool bias = true) {
        return conv2(x, out_c, k, k, stride, stride, pad, name, groups, bias);
    }

    int conv2(int x, int out_c, int kh, int kw, int sh, int sw, PadMode pad,
              const std::string& name, int groups = 1, bool bias = true) {
        const auto& in = shape_of(x);
        if (in.size() != 3) throw ConfigError("conv needs a CHW input");
        const int in_c_ = in[0];
        if (in_c_ % groups != 0 || out_c % groups != 0)
            throw ConfigError("conv groups must divide channel counts");
        Node n;
        n.op = Op::conv;
        n.inputs = {x};
        n.out_c = out_c;
        n.kh = kh;
        n.kw = kw;
        n.sh = sh;
        n.sw = sw;
        n.groups = groups;
        n.has_bias = bias;
        infer_pads(n, in[1], in[2], pad);
        n.out_shape = {out_c, out_dim(in[1], kh, sh, n.pt + n.pb),
                       out_dim(in[2], kw, sw, n.pl + n.pr)};
        n.w = add_param(name + ".w", {out_c, in_c_ / groups, kh, kw});
        if (bias) n.b = add_param(name + ".b", {out_c});
        return push(n);
    }

    int batchnorm(int x, const std::string& name) {
        const auto& in = shape_of(x);
        const int c = in[0];
        Node n;
        n.op = Op::batchnorm;
        n.inputs = {x};
        n.out_shape = in;
        n.gamma = add_param(name + ".gamma", {c});
        n.beta = add_param(name + ".beta", {c});
        n.mean = add_param(name + ".mean", {c}, ParamKind::stat);
        n.var = add_param(name + ".var", {c}, ParamKind::stat);
        return push(n);
    }

    int relu(int x) { return activation(x, Op::relu); }
    int relu6(int x) { return activation(x, Op::relu6); }

    int maxpool(int x, int k, int stride, PadMode pad) {
        return pool(x, k, stride, pad, Op::maxpool);
    }
    int avgpool(int x, int k, int stride, PadMode pad) {
        return pool(x, k, stride, pad, Op::avgpool);
    }

    int global_avgpool(int x) {
        const auto& in = shape_of(x);
        if (in.size() != 3) throw ConfigError("gap needs a CHW input");
        Node n;
        n.op = Op::global_avgpool;
        n.inputs = {x};
        n.out_shape = {in[0]};
        return push(n);
    }

    int dense(int x, int units, const std::string& name, bool bias = true) {
        const auto& in = shape_of(x);
        if (in.size() != 1)
            throw ConfigError("dense needs a flat input; flatten first");
        Node n;
        n.op = Op::dense;
        n.inputs = {x};
        n.out_c = units;
        n.has_bias = bias;
        n.out_shape = {units};
        n.w = add_param(name + ".w", {units, in[0]});
        if (bias) n.b = add_param(name + ".b", {units});
        return push(n);
    }

    int flatten(int x) {
        const auto& in = shape_of(x);
        int f = 1;
        for (int d : in) f *= d;
        Node n;
        n.op = Op::flatten;
        n.inputs = {x};
        n.out_shape = {f};
        return push(n);
    }

    int add(int a, int b) {
        if (shape_of(a) != shape_of(b))
            throw ConfigError("add needs matching shapes");
        Node n;
        n.op = Op::add;
        n.inputs = {a, b};
        n.out_shape = shape_of(a);
        return push(n);
    }

    int concat(const std::vector<int>& xs) {
        if (xs.empty()) throw ConfigError("concat of nothing");
        auto base = shape_of(xs[0]);
        if (base.size() != 3) throw ConfigError("concat needs CHW inputs");
        int c = 0;
        for (int x : xs) {
            const auto& s = shape_of(x);
            if (s.size() != 3 || s[1] != base[1] || s[2] != base[2])
                throw ConfigError("concat spatial shapes differ");
            c += s[0];
        }
        Node n;
        n.op = Op::concat;
        n.inputs = xs;
        n.out_shape = {c, base[1], base[2]};
        return push(n);
    }

    int dropout(int x, double rate) {
        if (rate < 0.0 || rate >= 1.0)
            throw ConfigError("dropout rate must lie in [0, 1)");
        Node n;
        n.op = Op::dropout;
        n.inputs = {x};
        n.rate = rate;
        n.out_shape = shape_of(x);
        return push(n);
    }

    void output(int x) {
        if (shape_of(x).size() != 1)
            throw ConfigError("output must be a flat logits vector");
        output_node = x;
    }

    const std::vector<int>& shape_of(int node) const {
        return nodes.at(static_cast<std::size_t>(node)).out_shape;
    }

    int find_param(const std::string& name) const {
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params[i].name == name) return static_cast<int>(i);
        return -1;
    }

private:
    std::string current_block_ = "stem";

    static int out_dim(int in, int k, int stride, int total_pad) {
        return (in + total_pad - k) / stride + 1;
    }

    static void infer_pads(Node& n, int h, int w, PadMode pad) {
        if (pad == PadMode::valid) {
            n.pt = n.pb = n.pl = n.pr = 0;
            return;
        }
        const int oh = (h + n.sh - 1) / n.sh;
        const int ow = (w + n.sw - 1) / n.sw;
        const int ph = std::max(0, (oh - 1) * n.sh + n.kh - h);
        const int pw = std::max(0, (ow - 1) * n.sw + n.kw - w);
        n.pt = ph / 2;
        n.pb = ph - n.pt;
        n.pl = pw / 2;
        n.pr = pw - n.pl;
    }

    int activation(int x, Op op) {
        Node n;
        n.op = op;
        n.inputs = {x};
        n.out_shape = shape_of(x);
        return push(n);
    }

    int pool(int x, int k, int stride, PadMode pad, Op op) {
        const auto& in = shape_of(x);
        if (in.size() != 3) throw ConfigError("pool needs a CHW input");
        Node n;
        n.op = op;
        n.inputs = {x};
        n.kh = n.kw = k;
        n.sh = n.sw = stride;
        infer_pads(n, in[1], in[2], pad);
        n.out_shape = {in[0], out_dim(in[1], k, stride, n.pt + n.pb),
                       out_dim(in[2], k, stride, n.pl + n.pr)};
        return push(n);
    }

    int add_param(const std::string& name, std::vector<int> shape,
                  ParamKind kind = ParamKind::weight) {
        if (find_param(name) >= 0)
            throw ConfigError("duplicate parameter name " + name);
        ParamSpec p;
        p.name = name;
        p.shape = std::move(shape);
        p.kind = kind;
        p.block = current_block_;
        params.push_back(std::move(p));
        return static_cast<int>(params.size()) - 1;
    }

    int push(Node n) {
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }
};

template <typename T>
struct ParameterStore {
    std::vector<Tensor<T>> value;
    std::vector<Tensor<T>> grad;
    std::vector<char> trainable;

    void allocate(const GraphDef& def) {
        value.clear();
        grad.clear();
        trainable.clear();
        for (const auto& p : def.params) {
            value.emplace_back(p.shape);
            grad.emplace_back(p.shape);
            trainable.push_back(p.kind == ParamKind::weight ? 1 : 0);
        }
    }

    void zero_grads() {
        for (auto& g : grad) g.zero();
    }
};

/// He-normal weights, zero biases, identity batchnorm. Deterministic in the
/// seed; used both for the reference CNN and for fresh classifier heads.
template <typename T>
inline void init_parameters(const GraphDef& def, ParameterStore<T>& store,
                            std::uint64_t seed) {
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        const auto& spec = def.params[i];
        auto& tensor = store.value[i];
        Rng rng(derive_seed(seed, spec.name));
        const auto ends_with = [&](const char* suffix) {
            const std::string s(suffix);
            return spec.name.size() >= s.size() &&
                   spec.name.compare(spec.name.size() - s.size(), s.size(),
                                     s) == 0;
        };
        if (ends_with(".w")) {
            std::size_t fan_in = 1;
            for (std::size_t d = 1; d < spec.shape.size(); ++d)
                fan_in *= static_cast<std::size_t>(spec.shape[d]);
            const double stddev =
                std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(
                                    fan_in, 1)));
            for (auto& v : tensor.data)
                v = static_cast<T>(rng.normal() * stddev);
        } else if (ends_with(".gamma") || ends_with(".var")) {
            std::fill(tensor.data.begin(), tensor.data.end(), T(1));
        } else {
            tensor.zero();  // biases, betas, means
        }
    }
}

template <typename T>
struct Workspace {
    std::vector<Tensor<T>> act;
    std::vector<Tensor<T>> grad;
    std::vector<std::vector<std::int64_t>> argmax;
    std::vector<std::vector<T>> mask;
    Rng dropout_rng{0};

    void prepare(const GraphDef& def) {
        act.resize(def.nodes.size());
        grad.resize(def.nodes.size());
        argmax.resize(def.nodes.size());
        mask.resize(def.nodes.size());
    }
};

namespace detail {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;

inline int batch_of(const std::vector<int>& tensor_shape) {
    return tensor_shape.empty() ? 0 : tensor_shape[0];
}

template <typename T>
inline void im2col(const T* in, int c0, int channels, int h, int w,
                   const Node& n, int oh, int ow, T* col) {
    // col is (channels * kh * kw) x (oh * ow), row-major.
    const int ohw = oh * ow;
    std::size_t row = 0;
    for (int c = c0; c < c0 + channels; ++c) {
        const T* plane = in + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < n.kh; ++ky) {
            for (int kx = 0; kx < n.kw; ++kx, ++row) {
                T* dst = col + row * ohw;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * n.sh - n.pt + ky;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst + oy * ow, dst + (oy + 1) * ow, T(0));
                        continue;
                    }
                    const T* src_row = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * n.sw - n.pl + kx;
                        dst[oy * ow + ox] =
                            (ix < 0 || ix >= w) ? T(0) : src_row[ix];
                    }
                }
            }
        }
    }
}

template <typename T>
inline void col2im_add(const T* col, int c0, int channels, int h, int w,
                       const Node& n, int oh, int ow, T* out) {
    const int ohw = oh * ow;
    std::size_t row = 0;
    for (int c = c0; c < c0 + channels; ++c) {
        T* plane = out + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < n.kh; ++ky) {
            for (int kx = 0; kx < n.kw; ++kx, ++row) {
                const T* src = col + row * ohw;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * n.sh - n.pt + ky;
                    if (iy < 0 || iy >= h) continue;
                    T* dst_row = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * n.sw - n.pl + kx;
                        if (ix >= 0 && ix < w) dst_row[ix] += src[oy * ow + ox];
                    }
                }
            }
        }
    }
}

}  // namespace detail

/**
 * @brief Runs the graph forward for a batch.
 *
 * `input` is (N, C, H, W) row-major. Returns the logits activation index
 * (the graph's output node); read it from ws.act. In training mode dropout
 * draws from ws.dropout_rng; inference mode is deterministic.
 */
template <typename T>
inline const Tensor<T>& forward(const GraphDef& def,
                                const ParameterStore<T>& store,
                                Workspace<T>& ws, const Tensor<T>& input,
                                bool training = false) {
    if (def.input_node < 0 || def.output_node < 0)
        throw ConfigError("graph has no input/output");
    if (input.shape.size() != 4 || input.shape[1] != def.in_c ||
        input.shape[2] != def.in_h || input.shape[3] != def.in_w)
        throw InputShapeError("batch shape does not match the graph input");
    ws.prepare(def);
    const int N = input.shape[0];

    for (std::size_t ni = 0; ni < def.nodes.size(); ++ni) {
        const Node& n = def.nodes[ni];
        Tensor<T>& out = ws.act[ni];
        auto out_tensor_shape = [&] {
            std::vector<int> s{N};
            s.insert(s.end(), n.out_shape.begin(), n.out_shape.end());
            return s;
        };

        switch (n.op) {
            case Op::input:
                out = input;
                break;

            case Op::conv: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const auto& ishape =
                    def.nodes[n.inputs[0]].out_shape;  // {C,H,W}
                const int ic = ishape[0], h = ishape[1], w = ishape[2];
                const int oc = n.out_shape[0], oh = n.out_shape[1],
                          ow = n.out_shape[2];
                const int icg = ic / n.groups, ocg = oc / n.groups;
                out = Tensor<T>(out_tensor_shape());
                std::vector<T> col(
                    static_cast<std::size_t>(icg) * n.kh * n.kw * oh * ow);
                const T* wp = store.value[n.w].ptr();
                for (int s = 0; s < N; ++s) {
                    const T* xin =
                        x.ptr() + static_cast<std::size_t>(s) * ic * h * w;
                    T* xout = out.ptr() +
                              static_cast<std::size_t>(s) * oc * oh * ow;
                    for (int g = 0; g < n.groups; ++g) {
                        detail::im2col(xin, g * icg, icg, h, w, n, oh, ow,
                                       col.data());
                        detail::ConstMatMap<T> wmat(
                            wp + static_cast<std::size_t>(g) * ocg * icg *
                                     n.kh * n.kw,
                            ocg, icg * n.kh * n.kw);
                        detail::ConstMatMap<T> cmat(col.data(),
                                                    icg * n.kh * n.kw,
                                                    oh * ow);
                        detail::MatMap<T> omat(
                            xout + static_cast<std::size_t>(g) * ocg * oh * ow,
                            ocg, oh * ow);
                        omat.noalias() = wmat * cmat;
                    }
                    if (n.has_bias) {
                        const T* bp = store.value[n.b].ptr();
                        for (int c = 0; c < oc; ++c) {
                            T* plane =
                                xout + static_cast<std::size_t>(c) * oh * ow;
                            const T bv = bp[c];
                            for (int i = 0; i < oh * ow; ++i) plane[i] += bv;
                        }
                    }
                }
                break;
            }

            case Op::batchnorm: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const int c = n.out_shape[0];
                const int hw = n.out_shape.size() == 3
                                   ? n.out_shape[1] * n.out_shape[2]
                                   : 1;
                out = Tensor<T>(out_tensor_shape());
                const T* gamma = store.value[n.gamma].ptr();
                const T* beta = store.value[n.beta].ptr();
                const T* mean = store.value[n.mean].ptr();
                const T* var = store.value[n.var].ptr();
                for (int s = 0; s < N; ++s)
                    for (int ci = 0; ci < c; ++ci) {
                        const T inv_std = T(1) /
                            std::sqrt(var[ci] + T(1e-5));
                        const T scale = gamma[ci] * inv_std;
                        const T shift = beta[ci] - mean[ci] * scale;
                        const std::size_t base =
                            (static_cast<std::size_t>(s) * c + ci) * hw;
                        for (int i = 0; i < hw; ++i)
                            out.data[base + i] = x.data[base + i] * scale +
                                                 shift;
                    }
                break;
            }

            case Op::relu:
            case Op::relu6: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                out = x;
                if (n.op == Op::relu) {
                    for (auto& v : out.data) v = std::max(v, T(0));
                } else {
                    for (auto& v : out.data)
                        v = std::min(std::max(v, T(0)), T(6));
                }
                break;
            }

            case Op::maxpool: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int c = ishape[0], h = ishape[1], w = ishape[2];
                const int oh = n.out_shape[1], ow = n.out_shape[2];
                out = Tensor<T>(out_tensor_shape());
                auto& arg = ws.argmax[ni];
                arg.assign(out.size(), -1);
                std::size_t oi = 0;
                for (int s = 0; s < N; ++s) {
                    const T* xin =
                        x.ptr() + static_cast<std::size_t>(s) * c * h * w;
                    for (int ci = 0; ci < c; ++ci) {
                        const T* plane =
                            xin + static_cast<std::size_t>(ci) * h * w;
                        for (int oy = 0; oy < oh; ++oy)
                            for (int ox = 0; ox < ow; ++ox, ++oi) {
                                T best = std::numeric_limits<T>::lowest();
                                std::int64_t best_idx = -1;
                                for (int ky = 0; ky < n.kh; ++ky) {
                                    const int iy = oy * n.sh - n.pt + ky;
                                    if (iy < 0 || iy >= h) continue;
                                    for (int kx = 0; kx < n.kw; ++kx) {
                                        const int ix = ox * n.sw - n.pl + kx;
                                        if (ix < 0 || ix >= w) continue;
                                        const T v = plane[iy * w + ix];
                                        if (v > best) {
                                            best = v;
                                            best_idx = iy * w + ix;
                                        }
                                    }
                                }
                                out.data[oi] = best_idx < 0 ? T(0) : best;
                                arg[oi] =
                                    best_idx < 0
                                        ? -1
                                        : (static_cast<std::int64_t>(s) * c +
                                           ci) * h * w + best_idx;
                            }
                    }
                }
                break;
            }

            case Op::avgpool: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int c = ishape[0], h = ishape[1], w = ishape[2];
                const int oh = n.out_shape[1], ow = n.out_shape[2];
                out = Tensor<T>(out_tensor_shape());
                std::size_t oi = 0;
                for (int s = 0; s < N; ++s) {
                    const T* xin =
                        x.ptr() + static_cast<std::size_t>(s) * c * h * w;
                    for (int ci = 0; ci < c; ++ci) {
                        const T* plane =
                            xin + static_cast<std::size_t>(ci) * h * w;
                        for (int oy = 0; oy < oh; ++oy)
                            for (int ox = 0; ox < ow; ++ox, ++oi) {
                                T sum = T(0);
                                int count = 0;
                                for (int ky = 0; ky < n.kh; ++ky) {
                                    const int iy = oy * n.sh - n.pt + ky;
                                    if (iy < 0 || iy >= h) continue;
                                    for (int kx = 0; kx < n.kw; ++kx) {
                                        const int ix = ox * n.sw - n.pl + kx;
                                        if (ix < 0 || ix >= w) continue;
                                        sum += plane[iy * w + ix];
                                        ++count;
                                    }
                                }
                                out.data[oi] =
                                    count ? sum / static_cast<T>(count) : T(0);
                            }
                    }
                }
                break;
            }

            case Op::global_avgpool: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int c = ishape[0];
                const int hw = ishape[1] * ishape[2];
                out = Tensor<T>(out_tensor_shape());
                for (int s = 0; s < N; ++s)
                    for (int ci = 0; ci < c; ++ci) {
                        const T* plane =
                            x.ptr() +
                            (static_cast<std::size_t>(s) * c + ci) * hw;
                        T sum = T(0);
                        for (int i = 0; i < hw; ++i) sum += plane[i];
                        out.data[static_cast<std::size_t>(s) * c + ci] =
                            sum / static_cast<T>(hw);
                    }
                break;
            }

            case Op::dense: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const int in_f = def.nodes[n.inputs[0]].out_shape[0];
                const int units = n.out_shape[0];
                out = Tensor<T>(out_tensor_shape());
                detail::ConstMatMap<T> xm(x.ptr(), N, in_f);
                detail::ConstMatMap<T> wm(store.value[n.w].ptr(), units, in_f);
                detail::MatMap<T> om(out.ptr(), N, units);
                om.noalias() = xm * wm.transpose();
                if (n.has_bias) {
                    const T* bp = store.value[n.b].ptr();
                    for (int s = 0; s < N; ++s)
                        for (int u = 0; u < units; ++u)
                            out.data[static_cast<std::size_t>(s) * units + u] +=
                                bp[u];
                }
                break;
            }

            case Op::flatten: {
                out = ws.act[n.inputs[0]];
                out.shape = {N, n.out_shape[0]};
                break;
            }

            case Op::add: {
                out = ws.act[n.inputs[0]];
                const Tensor<T>& y = ws.act[n.inputs[1]];
                for (std::size_t i = 0; i < out.data.size(); ++i)
                    out.data[i] += y.data[i];
                break;
            }

            case Op::concat: {
                out = Tensor<T>(out_tensor_shape());
                const int hw = n.out_shape[1] * n.out_shape[2];
                const int oc = n.out_shape[0];
                int c_off = 0;
                for (int src : n.inputs) {
                    const Tensor<T>& x = ws.act[src];
                    const int sc = def.nodes[src].out_shape[0];
                    for (int s = 0; s < N; ++s)
                        std::copy(
                            x.ptr() + static_cast<std::size_t>(s) * sc * hw,
                            x.ptr() + static_cast<std::size_t>(s + 1) * sc * hw,
                            out.ptr() +
                                (static_cast<std::size_t>(s) * oc + c_off) *
                                    hw);
                    c_off += sc;
                }
                break;
            }

            case Op::dropout: {
                const Tensor<T>& x = ws.act[n.inputs[0]];
                out = x;
                auto& mask = ws.mask[ni];
                if (training && n.rate > 0.0) {
                    const T keep = static_cast<T>(1.0 - n.rate);
                    mask.assign(out.size(), T(0));
                    for (std::size_t i = 0; i < out.data.size(); ++i) {
                        if (!ws.dropout_rng.bernoulli(n.rate)) {
                            mask[i] = T(1) / keep;
                            out.data[i] *= mask[i];
                        } else {
                            out.data[i] = T(0);
                        }
                    }
                } else {
                    mask.clear();
                }
                break;
            }
        }
    }
    return ws.act[def.output_node];
}

/**
 * @brief Reverse pass. Seeds the output node with dlogits and accumulates
 * parameter gradients into store.grad (which the caller zeroes beforehand).
 */
template <typename T>
inline void backward(const GraphDef& def, ParameterStore<T>& store,
                     Workspace<T>& ws, const Tensor<T>& dlogits) {
    const int N = ws.act[def.input_node].shape[0];
    for (std::size_t i = 0; i < def.nodes.size(); ++i) {
        ws.grad[i] = Tensor<T>(ws.act[i].shape);
    }
    ws.grad[def.output_node] = dlogits;

    for (std::size_t ri = def.nodes.size(); ri-- > 0;) {
        const Node& n = def.nodes[ri];
        const Tensor<T>& dy = ws.grad[ri];
        switch (n.op) {
            case Op::input:
                break;

            case Op::conv: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int ic = ishape[0], h = ishape[1], w = ishape[2];
                const int oc = n.out_shape[0], oh = n.out_shape[1],
                          ow = n.out_shape[2];
                const int icg = ic / n.groups, ocg = oc / n.groups;
                std::vector<T> col(
                    static_cast<std::size_t>(icg) * n.kh * n.kw * oh * ow);
                std::vector<T> dcol(col.size());
                const T* wp = store.value[n.w].ptr();
                T* dwp = store.grad[n.w].ptr();
                for (int s = 0; s < N; ++s) {
                    const T* xin =
                        x.ptr() + static_cast<std::size_t>(s) * ic * h * w;
                    const T* dout = dy.ptr() +
                                    static_cast<std::size_t>(s) * oc * oh * ow;
                    T* dxin =
                        dx.ptr() + static_cast<std::size_t>(s) * ic * h * w;
                    for (int g = 0; g < n.groups; ++g) {
                        detail::im2col(xin, g * icg, icg, h, w, n, oh, ow,
                                       col.data());
                        detail::ConstMatMap<T> cmat(col.data(),
                                                    icg * n.kh * n.kw,
                                                    oh * ow);
                        detail::ConstMatMap<T> dymat(
                            dout + static_cast<std::size_t>(g) * ocg * oh * ow,
                            ocg, oh * ow);
                        detail::MatMap<T> dwmat(
                            dwp + static_cast<std::size_t>(g) * ocg * icg *
                                      n.kh * n.kw,
                            ocg, icg * n.kh * n.kw);
                        dwmat.noalias() += dymat * cmat.transpose();
                        detail::ConstMatMap<T> wmat(
                            wp + static_cast<std::size_t>(g) * ocg * icg *
                                     n.kh * n.kw,
                            ocg, icg * n.kh * n.kw);
                        detail::MatMap<T> dcmat(dcol.data(),
                                                icg * n.kh * n.kw, oh * ow);
                        dcmat.noalias() = wmat.transpose() * dymat;
                        detail::col2im_add(dcol.data(), g * icg, icg, h, w, n,
                                           oh, ow, dxin);
                    }
                }
                if (n.has_bias) {
                    T* dbp = store.grad[n.b].ptr();
                    for (int s = 0; s < N; ++s)
                        for (int c = 0; c < oc; ++c) {
                            const T* plane =
                                dy.ptr() +
                                (static_cast<std::size_t>(s) * oc + c) * oh *
                                    ow;
                            T sum = T(0);
                            for (int i = 0; i < oh * ow; ++i) sum += plane[i];
                            dbp[c] += sum;
                        }
                }
                break;
            }

            case Op::batchnorm: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const int c = n.out_shape[0];
                const int hw = n.out_shape.size() == 3
                                   ? n.out_shape[1] * n.out_shape[2]
                                   : 1;
                const T* gamma = store.value[n.gamma].ptr();
                const T* mean = store.value[n.mean].ptr();
                const T* var = store.value[n.var].ptr();
                T* dgamma = store.grad[n.gamma].ptr();
                T* dbeta = store.grad[n.beta].ptr();
                for (int s = 0; s < N; ++s)
                    for (int ci = 0; ci < c; ++ci) {
                        const T inv_std =
                            T(1) / std::sqrt(var[ci] + T(1e-5));
                        const T scale = gamma[ci] * inv_std;
                        const std::size_t base =
                            (static_cast<std::size_t>(s) * c + ci) * hw;
                        for (int i = 0; i < hw; ++i) {
                            const T g = dy.data[base + i];
                            dx.data[base + i] += g * scale;
                            dgamma[ci] += g * (x.data[base + i] - mean[ci]) *
                                          inv_std;
                            dbeta[ci] += g;
                        }
                    }
                break;
            }

            case Op::relu:
            case Op::relu6: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const Tensor<T>& y = ws.act[ri];
                if (n.op == Op::relu) {
                    for (std::size_t i = 0; i < dx.data.size(); ++i)
                        if (y.data[i] > T(0)) dx.data[i] += dy.data[i];
                } else {
                    for (std::size_t i = 0; i < dx.data.size(); ++i)
                        if (y.data[i] > T(0) && y.data[i] < T(6))
                            dx.data[i] += dy.data[i];
                }
                break;
            }

            case Op::maxpool: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const auto& arg = ws.argmax[ri];
                for (std::size_t i = 0; i < dy.data.size(); ++i)
                    if (arg[i] >= 0) dx.data[static_cast<std::size_t>(
                        arg[i])] += dy.data[i];
                break;
            }

            case Op::avgpool: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int c = ishape[0], h = ishape[1], w = ishape[2];
                const int oh = n.out_shape[1], ow = n.out_shape[2];
                std::size_t oi = 0;
                for (int s = 0; s < N; ++s)
                    for (int ci = 0; ci < c; ++ci) {
                        T* dplane =
                            dx.ptr() +
                            (static_cast<std::size_t>(s) * c + ci) * h * w;
                        for (int oy = 0; oy < oh; ++oy)
                            for (int ox = 0; ox < ow; ++ox, ++oi) {
                                int count = 0;
                                for (int ky = 0; ky < n.kh; ++ky) {
                                    const int iy = oy * n.sh - n.pt + ky;
                                    if (iy < 0 || iy >= h) continue;
                                    for (int kx = 0; kx < n.kw; ++kx) {
                                        const int ix = ox * n.sw - n.pl + kx;
                                        if (ix >= 0 && ix < w) ++count;
                                    }
                                }
                                if (!count) continue;
                                const T share =
                                    dy.data[oi] / static_cast<T>(count);
                                for (int ky = 0; ky < n.kh; ++ky) {
                                    const int iy = oy * n.sh - n.pt + ky;
                                    if (iy < 0 || iy >= h) continue;
                                    for (int kx = 0; kx < n.kw; ++kx) {
                                        const int ix = ox * n.sw - n.pl + kx;
                                        if (ix >= 0 && ix < w)
                                            dplane[iy * w + ix] += share;
                                    }
                                }
                            }
                    }
                break;
            }

            case Op::global_avgpool: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const auto& ishape = def.nodes[n.inputs[0]].out_shape;
                const int c = ishape[0];
                const int hw = ishape[1] * ishape[2];
                for (int s = 0; s < N; ++s)
                    for (int ci = 0; ci < c; ++ci) {
                        const T share =
                            dy.data[static_cast<std::size_t>(s) * c + ci] /
                            static_cast<T>(hw);
                        T* dplane =
                            dx.ptr() +
                            (static_cast<std::size_t>(s) * c + ci) * hw;
                        for (int i = 0; i < hw; ++i) dplane[i] += share;
                    }
                break;
            }

            case Op::dense: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const Tensor<T>& x = ws.act[n.inputs[0]];
                const int in_f = def.nodes[n.inputs[0]].out_shape[0];
                const int units = n.out_shape[0];
                detail::ConstMatMap<T> dym(dy.ptr(), N, units);
                detail::ConstMatMap<T> xm(x.ptr(), N, in_f);
                detail::MatMap<T> dwm(store.grad[n.w].ptr(), units, in_f);
                dwm.noalias() += dym.transpose() * xm;
                detail::ConstMatMap<T> wm(store.value[n.w].ptr(), units, in_f);
                detail::MatMap<T> dxm(dx.ptr(), N, in_f);
                dxm.noalias() += dym * wm;
                if (n.has_bias) {
                    T* dbp = store.grad[n.b].ptr();
                    for (int s = 0; s < N; ++s)
                        for (int u = 0; u < units; ++u)
                            dbp[u] +=
                                dy.data[static_cast<std::size_t>(s) * units +
                                        u];
                }
                break;
            }

            case Op::flatten: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                for (std::size_t i = 0; i < dy.data.size(); ++i)
                    dx.data[i] += dy.data[i];
                break;
            }

            case Op::add: {
                for (int src : n.inputs) {
                    Tensor<T>& dx = ws.grad[src];
                    for (std::size_t i = 0; i < dy.data.size(); ++i)
                        dx.data[i] += dy.data[i];
                }
                break;
            }

            case Op::concat: {
                const int hw = n.out_shape[1] * n.out_shape[2];
                const int oc = n.out_shape[0];
                int c_off = 0;
                for (int src : n.inputs) {
                    Tensor<T>& dx = ws.grad[src];
                    const int sc = def.nodes[src].out_shape[0];
                    for (int s = 0; s < N; ++s) {
                        const T* from =
                            dy.ptr() +
                            (static_cast<std::size_t>(s) * oc + c_off) * hw;
                        T* to =
                            dx.ptr() + static_cast<std::size_t>(s) * sc * hw;
                        for (int i = 0; i < sc * hw; ++i) to[i] += from[i];
                    }
                    c_off += sc;
                }
                break;
            }

            case Op::dropout: {
                Tensor<T>& dx = ws.grad[n.inputs[0]];
                const auto& mask = ws.mask[ri];
                if (mask.empty()) {
                    for (std::size_t i = 0; i < dy.data.size(); ++i)
                        dx.data[i] += dy.data[i];
                } else {
                    for (std::size_t i = 0; i < dy.data.size(); ++i)
                        dx.data[i] += dy.data[i] * mask[i];
                }
                break;
            }
        }
    }
}

/// Row-wise softmax of a (N, K) logits tensor.
template <typename T>
inline Tensor<T> softmax_rows(const Tensor<T>& logits) {
    Tensor<T> probs = logits;
    const int N = logits.shape[0];
    const int K = logits.shape[1];
    for (int s = 0; s < N; ++s) {
        T* row = probs.ptr() + static_cast<std::size_t>(s) * K;
        const T m = *std::max_element(row, row + K);
        T z = T(0);
        for (int k = 0; k < K; ++k) {
            row[k] = std::exp(row[k] - m);
            z += row[k];
        }
        for (int k = 0; k < K; ++k) row[k] /= z;
    }
    return probs;
}

/// Mean cross-entropy of softmax(logits) against integer labels, plus the
/// gradient w.r.t. the logits.
template <typename T>
struct LossResult {
    double loss = 0.0;
    Tensor<T> dlogits;
    Tensor<T> probs;
};

template <typename T>
inline LossResult<T> softmax_cross_entropy(const Tensor<T>& logits,
                                           const std::vector<int>& labels) {
    const int N = logits.shape[0];
    const int K = logits.shape[1];
    if (static_cast<int>(labels.size()) != N)
        throw InputMismatchError("labels do not match the batch");
    LossResult<T> res;
    res.probs = softmax_rows(logits);
    res.dlogits = Tensor<T>(logits.shape);
    double total = 0.0;
    for (int s = 0; s < N; ++s) {
        const T* p = res.probs.ptr() + static_cast<std::size_t>(s) * K;
        T* d = res.dlogits.ptr() + static_cast<std::size_t>(s) * K;
        const int y = labels[s];
        if (y < 0 || y >= K) throw InputMismatchError("label out of range");
        total += -std::log(std::max(static_cast<double>(p[y]), 1e-300));
        for (int k = 0; k < K; ++k)
            d[k] = (p[k] - (k == y ? T(1) : T(0))) / static_cast<T>(N);
    }
    res.loss = total / N;
    return res;
}

/// SGD with classical momentum; skips non-trainable parameters.
template <typename T>
class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum, double weight_decay = 0.0)
        : lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {}

    void step(ParameterStore<T>& store) {
        if (velocity_.size() != store.value.size()) {
            velocity_.clear();
            for (const auto& v : store.value)
                velocity_.emplace_back(v.shape);
        }
        for (std::size_t i = 0; i < store.value.size(); ++i) {
            if (!store.trainable[i]) continue;
            auto& v = velocity_[i];
            auto& w = store.value[i];
            const auto& g = store.grad[i];
            for (std::size_t j = 0; j < w.data.size(); ++j) {
                const T grad = g.data[j] +
                               static_cast<T>(weight_decay_) * w.data[j];
                v.data[j] = static_cast<T>(momentum_) * v.data[j] -
                            static_cast<T>(lr_) * grad;
                w.data[j] += v.data[j];
            }
        }
    }

private:
    double lr_, momentum_, weight_decay_;
    std::vector<Tensor<T>> velocity_;
};

/// Adam with bias correction; skips non-trainable parameters.
template <typename T>
class Adam {
public:
    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8, double weight_decay = 0.0)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
          weight_decay_(weight_decay) {}

    void step(ParameterStore<T>& store) {
        if (m_.size() != store.value.size()) {
            m_.clear();
            v_.clear();
            for (const auto& w : store.value) {
                m_.emplace_back(w.shape);
                v_.emplace_back(w.shape);
            }
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t i = 0; i < store.value.size(); ++i) {
            if (!store.trainable[i]) continue;
            auto& w = store.value[i];
            const auto& g = store.grad[i];
            for (std::size_t j = 0; j < w.data.size(); ++j) {
                const double grad = static_cast<double>(g.data[j]) +
                                    weight_decay_ * w.data[j];
                auto& mj = m_[i].data[j];
                auto& vj = v_[i].data[j];
                mj = static_cast<T>(beta1_ * mj + (1.0 - beta1_) * grad);
                vj = static_cast<T>(beta2_ * vj +
                                    (1.0 - beta2_) * grad * grad);
                const double mhat = mj / bc1;
                const double vhat = vj / bc2;
                w.data[j] -= static_cast<T>(lr_ * mhat /
                                            (std::sqrt(vhat) + eps_));
            }
        }
    }

private:
    double lr_, beta1_, beta2_, eps_, weight_decay_;
    std::int64_t t_ = 0;
    std::vector<Tensor<T>> m_, v_;
};

}  // namespace candling::nn

#endif  // CANDLING_NN_HPP
