#include "hybridclf/ops.hpp"

#include "hybridclf/errors.hpp"

#include <cmath>
#include <string>

namespace hybridclf::ops {

namespace {

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_to_string(a) + " and " +
                     shape_to_string(b));
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
    if (t.rank() != rank) {
        throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                         shape_to_string(t.shape()));
    }
}

// Splits a shape around `axis` into (outer, extent, inner) for strided loops.
struct AxisSplit {
    std::size_t outer = 1;
    std::size_t extent = 1;
    std::size_t inner = 1;
};

AxisSplit split_at(const char* op, const Shape& shape, std::size_t axis) {
    if (axis >= shape.size()) {
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for " + shape_to_string(shape));
    }
    AxisSplit s;
    for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
    s.extent = shape[axis];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
    return s;
}

Tensor checked(Tensor t, const char* op) {
    check_finite(t, op);
    return t;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank("matmul", a, 2);
    require_rank("matmul", b, 2);
    if (a.cols() != b.rows()) shape_fail("matmul", a.shape(), b.shape());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    Tensor out({n, m});
    for (std::size_t i = 0; i < n; ++i) {
        double* o = out.row(i);
        const double* ar = a.row(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ar[p];
            const double* br = b.row(p);
            for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
        }
    }
    return checked(std::move(out), "matmul");
}

std::pair<Tensor, Tensor> matmul_backward(const Tensor& a, const Tensor& b, const Tensor& d_out) {
    expect_shape(d_out, {a.rows(), b.cols()}, "matmul_backward");
    return {matmul(d_out, transpose(b)), matmul(transpose(a), d_out)};
}

Tensor transpose(const Tensor& a) {
    require_rank("transpose", a, 2);
    Tensor out({a.cols(), a.rows()});
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    Tensor out = a;
    if (a.shape() == b.shape()) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
        return checked(std::move(out), "add");
    }
    const Shape tail(a.shape().begin() + (a.rank() ? 1 : 0), a.shape().end());
    if (a.rank() == 0 || b.shape() != tail) shape_fail("add", a.shape(), b.shape());
    const std::size_t inner = b.size();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i % inner];
    return checked(std::move(out), "add");
}

std::pair<Tensor, Tensor> add_backward(const Shape& b_shape, const Tensor& d_out) {
    if (b_shape == d_out.shape()) return {d_out, d_out};
    Tensor d_b(b_shape);
    const std::size_t inner = d_b.size();
    if (inner == 0 || d_out.size() % inner != 0) shape_fail("add_backward", d_out.shape(), b_shape);
    for (std::size_t i = 0; i < d_out.size(); ++i) d_b[i % inner] += d_out[i];
    return {d_out, d_b};
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_fail("hadamard", a.shape(), b.shape());
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return checked(std::move(out), "hadamard");
}

std::pair<Tensor, Tensor> hadamard_backward(const Tensor& a, const Tensor& b, const Tensor& d_out) {
    return {hadamard(d_out, b), hadamard(d_out, a)};
}

Tensor sigmoid(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
    return checked(std::move(out), "sigmoid");
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& d_out) {
    if (y.shape() != d_out.shape()) shape_fail("sigmoid_backward", y.shape(), d_out.shape());
    Tensor out = d_out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i] * (1.0 - y[i]);
    return out;
}

Tensor tanh_activation(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data()) v = std::tanh(v);
    return checked(std::move(out), "tanh");
}

Tensor tanh_backward(const Tensor& y, const Tensor& d_out) {
    if (y.shape() != d_out.shape()) shape_fail("tanh_backward", y.shape(), d_out.shape());
    Tensor out = d_out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= 1.0 - y[i] * y[i];
    return out;
}

Tensor relu(const Tensor& x) {
    Tensor out = x;
    for (double& v : out.data()) v = v < 0.0 ? 0.0 : v;
    return checked(std::move(out), "relu");
}

Tensor relu_backward(const Tensor& x, const Tensor& d_out) {
    if (x.shape() != d_out.shape()) shape_fail("relu_backward", x.shape(), d_out.shape());
    Tensor out = d_out;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!(x[i] > 0.0)) out[i] = 0.0;
    return out;
}

Tensor softmax(const Tensor& x) {
    if (x.rank() == 0) throw ShapeError("softmax: rank-0 input");
    const std::size_t n = x.shape().back();
    if (n == 0) throw ShapeError("softmax: empty last axis");
    Tensor out = x;
    for (std::size_t base = 0; base < out.size(); base += n) {
        double mx = out[base];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, out[base + j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            out[base + j] = std::exp(out[base + j] - mx);
            sum += out[base + j];
        }
        for (std::size_t j = 0; j < n; ++j) out[base + j] /= sum;
    }
    return checked(std::move(out), "softmax");
}

Tensor softmax_backward(const Tensor& y, const Tensor& d_out) {
    if (y.shape() != d_out.shape()) shape_fail("softmax_backward", y.shape(), d_out.shape());
    const std::size_t n = y.shape().back();
    Tensor out(y.shape());
    for (std::size_t base = 0; base < y.size(); base += n) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += y[base + j] * d_out[base + j];
        for (std::size_t j = 0; j < n; ++j) out[base + j] = y[base + j] * (d_out[base + j] - dot);
    }
    return out;
}

MaxResult max_over_axis(const Tensor& x, std::size_t axis) {
    const AxisSplit s = split_at("max_over_axis", x.shape(), axis);
    if (s.extent == 0) throw ShapeError("max_over_axis: empty axis in " + shape_to_string(x.shape()));
    Shape out_shape = x.shape();
    out_shape[axis] = 1;
    MaxResult r{Tensor(out_shape), std::vector<std::size_t>(s.outer * s.inner, 0)};
    for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t base = o * s.extent * s.inner + in;
            std::size_t best = 0;
            double best_v = x[base];
            for (std::size_t a = 1; a < s.extent; ++a) {
                const double v = x[base + a * s.inner];
                if (v > best_v) {
                    best_v = v;
                    best = a;
                }
            }
            r.values[o * s.inner + in] = best_v;
            r.argmax[o * s.inner + in] = best;
        }
    }
    check_finite(r.values, "max_over_axis");
    return r;
}

Tensor max_over_axis_backward(const Shape& input_shape, std::size_t axis,
                              const std::vector<std::size_t>& argmax, const Tensor& d_out) {
    const AxisSplit s = split_at("max_over_axis_backward", input_shape, axis);
    if (d_out.size() != s.outer * s.inner || argmax.size() != d_out.size()) {
        shape_fail("max_over_axis_backward", input_shape, d_out.shape());
    }
    Tensor d_in(input_shape);
    for (std::size_t o = 0; o < s.outer; ++o) {
        for (std::size_t in = 0; in < s.inner; ++in) {
            const std::size_t k = o * s.inner + in;
            d_in[o * s.extent * s.inner + argmax[k] * s.inner + in] += d_out[k];
        }
    }
    return d_in;
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    Shape out_shape = parts.front().shape();
    split_at("concat", out_shape, axis);
    out_shape[axis] = 0;
    for (const Tensor& p : parts) {
        Shape probe = p.shape();
        if (probe.size() != out_shape.size()) shape_fail("concat", parts.front().shape(), p.shape());
        probe[axis] = 0;
        Shape ref = parts.front().shape();
        ref[axis] = 0;
        if (probe != ref) shape_fail("concat", parts.front().shape(), p.shape());
        out_shape[axis] += p.shape()[axis];
    }
    Tensor out(out_shape);
    const AxisSplit s = split_at("concat", out_shape, axis);
    std::size_t offset = 0;
    for (const Tensor& p : parts) {
        const std::size_t ext = p.shape()[axis];
        for (std::size_t o = 0; o < s.outer; ++o)
            for (std::size_t a = 0; a < ext; ++a)
                for (std::size_t in = 0; in < s.inner; ++in)
                    out[(o * s.extent + offset + a) * s.inner + in] = p[(o * ext + a) * s.inner + in];
        offset += ext;
    }
    return out;
}

std::vector<Tensor> concat_backward(const std::vector<Shape>& part_shapes, std::size_t axis,
                                    const Tensor& d_out) {
    std::vector<Tensor> grads;
    std::size_t offset = 0;
    for (const Shape& shape : part_shapes) {
        const std::size_t ext = shape.at(axis);
        grads.push_back(slice(d_out, axis, offset, offset + ext));
        offset += ext;
    }
    if (offset != d_out.shape().at(axis)) shape_fail("concat_backward", part_shapes.front(), d_out.shape());
    return grads;
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
    const AxisSplit s = split_at("slice", x.shape(), axis);
    if (begin > end || end > s.extent) {
        throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of bounds for " + shape_to_string(x.shape()));
    }
    Shape out_shape = x.shape();
    out_shape[axis] = end - begin;
    Tensor out(out_shape);
    const std::size_t ext = end - begin;
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t a = 0; a < ext; ++a)
            for (std::size_t in = 0; in < s.inner; ++in)
                out[(o * ext + a) * s.inner + in] = x[(o * s.extent + begin + a) * s.inner + in];
    return out;
}

Tensor slice_backward(const Shape& input_shape, std::size_t axis, std::size_t begin,
                      const Tensor& d_out) {
    const AxisSplit s = split_at("slice_backward", input_shape, axis);
    const std::size_t ext = d_out.shape().at(axis);
    if (begin + ext > s.extent) shape_fail("slice_backward", input_shape, d_out.shape());
    Tensor d_in(input_shape);
    for (std::size_t o = 0; o < s.outer; ++o)
        for (std::size_t a = 0; a < ext; ++a)
            for (std::size_t in = 0; in < s.inner; ++in)
                d_in[(o * s.extent + begin + a) * s.inner + in] = d_out[(o * ext + a) * s.inner + in];
    return d_in;
}

}  // namespace hybridclf::ops
