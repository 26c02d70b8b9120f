#pragma once

// Dense primitives with explicit backward rules. Every forward checks its
// output for NaN/Inf and throws NumericFault; every shape violation throws
// ShapeError naming the primitive and the offending shapes.

#include "hybridclf/tensor.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace hybridclf::ops {

/// (n x k) * (k x m).
Tensor matmul(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> matmul_backward(const Tensor& a, const Tensor& b, const Tensor& d_out);

Tensor transpose(const Tensor& a);

/// Elementwise a + b. `b` may also have shape a.shape()[1:], in which case it
/// is broadcast over the leading axis of `a`.
Tensor add(const Tensor& a, const Tensor& b);
/// Returns (d_a, d_b); d_b is reduced over the leading axis when broadcast.
std::pair<Tensor, Tensor> add_backward(const Shape& b_shape, const Tensor& d_out);

/// Hadamard product.
Tensor hadamard(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> hadamard_backward(const Tensor& a, const Tensor& b, const Tensor& d_out);

Tensor sigmoid(const Tensor& x);
/// Takes the forward output y.
Tensor sigmoid_backward(const Tensor& y, const Tensor& d_out);

Tensor tanh_activation(const Tensor& x);
Tensor tanh_backward(const Tensor& y, const Tensor& d_out);

Tensor relu(const Tensor& x);
/// Takes the forward input x; the derivative at exactly 0 is taken as 0.
Tensor relu_backward(const Tensor& x, const Tensor& d_out);

/// Numerically stable softmax over the last axis.
Tensor softmax(const Tensor& x);
Tensor softmax_backward(const Tensor& y, const Tensor& d_out);

struct MaxResult {
    Tensor values;                     ///< input shape with `axis` reduced to extent 1
    std::vector<std::size_t> argmax;   ///< position along `axis`, one per output element
};

/// Maximum along `axis`. Ties resolve to the lowest index.
MaxResult max_over_axis(const Tensor& x, std::size_t axis);
Tensor max_over_axis_backward(const Shape& input_shape, std::size_t axis,
                              const std::vector<std::size_t>& argmax, const Tensor& d_out);

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
std::vector<Tensor> concat_backward(const std::vector<Shape>& part_shapes, std::size_t axis,
                                    const Tensor& d_out);

/// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end);
Tensor slice_backward(const Shape& input_shape, std::size_t axis, std::size_t begin,
                      const Tensor& d_out);

}  // namespace hybridclf::ops
