#pragma once

#include "hybridclf/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hybridclf {

/// Worst coordinate found for one input tensor.
struct GradCheckEntry {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_error = 0.0;
    std::string worst_name;
    bool passed = true;
};

using ScalarObjective = std::function<double(const std::vector<Tensor>&)>;
using GradientFn = std::function<std::vector<Tensor>(const std::vector<Tensor>&)>;

/// Compares `gradient(point)` against central differences of `objective`:
/// numeric = (f(x + eps e_i) - f(x - eps e_i)) / (2 eps), and
/// rel = |a - n| / max(|a|, |n|, 1e-8). Passes iff the largest rel <= tol.
/// `objective` must be deterministic.
GradCheckReport grad_check(const ScalarObjective& objective, const GradientFn& gradient,
                           std::vector<Tensor> point, double eps, double tol,
                           std::vector<std::string> names = {});

}  // namespace hybridclf
