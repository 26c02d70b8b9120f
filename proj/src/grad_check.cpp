#include "hybridclf/grad_check.hpp"

#include "hybridclf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hybridclf {

GradCheckReport grad_check(const ScalarObjective& objective, const GradientFn& gradient,
                           std::vector<Tensor> point, double eps, double tol,
                           std::vector<std::string> names) {
    if (!(eps > 0.0)) throw ConfigError("grad_check: eps must be positive");
    const std::vector<Tensor> analytic = gradient(point);
    if (analytic.size() != point.size()) {
        throw ShapeError("grad_check: gradient returned " + std::to_string(analytic.size()) +
                         " tensors for " + std::to_string(point.size()) + " inputs");
    }

    GradCheckReport report;
    for (std::size_t p = 0; p < point.size(); ++p) {
        expect_shape(analytic[p], point[p].shape(), "grad_check");
        GradCheckEntry entry;
        entry.name = p < names.size() ? names[p] : "input" + std::to_string(p);
        for (std::size_t i = 0; i < point[p].size(); ++i) {
            const double saved = point[p][i];
            point[p][i] = saved + eps;
            const double up = objective(point);
            point[p][i] = saved - eps;
            const double down = objective(point);
            point[p][i] = saved;

            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[p][i];
            const double rel = std::abs(a - numeric) /
                               std::max({std::abs(a), std::abs(numeric), 1e-8});
            if (i == 0 || rel > entry.max_rel_error) {
                entry.max_rel_error = rel;
                entry.worst_index = i;
                entry.analytic = a;
                entry.numeric = numeric;
            }
        }
        if (report.entries.empty() || entry.max_rel_error > report.max_rel_error) {
            report.max_rel_error = entry.max_rel_error;
            report.worst_name = entry.name;
        }
        report.entries.push_back(std::move(entry));
    }
    report.passed = report.max_rel_error <= tol;
    return report;
}

}  // namespace hybridclf
