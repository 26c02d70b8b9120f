#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hybridclf {

/// Positive class is 1.
struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Argmax of a probability pair; a tie goes to class 0.
int predicted_class(const std::array<double, 2>& probs);

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels);

struct ScalarMetrics {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

/// precision = 0 when tp + fp = 0, recall = 0 when tp + fn = 0, f1 = 0 when
/// precision + recall = 0.
ScalarMetrics scalar_metrics(const ConfusionCounts& counts);

/// Harmonic mean 2PR / (P + R), 0 when P + R = 0.
double f1_from(double precision, double recall);

struct RocPoint {
    double fpr = 0, tpr = 0;
    bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
    std::vector<RocPoint> points;
};

struct RocResult {
    RocCurve curve;
    double auc = 0;
};

/// Thresholds at each distinct score in descending order, tied scores taken
/// as one step. Curve runs from (0,0) to (1,1); AUC by the trapezoidal rule.
/// Throws UndefinedMetricError unless both classes are present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

struct MetricsReport {
    ConfusionCounts counts;
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
    std::optional<double> auc;  ///< absent when the labels hold a single class
    RocCurve roc;
};

/// Builds the full report from positive-class probabilities plus the
/// predicted classes.
MetricsReport make_report(std::span<const std::array<double, 2>> probs, std::span<const int> labels);

nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

/// "fpr,tpr" header then one line per curve point.
std::string roc_to_csv(const RocCurve& curve);

inline constexpr std::array<const char*, 5> kMetricNames{"accuracy", "precision", "recall", "f1", "auc"};

/// Metric value by position in kMetricNames.
std::optional<double> metric_value(const MetricsReport& report, std::size_t index);

struct CorrelationMatrix {
    /// Indexed like kMetricNames. Absent where either metric has zero variance
    /// or is missing from some report.
    std::array<std::array<std::optional<double>, 5>, 5> values{};
};

/// Pearson correlation across reports. Needs at least 2 reports.
CorrelationMatrix metric_correlation(std::span<const MetricsReport> reports);

nlohmann::json correlation_to_json(const CorrelationMatrix& m);

struct MetricSummary {
    std::optional<double> mean, std;  ///< population std; absent if no report has the metric
};

/// Per-metric mean and population standard deviation, indexed like kMetricNames.
std::array<MetricSummary, 5> aggregate(std::span<const MetricsReport> reports);

}  // namespace hybridclf
