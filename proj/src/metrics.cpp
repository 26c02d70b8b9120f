#include "hybridclf/metrics.hpp"

#include "hybridclf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hybridclf {

int predicted_class(const std::array<double, 2>& probs) { return probs[1] > probs[0] ? 1 : 0; }

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool pred = predictions[i] == 1;
        const bool truth = labels[i] == 1;
        if (pred && truth) ++c.tp;
        else if (pred) ++c.fp;
        else if (truth) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f1_from(double precision, double recall) {
    const double s = precision + recall;
    return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

ScalarMetrics scalar_metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw DegenerateInputError("scalar_metrics: no samples");
    ScalarMetrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = f1_from(m.precision, m.recall);
    return m;
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ShapeError("roc_auc: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
    }
    std::size_t pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DegenerateInputError("roc_auc: non-finite score");
        if (labels[i] == 1) ++pos;
    }
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw UndefinedMetricError("roc_auc: labels contain a single class");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult r;
    r.curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
        }
        r.curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                  static_cast<double>(tp) / static_cast<double>(pos)});
    }
    // Integrate in counts to keep the sum exact until the final division.
    double area = 0.0;
    std::size_t prev_tp = 0, prev_fp = 0;
    tp = fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
        }
        area += static_cast<double>(fp - prev_fp) * static_cast<double>(tp + prev_tp);
        prev_tp = tp;
        prev_fp = fp;
    }
    r.auc = area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return r;
}

MetricsReport make_report(std::span<const std::array<double, 2>> probs, std::span<const int> labels) {
    if (probs.size() != labels.size()) {
        throw ShapeError("make_report: " + std::to_string(probs.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
    }
    std::vector<int> preds;
    std::vector<double> scores;
    for (const auto& p : probs) {
        preds.push_back(predicted_class(p));
        scores.push_back(p[1]);
    }
    MetricsReport r;
    r.counts = confusion(preds, labels);
    const ScalarMetrics s = scalar_metrics(r.counts);
    r.accuracy = s.accuracy;
    r.precision = s.precision;
    r.recall = s.recall;
    r.f1 = s.f1;
    try {
        RocResult roc = roc_auc(scores, labels);
        r.auc = roc.auc;
        r.roc = std::move(roc.curve);
    } catch (const UndefinedMetricError&) {
        r.auc.reset();
    }
    return r;
}

nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}};
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
    nlohmann::json roc = nlohmann::json::array();
    for (const auto& p : r.roc.points) roc.push_back({p.fpr, p.tpr});
    j["roc"] = std::move(roc);
    return j;
}

MetricsReport report_from_json(const nlohmann::json& j) {
    try {
        MetricsReport r;
        const auto& c = j.at("counts");
        r.counts = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                    c.at("tn").get<std::size_t>()};
        r.accuracy = j.at("accuracy").get<double>();
        r.precision = j.at("precision").get<double>();
        r.recall = j.at("recall").get<double>();
        r.f1 = j.at("f1").get<double>();
        if (!j.at("auc").is_null()) r.auc = j.at("auc").get<double>();
        for (const auto& p : j.at("roc")) r.roc.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("metrics report: ") + e.what());
    }
}

std::string roc_to_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : curve.points) {
        out += nlohmann::json(p.fpr).dump();
        out += ',';
        out += nlohmann::json(p.tpr).dump();
        out += '\n';
    }
    return out;
}

std::optional<double> metric_value(const MetricsReport& r, std::size_t index) {
    switch (index) {
        case 0: return r.accuracy;
        case 1: return r.precision;
        case 2: return r.recall;
        case 3: return r.f1;
        case 4: return r.auc;
        default: throw ConfigError("metric index out of range");
    }
}

namespace {

// Values of one metric across reports, absent if any report lacks it.
std::optional<std::vector<double>> column(std::span<const MetricsReport> reports, std::size_t m) {
    std::vector<double> v;
    for (const auto& r : reports) {
        const auto x = metric_value(r, m);
        if (!x) return std::nullopt;
        v.push_back(*x);
    }
    return v;
}

// Mean taken relative to the first value, so identical inputs give that value exactly.
double shifted_mean(const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d += x - v.front();
    return v.front() + d / static_cast<double>(v.size());
}

}  // namespace

CorrelationMatrix metric_correlation(std::span<const MetricsReport> reports) {
    if (reports.size() < 2) throw DegenerateInputError("metric_correlation needs at least 2 reports");
    std::array<std::optional<std::vector<double>>, 5> centered;
    std::array<double, 5> ss{};
    for (std::size_t m = 0; m < 5; ++m) {
        auto col = column(reports, m);
        if (!col) continue;
        const double mean = shifted_mean(*col);
        double s = 0.0;
        for (double& x : *col) {
            x -= mean;
            s += x * x;
        }
        if (s > 0.0) {
            centered[m] = std::move(col);
            ss[m] = s;
        }
    }
    CorrelationMatrix out;
    for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = 0; b < 5; ++b) {
            if (!centered[a] || !centered[b]) continue;
            if (a == b) {
                out.values[a][b] = 1.0;
                continue;
            }
            double cross = 0.0;
            for (std::size_t i = 0; i < reports.size(); ++i) cross += (*centered[a])[i] * (*centered[b])[i];
            const double r = cross / std::sqrt(ss[a] * ss[b]);
            out.values[a][b] = std::clamp(r, -1.0, 1.0);
        }
    }
    return out;
}

nlohmann::json correlation_to_json(const CorrelationMatrix& m) {
    nlohmann::json j;
    j["metrics"] = kMetricNames;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : m.values) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        rows.push_back(std::move(r));
    }
    j["matrix"] = std::move(rows);
    return j;
}

std::array<MetricSummary, 5> aggregate(std::span<const MetricsReport> reports) {
    std::array<MetricSummary, 5> out{};
    for (std::size_t m = 0; m < 5; ++m) {
        std::vector<double> v;
        for (const auto& r : reports)
            if (auto x = metric_value(r, m)) v.push_back(*x);
        if (v.empty()) continue;
        const double n = static_cast<double>(v.size());
        const double mean = shifted_mean(v);
        double s = 0.0;
        for (double x : v) s += (x - mean) * (x - mean);
        out[m].mean = mean;
        out[m].std = std::sqrt(s / n);
    }
    return out;
}

}  // namespace hybridclf
