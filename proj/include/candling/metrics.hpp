// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_METRICS_HPP
#define CANDLING_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/errors.hpp"
#include "candling/label.hpp"

namespace candling {

/**
 * @brief A metric that is either a real value in [0, 1] or undefined.
 *
 * Zero-denominator cases are carried explicitly rather than as quiet NaN so
 * serialization and aggregation stay portable. Tables render undefined
 * values as the literal string "NaN"; JSON renders value null with
 * "defined": false.
 */
struct MetricValue {
    double value = 0.0;
    bool defined = false;

    static MetricValue some(double v) { return {v, true}; }
    static MetricValue undefined() { return {0.0, false}; }

    bool operator==(const MetricValue& o) const {
        if (defined != o.defined) return false;
        return !defined || value == o.value;
    }
};

/// 2x2 contingency counts with fertile as the positive class.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    std::int64_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(const std::vector<Label>& labels,
                                 const std::vector<Label>& predictions) {
    if (labels.size() != predictions.size())
        throw InputMismatchError("labels and predictions differ in length");
    if (labels.empty()) throw EmptyInputError("no samples to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool actual = labels[i] == Label::fertile;
        const bool pred = predictions[i] == Label::fertile;
        if (actual && pred)
            ++cm.tp;
        else if (!actual && !pred)
            ++cm.tn;
        else if (!actual && pred)
            ++cm.fp;
        else
            ++cm.fn;
    }
    return cm;
}

namespace detail {
inline MetricValue ratio(std::int64_t num, std::int64_t den) {
    if (den == 0) return MetricValue::undefined();
    return MetricValue::some(static_cast<double>(num) /
                             static_cast<double>(den));
}
}  // namespace detail

inline MetricValue accuracy(const ConfusionMatrix& cm) {
    return detail::ratio(cm.tp + cm.tn, cm.total());
}

inline MetricValue sensitivity(const ConfusionMatrix& cm) {
    return detail::ratio(cm.tp, cm.tp + cm.fn);
}

/// The paper's tables call sensitivity "Recall"; same quantity.
inline MetricValue recall(const ConfusionMatrix& cm) {
    return sensitivity(cm);
}

inline MetricValue specificity(const ConfusionMatrix& cm) {
    return detail::ratio(cm.tn, cm.tn + cm.fp);
}

inline MetricValue precision(const ConfusionMatrix& cm) {
    return detail::ratio(cm.tp, cm.tp + cm.fp);
}

/**
 * @brief Area under the ROC curve by trapezoidal sweep over thresholds.
 *
 * Scores sharing a value move along the curve as one group, which makes the
 * result equal the tie-adjusted concordance probability: P(score+ > score-)
 * + 0.5 P(tie). Undefined when either class is absent.
 */
inline MetricValue auc(const std::vector<Label>& labels,
                       const std::vector<double>& scores) {
    if (labels.size() != scores.size())
        throw InputMismatchError("labels and scores differ in length");
    std::int64_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < 0.0 || scores[i] > 1.0)
            throw InputMismatchError("score outside [0, 1]");
        (labels[i] == Label::fertile ? pos : neg)++;
    }
    if (pos == 0 || neg == 0) return MetricValue::undefined();

    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    // Walk thresholds from high to low; each tie group contributes one
    // trapezoid in (FP, TP) count space. Area stays exact in doubles for
    // any realistic sample count.
    double area2 = 0.0;  // twice the area, in count units
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::int64_t dtp = 0, dfp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == Label::fertile ? dtp : dfp)++;
            ++j;
        }
        area2 += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
        tp += dtp;
        fp += dfp;
        i = j;
    }
    return MetricValue::some(area2 /
                             (2.0 * static_cast<double>(pos) *
                              static_cast<double>(neg)));
}

/// Everything the pipeline reports for one model on one split.
struct MetricsReport {
    std::string backbone;
    std::string split;
    std::int64_t n = 0;
    ConfusionMatrix cm;
    MetricValue auc;
    MetricValue accuracy;
    MetricValue recall;
    MetricValue specificity;
    MetricValue precision;
};

inline MetricsReport evaluate(const std::vector<Label>& labels,
                              const std::vector<Label>& predictions,
                              const std::vector<double>& scores) {
    if (labels.size() != scores.size())
        throw InputMismatchError("labels and scores differ in length");
    MetricsReport r;
    r.cm = confusion(labels, predictions);
    r.n = static_cast<std::int64_t>(labels.size());
    r.auc = candling::auc(labels, scores);
    r.accuracy = candling::accuracy(r.cm);
    r.recall = candling::recall(r.cm);
    r.specificity = candling::specificity(r.cm);
    r.precision = candling::precision(r.cm);
    return r;
}

/**
 * @brief Mean of several metric values.
 *
 * By default an undefined input makes the mean undefined (NaN propagation);
 * with skip_undefined the mean runs over the defined subset, undefined only
 * when that subset is empty.
 */
inline MetricValue mean_metric(const std::vector<MetricValue>& values,
                               bool skip_undefined = false) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (const auto& v : values) {
        if (!v.defined) {
            if (!skip_undefined) return MetricValue::undefined();
            continue;
        }
        sum += v.value;
        ++count;
    }
    if (count == 0) return MetricValue::undefined();
    return MetricValue::some(sum / static_cast<double>(count));
}

inline nlohmann::json metric_to_json(const MetricValue& v) {
    nlohmann::json j;
    j["value"] = v.defined ? nlohmann::json(v.value) : nlohmann::json(nullptr);
    j["defined"] = v.defined;
    return j;
}

inline MetricValue metric_from_json(const nlohmann::json& j) {
    if (!j.value("defined", false) || j.at("value").is_null())
        return MetricValue::undefined();
    return MetricValue::some(j.at("value").get<double>());
}

inline nlohmann::json report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["backbone"] = r.backbone;
    j["split"] = r.split;
    j["n"] = r.n;
    j["cm"] = {{"tp", r.cm.tp}, {"tn", r.cm.tn}, {"fp", r.cm.fp},
               {"fn", r.cm.fn}};
    j["auc"] = metric_to_json(r.auc);
    j["accuracy"] = metric_to_json(r.accuracy);
    j["recall"] = metric_to_json(r.recall);
    j["specificity"] = metric_to_json(r.specificity);
    j["precision"] = metric_to_json(r.precision);
    return j;
}

inline MetricsReport report_from_json(const nlohmann::json& j) {
    MetricsReport r;
    r.backbone = j.at("backbone").get<std::string>();
    r.split = j.at("split").get<std::string>();
    r.n = j.at("n").get<std::int64_t>();
    r.cm.tp = j.at("cm").at("tp").get<std::int64_t>();
    r.cm.tn = j.at("cm").at("tn").get<std::int64_t>();
    r.cm.fp = j.at("cm").at("fp").get<std::int64_t>();
    r.cm.fn = j.at("cm").at("fn").get<std::int64_t>();
    r.auc = metric_from_json(j.at("auc"));
    r.accuracy = metric_from_json(j.at("accuracy"));
    r.recall = metric_from_json(j.at("recall"));
    r.specificity = metric_from_json(j.at("specificity"));
    r.precision = metric_from_json(j.at("precision"));
    return r;
}

}  // namespace candling

#endif  // CANDLING_METRICS_HPP
