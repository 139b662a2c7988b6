// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_TESTS_SUPPORT_ORACLES_HPP
#define CANDLING_TESTS_SUPPORT_ORACLES_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "candling/label.hpp"
#include "candling/metrics.hpp"

namespace candling::testing {

/// Exact nonnegative rational; the independent evaluator for the metric
/// formulas. Kept deliberately tiny: construct, reduce, compare.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 0;  // den == 0 encodes "undefined"

    static Rational undefined() { return {0, 0}; }
    static Rational of(std::int64_t n, std::int64_t d) {
        if (d == 0) return undefined();
        const auto g = std::gcd(n, d);
        return {g ? n / g : n, g ? d / g : d};
    }
    bool defined() const { return den != 0; }
};

/// True when the library value matches the rational exactly. IEEE division
/// is correctly rounded, so equality against num/den is the right check.
inline bool matches(const candling::MetricValue& v, const Rational& r) {
    if (v.defined != r.defined()) return false;
    if (!r.defined()) return true;
    return v.value == static_cast<double>(r.num) / static_cast<double>(r.den);
}

inline Rational oracle_accuracy(const candling::ConfusionMatrix& cm) {
    return Rational::of(cm.tp + cm.tn, cm.tp + cm.tn + cm.fp + cm.fn);
}
inline Rational oracle_sensitivity(const candling::ConfusionMatrix& cm) {
    return Rational::of(cm.tp, cm.tp + cm.fn);
}
inline Rational oracle_specificity(const candling::ConfusionMatrix& cm) {
    return Rational::of(cm.tn, cm.tn + cm.fp);
}
inline Rational oracle_precision(const candling::ConfusionMatrix& cm) {
    return Rational::of(cm.tp, cm.tp + cm.fp);
}

/// Brute-force tie-adjusted concordance: P(pos outscores neg) + 0.5 P(tie),
/// over all positive/negative pairs. Quadratic, fine at test sizes.
inline candling::MetricValue oracle_auc(
    const std::vector<candling::Label>& labels,
    const std::vector<double>& scores) {
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != candling::Label::fertile) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != candling::Label::infertile) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    if (pairs == 0) return candling::MetricValue::undefined();
    return candling::MetricValue::some(wins / static_cast<double>(pairs));
}

}  // namespace candling::testing

#endif  // CANDLING_TESTS_SUPPORT_ORACLES_HPP
