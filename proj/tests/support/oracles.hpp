#pragma once

// Independent reference implementations the real code is checked against.
// Deliberately written on different routes than the library: direct-formula
// pearson, O(n^2) counting ranks, pairwise tie classification for tau-b,
// plain confusion-matrix agreement, long-double summation for aggregation.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "salc/core.hpp"

namespace salc::test::oracle {

inline std::optional<double> pearson(const std::vector<double>& x,
                                     const std::vector<double>& y) {
    const std::size_t n = x.size();
    long double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
    }
    const long double num = n * sxy - sx * sy;
    const long double den_x = n * sxx - sx * sx;
    const long double den_y = n * syy - sy * sy;
    if (den_x <= 0 || den_y <= 0) return std::nullopt;  // zero variance
    return static_cast<double>(num / std::sqrt(den_x * den_y));
}

// Counting ranks: rank = 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& values) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t smaller = 0, equal = 0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            if (values[j] < values[i]) ++smaller;
            if (values[j] == values[i]) ++equal;
        }
        out[i] = 1.0 + static_cast<double>(smaller) +
                 (static_cast<double>(equal) - 1.0) / 2.0;
    }
    return out;
}

inline std::optional<double> spearman(const std::vector<double>& x,
                                      const std::vector<double>& y) {
    return pearson(ranks(x), ranks(y));
}

// Pairwise classification: both-tied pairs drop out of both denominator legs.
inline std::optional<double> kendall_tau_b(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    long double concordant = 0, discordant = 0, ties_x_only = 0, ties_y_only = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0 && dy == 0) continue;
            if (dx == 0) ++ties_x_only;
            else if (dy == 0) ++ties_y_only;
            else if (dx * dy > 0) ++concordant;
            else ++discordant;
        }
    }
    const long double den = std::sqrt((concordant + discordant + ties_x_only) *
                                      (concordant + discordant + ties_y_only));
    if (den == 0) return std::nullopt;
    return static_cast<double>((concordant - discordant) / den);
}

struct Agreement {
    double accuracy;
    double macro_f1;
};

inline Agreement agreement(const std::vector<Preference>& predictions,
                           const std::vector<Preference>& gold) {
    std::size_t correct = 0;
    // confusion counts per class: [tp, fp, fn]
    long tp_a = 0, fp_a = 0, fn_a = 0, tp_b = 0, fp_b = 0, fn_b = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predictions[i] == gold[i]) ++correct;
        if (gold[i] == Preference::A) {
            predictions[i] == Preference::A ? ++tp_a : ++fn_a;
        } else {
            predictions[i] == Preference::B ? ++tp_b : ++fn_b;
        }
        if (predictions[i] == Preference::A && gold[i] != Preference::A) ++fp_a;
        if (predictions[i] == Preference::B && gold[i] != Preference::B) ++fp_b;
    }
    auto f1 = [](long tp, long fp, long fn) {
        const double denom = 2.0 * tp + fp + fn;
        return denom == 0 ? 0.0 : 2.0 * tp / denom;
    };
    return {static_cast<double>(correct) / static_cast<double>(gold.size()),
            (f1(tp_a, fp_a, fn_a) + f1(tp_b, fp_b, fn_b)) / 2.0};
}

inline double aggregate(const std::vector<int>& scores, const std::vector<double>& weights) {
    long double total = 0;
    for (std::size_t i = scores.size(); i-- > 0;) {  // reverse order on purpose
        total += static_cast<long double>(weights[i]) * scores[i];
    }
    return static_cast<double>(total);
}

}  // namespace salc::test::oracle
