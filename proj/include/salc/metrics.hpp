#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "salc/core.hpp"

namespace salc::metrics {

/// Two score vectors aligned by instance id. Filtering of unparseable
/// instances happens upstream; samples here must be complete.
struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;
};

struct AgreementResult {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

struct OverlapScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Product-moment correlation. Throws ZeroVariance when either vector is
/// constant, LengthMismatch / EmptyInput on malformed samples.
double pearson(const PairedSample& sample);

/// Pearson over average ranks (ties share the mean of their rank block).
double spearman(const PairedSample& sample);

/// Tau-b: (C - D) / sqrt((n0 - n1)(n0 - n2)) with tie corrections n1, n2.
/// Throws AllTied when either vector is entirely tied.
double kendall_tau_b(const PairedSample& sample);

/// Accuracy plus macro-F1 over the classes {A, B}. A Tie prediction never
/// matches gold and contributes no true positive to either class.
AgreementResult preference_agreement(const std::vector<Preference>& predictions,
                                     const std::vector<Preference>& gold);

/// Lowercased, whitespace-split tokens with trailing punctuation stripped;
/// tokens that strip to nothing are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// Clipped n-gram overlap. Empty or too-short texts yield all zeros.
OverlapScore rouge_n(std::string_view candidate, std::string_view reference, int n);

/// Longest-common-subsequence overlap on tokens.
OverlapScore rouge_l(std::string_view candidate, std::string_view reference);

/// Geometric mean of clipped n-gram precisions up to max_n with brevity
/// penalty. Zero unigram overlap yields exactly 0; a zero precision at
/// higher order is smoothed to kBleuEpsilon so one missing 4-gram does not
/// null the whole score.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

inline constexpr double kBleuEpsilon = 1e-9;

}  // namespace salc::metrics
