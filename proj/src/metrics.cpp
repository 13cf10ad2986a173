#include "salc/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>

namespace salc::metrics {

namespace {

void check_sample(const PairedSample& sample) {
    if (sample.x.empty() || sample.y.empty()) {
        throw Error(ErrorCode::EmptyInput, "correlation sample is empty");
    }
    if (sample.x.size() != sample.y.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(sample.x.size()) + " vs " + std::to_string(sample.y.size()));
    }
    if (sample.x.size() < 2) {
        throw Error(ErrorCode::EmptyInput, "correlation needs at least two points");
    }
}

// Average ranks, 1-based; tied values share the mean rank of their block.
std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

// Sum over tie groups of t*(t-1)/2.
double tie_pair_count(const std::vector<double>& values) {
    std::map<double, std::size_t> groups;
    for (double v : values) ++groups[v];
    double total = 0.0;
    for (const auto& [value, count] : groups) {
        (void)value;
        total += static_cast<double>(count) * static_cast<double>(count - 1) / 2.0;
    }
    return total;
}

struct NGramCounts {
    std::map<std::vector<std::string>, int> counts;
    int total = 0;
};

NGramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
    NGramCounts out;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
        ++out.counts[std::move(gram)];
        ++out.total;
    }
    return out;
}

int clipped_overlap(const NGramCounts& candidate, const NGramCounts& reference) {
    int overlap = 0;
    for (const auto& [gram, count] : candidate.counts) {
        auto it = reference.counts.find(gram);
        if (it != reference.counts.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

OverlapScore prf(int overlap, int candidate_total, int reference_total) {
    OverlapScore score;
    if (candidate_total > 0) score.precision = static_cast<double>(overlap) / candidate_total;
    if (reference_total > 0) score.recall = static_cast<double>(overlap) / reference_total;
    if (score.precision + score.recall > 0.0) {
        score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
    }
    return score;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

double pearson(const PairedSample& sample) {
    check_sample(sample);
    const std::size_t n = sample.x.size();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += sample.x[i];
        mean_y += sample.y[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = sample.x[i] - mean_x;
        const double dy = sample.y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) {
        throw Error(ErrorCode::ZeroVariance, "constant vector has no defined correlation");
    }
    return cov / std::sqrt(var_x * var_y);
}

double spearman(const PairedSample& sample) {
    check_sample(sample);
    PairedSample ranked{average_ranks(sample.x), average_ranks(sample.y)};
    return pearson(ranked);
}

double kendall_tau_b(const PairedSample& sample) {
    check_sample(sample);
    const std::size_t n = sample.x.size();

    double concordant = 0.0, discordant = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = sample.x[i] - sample.x[j];
            const double dy = sample.y[i] - sample.y[j];
            const double prod = dx * dy;
            if (prod > 0.0) ++concordant;
            else if (prod < 0.0) ++discordant;
        }
    }

    const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double n1 = tie_pair_count(sample.x);
    const double n2 = tie_pair_count(sample.y);
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (denom == 0.0) {
        throw Error(ErrorCode::AllTied, "tau-b undefined when a whole vector is tied");
    }
    return (concordant - discordant) / denom;
}

AgreementResult preference_agreement(const std::vector<Preference>& predictions,
                                     const std::vector<Preference>& gold) {
    if (predictions.empty() || gold.empty()) {
        throw Error(ErrorCode::EmptyInput, "agreement over empty prediction list");
    }
    if (predictions.size() != gold.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(predictions.size()) + " vs " + std::to_string(gold.size()));
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] == Preference::Tie) {
            throw Error(ErrorCode::SchemaError, "gold preferences must be A or B");
        }
        if (predictions[i] == gold[i]) ++correct;
    }

    auto f1_for = [&](Preference cls) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (predictions[i] == cls && gold[i] == cls) ++tp;
            else if (predictions[i] == cls) ++fp;
            else if (gold[i] == cls) ++fn;
        }
        const double denom = 2.0 * tp + fp + fn;
        return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
    };

    AgreementResult result;
    result.accuracy = static_cast<double>(correct) / static_cast<double>(gold.size());
    result.macro_f1 = (f1_for(Preference::A) + f1_for(Preference::B)) / 2.0;
    return result;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        while (!current.empty() &&
               std::ispunct(static_cast<unsigned char>(current.back()))) {
            current.pop_back();
        }
        if (!current.empty()) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return tokens;
}

OverlapScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
    if (n < 1) {
        throw Error(ErrorCode::OutOfRange, "rouge-n requires n >= 1");
    }
    const auto cand_counts = ngram_counts(tokenize(candidate), n);
    const auto ref_counts = ngram_counts(tokenize(reference), n);
    return prf(clipped_overlap(cand_counts, ref_counts), cand_counts.total, ref_counts.total);
}

OverlapScore rouge_l(std::string_view candidate, std::string_view reference) {
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    const auto lcs = static_cast<int>(lcs_length(cand, ref));
    return prf(lcs, static_cast<int>(cand.size()), static_cast<int>(ref.size()));
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
    if (max_n < 1) {
        throw Error(ErrorCode::OutOfRange, "bleu requires max_n >= 1");
    }
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    // Orders beyond the candidate length contribute nothing meaningful.
    const int effective_n = std::min<int>(max_n, static_cast<int>(cand.size()));

    double log_sum = 0.0;
    for (int n = 1; n <= effective_n; ++n) {
        const auto cand_counts = ngram_counts(cand, n);
        const auto ref_counts = ngram_counts(ref, n);
        const int overlap = clipped_overlap(cand_counts, ref_counts);
        if (n == 1 && overlap == 0) return 0.0;
        const double precision =
            overlap > 0 ? static_cast<double>(overlap) / cand_counts.total : kBleuEpsilon;
        log_sum += std::log(precision);
    }
    const double geo_mean = std::exp(log_sum / static_cast<double>(effective_n));

    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return brevity * geo_mean;
}

}  // namespace salc::metrics
