#include <doctest.h>

#include <algorithm>

#include "salc/core.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace salc;

namespace {

std::vector<PerCriterionScore> make_scores(const std::vector<int>& values) {
    std::vector<PerCriterionScore> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.push_back({static_cast<int>(i), values[i]});
    }
    return out;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& error) {
        return error.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("aggregate_absolute matches the worked examples") {
    CHECK(aggregate_absolute(make_scores({3}), std::vector<double>{1.0}) == 3.0);
    CHECK(aggregate_absolute(make_scores({5, 3, 4}), std::vector<double>{0.5, 0.3, 0.2}) ==
          doctest::Approx(4.2).epsilon(1e-12));
    CHECK(aggregate_absolute(make_scores({2, 2, 2, 2}),
                             std::vector<double>{0.25, 0.25, 0.25, 0.25}) == 2.0);
}

TEST_CASE("aggregate_absolute rejects bad inputs with typed errors") {
    CHECK(code_of([] {
              aggregate_absolute(make_scores({5, 3}), std::vector<double>{0.5, 0.3});
          }) == ErrorCode::WeightSumError);
    CHECK(code_of([] {
              aggregate_absolute(make_scores({5, 3}), std::vector<double>{1.0});
          }) == ErrorCode::LengthMismatch);
    CHECK(code_of([] {
              aggregate_absolute({}, std::vector<double>{});
          }) == ErrorCode::EmptyCriteria);
    CHECK(code_of([] {
              aggregate_absolute(make_scores({5, 3}), std::vector<double>{1.5, -0.5});
          }) == ErrorCode::OutOfRange);
    CHECK(code_of([] {
              aggregate_absolute(make_scores({6}), std::vector<double>{1.0});
          }) == ErrorCode::OutOfRange);
    CHECK(code_of([] {
              aggregate_absolute(make_scores({0}), std::vector<double>{1.0});
          }) == ErrorCode::OutOfRange);
}

TEST_CASE("aggregate_relative worked examples and symmetry") {
    auto [a, b] = aggregate_relative(make_scores({4}), make_scores({2}),
                                     std::vector<double>{1.0}, std::vector<double>{1.0});
    CHECK(a == 4.0);
    CHECK(b == 2.0);

    auto [sa, sb] = aggregate_relative(make_scores({5, 4}), make_scores({3, 5}),
                                       std::vector<double>{0.6, 0.4},
                                       std::vector<double>{0.5, 0.5});
    CHECK(sa == doctest::Approx(4.6).epsilon(1e-12));
    CHECK(sb == doctest::Approx(4.0).epsilon(1e-12));

    auto [ea, eb] = aggregate_relative(make_scores({5, 4}), make_scores({5, 4}),
                                       std::vector<double>{0.6, 0.4},
                                       std::vector<double>{0.6, 0.4});
    CHECK(ea == eb);
}

TEST_CASE("induce_preference covers all three outcomes") {
    CHECK(induce_preference(4.2, 3.1) == Preference::A);
    CHECK(induce_preference(1.0, 5.0) == Preference::B);
    CHECK(induce_preference(3.0, 3.0) == Preference::Tie);
}

TEST_CASE("induce_preference is a mirror under argument swap") {
    test::Rng rng(0x5eed001);
    for (int i = 0; i < 300; ++i) {
        const double a = 1.0 + 4.0 * rng.unit();
        const double b = 1.0 + 4.0 * rng.unit();
        const Preference forward = induce_preference(a, b);
        const Preference backward = induce_preference(b, a);
        if (forward == Preference::Tie) {
            CHECK(backward == Preference::Tie);
        } else {
            CHECK(forward != backward);
        }
    }
}

TEST_CASE("aggregation properties: permutation invariance, bounds, pairing") {
    test::Rng rng(0x5eed002);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = rng.range(1, 8);
        std::vector<int> raw_scores;
        std::vector<double> weights(static_cast<std::size_t>(n));
        double total = 0;
        for (int j = 0; j < n; ++j) {
            raw_scores.push_back(rng.range(1, 5));
            weights[static_cast<std::size_t>(j)] = rng.unit() + 1e-6;
            total += weights[static_cast<std::size_t>(j)];
        }
        for (auto& w : weights) w /= total;

        const auto scores = make_scores(raw_scores);
        const double value = aggregate_absolute(scores, weights);

        CHECK(value == doctest::Approx(test::oracle::aggregate(raw_scores, weights))
                           .epsilon(1e-12));

        const int lo = *std::min_element(raw_scores.begin(), raw_scores.end());
        const int hi = *std::max_element(raw_scores.begin(), raw_scores.end());
        CHECK(value >= static_cast<double>(lo) - 1e-12);
        CHECK(value <= static_cast<double>(hi) + 1e-12);
        CHECK(value >= 1.0 - 1e-12);
        CHECK(value <= 5.0 + 1e-12);

        // simultaneous permutation
        std::vector<std::size_t> perm(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < perm.size(); ++j) perm[j] = j;
        for (std::size_t j = perm.size(); j > 1; --j) {
            std::swap(perm[j - 1], perm[static_cast<std::size_t>(rng.range(0, static_cast<int>(j) - 1))]);
        }
        std::vector<int> perm_scores;
        std::vector<double> perm_weights;
        for (std::size_t j : perm) {
            perm_scores.push_back(raw_scores[j]);
            perm_weights.push_back(weights[j]);
        }
        CHECK(aggregate_absolute(make_scores(perm_scores), perm_weights) ==
              doctest::Approx(value).epsilon(1e-12));

        // relative is exactly the pair of absolutes
        const auto [ra, rb] = aggregate_relative(scores, make_scores(perm_scores), weights,
                                                 perm_weights);
        CHECK(ra == aggregate_absolute(scores, weights));
        CHECK(rb == aggregate_absolute(make_scores(perm_scores), perm_weights));
    }
}

TEST_CASE("instance validation enforces mode invariants") {
    EvaluationInstance instance;
    instance.id = "x1";
    instance.instruction = "do something";
    instance.mode = Mode::Absolute;
    CHECK_THROWS_AS(validate(instance), Error);  // missing response

    instance.response = "done";
    CHECK_NOTHROW(validate(instance));

    instance.response_a = "extra";
    CHECK_THROWS_AS(validate(instance), Error);

    EvaluationInstance relative;
    relative.id = "x2";
    relative.instruction = "compare";
    relative.mode = Mode::Relative;
    relative.response_a = "first";
    CHECK_THROWS_AS(validate(relative), Error);  // missing response_b
    relative.response_b = "second";
    CHECK_NOTHROW(validate(relative));

    relative.gold_preference = Preference::Tie;
    CHECK_THROWS_AS(validate(relative), Error);
}

TEST_CASE("criteria set validation checks weights") {
    CriteriaSet set;
    CHECK(code_of([&] { validate(set); }) == ErrorCode::EmptyCriteria);

    set.criteria = {{"A", "d", 0.6}, {"B", "d", 0.4}};
    CHECK_NOTHROW(validate(set));

    set.criteria[1].weight = 0.5;
    CHECK(code_of([&] { validate(set); }) == ErrorCode::WeightSumError);

    set.criteria[1].weight = std::nullopt;  // partially weighted: no sum constraint
    CHECK_NOTHROW(validate(set));

    set.criteria[0].weight = 1.5;
    CHECK(code_of([&] { validate(set); }) == ErrorCode::OutOfRange);

    set.criteria[0] = {"", "d", std::nullopt};
    CHECK(code_of([&] { validate(set); }) == ErrorCode::SchemaError);
}

TEST_CASE("assessment validation") {
    Assessment assessment;
    assessment.instance_id = "x";
    assessment.absolute_score = 4.0;
    CHECK_NOTHROW(validate(assessment));

    assessment.verdict = Preference::A;
    CHECK_THROWS_AS(validate(assessment), Error);  // both score and verdict

    assessment.verdict = std::nullopt;
    assessment.absolute_score = 5.5;
    CHECK(code_of([&] { validate(assessment); }) == ErrorCode::OutOfRange);
}
