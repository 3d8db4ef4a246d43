#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "oracles.hpp"
#include "shiftgrad/pascal.hpp"

using namespace shiftgrad;

TEST(Coefficient, PublishedValues) {
    EXPECT_EQ(coefficient(HalfShift(0), 2), -2);
    EXPECT_EQ(coefficient(HalfShift(2), 2), 1);
    EXPECT_EQ(coefficient(HalfShift(-2), 2), 1);
    EXPECT_EQ(coefficient(HalfShift(1), 1), 1);
    EXPECT_EQ(coefficient(HalfShift(-1), 1), -1);
    EXPECT_EQ(coefficient(HalfShift(-1), 5), -12);
}

TEST(Coefficient, ClosedFormRowFour) {
    EXPECT_EQ(coefficient(HalfShift(0), 4), 8);
    EXPECT_EQ(coefficient(HalfShift(2), 4), -4);
    EXPECT_EQ(coefficient(HalfShift(-2), 4), -4);
}

TEST(Coefficient, OffSupportIsZero) {
    EXPECT_EQ(coefficient(HalfShift(3), 2), 0);  // parity mismatch
    EXPECT_EQ(coefficient(HalfShift(0), 3), 0);
    EXPECT_EQ(coefficient(HalfShift(3), 1), 0);
    EXPECT_EQ(coefficient(HalfShift(-3), 1), 0);
    EXPECT_EQ(coefficient(HalfShift(2), 0), 0);
    EXPECT_EQ(coefficient(HalfShift(-2), 0), 0);
    EXPECT_EQ(coefficient(HalfShift(0), 0), 1);
}

TEST(HalfShift, RejectsOutOfRange) {
    EXPECT_THROW(HalfShift(4), std::invalid_argument);
    EXPECT_THROW(HalfShift(-4), std::invalid_argument);
    EXPECT_EQ(HalfShift(-3).to_string(), "-3/2");
    EXPECT_EQ(HalfShift(2).to_string(), "1");
}

TEST(BuildTree, FirstRowsArePascalTriangle) {
    const auto t = build_tree(2);
    EXPECT_EQ(t.at(HalfShift(0), 0), 1);
    EXPECT_EQ(std::abs(t.at(HalfShift(-1), 1)), 1);
    EXPECT_EQ(std::abs(t.at(HalfShift(1), 1)), 1);
    EXPECT_EQ(std::abs(t.at(HalfShift(-2), 2)), 1);
    EXPECT_EQ(std::abs(t.at(HalfShift(0), 2)), 2);
    EXPECT_EQ(std::abs(t.at(HalfShift(2), 2)), 1);
}

TEST(BuildTree, RowsThreeAndFive) {
    const auto t = build_tree(5);
    EXPECT_EQ(t.at(HalfShift(3), 3), 1);
    EXPECT_EQ(t.at(HalfShift(1), 3), -3);
    EXPECT_EQ(t.at(HalfShift(-1), 3), 3);
    EXPECT_EQ(t.at(HalfShift(-3), 3), -1);

    std::vector<std::int64_t> unsigned_row5;
    for (const auto& [omega, d] : t.row(5)) unsigned_row5.push_back(std::abs(d));
    EXPECT_EQ(unsigned_row5, (std::vector<std::int64_t>{4, 12, 12, 4}));
}

TEST(BuildTree, MatchesClosedFormAndSumRule) {
    const auto t = build_tree(20);
    for (int n = 0; n <= 20; ++n) {
        std::int64_t total = 0;
        for (int w = -3; w <= 3; ++w) {
            EXPECT_EQ(t.at(HalfShift(w), n), coefficient(HalfShift(w), n)) << "n=" << n << " w=" << w;
            total += std::abs(t.at(HalfShift(w), n));
        }
        EXPECT_EQ(total, std::int64_t{1} << n) << "n=" << n;
    }
}

TEST(BuildTree, MatchesIteratedShiftRule) {
    const auto rows = oracle::shift_rule_rows(20);
    for (int n = 0; n <= 20; ++n) {
        for (int w = -3; w <= 3; ++w) {
            const auto it = rows[n].find(w);
            const std::int64_t want = it == rows[n].end() ? 0 : it->second;
            EXPECT_EQ(coefficient(HalfShift(w), n), want) << "n=" << n << " w=" << w;
        }
    }
}

// Entries on a top-left to bottom-right diagonal (w -> w + 1/2 per row) share a sign.
TEST(BuildTree, DiagonalSignRule) {
    const auto t = build_tree(20);
    EXPECT_GT(t.at(HalfShift(0), 0), 0);
    for (int n = 0; n < 20; ++n) {
        for (const auto& [omega, d] : t.row(n)) {
            const int next = omega.numerator() + 1;
            if (next > 3 || d == 0) continue;
            const auto below = t.at(HalfShift(next), n + 1);
            if (below == 0) continue;
            EXPECT_EQ(d > 0, below > 0) << "n=" << n << " w=" << omega.numerator();
        }
    }
}

TEST(BuildTree, RejectsOrderAboveCap) {
    EXPECT_THROW(build_tree(kMaxTreeOrder + 1), std::invalid_argument);
    EXPECT_THROW(build_tree(-1), std::invalid_argument);
    EXPECT_NO_THROW(build_tree(kMaxTreeOrder));
}

TEST(Normalize, GroupsAndSorts) {
    const auto a = normalize({3, 1, 3});
    ASSERT_EQ(a.distinct_count(), 2u);
    EXPECT_EQ(a.order(), 3u);
    EXPECT_EQ(a.groups()[0], (MultiIndex::Group{1, 1}));
    EXPECT_EQ(a.groups()[1], (MultiIndex::Group{3, 2}));

    EXPECT_EQ(normalize({0}).groups(), (std::vector<MultiIndex::Group>{{0, 1}}));
    EXPECT_EQ(normalize({2, 2, 2, 2}).groups(), (std::vector<MultiIndex::Group>{{2, 4}}));
}

TEST(Normalize, Errors) {
    EXPECT_THROW(normalize({}), std::invalid_argument);
    EXPECT_THROW(normalize(std::vector<std::size_t>(17, 0)), std::invalid_argument);
    EXPECT_NO_THROW(normalize(std::vector<std::size_t>(16, 0)));
    EXPECT_THROW(normalize({0, 1, 2}, 2), std::invalid_argument);
}

namespace {

std::map<std::vector<int>, std::int64_t> as_map(const ShiftPlan& plan) {
    std::map<std::vector<int>, std::int64_t> m;
    for (const auto& t : plan.terms) {
        std::vector<int> key;
        for (auto w : t.omegas) key.push_back(w.numerator());
        m[key] = t.weight;
    }
    return m;
}

}  // namespace

TEST(ShiftTerms, FirstOrder) {
    const auto plan = shift_terms(normalize({4}));
    EXPECT_EQ(plan.normalizer, 2);
    EXPECT_EQ(as_map(plan), (std::map<std::vector<int>, std::int64_t>{{{1}, 1}, {{-1}, -1}}));
}

TEST(ShiftTerms, MixedSecondOrderIsFourPointRule) {
    const auto plan = shift_terms(normalize({0, 2}));
    EXPECT_EQ(plan.normalizer, 4);
    EXPECT_EQ(as_map(plan), (std::map<std::vector<int>, std::int64_t>{
                                {{1, 1}, 1}, {{-1, -1}, 1}, {{1, -1}, -1}, {{-1, 1}, -1}}));
}

TEST(ShiftTerms, RepeatedSecondOrder) {
    const auto plan = shift_terms(normalize({1, 1}));
    EXPECT_EQ(as_map(plan), (std::map<std::vector<int>, std::int64_t>{{{2}, 1}, {{-2}, 1}, {{0}, -2}}));
}

TEST(ShiftTerms, ProductOfRowsFourAndOne) {
    const auto plan = shift_terms(normalize({0, 0, 0, 0, 1}));
    EXPECT_EQ(plan.terms.size(), 6u);
    std::int64_t total = 0;
    for (const auto& t : plan.terms) total += std::abs(t.weight);
    EXPECT_EQ(total, 32);
}

namespace {

std::size_t expected_term_count(const MultiIndex& a) {
    std::size_t count = 1;
    for (const auto& g : a.groups()) count *= g.multiplicity == 1 ? 2 : (g.multiplicity % 2 == 0 ? 3 : 4);
    return count;
}

}  // namespace

TEST(ShiftTerms, PlanInvariantsOnRandomMultiIndices) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(1, 16);
    std::uniform_int_distribution<std::size_t> idx(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::size_t> raw(static_cast<std::size_t>(len(rng)));
        for (auto& r : raw) r = idx(rng);
        const auto alpha = normalize(raw);
        const auto plan = shift_terms(alpha);

        std::int64_t total = 0;
        std::set<std::vector<int>> seen;
        for (const auto& t : plan.terms) {
            ASSERT_NE(t.weight, 0);
            std::int64_t product = 1;
            std::vector<int> key;
            for (std::size_t k = 0; k < t.omegas.size(); ++k) {
                product *= coefficient(t.omegas[k], alpha.groups()[k].multiplicity);
                key.push_back(t.omegas[k].numerator());
            }
            EXPECT_EQ(product, t.weight);
            EXPECT_TRUE(seen.insert(key).second) << "duplicate omega vector";
            total += std::abs(t.weight);
        }
        EXPECT_EQ(total, std::int64_t{1} << raw.size());
        EXPECT_EQ(plan.normalizer, std::int64_t{1} << raw.size());
        EXPECT_LE(plan.terms.size(), std::size_t{1} << raw.size());
        EXPECT_EQ(plan.terms.size(), expected_term_count(alpha));

        // order-insensitive
        std::shuffle(raw.begin(), raw.end(), rng);
        EXPECT_EQ(as_map(shift_terms(normalize(raw))), as_map(plan));
    }
}

TEST(ShiftTerms, OrderInsensitive) {
    EXPECT_EQ(as_map(shift_terms(normalize({2, 5, 2}))), as_map(shift_terms(normalize({2, 2, 5}))));
}

// (1/2^N) sum_w d_(w,N) cos(theta + w pi) = cos(theta + N pi / 2)
TEST(ShiftTerms, TrigClosure) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    for (int n = 1; n <= 10; ++n) {
        const auto plan = shift_terms(normalize(std::vector<std::size_t>(static_cast<std::size_t>(n), 0)));
        for (int trial = 0; trial < 100; ++trial) {
            const double theta = u(rng);
            double acc = 0.0;
            for (const auto& t : plan.terms) acc += t.weight * std::cos(theta + t.omegas[0].radians_over_pi() * std::numbers::pi);
            acc /= static_cast<double>(plan.normalizer);
            EXPECT_NEAR(acc, std::cos(theta + n * std::numbers::pi / 2.0), 1e-12) << "N=" << n;
        }
    }
}

TEST(ShiftTerms, Serialization) {
    const auto text = serialize_plan(shift_terms(normalize({3, 1, 3})));
    EXPECT_EQ(text,
              "alpha=3,1,3 normalizer=8\n"
              "1,2 1\n"
              "1,0 -2\n"
              "1,-2 1\n"
              "-1,2 -1\n"
              "-1,0 2\n"
              "-1,-2 -1\n");
}
