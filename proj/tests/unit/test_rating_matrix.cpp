#include <gtest/gtest.h>

#include <numeric>

#include "cruc/errors.hpp"
#include "cruc/rating_matrix.hpp"
#include "oracles.hpp"

using namespace cruc;

namespace {

// 3 users x 3 items: a rates x,y; b rates x,z; c rates y.
std::vector<RatingTriple> fixture_f1() {
    return {{"a", "x", 4}, {"a", "y", 2}, {"b", "x", 5}, {"b", "z", 1}, {"c", "y", 3}};
}

}  // namespace

TEST(RatingScale, RejectsInvertedBounds) {
    EXPECT_THROW(RatingScale(5, 1), ParameterError);
    EXPECT_THROW(RatingScale(3, 3), ParameterError);
    EXPECT_NO_THROW(RatingScale(0.5, 5));
}

TEST(RatingMatrix, EmptyInput) {
    const auto m = RatingMatrix::build({}, {1, 5});
    EXPECT_EQ(m.num_users(), 0u);
    EXPECT_EQ(m.num_items(), 0u);
    EXPECT_TRUE(m.empty());
    EXPECT_THROW((void)m.density(), EmptyMatrix);
}

TEST(RatingMatrix, SingleRating) {
    const std::vector<RatingTriple> t{{"u1", "i1", 5.0}};
    const auto m = RatingMatrix::build(t, {1, 5});
    EXPECT_EQ(m.num_users(), 1u);
    EXPECT_EQ(m.num_items(), 1u);
    EXPECT_EQ(m.user_mean(0), 5.0);
    EXPECT_EQ(m.item_mean(0), 5.0);
    EXPECT_EQ(m.density(), 1.0);
}

TEST(RatingMatrix, FixtureMeans) {
    const auto m = RatingMatrix::build(fixture_f1(), {1, 5});
    auto u = [&](const char* id) { return *m.find_user(id); };
    auto i = [&](const char* id) { return *m.find_item(id); };
    EXPECT_DOUBLE_EQ(m.user_mean(u("a")), 3.0);
    EXPECT_DOUBLE_EQ(m.user_mean(u("b")), 3.0);
    EXPECT_DOUBLE_EQ(m.user_mean(u("c")), 3.0);
    EXPECT_DOUBLE_EQ(m.item_mean(i("x")), 4.5);
    EXPECT_DOUBLE_EQ(m.item_mean(i("y")), 2.5);
    EXPECT_DOUBLE_EQ(m.item_mean(i("z")), 1.0);
    EXPECT_DOUBLE_EQ(m.global_mean(), 3.0);
}

TEST(RatingMatrix, Density) {
    const auto f1 = RatingMatrix::build(fixture_f1(), {1, 5});
    EXPECT_DOUBLE_EQ(f1.density(), 5.0 / 9.0);

    const std::vector<RatingTriple> full{{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 3}, {"b", "y", 4}};
    EXPECT_EQ(RatingMatrix::build(full, {1, 5}).density(), 1.0);
}

TEST(RatingMatrix, UserRatingDensity) {
    const auto m = RatingMatrix::build(fixture_f1(), {1, 5});
    EXPECT_DOUBLE_EQ(m.user_rating_density(*m.find_user("a")), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(m.user_rating_density(*m.find_user("c")), 1.0 / 3.0);
    EXPECT_THROW((void)m.user_rating_density(99), UnknownUser);

    const std::vector<RatingTriple> t{{"a", "x", 1}, {"a", "y", 2}, {"b", "x", 3}};
    const auto full_rater = RatingMatrix::build(t, {1, 5});
    EXPECT_EQ(full_rater.user_rating_density(*full_rater.find_user("a")), 1.0);
}

TEST(RatingMatrix, DuplicateIsAnError) {
    const std::vector<RatingTriple> t{{"a", "x", 4}, {"b", "x", 3}, {"a", "x", 2}};
    try {
        (void)RatingMatrix::build(t, {1, 5});
        FAIL() << "expected DuplicateRating";
    } catch (const DuplicateRating& e) {
        EXPECT_EQ(e.user(), "a");
        EXPECT_EQ(e.item(), "x");
    }
}

TEST(RatingMatrix, OutOfScaleIsAnError) {
    const std::vector<RatingTriple> t{{"a", "x", 4}, {"b", "y", 5.5}};
    try {
        (void)RatingMatrix::build(t, {1, 5});
        FAIL() << "expected RatingOutOfScale";
    } catch (const RatingOutOfScale& e) {
        EXPECT_EQ(e.user(), "b");
        EXPECT_EQ(e.value(), 5.5);
    }
    const std::vector<RatingTriple> edges{{"a", "x", 1}, {"b", "y", 5}};
    EXPECT_NO_THROW((void)RatingMatrix::build(edges, {1, 5}));
}

TEST(RatingMatrix, LookupAndRating) {
    const auto m = RatingMatrix::build(fixture_f1(), {1, 5});
    EXPECT_FALSE(m.find_user("nobody"));
    EXPECT_FALSE(m.find_item("nothing"));
    const auto a = *m.find_user("a");
    EXPECT_EQ(m.user_id(a), "a");
    EXPECT_EQ(m.rating(a, *m.find_item("y")), 2.0);
    EXPECT_FALSE(m.rating(a, *m.find_item("z")));
}

// Transpose consistency, cached means and count identities on random
// matrices up to 100 x 100.
TEST(RatingMatrixProperty, IndexesAndMeansAgreeWithRawTriples) {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t users = 1 + rng.below(100);
        const std::size_t items = 1 + rng.below(100);
        const auto triples = oracle::random_triples(rng, users, items, rng.uniform(0.02, 0.6), trial % 2 == 0);
        if (triples.empty()) continue;
        const auto m = RatingMatrix::build(triples, {0.5, 5});
        const auto grid = oracle::dense(m, triples);

        std::size_t by_user = 0;
        for (UserIdx u = 0; u < m.num_users(); ++u) {
            by_user += m.items_of(u).size();
            EXPECT_TRUE(std::is_sorted(m.items_of(u).begin(), m.items_of(u).end()));
            const double expect = oracle::row_mean(grid, u);
            EXPECT_NEAR(m.user_mean(u), expect, 1e-12 * std::abs(expect));
        }
        std::size_t by_item = 0;
        for (ItemIdx i = 0; i < m.num_items(); ++i) {
            by_item += m.users_of(i).size();
            const double expect = oracle::col_mean(grid, i);
            EXPECT_NEAR(m.item_mean(i), expect, 1e-12 * std::abs(expect));
        }
        EXPECT_EQ(by_user, triples.size());
        EXPECT_EQ(by_item, triples.size());

        for (UserIdx u = 0; u < m.num_users(); ++u) {
            for (ItemIdx i = 0; i < m.num_items(); ++i) {
                const auto items = m.items_of(u);
                const auto users = m.users_of(i);
                const bool in_row = std::binary_search(items.begin(), items.end(), i);
                const bool in_col = std::binary_search(users.begin(), users.end(), u);
                ASSERT_EQ(in_row, in_col);
                ASSERT_EQ(in_row, grid[u][i].has_value());
            }
        }
    }
}
