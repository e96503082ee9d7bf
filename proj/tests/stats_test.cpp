#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ckg/stats.hpp"

namespace {

// Classic rank-difference form, valid when ranks are all distinct. Used as an
// independent oracle against the rank-then-Pearson implementation.
double spearman_distinct_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return v[a] < v[b];
        });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[order[i]] = static_cast<double>(i + 1);
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum_d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double dn = static_cast<double>(n);
    return 1.0 - 6.0 * sum_d2 / (dn * (dn * dn - 1.0));
}

TEST(Ranks, HandValues) {
    EXPECT_EQ(ckg::rank_with_ties({10, 20, 30}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(ckg::rank_with_ties({5, 5}), (std::vector<double>{1.5, 1.5}));
    EXPECT_EQ(ckg::rank_with_ties({3, 1, 3, 2}), (std::vector<double>{3.5, 1, 3.5, 2}));
    EXPECT_EQ(ckg::rank_with_ties({}), std::vector<double>{});
    EXPECT_THROW(ckg::rank_with_ties({1.0, std::nan("")}), ckg::NonFinite);
    EXPECT_THROW(ckg::rank_with_ties({std::numeric_limits<double>::infinity()}),
                 ckg::NonFinite);
}

TEST(Ranks, SumIsInvariant) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    std::uniform_int_distribution<int> len(1, 40);
    for (int round = 0; round < 100; ++round) {
        const int n = len(rng);
        std::vector<double> v(n);
        for (auto& x : v) x = std::floor(val(rng));  // force ties
        const auto ranks = ckg::rank_with_ties(v);
        const double sum = std::accumulate(ranks.begin(), ranks.end(), 0.0);
        EXPECT_NEAR(sum, n * (n + 1) / 2.0, 1e-9);
    }
}

TEST(Spearman, HandValues) {
    EXPECT_DOUBLE_EQ(ckg::spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
    EXPECT_DOUBLE_EQ(ckg::spearman({1, 2, 3, 4}, {40, 30, 20, 10}), -1.0);
    EXPECT_NEAR(ckg::spearman({1, 2, 3, 4}, {2, 1, 4, 3}), 0.6, 1e-12);
}

TEST(Spearman, ErrorsAndEdgeCases) {
    EXPECT_THROW(ckg::spearman({1, 2}, {1, 2, 3}), ckg::DimensionMismatch);
    EXPECT_THROW(ckg::spearman({1}, {2}), ckg::InsufficientData);
    EXPECT_THROW(ckg::spearman({}, {}), ckg::InsufficientData);
    EXPECT_THROW(ckg::spearman({7, 7, 7}, {1, 2, 3}), ckg::DegenerateColumn);
    EXPECT_THROW(ckg::spearman({1, 2, 3}, {4, 4, 4}), ckg::DegenerateColumn);
}

TEST(Spearman, MatchesClosedFormOnAllSmallPermutations) {
    for (std::size_t n = 2; n <= 6; ++n) {
        std::vector<double> x(n), perm(n);
        std::iota(x.begin(), x.end(), 1.0);
        std::iota(perm.begin(), perm.end(), 1.0);
        do {
            EXPECT_NEAR(ckg::spearman(x, perm), spearman_distinct_oracle(x, perm), 1e-12);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST(Spearman, SymmetricAndSelfPerfect) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> x(20), y(20);
        for (auto& v : x) v = val(rng);
        for (auto& v : y) v = val(rng);
        EXPECT_DOUBLE_EQ(ckg::spearman(x, y), ckg::spearman(y, x));
        EXPECT_NEAR(ckg::spearman(x, x), 1.0, 1e-12);
        EXPECT_GE(ckg::spearman(x, y), -1.0);
        EXPECT_LE(ckg::spearman(x, y), 1.0);
    }
}

TEST(Spearman, InvariantUnderMonotoneTransforms) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> val(0.1, 9.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<double> x(15), y(15);
        for (auto& v : x) v = val(rng);
        for (auto& v : y) v = val(rng);
        const double base = ckg::spearman(x, y);
        std::vector<double> xt(x.size()), yt(y.size());
        std::transform(x.begin(), x.end(), xt.begin(),
                       [](double v) { return std::exp(v / 3.0); });
        std::transform(y.begin(), y.end(), yt.begin(),
                       [](double v) { return 100.0 * v + 7.0; });
        EXPECT_NEAR(ckg::spearman(xt, yt), base, 1e-9);
        // A strictly decreasing transform on one side flips the sign.
        std::transform(y.begin(), y.end(), yt.begin(), [](double v) { return -v; });
        EXPECT_NEAR(ckg::spearman(x, yt), -base, 1e-9);
    }
}

TEST(FeatureTable, ParsesCsvWithMissingMarkers) {
    std::istringstream in(
        "scene_id,motion,tempo,energy\n"
        "s1,0.1,120,na\n"
        "s2,0.2,,0.5\n"
        "s3,NaN,90,0.7\n"
        "s4,0.4,null,0.9\n");
    const auto table = ckg::FeatureTable::from_csv(in);
    EXPECT_EQ(table.row_count(), 4u);
    ASSERT_EQ(table.scene_ids().size(), 4u);
    EXPECT_EQ(table.scene_ids()[2], "s3");

    const auto motion = table.column("motion");
    ASSERT_EQ(motion.size(), 4u);
    EXPECT_TRUE(motion[0].has_value());
    EXPECT_DOUBLE_EQ(*motion[0], 0.1);
    EXPECT_FALSE(motion[2].has_value());

    const auto tempo = table.column("tempo");
    EXPECT_FALSE(tempo[1].has_value());
    EXPECT_FALSE(tempo[3].has_value());
    const auto energy = table.column("energy");
    EXPECT_FALSE(energy[0].has_value());
    EXPECT_DOUBLE_EQ(*energy[3], 0.9);

    EXPECT_THROW(table.column("absent"), ckg::UnknownColumn);
}

TEST(FeatureTable, RejectsMalformedInput) {
    {
        std::istringstream in("motion,tempo\n0.1,120\n");
        EXPECT_THROW(ckg::FeatureTable::from_csv(in), ckg::SchemaViolation);
    }
    {
        std::istringstream in("scene_id,motion,motion\ns1,1,2\n");
        EXPECT_THROW(ckg::FeatureTable::from_csv(in), ckg::SchemaViolation);
    }
    {
        std::istringstream in("scene_id,motion\ns1,1,2\n");
        EXPECT_THROW(ckg::FeatureTable::from_csv(in), ckg::SchemaViolation);
    }
    {
        std::istringstream in("scene_id,motion\ns1,fast\n");
        EXPECT_THROW(ckg::FeatureTable::from_csv(in), ckg::SchemaViolation);
    }
    {
        std::istringstream in("");
        EXPECT_THROW(ckg::FeatureTable::from_csv(in), ckg::SchemaViolation);
    }
}

TEST(CorrelationMatrix, PairwiseDeletionAndStatuses) {
    std::istringstream in(
        "scene_id,motion,contrast,tempo,energy,flat\n"
        "s1,0.1,0.9,100,na,3\n"
        "s2,0.2,0.8,110,0.2,3\n"
        "s3,0.3,0.7,120,0.4,3\n"
        "s4,na,0.6,130,0.6,3\n"
        "s5,0.5,0.5,na,0.8,3\n");
    const auto table = ckg::FeatureTable::from_csv(in);
    const auto result =
        ckg::correlation_matrix(table, {"motion", "contrast", "flat"}, {"tempo", "energy"});
    ASSERT_EQ(result.row_labels.size(), 3u);
    ASSERT_EQ(result.col_labels.size(), 2u);

    // motion vs tempo: rows s1,s2,s3 complete; perfectly concordant.
    const auto& cell = result.cells[0][0];
    EXPECT_EQ(cell.status, ckg::CellStatus::ok);
    EXPECT_EQ(cell.pair_count, 3u);
    EXPECT_DOUBLE_EQ(cell.value, 1.0);

    // contrast vs energy: s2..s5 complete and discordant.
    const auto& disc = result.cells[1][1];
    EXPECT_EQ(disc.pair_count, 4u);
    EXPECT_DOUBLE_EQ(disc.value, -1.0);

    // flat has zero rank variance wherever it overlaps.
    EXPECT_EQ(result.cells[2][0].status, ckg::CellStatus::degenerate);
}

TEST(CorrelationMatrix, InsufficientOverlapReported) {
    std::istringstream in(
        "scene_id,a,b\n"
        "s1,1,na\n"
        "s2,na,2\n"
        "s3,3,na\n");
    const auto table = ckg::FeatureTable::from_csv(in);
    const auto result = ckg::correlation_matrix(table, {"a"}, {"b"});
    EXPECT_EQ(result.cells[0][0].status, ckg::CellStatus::insufficient_data);
    EXPECT_EQ(result.cells[0][0].pair_count, 0u);
}

TEST(CorrelationMatrix, IndependentColumnsNearZero) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::ostringstream csv;
    csv << "scene_id,x,y\n";
    for (int i = 0; i < 1000; ++i) csv << "s" << i << "," << val(rng) << "," << val(rng) << "\n";
    std::istringstream in(csv.str());
    const auto table = ckg::FeatureTable::from_csv(in);
    const auto result = ckg::correlation_matrix(table, {"x"}, {"y"});
    ASSERT_EQ(result.cells[0][0].status, ckg::CellStatus::ok);
    EXPECT_LT(std::abs(result.cells[0][0].value), 0.1);
}

TEST(CorrelationCsv, ExactRendering) {
    std::istringstream in(
        "scene_id,motion,tempo,energy\n"
        "s1,0.1,100,na\n"
        "s2,0.2,110,na\n"
        "s3,0.3,120,na\n");
    const auto table = ckg::FeatureTable::from_csv(in);
    const auto result = ckg::correlation_matrix(table, {"motion"}, {"tempo", "energy"});

    std::ostringstream matrix;
    ckg::write_matrix_csv(matrix, result);
    EXPECT_EQ(matrix.str(),
              "feature,tempo,energy\n"
              "motion,1.000000,NA\n");

    std::ostringstream counts;
    ckg::write_pair_counts_csv(counts, result);
    EXPECT_EQ(counts.str(),
              "feature,tempo,energy\n"
              "motion,3,0\n");
}

}  // namespace
