#include <gtest/gtest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "lmpred/parallel.hpp"

using namespace lmpred;

TEST(MapReplicates, MatchesSerialForAnyThreadCount) {
    auto body = [](std::size_t r) { return static_cast<double>(r * r) * 0.5; };
    const auto ref = map_replicates_serial<double>(97, body);
    for (int t : {1, 2, 3, 8}) EXPECT_EQ(map_replicates<double>(97, body, t), ref) << t;
}

TEST(MapReplicates, LowestFailingIndexWins) {
    auto body = [](std::size_t r) -> int {
        if (r == 7 || r == 30) throw std::runtime_error("r" + std::to_string(r));
        return 0;
    };
    try {
        map_replicates<int>(50, body, 4);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "r7");
    }
}

TEST(PairwiseSum, OrderFixedAndAccurate) {
    std::vector<double> x(1000001, 0.1);
    EXPECT_NEAR(pairwise_sum(x), 100000.1, 1e-7);
    EXPECT_EQ(pairwise_sum(std::span<const double>{}), 0.0);
}
