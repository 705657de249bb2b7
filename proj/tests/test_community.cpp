/// @file test_community.cpp
/// @brief Bitmask communities, canonical ordering, RNG, and parallel loop.

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>
#include <vector>

#include "catch_amalgamated.hpp"
#include "lvig/community.hpp"
#include "lvig/parallel.hpp"
#include "lvig/rng.hpp"
#include "lvig/types.hpp"

using lvig::Community;

TEST_CASE("community basic set algebra") {
    const Community c = Community::of({0, 2});
    CHECK(c.size() == 2);
    CHECK(c.contains(0));
    CHECK_FALSE(c.contains(1));
    CHECK(c.contains(2));
    CHECK(Community::empty().is_empty());
    CHECK(Community::full(3).size() == 3);

    CHECK(c.with(1) == Community::full(3));
    CHECK(c.without(2) == Community::of({0}));
    CHECK(c.united(Community::of({1})) == Community::full(3));
    CHECK(c.intersected(Community::of({2})) == Community::of({2}));
    CHECK(c.minus(Community::of({0})) == Community::of({2}));
    CHECK(Community::of({0}).is_subset_of(c));
    CHECK_FALSE(c.is_subset_of(Community::of({0})));

    const auto members = c.members();
    REQUIRE(members.size() == 2);
    CHECK(members[0] == 0);
    CHECK(members[1] == 2);
}

TEST_CASE("community printing is 1-based") {
    CHECK(lvig::to_string(Community::empty()) == "{}");
    CHECK(lvig::to_string(Community::of({0, 2})) == "{1,3}");
    CHECK(lvig::to_string(Community::full(3)) == "{1,2,3}");
}

TEST_CASE("canonical order: cardinality, then lexicographic on members") {
    const auto subsets = lvig::enumerate_subsets(3);
    REQUIRE(subsets.size() == 8);
    std::vector<std::string> printed;
    printed.reserve(subsets.size());
    for (const Community& s : subsets) printed.push_back(lvig::to_string(s));
    const std::vector<std::string> expected = {"{}",    "{1}",   "{2}",
                                               "{3}",   "{1,2}", "{1,3}",
                                               "{2,3}", "{1,2,3}"};
    CHECK(printed == expected);
    CHECK(std::is_sorted(subsets.begin(), subsets.end(), lvig::CanonicalLess{}));
}

TEST_CASE("strict extensions walk every superset within the invader pool") {
    const Community base = Community::of({0});
    const Community pool = Community::of({1, 2});
    std::set<std::string> seen;
    lvig::for_each_strict_extension(base, pool, [&](Community k) {
        seen.insert(lvig::to_string(k));
    });
    CHECK(seen == std::set<std::string>{"{1,2}", "{1,3}", "{1,2,3}"});
}

TEST_CASE("vector formatting uses six decimals") {
    lvig::Vector v(2);
    v << 0.43, -0.05;
    CHECK(lvig::format_vector(v) == "(0.430000, -0.050000)");
}

TEST_CASE("rng substreams are reproducible and decorrelated") {
    lvig::Rng a = lvig::Rng::substream(42, 7, 3);
    lvig::Rng b = lvig::Rng::substream(42, 7, 3);
    lvig::Rng c = lvig::Rng::substream(42, 7, 4);
    bool same = true, diff = false;
    for (int i = 0; i < 64; ++i) {
        const double x = a.uniform01();
        same &= (x == b.uniform01());
        diff |= (x != c.uniform01());
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("rng samples respect their ranges") {
    lvig::Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-2.0, 3.0);
        CHECK(u >= -2.0);
        CHECK(u < 3.0);
        const double g = rng.log_uniform(1e-3, 1e3);
        CHECK(g >= 1e-3);
        CHECK(g <= 1e3 * (1 + 1e-12));
    }
    const lvig::Vector x = rng.ball(5, 0.25);
    CHECK(x.norm() <= 0.25 + 1e-15);
}

TEST_CASE("parallel_for covers the range once and rethrows") {
    std::vector<std::atomic<int>> hits(257);
    lvig::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(lvig::parallel_for(16,
                                       [](std::size_t i) {
                                           if (i == 5)
                                               throw std::runtime_error("boom");
                                       }),
                    std::runtime_error);
}
