#include "wfdgm/metrics.hpp"
#include "wfdgm/rng.hpp"

#include "doctest.h"

#include <algorithm>
#include <queue>
#include <vector>

using namespace wfdgm;

namespace {

// Independent component oracle: plain BFS over an adjacency matrix.
std::vector<std::vector<uint32_t>> bfs_components(uint32_t n,
                                                  const std::vector<std::vector<bool>>& adj)
{
    std::vector<std::vector<uint32_t>> comps;
    std::vector<bool> seen(n, false);
    for (uint32_t s = 0; s < n; ++s) {
        if (seen[s]) {
            continue;
        }
        std::vector<uint32_t> comp;
        std::queue<uint32_t> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            const uint32_t v = q.front();
            q.pop();
            comp.push_back(v);
            for (uint32_t w = 0; w < n; ++w) {
                if (adj[v][w] && !seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) {
            return a.size() > b.size();
        }
        return a.front() < b.front();
    });
    return comps;
}

} // namespace

TEST_CASE("contact accumulation on the worked examples")
{
    ConnectivityGraph cg(4);
    SUBCASE("a two-node group for 100 seconds")
    {
        for (int i = 0; i < 100; ++i) {
            cg.add_contact(NodeId{0}, NodeId{1}, 1.0);
        }
        CHECK(cg.weight(NodeId{0}, NodeId{1}) == doctest::Approx(100.0));
        CHECK(cg.weight(NodeId{1}, NodeId{0}) == doctest::Approx(100.0)); // symmetric access
        CHECK(cg.weight(NodeId{0}, NodeId{2}) == 0.0);
    }
    SUBCASE("a three-node group accumulates all pairs")
    {
        const uint32_t group[3] = {0, 1, 3};
        for (int t = 0; t < 10; ++t) {
            for (int i = 0; i < 3; ++i) {
                for (int j = i + 1; j < 3; ++j) {
                    cg.add_contact(NodeId{group[i]}, NodeId{group[j]}, 1.0);
                }
            }
        }
        // brute force over the member pairs
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                CHECK(cg.weight(NodeId{group[i]}, NodeId{group[j]}) == doctest::Approx(10.0));
            }
        }
        CHECK(cg.weight(NodeId{0}, NodeId{2}) == 0.0); // never co-grouped
    }
}

TEST_CASE("components of an empty graph are singletons")
{
    ConnectivityGraph cg(5);
    const auto summary = connected_components(cg);
    CHECK(summary.count() == 5);
    CHECK(summary.largest_fraction == doctest::Approx(0.2));
}

TEST_CASE("a run-long group forms one component among its members")
{
    ConnectivityGraph cg(6);
    cg.add_contact(NodeId{0}, NodeId{1}, 50.0);
    cg.add_contact(NodeId{0}, NodeId{2}, 50.0);
    cg.add_contact(NodeId{1}, NodeId{2}, 50.0);
    const auto summary = connected_components(cg);
    CHECK(summary.count() == 4); // {0,1,2} plus three singletons
    CHECK(summary.components.front().members == std::vector<uint32_t>{0, 1, 2});
    CHECK(summary.largest_fraction == doctest::Approx(0.5));
}

TEST_CASE("connected components match the BFS oracle on random graphs")
{
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const uint32_t n = rng.uniform_int(1, 12);
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        ConnectivityGraph cg(n);
        const uint32_t edges = rng.uniform_int(0, n * 2);
        for (uint32_t e = 0; e < edges; ++e) {
            const uint32_t a = rng.uniform_int(0, n - 1);
            const uint32_t b = rng.uniform_int(0, n - 1);
            if (a == b) {
                continue;
            }
            adj[a][b] = adj[b][a] = true;
            cg.add_contact(NodeId{a}, NodeId{b}, rng.uniform(0.5, 10.0));
        }
        const auto got = connected_components(cg);
        const auto expected = bfs_components(n, adj);
        REQUIRE(got.count() == expected.size());
        std::size_t total = 0;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            CHECK(got.components[i].members == expected[i]);
            total += got.components[i].size();
        }
        CHECK(total == n); // exact partition
    }
}

TEST_CASE("ccdf on the worked examples")
{
    SUBCASE("all ones")
    {
        const std::vector<double> values{1.0, 1.0, 1.0};
        const auto curve = ccdf(values);
        for (const auto& [threshold, fraction] : curve) {
            CHECK(fraction == 1.0);
        }
        CHECK(curve.front().first == 0.0);
        CHECK(curve.back().first == 1.0);
    }
    SUBCASE("half zeros half ones")
    {
        const std::vector<double> values{0.0, 1.0};
        const auto curve = ccdf(values);
        // fraction >= 0.5 is 0.5; the curve carries thresholds 0 and 1
        REQUIRE(curve.size() == 2);
        CHECK(curve[0] == std::pair{0.0, 1.0});
        CHECK(curve[1] == std::pair{1.0, 0.5});
    }
}

TEST_CASE("ccdf matches the sort-and-count oracle on random lists")
{
    Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> values;
        const uint32_t n = rng.uniform_int(1, 40);
        for (uint32_t i = 0; i < n; ++i) {
            // quantized values force ties through the tie-handling path
            values.push_back(rng.uniform_int(0, 10) / 10.0);
        }
        const auto curve = ccdf(values);
        REQUIRE(!curve.empty());
        CHECK(curve.front().first == 0.0);
        CHECK(curve.front().second == 1.0);
        double prev_frac = 1.0;
        double prev_thresh = -1.0;
        for (const auto& [threshold, fraction] : curve) {
            // oracle: linear count
            std::size_t count = 0;
            for (const double v : values) {
                count += v >= threshold ? 1 : 0;
            }
            CHECK(fraction == doctest::Approx(static_cast<double>(count) / n).epsilon(1e-12));
            CHECK(threshold > prev_thresh);
            CHECK(fraction <= prev_frac + 1e-12); // non-increasing
            prev_frac = fraction;
            prev_thresh = threshold;
        }
    }
}

TEST_CASE("reachability sampling on the worked examples")
{
    SUBCASE("static single group: p = 1 for all its pairs")
    {
        ReachabilitySamples rs(4);
        const std::vector<std::pair<uint32_t, uint32_t>> edges{{0, 1}, {0, 2}};
        for (int s = 0; s < 60; ++s) {
            rs.sample(edges);
        }
        CHECK(rs.probability(NodeId{0}, NodeId{1}) == 1.0);
        CHECK(rs.probability(NodeId{1}, NodeId{2}) == 1.0); // multi-hop via the owner
        CHECK(rs.probability(NodeId{0}, NodeId{3}) == 0.0);
    }
    SUBCASE("two groups never bridged")
    {
        ReachabilitySamples rs(4);
        const std::vector<std::pair<uint32_t, uint32_t>> edges{{0, 1}, {2, 3}};
        for (int s = 0; s < 10; ++s) {
            rs.sample(edges);
        }
        CHECK(rs.probability(NodeId{0}, NodeId{1}) == 1.0);
        CHECK(rs.probability(NodeId{1}, NodeId{2}) == 0.0);
    }
    SUBCASE("co-component in 30 of 60 samples")
    {
        ReachabilitySamples rs(2);
        const std::vector<std::pair<uint32_t, uint32_t>> joined{{0, 1}};
        const std::vector<std::pair<uint32_t, uint32_t>> apart{};
        for (int s = 0; s < 30; ++s) {
            rs.sample(joined);
        }
        for (int s = 0; s < 30; ++s) {
            rs.sample(apart);
        }
        CHECK(rs.probability(NodeId{0}, NodeId{1}) == 0.5);
        CHECK(rs.total_samples() == 60);
    }
}

TEST_CASE("diffusion join exchanges caches both ways")
{
    DiffusionState ds(3);
    CHECK(ds.cache_size(NodeId{0}) == 1);
    CHECK(ds.mean_fraction() == doctest::Approx(1.0 / 3.0));

    const NodeId members[] = {NodeId{1}};
    ds.on_join(NodeId{0}, members);
    CHECK(ds.holds(NodeId{0}, 1));
    CHECK(ds.holds(NodeId{1}, 0));
    CHECK_FALSE(ds.holds(NodeId{2}, 0));

    // re-join with identical caches: no change
    ds.on_join(NodeId{0}, members);
    CHECK(ds.cache_size(NodeId{0}) == 2);
    CHECK(ds.cache_size(NodeId{1}) == 2);
}

TEST_CASE("a static group converges to full mutual coverage through joins")
{
    DiffusionState ds(5);
    std::vector<NodeId> group{NodeId{0}}; // owner
    for (uint32_t joiner = 1; joiner < 5; ++joiner) {
        ds.on_join(NodeId{joiner}, group);
        group.push_back(NodeId{joiner});
    }
    // the last joiner met everyone; earlier members hold progressively more
    CHECK(ds.cache_size(NodeId{4}) == 5);
    CHECK(ds.cache_size(NodeId{0}) == 5);
    // one more round of (idempotent) rejoins completes the closure
    for (uint32_t joiner = 1; joiner < 5; ++joiner) {
        ds.on_join(NodeId{joiner}, group);
    }
    for (uint32_t v = 0; v < 5; ++v) {
        CHECK(ds.cache_size(NodeId{v}) == 5);
    }
    CHECK(ds.mean_fraction() == 1.0);
}

TEST_CASE("diffusion mean is non-decreasing under random joins")
{
    Rng rng(303);
    DiffusionState ds(12);
    double prev = ds.mean_fraction();
    for (int i = 0; i < 500; ++i) {
        std::vector<NodeId> members;
        const uint32_t m = rng.uniform_int(1, 5);
        for (uint32_t k = 0; k < m; ++k) {
            members.push_back(NodeId{rng.uniform_int(0, 11)});
        }
        const NodeId joiner{rng.uniform_int(0, 11)};
        ds.on_join(joiner, members);
        const double now = ds.mean_fraction();
        CHECK(now >= prev);
        prev = now;
    }
}

TEST_CASE("battery statistics on the worked examples")
{
    SUBCASE("identical levels")
    {
        const std::vector<double> v{0.42, 0.42, 0.42};
        const auto s = battery_stats(v);
        CHECK(s.mean == doctest::Approx(0.42));
        CHECK(s.median == doctest::Approx(0.42));
        CHECK(s.variance == doctest::Approx(0.0));
    }
    SUBCASE("two points")
    {
        const std::vector<double> v{0.6, 0.8};
        const auto s = battery_stats(v);
        CHECK(s.mean == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(s.median == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(s.variance == doctest::Approx(0.01).epsilon(1e-12));
    }
    SUBCASE("odd count median is the middle value")
    {
        const std::vector<double> v{0.9, 0.1, 0.5};
        CHECK(battery_stats(v).median == doctest::Approx(0.5));
    }
}
