#include "wfdgm/context.hpp"
#include "wfdgm/rng.hpp"

#include "doctest.h"

#include <algorithm>
#include <vector>

using namespace wfdgm;

namespace {

std::set<NodeId> ids(std::initializer_list<uint32_t> xs)
{
    std::set<NodeId> out;
    for (const uint32_t x : xs) {
        out.insert(NodeId{x});
    }
    return out;
}

std::set<NodeId> random_ids(Rng& rng, uint32_t max_size, uint32_t universe)
{
    std::set<NodeId> out;
    const uint32_t n = rng.uniform_int(0, max_size);
    for (uint32_t i = 0; i < n; ++i) {
        out.insert(NodeId{rng.uniform_int(0, universe)});
    }
    return out;
}

ServiceRecord rec(uint32_t node, double s, bool creds = true)
{
    ServiceRecord r;
    r.node = NodeId{node};
    r.suitability = s;
    r.credentials = creds ? 1000 + node : 0;
    r.role = creds ? Role::Free : Role::Client;
    return r;
}

} // namespace

TEST_CASE("jaccard on the worked examples")
{
    CHECK(jaccard(ids({1, 2, 3}), ids({2, 3, 4})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(jaccard(ids({1, 2, 3}), ids({1, 2, 3})) == 1.0);
    CHECK(jaccard({}, {}) == 1.0);
    CHECK(jaccard({}, ids({1})) == 0.0);
}

TEST_CASE("jaccard is symmetric and equals 1 iff the sets are equal")
{
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto a = random_ids(rng, 12, 30);
        const auto b = random_ids(rng, 12, 30);
        const double jab = jaccard(a, b);
        CHECK(jab == jaccard(b, a));
        CHECK(jab >= 0.0);
        CHECK(jab <= 1.0);
        CHECK((jab == 1.0) == (a == b));
    }
}

TEST_CASE("neighbor changes fold into the running mean")
{
    StabilityState ss(0.4, 0.6);
    ss.on_neighbors_changed(ids({1, 2})); // J(∅, {1,2}) = 0
    CHECK(ss.changes_in_window() == 1);
    ss.on_neighbors_changed(ids({1, 2, 3})); // J = 2/3
    CHECK(ss.prev_neighbors() == ids({1, 2, 3}));
    CHECK(ss.changes_in_window() == 2);
    // mean = (0 + 2/3) / 2 = 1/3; st = 1*0.4 + (1/3)*0.6 = 0.6
    CHECK(ss.update() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("two identical folds average to themselves")
{
    StabilityState ss(0.4, 0.6);
    ss.on_neighbors_changed(ids({1})); // J = 0, prev = {1}
    ss.update();
    const double st_prev = ss.current();
    ss.on_neighbors_changed(ids({1, 2})); // J = 0.5
    ss.on_neighbors_changed(ids({1}));    // J = 0.5
    CHECK(ss.update() == doctest::Approx(st_prev * 0.4 + 0.5 * 0.6).epsilon(1e-12));
}

TEST_CASE("stability update on the worked examples")
{
    // st' = 1, J̄ = 0 -> 0.4
    StabilityState a(0.4, 0.6);
    a.on_neighbors_changed(ids({1}));
    CHECK(a.update() == doctest::Approx(0.4).epsilon(1e-12));

    // st' = 0.5, J̄ = 0.5 -> the fixed point 0.5; one window whose folds
    // are J = 0, 3/4, 3/4 has mean exactly 0.5
    StabilityState b(0.4, 0.6, 0.5);
    b.on_neighbors_changed(ids({1, 2, 3, 4}));
    b.on_neighbors_changed(ids({1, 2, 3}));
    b.on_neighbors_changed(ids({1, 2, 3, 4}));
    CHECK(b.update() == doctest::Approx(0.5).epsilon(1e-12));

    // no change in the window -> J̄ := 1; with st' = 0 the result is 0.6
    StabilityState c(0.4, 0.6, 0.0);
    CHECK(c.update() == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("stability stays within [0,1] over random update sequences")
{
    Rng rng(23);
    StabilityState ss(0.4, 0.6);
    for (int i = 0; i < 100000; ++i) {
        if (rng.uniform01() < 0.7) {
            const auto next = random_ids(rng, 8, 20);
            if (next != ss.prev_neighbors()) {
                ss.on_neighbors_changed(next);
            }
        } else {
            const double st = ss.update();
            CHECK(st >= 0.0);
            CHECK(st <= 1.0);
        }
    }
}

TEST_CASE("suitability on the worked examples")
{
    SuitabilityWeights w; // 0.25 each
    NormalizationParams norm{10.0, 10.0};

    ContextSnapshot zero{0.0, 0, 0, 0.0};
    CHECK(suitability(zero, w, norm) == 0.0);

    ContextSnapshot one{1.0, 10, 10, 1.0};
    CHECK(suitability(one, w, norm) == doctest::Approx(1.0).epsilon(1e-12));

    // r=0.8, pp/pp_max=0.5, c/c_max=0.4, st=0.6 -> 0.25*2.3 = 0.575
    ContextSnapshot mid{0.8, 5, 4, 0.6};
    CHECK(suitability(mid, w, norm) == doctest::Approx(0.575).epsilon(1e-12));
}

TEST_CASE("suitability clamps the count terms at their caps")
{
    SuitabilityWeights w;
    NormalizationParams norm{15.0, 15.0};
    ContextSnapshot crowded{0.0, 200, 40, 0.0};
    CHECK(suitability(crowded, w, norm) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("suitability is monotone in every feature and stays in [0,1]")
{
    Rng rng(31);
    SuitabilityWeights w;
    NormalizationParams norm{15.0, 15.0};
    for (int i = 0; i < 10000; ++i) {
        ContextSnapshot a;
        a.resources = rng.uniform01();
        a.peers_in_proximity = rng.uniform_int(0, 30);
        a.free_slots = rng.uniform_int(0, 15);
        a.stability = rng.uniform01();

        ContextSnapshot b = a; // grow one feature, chosen at random
        switch (rng.uniform_int(0, 3)) {
        case 0: b.resources = std::min(1.0, a.resources + rng.uniform01()); break;
        case 1: b.peers_in_proximity += rng.uniform_int(0, 10); break;
        case 2: b.free_slots += rng.uniform_int(0, 10); break;
        default: b.stability = std::min(1.0, a.stability + rng.uniform01()); break;
        }
        const double sa = suitability(a, w, norm);
        const double sb = suitability(b, w, norm);
        CHECK(sb >= sa - 1e-12);
        CHECK(sa >= 0.0);
        CHECK(sa <= 1.0 + 1e-12);
    }
}

TEST_CASE("best candidate picks the highest suitability, self included")
{
    Blacklist bl;
    const ServiceRecord self = rec(3, 0.7);

    std::vector<ServiceRecord> records{rec(10, 0.9)};
    CHECK(best_candidate(records, self, bl, 0.0) == NodeId{10});

    records = {rec(10, 0.5)};
    CHECK(best_candidate(records, self, bl, 0.0) == NodeId{3});

    records = {};
    CHECK(best_candidate(records, self, bl, 0.0) == NodeId{3});
}

TEST_CASE("equal suitability breaks toward the higher ordinal")
{
    Blacklist bl;
    const ServiceRecord self = rec(3, 0.5);
    std::vector<ServiceRecord> records{rec(7, 0.5)};
    CHECK(best_candidate(records, self, bl, 0.0) == NodeId{7});
    records = {rec(2, 0.5)};
    CHECK(best_candidate(records, self, bl, 0.0) == NodeId{3});
}

TEST_CASE("blacklisted and credential-less records are skipped")
{
    Blacklist bl;
    bl.add(NodeId{9}, 0.0, 100.0);
    const ServiceRecord self = rec(3, 0.7);
    std::vector<ServiceRecord> records{rec(9, 0.99), rec(5, 0.99, /*creds=*/false)};
    CHECK(best_candidate(records, self, bl, 50.0) == NodeId{3});
    CHECK(best_candidate(records, self, bl, 100.0) == NodeId{9}); // expiry passed
}

TEST_CASE("best candidate is invariant under permutation of the input")
{
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<ServiceRecord> records;
        const uint32_t n = rng.uniform_int(1, 12);
        for (uint32_t i = 0; i < n; ++i) {
            records.push_back(rec(i, rng.uniform_int(0, 4) / 4.0));
        }
        const ServiceRecord self = rec(100, rng.uniform_int(0, 4) / 4.0);
        Blacklist bl;
        const NodeId expected = best_candidate(records, self, bl, 0.0);
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            for (std::size_t i = records.size(); i > 1; --i) {
                std::swap(records[i - 1], records[rng.uniform_int(0, static_cast<uint32_t>(i) - 1)]);
            }
            CHECK(best_candidate(records, self, bl, 0.0) == expected);
        }
    }
}
