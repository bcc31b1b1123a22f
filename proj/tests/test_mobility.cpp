#include "wfdgm/mobility.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace wfdgm;

namespace {

// Bellman-Ford: the brute-force shortest-path oracle.
double bf_distance(const GridMap& map, uint32_t from, uint32_t to)
{
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(map.vertices.size(), inf);
    dist[from] = 0.0;
    for (std::size_t round = 0; round + 1 < map.vertices.size(); ++round) {
        bool changed = false;
        for (uint32_t v = 0; v < map.vertices.size(); ++v) {
            if (dist[v] == inf) {
                continue;
            }
            for (const uint32_t w : map.adjacency[v]) {
                const double nd = dist[v] + map.edge_length(v, w);
                if (nd < dist[w] - 1e-12) {
                    dist[w] = nd;
                    changed = true;
                }
            }
        }
        if (!changed) {
            break;
        }
    }
    return dist[to];
}

// Random connected graph: a random spanning tree plus extra edges.
GridMap random_map(Rng& rng)
{
    GridMap map;
    const uint32_t n = rng.uniform_int(2, 14);
    map.width = 100.0;
    map.height = 100.0;
    map.vertices.resize(n);
    map.adjacency.resize(n);
    for (auto& v : map.vertices) {
        v = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    }
    auto link = [&map](uint32_t a, uint32_t b) {
        if (a == b) {
            return;
        }
        auto& la = map.adjacency[a];
        if (std::find(la.begin(), la.end(), b) == la.end()) {
            la.push_back(b);
            map.adjacency[b].push_back(a);
        }
    };
    for (uint32_t v = 1; v < n; ++v) {
        link(v, rng.uniform_int(0, v - 1));
    }
    const uint32_t extra = rng.uniform_int(0, n);
    for (uint32_t e = 0; e < extra; ++e) {
        link(rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1));
    }
    return map;
}

} // namespace

TEST_CASE("static grid places nodes row-major")
{
    StaticGridMobility grid(4, 2, 2, 1.0);
    const auto pos = grid.initial_positions();
    REQUIRE(pos.size() == 4);
    CHECK(pos[0].x == 0.0);
    CHECK(pos[0].y == 0.0);
    CHECK(pos[1].x == 1.0);
    CHECK(pos[1].y == 0.0);
    CHECK(pos[2].x == 0.0);
    CHECK(pos[2].y == 1.0);
    CHECK(pos[3].x == 1.0);
    CHECK(pos[3].y == 1.0);
    CHECK(grid.static_scene());
}

TEST_CASE("static grid rejects undersized grids")
{
    CHECK_THROWS(StaticGridMobility(5, 2, 2, 1.0));
}

TEST_CASE("the desk-scale concert grid is fully mutually reachable")
{
    StaticGridMobility grid(200, 10, 20, 1.0);
    const auto pos = grid.initial_positions();
    double max_d = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j = i + 1; j < pos.size(); ++j) {
            max_d = std::max(max_d, distance(pos[i], pos[j]));
        }
    }
    CHECK(max_d <= 21.4);
    CHECK(max_d == doctest::Approx(std::sqrt(19.0 * 19.0 + 9.0 * 9.0)));
}

TEST_CASE("uniform lattice is connected and holds its POIs on vertices")
{
    GridMap map = GridMap::uniform_lattice(100.0, 60.0, 20.0);
    CHECK(map.vertices.size() == 6 * 4);
    CHECK(map.connected());
    Rng rng(5);
    map.sample_pois(10, rng);
    CHECK(map.pois.size() == 10);
    std::set<uint32_t> unique(map.pois.begin(), map.pois.end());
    CHECK(unique.size() == 10); // sampled without replacement
    for (const uint32_t p : map.pois) {
        CHECK(p < map.vertices.size());
    }
}

TEST_CASE("dijkstra path lengths match the Bellman-Ford oracle on random maps")
{
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const GridMap map = random_map(rng);
        REQUIRE(map.connected());
        for (int probe = 0; probe < 10; ++probe) {
            const auto n = static_cast<uint32_t>(map.vertices.size());
            const uint32_t from = rng.uniform_int(0, n - 1);
            const uint32_t to = rng.uniform_int(0, n - 1);
            const auto path = map.shortest_path(from, to);
            REQUIRE(!path.empty());
            CHECK(path.front() == from);
            CHECK(path.back() == to);
            // consecutive path vertices must share an edge
            for (std::size_t i = 1; i < path.size(); ++i) {
                const auto& adj = map.adjacency[path[i - 1]];
                CHECK(std::find(adj.begin(), adj.end(), path[i]) != adj.end());
            }
            CHECK(map.path_length(path) ==
                  doctest::Approx(bf_distance(map, from, to)).epsilon(1e-9));
        }
    }
}

TEST_CASE("waiting nodes do not move; walking covers speed*dt")
{
    GridMap map = GridMap::uniform_lattice(100.0, 20.0, 10.0);
    Rng poi_rng(1);
    map.sample_pois(8, poi_rng);
    PoiWalkConfig cfg;
    cfg.wait_min = 1000.0;
    cfg.wait_max = 2000.0;
    cfg.speed_min = 1.0;
    cfg.speed_max = 1.0;
    PoiWalkMobility walk(std::move(map), 6, cfg, 42);
    auto pos = walk.initial_positions();

    // initial dwell: every node waits at least 1000 s
    std::vector<Position> next(pos);
    walk.step(0.0, 10.0, next);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(next[i].x == pos[i].x);
        CHECK(next[i].y == pos[i].y);
    }

    // after the dwell expires, a fixed-speed node advances exactly 10 m
    // along its lattice path per 10 s step (until it reaches the POI)
    double t = 10.0;
    std::vector<Position> prev(next);
    bool saw_full_step = false;
    for (int k = 0; k < 400; ++k) {
        walk.step(t, 10.0, next);
        for (std::size_t i = 0; i < prev.size(); ++i) {
            const double d = distance(prev[i], next[i]);
            CHECK(d <= 10.0 + 1e-9); // speed bound
            if (std::abs(d - 10.0) < 1e-9) {
                saw_full_step = true;
            }
        }
        prev = next;
        t += 10.0;
    }
    CHECK(saw_full_step);
}

TEST_CASE("poi walk respects the speed bound and the bounding box")
{
    GridMap map = GridMap::uniform_lattice(200.0, 100.0, 20.0);
    Rng poi_rng(9);
    map.sample_pois(15, poi_rng);
    PoiWalkConfig cfg;
    cfg.wait_min = 5.0;
    cfg.wait_max = 50.0;
    PoiWalkMobility walk(std::move(map), 10, cfg, 7);
    auto pos = walk.initial_positions();
    std::vector<Position> next(pos);
    for (int k = 0; k < 3000; ++k) {
        walk.step(k * 1.0, 1.0, next);
        for (std::size_t i = 0; i < next.size(); ++i) {
            CHECK(distance(pos[i], next[i]) <= cfg.speed_max * 1.0 + 1e-9);
            CHECK(next[i].x >= -1e-9);
            CHECK(next[i].x <= 200.0 + 1e-9);
            CHECK(next[i].y >= -1e-9);
            CHECK(next[i].y <= 100.0 + 1e-9);
        }
        pos = next;
    }
}

TEST_CASE("poi walk is deterministic per seed")
{
    auto build = [] {
        GridMap map = GridMap::uniform_lattice(200.0, 100.0, 20.0);
        Rng poi_rng(9);
        map.sample_pois(15, poi_rng);
        PoiWalkConfig cfg;
        cfg.wait_min = 5.0;
        cfg.wait_max = 50.0;
        return PoiWalkMobility(std::move(map), 8, cfg, 1234);
    };
    PoiWalkMobility a = build();
    PoiWalkMobility b = build();
    auto pa = a.initial_positions();
    auto pb = b.initial_positions();
    for (int k = 0; k < 500; ++k) {
        a.step(k * 1.0, 1.0, pa);
        b.step(k * 1.0, 1.0, pb);
    }
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].x == pb[i].x);
        CHECK(pa[i].y == pb[i].y);
    }
}

TEST_CASE("working day keeps nodes at the scheduled place and commutes between them")
{
    WorkingDayConfig cfg;
    cfg.width = 3000.0;
    cfg.height = 3000.0;
    cfg.office_count = 2;
    cfg.evening_count = 1;
    cfg.home_count = 5;
    cfg.day_start = 50400.0; // 14:00, mid work phase
    WorkingDayMobility wd(cfg, 4, 99);
    auto pos = wd.initial_positions();

    // during the work phase everyone sits exactly at their office
    for (uint32_t i = 0; i < 4; ++i) {
        const Position office = wd.scheduled_place(i, 51000.0);
        CHECK(pos[i].x == office.x);
        CHECK(pos[i].y == office.y);
    }

    // run to the end of the evening window: everyone must be home
    double t = 0.0;
    const double horizon = 86400.0 - cfg.day_start; // midnight
    while (t < horizon) {
        wd.step(t, 10.0, pos);
        t += 10.0;
    }
    for (uint32_t i = 0; i < 4; ++i) {
        const Position home = wd.scheduled_place(i, 100.0);
        CHECK(pos[i].x == doctest::Approx(home.x));
        CHECK(pos[i].y == doctest::Approx(home.y));
    }
}

TEST_CASE("nodes sharing an evening spot are colocated during the evening phase")
{
    WorkingDayConfig cfg;
    cfg.width = 2000.0;
    cfg.height = 2000.0;
    cfg.office_count = 4;
    cfg.evening_count = 1; // everyone meets at the same place
    cfg.home_count = 8;
    cfg.day_start = 50400.0;
    WorkingDayMobility wd(cfg, 6, 11);
    auto pos = wd.initial_positions();

    // run until 19:00: all departures happened by 17:30, and the longest
    // possible commute is well under an hour at transport speed
    const double horizon = 68400.0 - cfg.day_start;
    for (double t = 0.0; t < horizon; t += 10.0) {
        wd.step(t, 10.0, pos);
    }
    for (uint32_t i = 1; i < 6; ++i) {
        CHECK(distance(pos[0], pos[i]) == doctest::Approx(0.0)); // in radio range trivially
    }
}

TEST_CASE("working day is deterministic per seed")
{
    WorkingDayConfig cfg;
    WorkingDayMobility a(cfg, 10, 77);
    WorkingDayMobility b(cfg, 10, 77);
    auto pa = a.initial_positions();
    auto pb = b.initial_positions();
    for (int k = 0; k < 2000; ++k) {
        a.step(k * 10.0, 10.0, pa);
        b.step(k * 10.0, 10.0, pb);
    }
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].x == pb[i].x);
        CHECK(pa[i].y == pb[i].y);
    }
}

TEST_CASE("commute time equals distance over transport speed")
{
    WorkingDayConfig cfg;
    cfg.width = 3000.0;
    cfg.height = 3000.0;
    cfg.transport_speed = 10.0;
    cfg.depart_work_lo = cfg.depart_work_hi = 57600.0; // departure pinned
    cfg.day_start = 57590.0;                           // ten seconds before it
    WorkingDayMobility wd(cfg, 3, 5);
    auto pos = wd.initial_positions();

    for (uint32_t node = 0; node < 3; ++node) {
        const Position office = wd.scheduled_place(node, 57599.0);
        CHECK(pos[node].x == office.x); // still at work before departure
    }

    // count the moving steps of each node's office -> evening leg
    std::vector<int> moving(3, 0);
    std::vector<Position> prev(pos.begin(), pos.end());
    double t = 0.0;
    for (int k = 0; k < 2000; ++k) {
        wd.step(t, 1.0, pos);
        t += 1.0;
        for (uint32_t node = 0; node < 3; ++node) {
            if (distance(prev[node], pos[node]) > 1e-9) {
                ++moving[node];
            }
        }
        prev = pos;
    }
    for (uint32_t node = 0; node < 3; ++node) {
        const Position office = wd.scheduled_place(node, 57599.0);
        const Position evening = wd.scheduled_place(node, 57601.0);
        const double leg = distance(office, evening);
        // e.g. a 3000 m leg at 10 m/s is exactly 300 one-second steps
        CHECK(moving[node] == static_cast<int>(std::ceil(leg / cfg.transport_speed)));
    }
}
