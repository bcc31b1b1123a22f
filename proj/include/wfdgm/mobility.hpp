#pragma once

#include "wfdgm/rng.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace wfdgm {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Walkable map: vertices joined by undirected segments, with a subset of
// vertices marked as points of interest. uniform_lattice() builds the
// default evenly spaced grid; tests also construct arbitrary graphs.
struct GridMap {
    double width = 0.0;
    double height = 0.0;
    std::vector<Position> vertices;
    std::vector<std::vector<uint32_t>> adjacency;
    std::vector<uint32_t> pois; // vertex indices

    static GridMap uniform_lattice(double width, double height, double spacing);

    void sample_pois(uint32_t count, Rng& rng);
    double edge_length(uint32_t a, uint32_t b) const
    {
        return distance(vertices[a], vertices[b]);
    }
    bool connected() const;

    // Dijkstra over segment lengths; ties resolved toward the lower vertex
    // id so the path is deterministic. Returns the vertex sequence from
    // `from` to `to` inclusive; empty if unreachable.
    std::vector<uint32_t> shortest_path(uint32_t from, uint32_t to) const;
    double path_length(std::span<const uint32_t> path) const;
};

// One node's walk state in the map-based models.
struct Waypoint {
    Position pos;
    std::vector<uint32_t> path; // remaining vertices to visit, front = next
    std::size_t next = 0;       // index into path
    double speed = 0.0;         // m/s for the current leg
    double wait_until = 0.0;    // waiting at a POI until this time
};

// Position generator interface driven by the simulation kernel.
class Mobility {
  public:
    virtual ~Mobility() = default;
    virtual uint32_t node_count() const = 0;
    virtual std::vector<Position> initial_positions() = 0;
    virtual bool static_scene() const { return false; }
    // Advance all nodes from `now` to `now + dt`, writing new positions.
    virtual void step(double now, double dt, std::span<Position> positions) = 0;
};

// Everyone seated on a fixed grid for the whole run.
class StaticGridMobility : public Mobility {
  public:
    StaticGridMobility(uint32_t nodes, uint32_t rows, uint32_t cols, double spacing);
    uint32_t node_count() const override { return nodes_; }
    std::vector<Position> initial_positions() override;
    bool static_scene() const override { return true; }
    void step(double, double, std::span<Position>) override {}

  private:
    uint32_t nodes_, rows_, cols_;
    double spacing_;
};

struct PoiWalkConfig {
    double speed_min = 0.0;
    double speed_max = 1.5;
    double wait_min = 600.0;
    double wait_max = 3600.0;
};

// Shortest-path map movement: pick a random POI, walk the shortest route to
// it, dwell for a random time, repeat.
class PoiWalkMobility : public Mobility {
  public:
    PoiWalkMobility(GridMap map, uint32_t nodes, const PoiWalkConfig& cfg, uint64_t seed);
    uint32_t node_count() const override { return nodes_; }
    std::vector<Position> initial_positions() override;
    void step(double now, double dt, std::span<Position> positions) override;

    const GridMap& map() const { return map_; }

  private:
    void start_new_leg(uint32_t node, double now);

    GridMap map_;
    uint32_t nodes_;
    PoiWalkConfig cfg_;
    std::vector<Waypoint> state_;
    std::vector<uint32_t> at_vertex_; // current/last reached vertex
    std::vector<Rng> rng_;
};

struct WorkingDayConfig {
    double width = 3000.0;
    double height = 3000.0;
    uint32_t office_count = 10;
    uint32_t evening_count = 5;
    uint32_t home_count = 150;
    double transport_speed = 10.0; // m/s, straight-line commutes
    double day_start = 0.0;        // time-of-day (seconds) at simulation t=0
    // departure windows, seconds into the day
    double depart_home_lo = 27000.0, depart_home_hi = 32400.0;    // 7:30-9:00
    double depart_work_lo = 57600.0, depart_work_hi = 63000.0;    // 16:00-17:30
    double depart_evening_lo = 70200.0, depart_evening_hi = 77400.0; // 19:30-21:30
};

// Simplified working-day cycle: home -> office -> evening spot -> home, with
// per-node jittered departure times and straight-line commutes.
class WorkingDayMobility : public Mobility {
  public:
    WorkingDayMobility(const WorkingDayConfig& cfg, uint32_t nodes, uint64_t seed);
    uint32_t node_count() const override { return nodes_; }
    std::vector<Position> initial_positions() override;
    void step(double now, double dt, std::span<Position> positions) override;

    // Where the schedule says node should be at this time of day.
    Position scheduled_place(uint32_t node, double time_of_day) const;
    const WorkingDayConfig& config() const { return cfg_; }

  private:
    struct Plan {
        Position home, office, evening;
        double depart_home, depart_work, depart_evening;
    };

    WorkingDayConfig cfg_;
    uint32_t nodes_;
    std::vector<Plan> plans_;
    std::vector<Position> pos_;
    bool initialized_ = false;
};

} // namespace wfdgm
