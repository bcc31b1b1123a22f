#include "wfdgm/mobility.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <queue>
#include <stdexcept>

namespace wfdgm {

// ---------------------------------------------------------------------------
// GridMap
// ---------------------------------------------------------------------------

GridMap GridMap::uniform_lattice(double width, double height, double spacing)
{
    GridMap map;
    map.width = width;
    map.height = height;
    const auto cols = static_cast<uint32_t>(std::floor(width / spacing)) + 1;
    const auto rows = static_cast<uint32_t>(std::floor(height / spacing)) + 1;
    map.vertices.reserve(static_cast<std::size_t>(cols) * rows);
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t c = 0; c < cols; ++c) {
            map.vertices.push_back({c * spacing, r * spacing});
        }
    }
    map.adjacency.resize(map.vertices.size());
    auto vid = [cols](uint32_t r, uint32_t c) { return r * cols + c; };
    for (uint32_t r = 0; r < rows; ++r) {
        for (uint32_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                map.adjacency[vid(r, c)].push_back(vid(r, c + 1));
                map.adjacency[vid(r, c + 1)].push_back(vid(r, c));
            }
            if (r + 1 < rows) {
                map.adjacency[vid(r, c)].push_back(vid(r + 1, c));
                map.adjacency[vid(r + 1, c)].push_back(vid(r, c));
            }
        }
    }
    return map;
}

void GridMap::sample_pois(uint32_t count, Rng& rng)
{
    if (count > vertices.size()) {
        throw std::runtime_error("more POIs requested than map vertices");
    }
    // partial Fisher-Yates over the vertex ids
    std::vector<uint32_t> ids(vertices.size());
    for (uint32_t i = 0; i < ids.size(); ++i) {
        ids[i] = i;
    }
    pois.clear();
    pois.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        const uint32_t j = rng.uniform_int(i, static_cast<uint32_t>(ids.size()) - 1);
        std::swap(ids[i], ids[j]);
        pois.push_back(ids[i]);
    }
    std::sort(pois.begin(), pois.end());
}

bool GridMap::connected() const
{
    if (vertices.empty()) {
        return true;
    }
    std::vector<bool> seen(vertices.size(), false);
    std::vector<uint32_t> stack{0};
    seen[0] = true;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const uint32_t v = stack.back();
        stack.pop_back();
        for (const uint32_t w : adjacency[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++visited;
                stack.push_back(w);
            }
        }
    }
    return visited == vertices.size();
}

std::vector<uint32_t> GridMap::shortest_path(uint32_t from, uint32_t to) const
{
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(vertices.size(), kInf);
    std::vector<uint32_t> prev(vertices.size(), std::numeric_limits<uint32_t>::max());
    using Entry = std::pair<double, uint32_t>; // (distance, vertex); vertex breaks ties
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[from] = 0.0;
    heap.push({0.0, from});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) {
            continue;
        }
        if (v == to) {
            break;
        }
        for (const uint32_t w : adjacency[v]) {
            const double nd = d + edge_length(v, w);
            if (nd < dist[w]) {
                dist[w] = nd;
                prev[w] = v;
                heap.push({nd, w});
            }
        }
    }
    if (dist[to] == kInf) {
        return {};
    }
    std::vector<uint32_t> path;
    for (uint32_t v = to; v != from; v = prev[v]) {
        path.push_back(v);
    }
    path.push_back(from);
    std::reverse(path.begin(), path.end());
    return path;
}

double GridMap::path_length(std::span<const uint32_t> path) const
{
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        len += edge_length(path[i - 1], path[i]);
    }
    return len;
}

// ---------------------------------------------------------------------------
// StaticGridMobility
// ---------------------------------------------------------------------------

StaticGridMobility::StaticGridMobility(uint32_t nodes, uint32_t rows, uint32_t cols,
                                       double spacing)
    : nodes_(nodes), rows_(rows), cols_(cols), spacing_(spacing)
{
    if (static_cast<uint64_t>(rows) * cols < nodes) {
        throw std::runtime_error("static grid too small for the node count");
    }
}

std::vector<Position> StaticGridMobility::initial_positions()
{
    std::vector<Position> out(nodes_);
    for (uint32_t k = 0; k < nodes_; ++k) {
        out[k] = {(k % cols_) * spacing_, (k / cols_) * spacing_};
    }
    return out;
}

// ---------------------------------------------------------------------------
// PoiWalkMobility
// ---------------------------------------------------------------------------

PoiWalkMobility::PoiWalkMobility(GridMap map, uint32_t nodes, const PoiWalkConfig& cfg,
                                 uint64_t seed)
    : map_(std::move(map)), nodes_(nodes), cfg_(cfg)
{
    if (map_.pois.size() < 2) {
        throw std::runtime_error("POI walk needs at least two POIs");
    }
    if (!map_.connected()) {
        throw std::runtime_error("POI map is not connected");
    }
    state_.resize(nodes_);
    at_vertex_.resize(nodes_);
    rng_.reserve(nodes_);
    for (uint32_t k = 0; k < nodes_; ++k) {
        rng_.emplace_back(seed, 0x4d0b1000ull + k);
    }
    for (uint32_t k = 0; k < nodes_; ++k) {
        const uint32_t poi = map_.pois[rng_[k].uniform_int(
            0, static_cast<uint32_t>(map_.pois.size()) - 1)];
        at_vertex_[k] = poi;
        state_[k].pos = map_.vertices[poi];
        state_[k].wait_until = rng_[k].uniform(cfg_.wait_min, cfg_.wait_max);
    }
}

std::vector<Position> PoiWalkMobility::initial_positions()
{
    std::vector<Position> out(nodes_);
    for (uint32_t k = 0; k < nodes_; ++k) {
        out[k] = state_[k].pos;
    }
    return out;
}

void PoiWalkMobility::start_new_leg(uint32_t node, double now)
{
    auto& ws = state_[node];
    const auto poi_count = static_cast<uint32_t>(map_.pois.size());
    uint32_t dest = map_.pois[rng_[node].uniform_int(0, poi_count - 1)];
    if (dest == at_vertex_[node]) {
        // one retry keeps self-targets rare without biasing the draw much
        dest = map_.pois[rng_[node].uniform_int(0, poi_count - 1)];
    }
    ws.path = map_.shortest_path(at_vertex_[node], dest);
    ws.next = ws.path.size() > 1 ? 1 : 0;
    ws.speed = std::max(0.01, rng_[node].uniform(cfg_.speed_min, cfg_.speed_max));
    ws.wait_until = now; // walking
}

void PoiWalkMobility::step(double now, double dt, std::span<Position> positions)
{
    for (uint32_t k = 0; k < nodes_; ++k) {
        auto& ws = state_[k];
        if (ws.path.empty()) {
            if (now + dt < ws.wait_until) {
                positions[k] = ws.pos;
                continue;
            }
            start_new_leg(k, now);
            if (ws.path.empty()) { // degenerate: dest == current vertex
                ws.wait_until = now + dt + rng_[k].uniform(cfg_.wait_min, cfg_.wait_max);
                positions[k] = ws.pos;
                continue;
            }
        }
        double budget = ws.speed * dt;
        while (budget > 0.0 && ws.next < ws.path.size()) {
            const Position target = map_.vertices[ws.path[ws.next]];
            const double gap = distance(ws.pos, target);
            if (gap <= budget) {
                ws.pos = target;
                at_vertex_[k] = ws.path[ws.next];
                budget -= gap;
                ++ws.next;
            } else {
                const double f = budget / gap;
                ws.pos.x += (target.x - ws.pos.x) * f;
                ws.pos.y += (target.y - ws.pos.y) * f;
                budget = 0.0;
            }
        }
        if (ws.next >= ws.path.size()) { // arrived: dwell at the POI
            ws.path.clear();
            ws.next = 0;
            ws.wait_until = now + dt + rng_[k].uniform(cfg_.wait_min, cfg_.wait_max);
        }
        positions[k] = ws.pos;
    }
}

// ---------------------------------------------------------------------------
// WorkingDayMobility
// ---------------------------------------------------------------------------

WorkingDayMobility::WorkingDayMobility(const WorkingDayConfig& cfg, uint32_t nodes, uint64_t seed)
    : cfg_(cfg), nodes_(nodes)
{
    Rng rng(seed, 0x3a9f0000ull);
    auto draw_pos = [&rng, &cfg]() -> Position {
        return {rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height)};
    };
    std::vector<Position> offices(cfg.office_count);
    std::vector<Position> spots(cfg.evening_count);
    std::vector<Position> homes(cfg.home_count);
    for (auto& p : offices) {
        p = draw_pos();
    }
    for (auto& p : spots) {
        p = draw_pos();
    }
    for (auto& p : homes) {
        p = draw_pos();
    }
    plans_.resize(nodes_);
    for (uint32_t k = 0; k < nodes_; ++k) {
        Rng nrng(seed, 0x3a9f1000ull + k);
        auto& plan = plans_[k];
        plan.home = homes[nrng.uniform_int(0, cfg.home_count - 1)];
        plan.office = offices[nrng.uniform_int(0, cfg.office_count - 1)];
        plan.evening = spots[nrng.uniform_int(0, cfg.evening_count - 1)];
        plan.depart_home = nrng.uniform(cfg.depart_home_lo, cfg.depart_home_hi);
        plan.depart_work = nrng.uniform(cfg.depart_work_lo, cfg.depart_work_hi);
        plan.depart_evening = nrng.uniform(cfg.depart_evening_lo, cfg.depart_evening_hi);
    }
}

Position WorkingDayMobility::scheduled_place(uint32_t node, double time_of_day) const
{
    const auto& plan = plans_[node];
    if (time_of_day < plan.depart_home) {
        return plan.home;
    }
    if (time_of_day < plan.depart_work) {
        return plan.office;
    }
    if (time_of_day < plan.depart_evening) {
        return plan.evening;
    }
    return plan.home;
}

std::vector<Position> WorkingDayMobility::initial_positions()
{
    pos_.resize(nodes_);
    for (uint32_t k = 0; k < nodes_; ++k) {
        pos_[k] = scheduled_place(k, cfg_.day_start);
    }
    initialized_ = true;
    return pos_;
}

void WorkingDayMobility::step(double now, double dt, std::span<Position> positions)
{
    assert(initialized_);
    const double tod = std::fmod(cfg_.day_start + now + dt, 86400.0);
    for (uint32_t k = 0; k < nodes_; ++k) {
        const Position target = scheduled_place(k, tod);
        Position& p = pos_[k];
        const double gap = distance(p, target);
        const double reach = cfg_.transport_speed * dt;
        if (gap <= reach) {
            p = target;
        } else {
            const double f = reach / gap;
            p.x += (target.x - p.x) * f;
            p.y += (target.y - p.y) * f;
        }
        positions[k] = p;
    }
}

} // namespace wfdgm
