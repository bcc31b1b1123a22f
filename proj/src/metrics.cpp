#include "wfdgm/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>

namespace wfdgm {

// ---------------------------------------------------------------------------
// ConnectivityGraph
// ---------------------------------------------------------------------------

ConnectivityGraph::ConnectivityGraph(uint32_t node_count)
    : n_(node_count), w_(static_cast<std::size_t>(node_count) * (node_count - 1) / 2, 0.0)
{
}

std::size_t ConnectivityGraph::index(uint32_t a, uint32_t b) const
{
    if (a > b) {
        std::swap(a, b);
    }
    // row a of the strict upper triangle, column b
    return static_cast<std::size_t>(a) * (2 * n_ - a - 1) / 2 + (b - a - 1);
}

void ConnectivityGraph::add_contact(NodeId a, NodeId b, double dt)
{
    assert(a != b);
    w_[index(a.ordinal, b.ordinal)] += dt;
}

double ConnectivityGraph::weight(NodeId a, NodeId b) const
{
    if (a == b) {
        return 0.0;
    }
    return w_[index(a.ordinal, b.ordinal)];
}

std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> ConnectivityGraph::edges() const
{
    std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> out;
    std::size_t k = 0;
    for (uint32_t a = 0; a < n_; ++a) {
        for (uint32_t b = a + 1; b < n_; ++b, ++k) {
            if (w_[k] > 0.0) {
                out.push_back({{a, b}, w_[k]});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Connected components
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
    explicit UnionFind(uint32_t n) : parent(n)
    {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    uint32_t find(uint32_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(uint32_t a, uint32_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            // keep the smaller root so component ids stay stable
            if (b < a) {
                std::swap(a, b);
            }
            parent[b] = a;
        }
    }
    std::vector<uint32_t> parent;
};

std::vector<Component> collect_components(UnionFind& uf, uint32_t n)
{
    std::map<uint32_t, Component> by_root;
    for (uint32_t v = 0; v < n; ++v) {
        by_root[uf.find(v)].members.push_back(v);
    }
    std::vector<Component> out;
    out.reserve(by_root.size());
    for (auto& [root, comp] : by_root) {
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        if (a.size() != b.size()) {
            return a.size() > b.size();
        }
        return a.members.front() < b.members.front();
    });
    return out;
}

} // namespace

std::vector<Component> components_of_edges(
    uint32_t node_count, std::span<const std::pair<uint32_t, uint32_t>> edges)
{
    UnionFind uf(node_count);
    for (const auto& [a, b] : edges) {
        uf.unite(a, b);
    }
    return collect_components(uf, node_count);
}

ComponentSummary connected_components(const ConnectivityGraph& cg)
{
    UnionFind uf(cg.node_count());
    for (const auto& [pair, weight] : cg.edges()) {
        uf.unite(pair.first, pair.second);
    }
    ComponentSummary summary;
    summary.components = collect_components(uf, cg.node_count());
    if (!summary.components.empty() && cg.node_count() > 0) {
        summary.largest_fraction =
            static_cast<double>(summary.components.front().size()) / cg.node_count();
    }
    return summary;
}

// ---------------------------------------------------------------------------
// DiffusionState
// ---------------------------------------------------------------------------

DiffusionState::DiffusionState(uint32_t node_count)
    : n_(node_count), words_per_node_((node_count + 63) / 64),
      bits_(static_cast<std::size_t>(n_) * words_per_node_, 0)
{
    for (uint32_t v = 0; v < n_; ++v) {
        blocks(v)[v / 64] |= uint64_t{1} << (v % 64); // own message
    }
}

std::span<uint64_t> DiffusionState::blocks(uint32_t node)
{
    return {bits_.data() + static_cast<std::size_t>(node) * words_per_node_, words_per_node_};
}

std::span<const uint64_t> DiffusionState::blocks(uint32_t node) const
{
    return {bits_.data() + static_cast<std::size_t>(node) * words_per_node_, words_per_node_};
}

void DiffusionState::on_join(NodeId joiner, std::span<const NodeId> group_members)
{
    auto joiner_bits = blocks(joiner.ordinal);
    // the joiner hands its cache to every member, and collects all of theirs
    std::vector<uint64_t> incoming(joiner_bits.begin(), joiner_bits.end());
    for (const NodeId member : group_members) {
        if (member == joiner) {
            continue;
        }
        auto member_bits = blocks(member.ordinal);
        for (uint32_t w = 0; w < words_per_node_; ++w) {
            incoming[w] |= member_bits[w];
            member_bits[w] |= joiner_bits[w];
        }
    }
    std::copy(incoming.begin(), incoming.end(), joiner_bits.begin());
}

bool DiffusionState::holds(NodeId node, uint32_t message) const
{
    return (blocks(node.ordinal)[message / 64] >> (message % 64)) & 1;
}

uint32_t DiffusionState::cache_size(NodeId node) const
{
    uint32_t count = 0;
    for (const uint64_t w : blocks(node.ordinal)) {
        count += static_cast<uint32_t>(std::popcount(w));
    }
    return count;
}

double DiffusionState::mean_fraction() const
{
    if (n_ == 0) {
        return 0.0;
    }
    double sum = 0.0;
    for (uint32_t v = 0; v < n_; ++v) {
        sum += static_cast<double>(cache_size(NodeId{v})) / n_;
    }
    return sum / n_;
}

void DiffusionState::sample(double now) { samples_.push_back({now, mean_fraction()}); }

// ---------------------------------------------------------------------------
// ReachabilitySamples
// ---------------------------------------------------------------------------

ReachabilitySamples::ReachabilitySamples(uint32_t node_count)
    : n_(node_count), counts_(static_cast<std::size_t>(node_count) * (node_count - 1) / 2, 0)
{
}

std::size_t ReachabilitySamples::index(uint32_t a, uint32_t b) const
{
    if (a > b) {
        std::swap(a, b);
    }
    return static_cast<std::size_t>(a) * (2 * n_ - a - 1) / 2 + (b - a - 1);
}

void ReachabilitySamples::sample(std::span<const std::pair<uint32_t, uint32_t>> co_group_edges)
{
    ++total_;
    const auto comps = components_of_edges(n_, co_group_edges);
    for (const auto& comp : comps) {
        for (std::size_t i = 0; i < comp.members.size(); ++i) {
            for (std::size_t j = i + 1; j < comp.members.size(); ++j) {
                ++counts_[index(comp.members[i], comp.members[j])];
            }
        }
    }
}

double ReachabilitySamples::probability(NodeId a, NodeId b) const
{
    if (total_ == 0 || a == b) {
        return 0.0;
    }
    return static_cast<double>(counts_[index(a.ordinal, b.ordinal)]) / total_;
}

std::vector<double> ReachabilitySamples::pair_probabilities() const
{
    std::vector<double> out;
    if (total_ == 0) {
        return out;
    }
    out.reserve(counts_.size());
    for (const uint32_t c : counts_) {
        out.push_back(static_cast<double>(c) / total_);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CCDF and battery statistics
// ---------------------------------------------------------------------------

std::vector<std::pair<double, double>> ccdf(std::span<const double> values)
{
    std::vector<std::pair<double, double>> out;
    if (values.empty()) {
        return out;
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    std::vector<double> thresholds;
    thresholds.push_back(0.0);
    for (const double v : sorted) {
        if (v != thresholds.back()) {
            thresholds.push_back(v);
        }
    }
    for (const double t : thresholds) {
        const auto first_ge = std::lower_bound(sorted.begin(), sorted.end(), t);
        const double frac = static_cast<double>(sorted.end() - first_ge) / n;
        out.push_back({t, frac});
    }
    return out;
}

BatteryStats battery_stats(std::span<const double> values)
{
    BatteryStats stats;
    if (values.empty()) {
        return stats;
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    double sum = 0.0;
    for (const double v : sorted) {
        sum += v;
    }
    stats.mean = sum / n;

    stats.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;

    double sq = 0.0;
    for (const double v : sorted) {
        sq += (v - stats.mean) * (v - stats.mean);
    }
    stats.variance = sq / n;
    return stats;
}

} // namespace wfdgm
