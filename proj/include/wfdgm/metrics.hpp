#pragma once

#include "wfdgm/domain.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wfdgm {

// Undirected weighted contact graph: weight(a,b) = total seconds a and b
// spent in the same group. Backed by a flat triangular array so full-scale
// runs stay cheap; the pair-keyed accessors are the public contract.
class ConnectivityGraph {
  public:
    ConnectivityGraph() = default;
    explicit ConnectivityGraph(uint32_t node_count);

    uint32_t node_count() const { return n_; }
    void add_contact(NodeId a, NodeId b, double dt);
    double weight(NodeId a, NodeId b) const;

    // Every pair with weight > 0, in canonical (a < b) order.
    std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> edges() const;

  private:
    std::size_t index(uint32_t a, uint32_t b) const;
    uint32_t n_ = 0;
    std::vector<double> w_;
};

struct Component {
    std::vector<uint32_t> members; // sorted ordinals
    std::size_t size() const { return members.size(); }
};

struct ComponentSummary {
    std::vector<Component> components;   // largest first, ties by smallest member
    std::size_t count() const { return components.size(); }
    double largest_fraction = 0.0;       // |largest| / node_count
};

// Connected components over the edges with weight > 0; isolated nodes form
// singleton components.
ComponentSummary connected_components(const ConnectivityGraph& cg);

// Components of an arbitrary undirected graph given as an edge list over
// ordinals 0..n-1. Shared by the reachability sampler.
std::vector<Component> components_of_edges(
    uint32_t node_count, std::span<const std::pair<uint32_t, uint32_t>> edges);

// Epidemic caches: every node starts with its own message (id = creator
// ordinal); a join triggers a full bidirectional cache exchange between the
// joiner and every member of the group it enters. Caches only grow.
class DiffusionState {
  public:
    DiffusionState() = default;
    explicit DiffusionState(uint32_t node_count);

    void on_join(NodeId joiner, std::span<const NodeId> group_members);
    void sample(double now);

    bool holds(NodeId node, uint32_t message) const;
    uint32_t cache_size(NodeId node) const;
    double mean_fraction() const;
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

  private:
    std::span<uint64_t> blocks(uint32_t node);
    std::span<const uint64_t> blocks(uint32_t node) const;

    uint32_t n_ = 0;
    uint32_t words_per_node_ = 0;
    std::vector<uint64_t> bits_;
    std::vector<std::pair<double, double>> samples_; // (time, mean fraction)
};

// Periodic connectivity snapshots: at each sample the instantaneous co-group
// graph is built, its components found, and every pair sharing a component
// gets a hit. p(a,b) = hits / samples.
class ReachabilitySamples {
  public:
    ReachabilitySamples() = default;
    explicit ReachabilitySamples(uint32_t node_count);

    void sample(std::span<const std::pair<uint32_t, uint32_t>> co_group_edges);
    uint32_t total_samples() const { return total_; }
    double probability(NodeId a, NodeId b) const;

    // p for every unordered pair (including never-connected ones).
    std::vector<double> pair_probabilities() const;

  private:
    std::size_t index(uint32_t a, uint32_t b) const;
    uint32_t n_ = 0;
    uint32_t total_ = 0;
    std::vector<uint32_t> counts_;
};

// Complementary CDF of `values` evaluated at 0 and at every distinct value:
// (threshold, fraction of values >= threshold), thresholds ascending.
std::vector<std::pair<double, double>> ccdf(std::span<const double> values);

struct BatteryStats {
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0; // population variance
};

BatteryStats battery_stats(std::span<const double> values);

} // namespace wfdgm
