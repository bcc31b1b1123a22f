#pragma once

#include "wfdgm/domain.hpp"

#include <span>

namespace wfdgm {

// Inputs of the suitability index: everything a node knows about itself at
// evaluation time.
struct ContextSnapshot {
    double resources = 1.0;         // battery fraction in [0,1]
    uint32_t peers_in_proximity = 0; // |L_N|
    uint32_t free_slots = 0;         // incoming connections still acceptable
    double stability = 1.0;          // stability index in [0,1]
};

struct SuitabilityWeights {
    double resources = 0.25;
    double proximity = 0.25;
    double capacity = 0.25;
    double stability = 0.25;

    double sum() const { return resources + proximity + capacity + stability; }
};

// The raw peer and slot counts get divided by these caps (and clamped to 1)
// so the four suitability terms share the [0,1] scale.
struct NormalizationParams {
    double pp_max = 15.0;
    double c_max = 15.0;
};

// |a ∩ b| / |a ∪ b|, with jaccard(∅,∅) = 1: two empty neighborhoods are as
// similar as it gets.
double jaccard(const std::set<NodeId>& a, const std::set<NodeId>& b);

double suitability(const ContextSnapshot& cs, const SuitabilityWeights& w,
                   const NormalizationParams& norm);

// Stability index: an exponential blend of the previous index with the mean
// Jaccard similarity of successive neighbor sets observed in the current
// window. A window with no neighbor change counts as maximally stable.
class StabilityState {
  public:
    StabilityState() = default;
    StabilityState(double w_prev, double w_mean, double initial_st = 1.0)
        : st_prev_(initial_st), w_prev_(w_prev), w_mean_(w_mean)
    {
    }

    // Fold one neighbor-set change into the running mean. Callers only
    // invoke this when `current` actually differs from the previous set.
    void on_neighbors_changed(const std::set<NodeId>& current)
    {
        jaccard_sum_ += jaccard(prev_neighbors_, current);
        ++jaccard_count_;
        prev_neighbors_ = current;
    }

    // Close the current window: blend, remember, reset. Returns the new index.
    double update()
    {
        const double mean = jaccard_count_ > 0 ? jaccard_sum_ / jaccard_count_ : 1.0;
        st_prev_ = st_prev_ * w_prev_ + mean * w_mean_;
        jaccard_sum_ = 0.0;
        jaccard_count_ = 0;
        return st_prev_;
    }

    double current() const { return st_prev_; }
    const std::set<NodeId>& prev_neighbors() const { return prev_neighbors_; }
    uint32_t changes_in_window() const { return jaccard_count_; }

  private:
    double st_prev_ = 1.0; // a freshly booted node has no evidence of churn
    double jaccard_sum_ = 0.0;
    uint32_t jaccard_count_ = 0;
    std::set<NodeId> prev_neighbors_;
    double w_prev_ = 0.4;
    double w_mean_ = 0.6;
};

// Picks the best GO candidate among the discovered records and the local
// node itself. Records without credentials (plain clients) and records
// blacklisted at `now` are skipped. Ties break toward the higher ordinal, so
// the result is independent of input order.
NodeId best_candidate(std::span<const ServiceRecord> records, const ServiceRecord& self,
                      const Blacklist& bl, double now);

// (suitability, ordinal) lexicographic comparison used by elections and by
// the merge re-check.
bool record_beats(const ServiceRecord& a, const ServiceRecord& b);

} // namespace wfdgm
