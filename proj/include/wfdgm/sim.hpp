#pragma once

#include "wfdgm/baseline.hpp"
#include "wfdgm/battery.hpp"
#include "wfdgm/metrics.hpp"
#include "wfdgm/mobility.hpp"
#include "wfdgm/protocol.hpp"
#include "wfdgm/rng.hpp"
#include "wfdgm/trace.hpp"

#include <memory>
#include <string>
#include <vector>

namespace wfdgm {

enum class Protocol : uint8_t { Wfdgm, Baseline };

const char* protocol_name(Protocol p);

struct SimConfig {
    double duration = 0.0;   // seconds; must be a multiple of tick
    double tick = 1.0;       // global step
    double radio_range = 100.0;
    uint64_t seed = 1;
    uint32_t node_count = 0;
    uint32_t capacity_min = 4;
    uint32_t capacity_max = 15;
    Protocol protocol = Protocol::Wfdgm;
    ProtocolParams proto;
    BatteryModelParams battery;
    double reach_sample_period = 30.0;
    double diffusion_sample_period = 1800.0;
    bool collect_trace = false;
    bool validate_invariants = false;

    void validate() const; // throws std::runtime_error with a reason
};

struct RunResult {
    uint32_t node_count = 0;
    double duration = 0.0;
    std::vector<std::pair<double, double>> diffusion; // (t, mean fraction)
    ConnectivityGraph cg;
    ReachabilitySamples reach;
    std::vector<double> final_levels;
    std::vector<double> discharge_time; // negative if still alive at the end
    std::vector<uint8_t> alive;
    std::vector<TraceEvent> trace;

    uint32_t alive_count() const;
    bool all_dead() const { return alive_count() == 0; }
    // Table-style battery values: final levels, or, when every node
    // discharged, the discharge times normalized by the run duration.
    std::vector<double> battery_metric_values() const;
    bool battery_metric_is_discharge_time() const { return all_dead(); }
};

// In-range neighbor ordinals (sorted) for every node; dead nodes see and are
// seen by nobody. Range is a closed ball.
std::vector<std::vector<uint32_t>> proximity_sets(std::span<const Position> positions,
                                                  std::span<const uint8_t> alive,
                                                  double radio_range);

// Deterministic discrete-event engine. One instance per run; owns every node
// state, applies protocol effects in ordinal order at the end of each tick,
// integrates batteries, and feeds the metric collectors.
class Simulation {
  public:
    Simulation(const SimConfig& cfg, std::unique_ptr<Mobility> mobility);
    ~Simulation();

    RunResult run();

  private:
    class Env;
    friend class Env;

    struct Intent {
        enum class Kind : uint8_t { Connect, Disconnect, Send, Broadcast };
        Kind kind;
        uint32_t issuer;
        NodeId target{};
        ControlMessage msg;
        std::vector<NodeId> recipients;
    };

    void boot_nodes();
    void rebuild_neighbors();
    void enforce_link_range();
    void fold_neighbor_changes();
    void run_protocol_phase(uint64_t tick_index);
    void process_intents();
    void apply_connect(uint32_t requester, NodeId target);
    void apply_disconnect(uint32_t node);
    void deliver(const ControlMessage& msg, uint32_t from, uint32_t to);
    void update_batteries_and_deaths();
    void accumulate_metrics(uint64_t tick_index);
    void publish_records();
    void check_invariants() const;
    void trace_event(uint32_t node, TraceKind kind, uint32_t a, uint32_t b, double x);

    SimConfig cfg_;
    std::unique_ptr<Mobility> mobility_;
    double now_ = 0.0;
    uint64_t token_counter_ = 0;
    uint64_t td_ticks_ = 1, tst_ticks_ = 1, reach_ticks_ = 0, diff_ticks_ = 0;

    std::vector<Position> pos_;
    std::vector<std::unique_ptr<ProtocolNode>> nodes_;
    std::vector<ServiceRecord> published_;
    std::vector<std::vector<uint32_t>> nbrs_;
    std::vector<std::vector<uint32_t>> prev_nbrs_;
    std::vector<uint8_t> alive_;
    std::vector<double> prev_levels_;
    std::vector<double> death_time_;
    std::vector<Rng> proto_rng_;
    bool nbrs_dirty_ = true;

    std::vector<Intent> queue_;
    std::size_t cursor_ = 0;

    DiffusionState diffusion_;
    ConnectivityGraph cg_;
    ReachabilitySamples reach_;
    std::vector<TraceEvent> trace_;

    std::vector<ServiceRecord> scratch_records_;
    std::vector<std::pair<uint32_t, uint32_t>> scratch_edges_;
};

} // namespace wfdgm
