#pragma once

#include "wfdgm/battery.hpp"
#include "wfdgm/context.hpp"
#include "wfdgm/domain.hpp"
#include "wfdgm/trace.hpp"

#include <optional>
#include <span>
#include <utility>

namespace wfdgm {

struct ProtocolParams {
    double t_d = 30.0;       // decision period (seconds)
    double res_th = 0.1;     // remaining-battery threshold triggering GO2
    double t_b = 60.0;       // blacklist hold after GROUP_BYE / MERGE_WARNING
    double t_b_travel = 60.0; // blacklist hold after traveling away
    double p0 = 0.5;         // traveling probability scale: p_T = min(1, p0/|G_M|)
    double t_st = 30.0;      // stability refresh period (defaults to t_d)
    double w_st_prev = 0.4;  // weight of the previous stability index
    double w_st_mean = 0.6;  // weight of the window's mean Jaccard index
    SuitabilityWeights weights;
    NormalizationParams norm;
};

// Capability handle a protocol uses to act on the world. connect/disconnect
// and message sends are intents: the kernel applies them at the end of the
// current tick, in deterministic order. Broadcasts snapshot their recipient
// set at call time.
class LinkLayer {
  public:
    virtual ~LinkLayer() = default;
    virtual void connect(NodeId target) = 0;
    virtual void disconnect() = 0;
    virtual void send(const ControlMessage& msg, NodeId dest) = 0;
    virtual void broadcast(const ControlMessage& msg, const std::set<NodeId>& recipients) = 0;
    virtual bool in_proximity(NodeId who) const = 0;
    virtual double draw() = 0; // uniform [0,1) from the node's own stream
    virtual std::pair<Token, Token> fresh_group() = 0; // (group_id, credentials)
    virtual void trace(TraceKind /*kind*/, uint32_t /*a*/, uint32_t /*b*/, double /*x*/) {}
};

enum class ProtocolKind : uint8_t { Wfdgm, Baseline };

// Common per-node shell shared by both protocols: identity, role, the owned
// group, battery, and the revert-to-empty-group transition.
class ProtocolNode {
  public:
    ProtocolNode(NodeId me, uint32_t capacity, LinkLayer& env);
    virtual ~ProtocolNode() = default;

    virtual ProtocolKind kind() const = 0;
    virtual void tick(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env) = 0;
    virtual void on_message(const ControlMessage&, double /*now*/, LinkLayer&) {}

    // link-layer callbacks (kernel-driven)
    virtual void on_connected(NodeId go, Token group_id);
    virtual void on_connect_rejected(NodeId /*target*/, ConnectReject /*why*/,
                                     uint32_t /*target_size*/)
    {
    }
    virtual void on_member_joined(NodeId who, LinkLayer& env);
    virtual void on_member_left(NodeId who, LinkLayer& env);
    virtual void on_disconnected(LinkLayer& env);    // own disconnect applied
    virtual void on_group_dissolved(LinkLayer& env); // GO died or link broke

    virtual ServiceRecord make_record(uint32_t peers_in_proximity) const;

    // discovery hooks; only WFD-GM tracks neighborhood stability
    virtual void note_neighbors(const std::set<NodeId>&) {}
    virtual void refresh_stability() {}

    NodeId id() const { return me_; }
    Role role() const { return role_; }
    const GroupRecord& group() const { return group_; }
    GroupRecord& group() { return group_; }
    std::optional<NodeId> current_go() const { return current_go_; }
    Token joined_group_id() const { return joined_group_id_; }
    uint32_t capacity() const { return group_.capacity; }
    BatteryState& battery() { return battery_; }
    const BatteryState& battery() const { return battery_; }

  protected:
    // Re-create an own empty group with fresh credentials (boot semantics).
    void adopt_fresh_group(LinkLayer& env);
    void become_client(NodeId go, Token group_id);

    NodeId me_{};
    Role role_ = Role::Free;
    GroupRecord group_;
    std::optional<NodeId> current_go_;
    Token joined_group_id_ = 0;
    BatteryState battery_;
};

// The WFD-GM state machine. One instance per node; the kernel invokes tick()
// every t_d seconds (phase-staggered) and routes messages / membership
// events to the handlers below.
class WfdgmNode : public ProtocolNode {
  public:
    WfdgmNode(NodeId me, const ProtocolParams& params, uint32_t capacity, LinkLayer& env);

    ProtocolKind kind() const override { return ProtocolKind::Wfdgm; }

    // GO1 -> GoElection, GO2 -> DisbandGroup, GO3 -> EvalMerge,
    // C1 -> EvalTraveling. nullopt = GO with clients, adequate resources and
    // no GO neighbors: nothing to do this round.
    std::optional<StateCode> classify(std::span<const ServiceRecord> neighbors) const;

    void tick(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env) override;
    void on_message(const ControlMessage& msg, double now, LinkLayer& env) override;
    void on_member_joined(NodeId who, LinkLayer& env) override;
    void on_member_left(NodeId who, LinkLayer& env) override;
    void on_connected(NodeId go, Token group_id) override;
    void on_disconnected(LinkLayer& env) override;
    void on_group_dissolved(LinkLayer& env) override;

    ServiceRecord make_record(uint32_t peers_in_proximity) const override;

    void note_neighbors(const std::set<NodeId>& current) override
    {
        if (current != stability_.prev_neighbors()) {
            stability_.on_neighbors_changed(current);
        }
    }
    void refresh_stability() override { stability_.update(); }

    StabilityState& stability() { return stability_; }
    const Blacklist& blacklist() const { return bl_; }
    const std::set<NodeId>& members_view() const { return members_view_; }
    const ProtocolParams& params() const { return params_; }
    double traveling_probability() const;

  private:
    struct PendingMerge {
        NodeId target{};
        double decide_at = 0.0;
        std::map<NodeId, bool> responses;
    };

    void go_election(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env);
    void disband_group(LinkLayer& env);
    void eval_merge(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env);
    void eval_traveling(double now, LinkLayer& env);
    bool merge_target_still_best(NodeId target, std::span<const ServiceRecord> neighbors,
                                 const ServiceRecord& self, double now) const;

    ProtocolParams params_;
    Blacklist bl_;
    StabilityState stability_;
    std::set<NodeId> members_view_; // from the last GROUP_INFO
    std::optional<PendingMerge> pending_merge_;
};

} // namespace wfdgm
