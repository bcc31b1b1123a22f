#pragma once

#include "wfdgm/protocol.hpp"

namespace wfdgm {

// The comparator: GO election by highest ordinal at formation time, no
// merge, no traveling, no reconfiguration. A GO keeps its role until its
// battery dies or its members drift out of range; both are kernel-enforced,
// so the tick only decides joins for unattached nodes.
class BaselineNode : public ProtocolNode {
  public:
    BaselineNode(NodeId me, uint32_t capacity, LinkLayer& env) : ProtocolNode(me, capacity, env)
    {
    }

    ProtocolKind kind() const override { return ProtocolKind::Baseline; }

    void tick(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env) override;
    void on_connect_rejected(NodeId target, ConnectReject why, uint32_t target_size) override;

  private:
    // Targets that rejected us for capacity, with the group size they
    // advertised when it happened. Skipped until the group shrinks.
    std::map<NodeId, uint32_t> capacity_rejected_;
};

} // namespace wfdgm
