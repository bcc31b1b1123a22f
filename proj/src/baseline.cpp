#include "wfdgm/baseline.hpp"

namespace wfdgm {

void BaselineNode::tick(double /*now*/, std::span<const ServiceRecord> neighbors, LinkLayer& env)
{
    const uint32_t state_code = role_ == Role::Client        ? STATE_C1
                                : group_.members.empty()     ? STATE_GO1
                                                             : STATE_IDLE;
    env.trace(TraceKind::Decision, state_code, static_cast<uint32_t>(group_.members.size()),
              battery_.level);

    if (role_ == Role::Client) {
        return; // the kernel breaks the link if the GO dies or leaves range
    }
    if (!group_.members.empty()) {
        return; // a GO keeps its role until its resources end
    }

    // Unattached: join the in-range group owner with the highest ordinal,
    // provided it outranks us. Owners that already rejected us for capacity
    // are skipped until their advertised group shrinks.
    const ServiceRecord* best = nullptr;
    for (const auto& rec : neighbors) {
        if (rec.node == me_ || !rec.has_credentials() || rec.node.ordinal <= me_.ordinal) {
            continue;
        }
        auto it = capacity_rejected_.find(rec.node);
        if (it != capacity_rejected_.end()) {
            if (rec.group_size >= it->second) {
                continue;
            }
            capacity_rejected_.erase(it); // group shrank, worth retrying
        }
        if (best == nullptr || rec.node.ordinal > best->node.ordinal) {
            best = &rec;
        }
    }
    if (best != nullptr) {
        env.connect(best->node);
    }
    // else: remain the (declared) owner of our own group
}

void BaselineNode::on_connect_rejected(NodeId target, ConnectReject why, uint32_t target_size)
{
    if (why == ConnectReject::CapacityFull) {
        capacity_rejected_[target] = target_size;
    }
}

} // namespace wfdgm
