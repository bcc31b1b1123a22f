#include "wfdgm/protocol.hpp"

#include <algorithm>

namespace wfdgm {

ProtocolNode::ProtocolNode(NodeId me, uint32_t capacity, LinkLayer& env) : me_(me)
{
    auto [gid, creds] = env.fresh_group();
    group_.group_id = gid;
    group_.credentials = creds;
    group_.owner = me;
    group_.capacity = capacity;
    env.trace(TraceKind::Boot, capacity, 0, 0.0);
}

void ProtocolNode::adopt_fresh_group(LinkLayer& env)
{
    auto [gid, creds] = env.fresh_group();
    group_.group_id = gid;
    group_.credentials = creds;
    group_.members.clear();
    role_ = Role::Free;
    current_go_.reset();
    joined_group_id_ = 0;
    env.trace(TraceKind::RevertFree, 0, 0, 0.0);
}

void ProtocolNode::become_client(NodeId go, Token group_id)
{
    role_ = Role::Client;
    current_go_ = go;
    joined_group_id_ = group_id;
    group_.group_id = 0;
    group_.credentials = 0;
    group_.members.clear();
}

void ProtocolNode::on_connected(NodeId go, Token group_id) { become_client(go, group_id); }

void ProtocolNode::on_member_joined(NodeId who, LinkLayer&)
{
    group_.members.insert(who);
    role_ = Role::GroupOwner;
}

void ProtocolNode::on_member_left(NodeId who, LinkLayer&)
{
    group_.members.erase(who);
    if (group_.members.empty()) {
        role_ = Role::Free;
    }
}

void ProtocolNode::on_disconnected(LinkLayer& env) { adopt_fresh_group(env); }

void ProtocolNode::on_group_dissolved(LinkLayer& env) { adopt_fresh_group(env); }

ServiceRecord ProtocolNode::make_record(uint32_t) const
{
    ServiceRecord rec;
    rec.node = me_;
    rec.role = role_;
    rec.suitability = 0.0;
    if (owns_group(role_)) {
        rec.group_id = group_.group_id;
        rec.credentials = group_.credentials;
        rec.group_size = static_cast<uint32_t>(group_.members.size());
    }
    return rec;
}

// ---------------------------------------------------------------------------
// WFD-GM
// ---------------------------------------------------------------------------

WfdgmNode::WfdgmNode(NodeId me, const ProtocolParams& params, uint32_t capacity, LinkLayer& env)
    : ProtocolNode(me, capacity, env),
      params_(params),
      stability_(params.w_st_prev, params.w_st_mean)
{
}

ServiceRecord WfdgmNode::make_record(uint32_t peers_in_proximity) const
{
    ServiceRecord rec = ProtocolNode::make_record(peers_in_proximity);
    ContextSnapshot cs;
    cs.resources = battery_.level;
    cs.peers_in_proximity = peers_in_proximity;
    cs.free_slots = owns_group(role_) ? group_.free_slots() : group_.capacity;
    cs.stability = stability_.current();
    rec.suitability = suitability(cs, params_.weights, params_.norm);
    return rec;
}

std::optional<StateCode> WfdgmNode::classify(std::span<const ServiceRecord> neighbors) const
{
    if (role_ == Role::Client) {
        return STATE_C1;
    }
    if (group_.members.empty()) {
        return STATE_GO1;
    }
    if (battery_.level < params_.res_th) {
        return STATE_GO2;
    }
    const bool go_in_sight = std::any_of(neighbors.begin(), neighbors.end(),
                                         [this](const ServiceRecord& r) {
                                             return r.node != me_ && r.has_credentials();
                                         });
    if (go_in_sight) {
        return STATE_GO3;
    }
    return std::nullopt;
}

void WfdgmNode::tick(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env)
{
    bl_.prune(now);
    const auto state = classify(neighbors);
    env.trace(TraceKind::Decision, state ? *state : STATE_IDLE,
              static_cast<uint32_t>(group_.members.size()), battery_.level);
    if (!state) {
        pending_merge_.reset(); // GO neighbors vanished mid-evaluation
        return;
    }
    switch (*state) {
    case STATE_GO1:
        pending_merge_.reset();
        go_election(now, neighbors, env);
        break;
    case STATE_GO2:
        pending_merge_.reset();
        disband_group(env);
        break;
    case STATE_GO3:
        eval_merge(now, neighbors, env);
        break;
    case STATE_C1:
        eval_traveling(now, env);
        break;
    default:
        break;
    }
}

void WfdgmNode::go_election(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env)
{
    const ServiceRecord self = make_record(static_cast<uint32_t>(neighbors.size()));
    const NodeId winner = best_candidate(neighbors, self, bl_, now);
    if (winner == me_) {
        return; // highest suitability in sight: remain Free GO, await clients
    }
    env.connect(winner);
}

void WfdgmNode::disband_group(LinkLayer& env)
{
    ControlMessage bye;
    bye.kind = MsgKind::GroupBye;
    bye.sender = me_;
    bye.group_id = group_.group_id;
    env.broadcast(bye, group_.members);
    env.trace(TraceKind::Disband, DISBAND_RESOURCES,
              static_cast<uint32_t>(group_.members.size()), battery_.level);
    group_.members.clear();
    adopt_fresh_group(env);
}

double WfdgmNode::traveling_probability() const
{
    const auto cardinality = std::max<std::size_t>(1, members_view_.size());
    return std::min(1.0, params_.p0 / static_cast<double>(cardinality));
}

void WfdgmNode::eval_traveling(double now, LinkLayer& env)
{
    const double p = traveling_probability();
    if (env.draw() <= p) {
        bl_.add(*current_go_, now, params_.t_b_travel);
        env.trace(TraceKind::BlacklistAdd, current_go_->ordinal, 0, now + params_.t_b_travel);
        env.trace(TraceKind::Travel, current_go_->ordinal, 0, p);
        env.disconnect();
    }
}

bool WfdgmNode::merge_target_still_best(NodeId target, std::span<const ServiceRecord> neighbors,
                                        const ServiceRecord& self, double now) const
{
    for (const auto& rec : neighbors) {
        if (rec.node == target) {
            return rec.has_credentials() && !bl_.blocked(target, now) && record_beats(rec, self);
        }
    }
    return false; // target no longer discovered
}

void WfdgmNode::eval_merge(double now, std::span<const ServiceRecord> neighbors, LinkLayer& env)
{
    const ServiceRecord self = make_record(static_cast<uint32_t>(neighbors.size()));

    if (pending_merge_) {
        if (now + 1e-9 < pending_merge_->decide_at) {
            return; // responses still being collected
        }
        const NodeId target = pending_merge_->target;
        if (merge_target_still_best(target, neighbors, self, now)) {
            std::size_t positives = 0;
            for (const auto& member : group_.members) {
                auto it = pending_merge_->responses.find(member);
                if (it != pending_merge_->responses.end() && it->second) {
                    ++positives;
                }
            }
            // majority of the clients, counting the silent ones as negative
            const std::size_t needed = (group_.members.size() + 2) / 2;
            if (positives >= needed) {
                ControlMessage warn;
                warn.kind = MsgKind::MergeWarning;
                warn.sender = me_;
                warn.group_id = group_.group_id;
                warn.target = target;
                env.broadcast(warn, group_.members);
                env.trace(TraceKind::Disband, DISBAND_MERGE,
                          static_cast<uint32_t>(group_.members.size()), battery_.level);
                group_.members.clear();
                adopt_fresh_group(env);
                env.connect(target);
            }
        }
        pending_merge_.reset();
        return;
    }

    const NodeId best = best_candidate(neighbors, self, bl_, now);
    if (best == me_) {
        return;
    }
    pending_merge_ = PendingMerge{best, now + params_.t_d, {}};
    ControlMessage req;
    req.kind = MsgKind::VisibilityReq;
    req.sender = me_;
    req.group_id = group_.group_id;
    req.target = best;
    env.broadcast(req, group_.members);
}

void WfdgmNode::on_message(const ControlMessage& msg, double now, LinkLayer& env)
{
    switch (msg.kind) {
    case MsgKind::GroupInfo:
        if (role_ == Role::Client && current_go_ == msg.sender &&
            joined_group_id_ == msg.group_id) {
            members_view_ = msg.members;
        }
        break;
    case MsgKind::GroupBye:
        if (role_ == Role::Client && current_go_ == msg.sender &&
            joined_group_id_ == msg.group_id) {
            bl_.add(msg.sender, now, params_.t_b);
            env.trace(TraceKind::BlacklistAdd, msg.sender.ordinal, 0, now + params_.t_b);
            adopt_fresh_group(env);
        }
        break;
    case MsgKind::VisibilityReq:
        if (role_ == Role::Client && current_go_ == msg.sender &&
            joined_group_id_ == msg.group_id) {
            ControlMessage resp;
            resp.kind = MsgKind::VisibilityResp;
            resp.sender = me_;
            resp.group_id = msg.group_id;
            resp.target = msg.target;
            resp.visible = env.in_proximity(msg.target);
            env.send(resp, msg.sender);
        }
        break;
    case MsgKind::MergeWarning:
        if (role_ == Role::Client && current_go_ == msg.sender &&
            joined_group_id_ == msg.group_id) {
            bl_.add(msg.sender, now, params_.t_b);
            env.trace(TraceKind::BlacklistAdd, msg.sender.ordinal, 0, now + params_.t_b);
            const NodeId target = msg.target;
            adopt_fresh_group(env);
            // a target this client recently traveled away from stays off
            // limits; the next election will pick a group instead
            if (env.in_proximity(target) && !bl_.blocked(target, now)) {
                env.connect(target);
            }
        }
        break;
    case MsgKind::VisibilityResp:
        if (owns_group(role_) && pending_merge_ && msg.target == pending_merge_->target &&
            msg.group_id == group_.group_id && group_.members.count(msg.sender) > 0) {
            pending_merge_->responses[msg.sender] = msg.visible;
        }
        break;
    }
}

void WfdgmNode::on_member_joined(NodeId who, LinkLayer& env)
{
    ProtocolNode::on_member_joined(who, env);
    ControlMessage info;
    info.kind = MsgKind::GroupInfo;
    info.sender = me_;
    info.group_id = group_.group_id;
    info.members = group_.members;
    env.broadcast(info, group_.members);
}

void WfdgmNode::on_member_left(NodeId who, LinkLayer& env)
{
    ProtocolNode::on_member_left(who, env);
    if (!group_.members.empty()) {
        ControlMessage info;
        info.kind = MsgKind::GroupInfo;
        info.sender = me_;
        info.group_id = group_.group_id;
        info.members = group_.members;
        env.broadcast(info, group_.members);
    }
}

void WfdgmNode::on_connected(NodeId go, Token group_id)
{
    ProtocolNode::on_connected(go, group_id);
    members_view_.clear();
    pending_merge_.reset();
}

void WfdgmNode::on_disconnected(LinkLayer& env)
{
    members_view_.clear();
    pending_merge_.reset();
    ProtocolNode::on_disconnected(env);
}

void WfdgmNode::on_group_dissolved(LinkLayer& env)
{
    members_view_.clear();
    pending_merge_.reset();
    ProtocolNode::on_group_dissolved(env);
}

} // namespace wfdgm
