#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace wfdgm {

// Node identity. The ordinal doubles as the MAC-address stand-in: the
// Baseline protocol elects the highest ordinal in range.
struct NodeId {
    uint32_t ordinal = 0;
    auto operator<=>(const NodeId&) const = default;
};

enum class Role : uint8_t {
    GroupOwner, // owns a group with at least one client
    Client,     // attached to exactly one GO
    Free,       // owns an empty group, awaiting election
};

// A Free node is still the owner of a (so far empty) group and advertises
// credentials like any other GO.
inline bool owns_group(Role r) { return r != Role::Client; }

// Opaque token standing in for an SSID or a WPA2 passkey. Nonzero = present.
using Token = uint64_t;

struct GroupRecord {
    Token group_id = 0;
    NodeId owner{};
    std::set<NodeId> members; // clients only; owner is never a member
    Token credentials = 0;
    uint32_t capacity = 0; // max simultaneous clients, 4..15

    bool full() const { return members.size() >= capacity; }
    uint32_t free_slots() const
    {
        const auto used = static_cast<uint32_t>(members.size());
        return used >= capacity ? 0 : capacity - used;
    }
};

enum class MsgKind : uint8_t {
    GroupInfo,      // GO -> clients: updated member list
    GroupBye,       // GO -> clients: disbanding for lack of resources
    VisibilityReq,  // GO -> clients: can you see `target`?
    VisibilityResp, // client -> GO: answer to VisibilityReq
    MergeWarning,   // GO -> clients: disbanding in favour of `target`
};

const char* msg_kind_name(MsgKind k);

struct ControlMessage {
    MsgKind kind = MsgKind::GroupInfo;
    NodeId sender{};
    Token group_id = 0; // the sender's group; stale messages are dropped on mismatch
    NodeId target{};    // VisibilityReq / VisibilityResp / MergeWarning
    bool visible = false;        // VisibilityResp
    std::set<NodeId> members;    // GroupInfo
};

// Timed exclusion list. A node that just left a GO (travel, GROUP_BYE,
// merge) must not immediately re-elect it.
class Blacklist {
  public:
    // Entry expires at now + hold. Re-adding keeps the later expiry.
    void add(NodeId who, double now, double hold)
    {
        const double expiry = now + hold;
        auto [it, inserted] = entries_.try_emplace(who, expiry);
        if (!inserted && it->second < expiry) {
            it->second = expiry;
        }
    }

    // Expiry is exclusive: blocked iff expiry > now.
    bool blocked(NodeId who, double now) const
    {
        auto it = entries_.find(who);
        return it != entries_.end() && it->second > now;
    }

    std::optional<double> expiry_of(NodeId who) const
    {
        auto it = entries_.find(who);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void prune(double now)
    {
        for (auto it = entries_.begin(); it != entries_.end();) {
            it = it->second > now ? std::next(it) : entries_.erase(it);
        }
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<NodeId, double> entries_;
};

// What Service Discovery carries: identity, role, the advertised suitability
// index, and (for group owners) the group id + credentials that let peers
// join autonomously as legacy clients.
struct ServiceRecord {
    NodeId node{};
    Role role = Role::Free;
    double suitability = 0.0;
    Token group_id = 0;    // 0 = none
    Token credentials = 0; // 0 = none (clients never advertise credentials)
    uint32_t group_size = 0; // |G_M| of the advertised group

    bool has_credentials() const { return credentials != 0; }
};

} // namespace wfdgm
