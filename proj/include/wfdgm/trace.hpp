#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wfdgm {

// One record per simulation event. `a`, `b`, `x` are kind-specific (see
// trace.cpp for the exact payload of each kind).
enum class TraceKind : uint8_t {
    Boot,          // a=capacity
    Decision,      // a=classified state (StateCode), b=|G_M|, x=battery level
    MsgSend,       // a=MsgKind, b=dest ordinal
    MsgDeliver,    // a=MsgKind, b=sender ordinal
    ConnectReq,    // a=target ordinal
    ConnectOk,     // a=target GO ordinal, b=group size after join
    ConnectRej,    // a=target ordinal, b=reject reason
    Disconnect,    // client leaves on purpose (travel); a=GO ordinal
    LinkBreak,     // client drifted out of GO range; a=GO ordinal
    Disband,       // a=cause (0=GO2 resources, 1=merge), b=|G_M| released
    DeathDissolve, // GO died with clients attached; b=|G_M| released
    Death,         // battery hit zero
    BlacklistAdd,  // a=blocked ordinal, x=expiry time
    Travel,        // traveling draw succeeded; a=GO being left
    RevertFree,    // node re-created its own empty group
};

// Classified protocol state as carried by Decision events.
enum StateCode : uint32_t {
    STATE_GO1 = 0,
    STATE_GO2 = 1,
    STATE_GO3 = 2,
    STATE_C1 = 3,
    STATE_IDLE = 4, // GO with clients, adequate resources, no GO neighbors
};

enum DisbandCause : uint32_t {
    DISBAND_RESOURCES = 0,
    DISBAND_MERGE = 1,
};

enum class ConnectReject : uint8_t {
    CapacityFull = 0,
    OutOfRange = 1,
    TargetNotGO = 2,
    RequesterBusy = 3, // requester already has clients or is a client
};

struct TraceEvent {
    double t = 0.0;
    uint32_t node = 0;
    TraceKind kind = TraceKind::Boot;
    uint32_t a = 0;
    uint32_t b = 0;
    double x = 0.0;
};

const char* trace_kind_name(TraceKind k);

// Tab-separated, one line per event: time, node, kind, a, b, x.
std::string format_trace(const std::vector<TraceEvent>& events);

// Post-hoc verification of the protocol invariants over a full event trace:
//   - a node is never owner of a non-empty group and client at once, and
//     never client of two groups;
//   - group size never exceeds the owner's advertised capacity;
//   - no connect attempt targets a GO the requester still blacklists;
//   - a resource disband fires at the first decision where the GO has
//     clients and battery below the threshold, and never above it;
//   - every disband is preceded by a GROUP_BYE or MERGE_WARNING send to
//     every member;
//   - a Baseline trace contains no VISIBILITY_REQ / MERGE_WARNING traffic.
// Returns human-readable violation descriptions; empty means clean.
struct TraceCheckConfig {
    double res_th = 0.1;
    bool baseline = false; // enable the no-merge-traffic assertion
};

std::vector<std::string> check_trace_invariants(const std::vector<TraceEvent>& events,
                                                const TraceCheckConfig& cfg);

} // namespace wfdgm
