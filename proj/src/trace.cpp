#include "wfdgm/trace.hpp"

#include "wfdgm/domain.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace wfdgm {

const char* trace_kind_name(TraceKind k)
{
    switch (k) {
    case TraceKind::Boot: return "boot";
    case TraceKind::Decision: return "decision";
    case TraceKind::MsgSend: return "msg_send";
    case TraceKind::MsgDeliver: return "msg_deliver";
    case TraceKind::ConnectReq: return "connect_req";
    case TraceKind::ConnectOk: return "connect_ok";
    case TraceKind::ConnectRej: return "connect_rej";
    case TraceKind::Disconnect: return "disconnect";
    case TraceKind::LinkBreak: return "link_break";
    case TraceKind::Disband: return "disband";
    case TraceKind::DeathDissolve: return "death_dissolve";
    case TraceKind::Death: return "death";
    case TraceKind::BlacklistAdd: return "blacklist_add";
    case TraceKind::Travel: return "travel";
    case TraceKind::RevertFree: return "revert_free";
    }
    return "?";
}

std::string format_trace(const std::vector<TraceEvent>& events)
{
    std::string out = "time\tnode\tevent\ta\tb\tx\n";
    char line[160];
    for (const auto& e : events) {
        std::snprintf(line, sizeof(line), "%.9g\t%u\t%s\t%u\t%u\t%.9g\n", e.t, e.node,
                      trace_kind_name(e.kind), e.a, e.b, e.x);
        out += line;
    }
    return out;
}

namespace {

struct CheckerState {
    std::map<uint32_t, uint32_t> capacity;
    std::map<uint32_t, uint32_t> member_of;           // client -> GO
    std::map<uint32_t, std::set<uint32_t>> members;   // GO -> clients
    std::map<uint32_t, std::map<uint32_t, double>> bl; // node -> (target -> expiry)
    // disband notifications still owed: (GO, members not yet messaged)
    std::map<uint32_t, std::set<uint32_t>> owed;
    double owed_time = -1.0;

    void leave(uint32_t client)
    {
        auto it = member_of.find(client);
        if (it == member_of.end()) {
            return;
        }
        members[it->second].erase(client);
        member_of.erase(it);
    }
};

std::string describe(const TraceEvent& e, const std::string& what)
{
    std::ostringstream os;
    os << "t=" << e.t << " node=" << e.node << " " << trace_kind_name(e.kind) << ": " << what;
    return os.str();
}

} // namespace

std::vector<std::string> check_trace_invariants(const std::vector<TraceEvent>& events,
                                                const TraceCheckConfig& cfg)
{
    std::vector<std::string> violations;
    CheckerState st;

    auto flush_owed = [&](double up_to) {
        if (st.owed_time >= 0.0 && up_to > st.owed_time) {
            for (const auto& [go, pending] : st.owed) {
                if (!pending.empty()) {
                    std::ostringstream os;
                    os << "t=" << st.owed_time << " node=" << go
                       << " disband: " << pending.size()
                       << " member(s) never received GROUP_BYE/MERGE_WARNING";
                    violations.push_back(os.str());
                }
            }
            st.owed.clear();
            st.owed_time = -1.0;
        }
    };

    for (const auto& e : events) {
        flush_owed(e.t);
        switch (e.kind) {
        case TraceKind::Boot:
            st.capacity[e.node] = e.a;
            break;

        case TraceKind::Decision: {
            const bool low = e.x < cfg.res_th;
            const bool has_members = e.b > 0;
            if (e.a == STATE_GO2 && !(low && has_members)) {
                violations.push_back(describe(e, "GO2 classified above the resource threshold"));
            }
            if (!cfg.baseline && has_members && low && e.a != STATE_GO2) {
                violations.push_back(
                    describe(e, "GO below the resource threshold did not classify GO2"));
            }
            break;
        }

        case TraceKind::ConnectReq: {
            auto node_bl = st.bl.find(e.node);
            if (node_bl != st.bl.end()) {
                auto entry = node_bl->second.find(e.a);
                if (entry != node_bl->second.end() && entry->second > e.t + 1e-9) {
                    violations.push_back(describe(e, "connect attempt to a blacklisted GO"));
                }
            }
            break;
        }

        case TraceKind::ConnectOk: {
            if (st.member_of.count(e.node) > 0) {
                violations.push_back(describe(e, "joined while already a client"));
            }
            if (!st.members[e.node].empty()) {
                violations.push_back(describe(e, "joined while owning a non-empty group"));
            }
            st.leave(e.node);
            st.member_of[e.node] = e.a;
            auto& group = st.members[e.a];
            group.insert(e.node);
            auto cap = st.capacity.find(e.a);
            if (cap != st.capacity.end() && group.size() > cap->second) {
                violations.push_back(describe(e, "group grew beyond its capacity"));
            }
            break;
        }

        case TraceKind::Disconnect:
        case TraceKind::LinkBreak:
            st.leave(e.node);
            break;

        case TraceKind::Disband: {
            auto& group = st.members[e.node];
            st.owed[e.node] = group;
            st.owed_time = e.t;
            for (const uint32_t m : group) {
                st.member_of.erase(m);
            }
            group.clear();
            break;
        }

        case TraceKind::DeathDissolve: {
            auto& group = st.members[e.node];
            for (const uint32_t m : group) {
                st.member_of.erase(m);
            }
            group.clear();
            break;
        }

        case TraceKind::Death:
            st.leave(e.node); // owners are handled by DeathDissolve
            break;

        case TraceKind::BlacklistAdd: {
            double& expiry = st.bl[e.node][e.a];
            expiry = std::max(expiry, e.x);
            break;
        }

        case TraceKind::MsgSend: {
            const auto kind = static_cast<MsgKind>(e.a);
            if (cfg.baseline &&
                (kind == MsgKind::VisibilityReq || kind == MsgKind::MergeWarning)) {
                violations.push_back(describe(e, "Baseline emitted merge/visibility traffic"));
            }
            if (kind == MsgKind::GroupBye || kind == MsgKind::MergeWarning) {
                auto it = st.owed.find(e.node);
                if (it != st.owed.end()) {
                    it->second.erase(e.b);
                }
            }
            break;
        }

        default:
            break;
        }
    }
    flush_owed(1e300);
    return violations;
}

} // namespace wfdgm
