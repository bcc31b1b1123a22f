#include "wfdgm/context.hpp"

#include <algorithm>

namespace wfdgm {

double jaccard(const std::set<NodeId>& a, const std::set<NodeId>& b)
{
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

double suitability(const ContextSnapshot& cs, const SuitabilityWeights& w,
                   const NormalizationParams& norm)
{
    const double pp = std::min(cs.peers_in_proximity / norm.pp_max, 1.0);
    const double c = std::min(cs.free_slots / norm.c_max, 1.0);
    return w.resources * cs.resources + w.proximity * pp + w.capacity * c +
           w.stability * cs.stability;
}

bool record_beats(const ServiceRecord& a, const ServiceRecord& b)
{
    if (a.suitability != b.suitability) {
        return a.suitability > b.suitability;
    }
    return a.node.ordinal > b.node.ordinal;
}

NodeId best_candidate(std::span<const ServiceRecord> records, const ServiceRecord& self,
                      const Blacklist& bl, double now)
{
    const ServiceRecord* best = &self;
    for (const auto& rec : records) {
        if (rec.node == self.node || !rec.has_credentials() || bl.blocked(rec.node, now)) {
            continue;
        }
        if (record_beats(rec, *best)) {
            best = &rec;
        }
    }
    return best->node;
}

const char* msg_kind_name(MsgKind k)
{
    switch (k) {
    case MsgKind::GroupInfo: return "GROUP_INFO";
    case MsgKind::GroupBye: return "GROUP_BYE";
    case MsgKind::VisibilityReq: return "VISIBILITY_REQ";
    case MsgKind::VisibilityResp: return "VISIBILITY_RESP";
    case MsgKind::MergeWarning: return "MERGE_WARNING";
    }
    return "?";
}

} // namespace wfdgm
