#pragma once

#include "wfdgm/domain.hpp"

#include <algorithm>

namespace wfdgm {

// Linear depletion model fitted on commercial handsets. Rates are fractions
// of full charge per hour; all listed constants are negative, and the
// effective per-role slope is p1*n + p2.
struct BatteryModelParams {
    double p1_go = -0.006802;
    double p2_go = -0.03356;
    double p1_client = -0.003365;
    double p2_client = -0.04075;
    double idle_rate = 0.04;    // ungrouped node running discovery: 20% per 5 h
    double client_links = 1.0;  // n used for the client slope (its own link)
};

struct BatteryState {
    double level = 1.0;
    bool dead() const { return level <= 0.0; }
};

// Per-hour depletion rate (positive number) for a node in the given role.
// `group_size` is the number of clients in the node's group; clients use the
// configured link count instead.
inline double depletion_rate(Role role, uint32_t group_size, const BatteryModelParams& p)
{
    if (role == Role::Client) {
        return -(p.p1_client * p.client_links + p.p2_client);
    }
    if (group_size == 0) {
        return p.idle_rate; // Free, or a GO whose group just emptied
    }
    return -(p.p1_go * static_cast<double>(group_size) + p.p2_go);
}

inline void update_battery(BatteryState& b, Role role, uint32_t group_size, double dt_seconds,
                           const BatteryModelParams& p)
{
    if (b.level <= 0.0) {
        return;
    }
    const double dt_hours = dt_seconds / 3600.0;
    b.level = std::max(0.0, b.level - depletion_rate(role, group_size, p) * dt_hours);
}

} // namespace wfdgm
