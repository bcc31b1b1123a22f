#include "wfdgm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wfdgm {

const char* mobility_model_name(MobilityModel m)
{
    switch (m) {
    case MobilityModel::StaticGrid: return "static_grid";
    case MobilityModel::PoiWalk: return "poi_walk";
    case MobilityModel::WorkingDay: return "working_day";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        fail("config key '" + key + "': not a number: '" + v + "'");
    }
    if (used != v.size()) {
        fail("config key '" + key + "': trailing junk in '" + v + "'");
    }
    return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    uint64_t out = 0;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        fail("config key '" + key + "': not an unsigned integer: '" + v + "'");
    }
    if (used != v.size()) {
        fail("config key '" + key + "': trailing junk in '" + v + "'");
    }
    return out;
}

uint32_t parse_u32(const std::string& key, const std::string& v)
{
    const uint64_t out = parse_u64(key, v);
    if (out > 0xffffffffull) {
        fail("config key '" + key + "': value too large");
    }
    return static_cast<uint32_t>(out);
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    fail("config key '" + key + "': expected true/false");
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> parts;
    std::string cur;
    for (const char c : v) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

Protocol parse_protocol(const std::string& v)
{
    if (v == "wfdgm") {
        return Protocol::Wfdgm;
    }
    if (v == "baseline") {
        return Protocol::Baseline;
    }
    fail("unknown protocol '" + v + "' (expected wfdgm or baseline)");
}

MobilityModel parse_mobility(const std::string& v)
{
    if (v == "static_grid") {
        return MobilityModel::StaticGrid;
    }
    if (v == "poi_walk") {
        return MobilityModel::PoiWalk;
    }
    if (v == "working_day") {
        return MobilityModel::WorkingDay;
    }
    fail("unknown mobility model '" + v + "'");
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// key registry: one setter and one printer per key, shared by the parser and
// the echo writer so the two can never drift apart
struct KeyHandler {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<std::pair<std::string, KeyHandler>>& key_registry()
{
    static const std::vector<std::pair<std::string, KeyHandler>> reg = [] {
        std::vector<std::pair<std::string, KeyHandler>> r;
        auto add = [&r](const std::string& key, KeyHandler h) {
            r.push_back({key, std::move(h)});
        };
        auto dbl = [&add](const std::string& key, double ScenarioConfig::* field) {
            add(key, {[key, field](ScenarioConfig& c, const std::string& v) {
                          c.*field = parse_double(key, v);
                      },
                      [field](const ScenarioConfig& c) { return fmt_double(c.*field); }});
        };
        auto u32 = [&add](const std::string& key, uint32_t ScenarioConfig::* field) {
            add(key, {[key, field](ScenarioConfig& c, const std::string& v) {
                          c.*field = parse_u32(key, v);
                      },
                      [field](const ScenarioConfig& c) { return std::to_string(c.*field); }});
        };
        auto bdbl = [&add](const std::string& key, double BatteryModelParams::* field) {
            add(key, {[key, field](ScenarioConfig& c, const std::string& v) {
                          c.battery.*field = parse_double(key, v);
                      },
                      [field](const ScenarioConfig& c) { return fmt_double(c.battery.*field); }});
        };

        add("protocols", {[](ScenarioConfig& c, const std::string& v) {
                              c.protocols.clear();
                              for (const auto& p : split_list(v)) {
                                  c.protocols.push_back(parse_protocol(p));
                              }
                          },
                          [](const ScenarioConfig& c) {
                              std::string out;
                              for (const auto& p : c.protocols) {
                                  out += (out.empty() ? "" : ",");
                                  out += protocol_name(p);
                              }
                              return out;
                          }});
        add("td_values", {[](ScenarioConfig& c, const std::string& v) {
                              c.td_values.clear();
                              for (const auto& p : split_list(v)) {
                                  c.td_values.push_back(parse_double("td_values", p));
                              }
                          },
                          [](const ScenarioConfig& c) {
                              std::string out;
                              for (const double t : c.td_values) {
                                  out += (out.empty() ? "" : ",") + fmt_double(t);
                              }
                              return out;
                          }});
        add("seeds", {[](ScenarioConfig& c, const std::string& v) {
                          c.seeds.clear();
                          for (const auto& p : split_list(v)) {
                              c.seeds.push_back(parse_u64("seeds", p));
                          }
                      },
                      [](const ScenarioConfig& c) {
                          std::string out;
                          for (const uint64_t s : c.seeds) {
                              out += (out.empty() ? "" : ",") + std::to_string(s);
                          }
                          return out;
                      }});
        add("out_dir", {[](ScenarioConfig& c, const std::string& v) { c.out_dir = v; },
                        [](const ScenarioConfig& c) { return c.out_dir; }});
        u32("jobs", &ScenarioConfig::jobs);
        add("trace", {[](ScenarioConfig& c, const std::string& v) {
                          c.trace = parse_bool("trace", v);
                      },
                      [](const ScenarioConfig& c) { return c.trace ? "true" : "false"; }});

        dbl("duration", &ScenarioConfig::duration);
        dbl("tick", &ScenarioConfig::tick);
        dbl("radio_range", &ScenarioConfig::radio_range);
        u32("node_count", &ScenarioConfig::node_count);
        u32("capacity_min", &ScenarioConfig::capacity_min);
        u32("capacity_max", &ScenarioConfig::capacity_max);

        dbl("res_th", &ScenarioConfig::res_th);
        dbl("t_b", &ScenarioConfig::t_b);
        dbl("t_b_travel", &ScenarioConfig::t_b_travel);
        dbl("p0", &ScenarioConfig::p0);
        dbl("t_st", &ScenarioConfig::t_st);
        dbl("w_resources", &ScenarioConfig::w_resources);
        dbl("w_proximity", &ScenarioConfig::w_proximity);
        dbl("w_capacity", &ScenarioConfig::w_capacity);
        dbl("w_stability", &ScenarioConfig::w_stability);
        dbl("w_st_prev", &ScenarioConfig::w_st_prev);
        dbl("w_st_mean", &ScenarioConfig::w_st_mean);
        dbl("pp_max", &ScenarioConfig::pp_max);
        dbl("c_max", &ScenarioConfig::c_max);

        bdbl("battery_p1_go", &BatteryModelParams::p1_go);
        bdbl("battery_p2_go", &BatteryModelParams::p2_go);
        bdbl("battery_p1_client", &BatteryModelParams::p1_client);
        bdbl("battery_p2_client", &BatteryModelParams::p2_client);
        bdbl("battery_idle_rate", &BatteryModelParams::idle_rate);
        bdbl("battery_client_links", &BatteryModelParams::client_links);

        dbl("reach_sample_s", &ScenarioConfig::reach_sample_s);
        dbl("diffusion_sample_s", &ScenarioConfig::diffusion_sample_s);

        add("mobility", {[](ScenarioConfig& c, const std::string& v) {
                             c.mobility = parse_mobility(v);
                         },
                         [](const ScenarioConfig& c) {
                             return std::string(mobility_model_name(c.mobility));
                         }});
        u32("grid_rows", &ScenarioConfig::grid_rows);
        u32("grid_cols", &ScenarioConfig::grid_cols);
        dbl("grid_spacing", &ScenarioConfig::grid_spacing);
        dbl("map_width", &ScenarioConfig::map_width);
        dbl("map_height", &ScenarioConfig::map_height);
        dbl("lattice_spacing", &ScenarioConfig::lattice_spacing);
        u32("poi_count", &ScenarioConfig::poi_count);
        dbl("speed_min", &ScenarioConfig::speed_min);
        dbl("speed_max", &ScenarioConfig::speed_max);
        dbl("wait_min", &ScenarioConfig::wait_min);
        dbl("wait_max", &ScenarioConfig::wait_max);
        u32("wd_office_count", &ScenarioConfig::wd_office_count);
        u32("wd_evening_count", &ScenarioConfig::wd_evening_count);
        u32("wd_home_count", &ScenarioConfig::wd_home_count);
        dbl("wd_transport_speed", &ScenarioConfig::wd_transport_speed);
        dbl("wd_day_start", &ScenarioConfig::wd_day_start);
        dbl("wd_depart_home_lo", &ScenarioConfig::wd_depart_home_lo);
        dbl("wd_depart_home_hi", &ScenarioConfig::wd_depart_home_hi);
        dbl("wd_depart_work_lo", &ScenarioConfig::wd_depart_work_lo);
        dbl("wd_depart_work_hi", &ScenarioConfig::wd_depart_work_hi);
        dbl("wd_depart_evening_lo", &ScenarioConfig::wd_depart_evening_lo);
        dbl("wd_depart_evening_hi", &ScenarioConfig::wd_depart_evening_hi);
        return r;
    }();
    return reg;
}

const KeyHandler* find_key(const std::string& key)
{
    for (const auto& [name, handler] : key_registry()) {
        if (name == key) {
            return &handler;
        }
    }
    return nullptr;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"custom",  "concert", "concert-small", "comicon",
            "comicon-small", "helsinki", "helsinki-small"};
}

ScenarioConfig preset_config(const std::string& name)
{
    ScenarioConfig c;
    c.preset = name;
    if (name == "custom") {
        return c;
    }
    if (name == "concert" || name == "concert-small") {
        c.mobility = MobilityModel::StaticGrid;
        c.duration = 10800.0;
        if (name == "concert") {
            c.node_count = 1000;
            c.grid_rows = 25;
            c.grid_cols = 40;
            c.grid_spacing = 0.7;
        } else {
            c.node_count = 200;
            c.grid_rows = 10;
            c.grid_cols = 20;
            c.grid_spacing = 1.0;
        }
        return c;
    }
    if (name == "comicon" || name == "comicon-small") {
        c.mobility = MobilityModel::PoiWalk;
        if (name == "comicon") {
            c.node_count = 2000;
            c.duration = 14400.0;
            c.map_width = 4000.0;
            c.map_height = 2000.0;
            c.poi_count = 575;
            c.wait_min = 600.0;
            c.wait_max = 3600.0;
        } else {
            // desk scale: the map shrinks to 8x4 radio ranges, so dwell
            // times stretch to keep walking legs a comparable share of the
            // mixing instead of letting mobility dominate the small map
            c.node_count = 200;
            c.duration = 7200.0;
            c.map_width = 800.0;
            c.map_height = 400.0;
            c.poi_count = 60;
            c.wait_min = 900.0;
            c.wait_max = 5400.0;
        }
        c.lattice_spacing = 20.0;
        c.speed_min = 0.0;
        c.speed_max = 1.5;
        return c;
    }
    if (name == "helsinki" || name == "helsinki-small") {
        c.mobility = MobilityModel::WorkingDay;
        if (name == "helsinki") {
            c.node_count = 4000;
            c.duration = 86400.0;
            c.map_width = 8000.0;
            c.map_height = 8000.0;
            c.wd_office_count = 40;
            c.wd_evening_count = 20;
            c.wd_home_count = 1200;
            c.wd_day_start = 0.0; // midnight: full day at home -> work -> evening
        } else {
            // desk scale: 8 h starting mid-afternoon, so the run covers the
            // office phase, the evening gatherings and the trip home
            c.node_count = 200;
            c.duration = 28800.0;
            c.map_width = 3000.0;
            c.map_height = 3000.0;
            c.wd_office_count = 10;
            c.wd_evening_count = 5;
            c.wd_home_count = 150;
            c.wd_day_start = 50400.0; // 14:00
        }
        return c;
    }
    fail("unknown preset '" + name + "'");
}

ScenarioConfig parse_config_text(const std::string& text)
{
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        pairs.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }

    std::string preset = "custom";
    bool preset_seen = false;
    for (const auto& [k, v] : pairs) {
        if (k == "preset") {
            if (preset_seen) {
                fail("duplicate 'preset' key");
            }
            preset = v;
            preset_seen = true;
        }
    }
    ScenarioConfig cfg = preset_config(preset);

    std::map<std::string, int> seen;
    for (const auto& [k, v] : pairs) {
        if (k == "preset") {
            continue;
        }
        if (++seen[k] > 1) {
            fail("duplicate config key '" + k + "'");
        }
        const KeyHandler* handler = find_key(k);
        if (handler == nullptr) {
            fail("unknown config key '" + k + "'");
        }
        handler->set(cfg, v);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string echo_config(const ScenarioConfig& cfg)
{
    // the preset is kept as a label; every key below is explicit and
    // overrides whatever the preset would set
    std::string out;
    out += "preset = " + cfg.preset + "\n";
    for (const auto& [name, handler] : key_registry()) {
        out += name + " = " + handler.get(cfg) + "\n";
    }
    return out;
}

void ScenarioConfig::validate() const
{
    if (protocols.empty() || td_values.empty() || seeds.empty()) {
        fail("protocols, td_values and seeds must all be non-empty");
    }
    if (jobs == 0) {
        fail("jobs must be at least 1");
    }
    switch (mobility) {
    case MobilityModel::StaticGrid:
        if (static_cast<uint64_t>(grid_rows) * grid_cols < node_count) {
            fail("static grid too small: rows*cols < node_count");
        }
        if (grid_spacing <= 0.0) {
            fail("grid_spacing must be positive");
        }
        break;
    case MobilityModel::PoiWalk:
        if (poi_count < 2) {
            fail("poi_count must be at least 2");
        }
        if (lattice_spacing <= 0.0 || map_width < lattice_spacing ||
            map_height < lattice_spacing) {
            fail("lattice_spacing must be positive and fit the map");
        }
        if (speed_min < 0.0 || speed_max < speed_min) {
            fail("speed range must satisfy 0 <= min <= max");
        }
        if (wait_min < 0.0 || wait_max < wait_min) {
            fail("wait range must satisfy 0 <= min <= max");
        }
        break;
    case MobilityModel::WorkingDay:
        if (wd_office_count == 0 || wd_evening_count == 0 || wd_home_count == 0) {
            fail("working-day place counts must be positive");
        }
        if (wd_transport_speed <= 0.0) {
            fail("wd_transport_speed must be positive");
        }
        if (!(wd_depart_home_lo <= wd_depart_home_hi &&
              wd_depart_home_hi <= wd_depart_work_lo &&
              wd_depart_work_lo <= wd_depart_work_hi &&
              wd_depart_work_hi <= wd_depart_evening_lo &&
              wd_depart_evening_lo <= wd_depart_evening_hi &&
              wd_depart_evening_hi <= 86400.0)) {
            fail("working-day departure windows must be ordered within the day");
        }
        break;
    }
    // everything else is covered by the per-run simulation config check
    make_sim_config(*this, protocols.front(), td_values.front(), seeds.front()).validate();
}

SimConfig make_sim_config(const ScenarioConfig& cfg, Protocol protocol, double td,
                          uint64_t seed)
{
    SimConfig sim;
    sim.duration = cfg.duration;
    sim.tick = cfg.tick;
    sim.radio_range = cfg.radio_range;
    sim.seed = seed;
    sim.node_count = cfg.node_count;
    sim.capacity_min = cfg.capacity_min;
    sim.capacity_max = cfg.capacity_max;
    sim.protocol = protocol;
    sim.proto.t_d = td;
    sim.proto.res_th = cfg.res_th;
    sim.proto.t_b = cfg.t_b;
    sim.proto.t_b_travel = cfg.t_b_travel;
    sim.proto.p0 = cfg.p0;
    sim.proto.t_st = cfg.t_st > 0.0 ? cfg.t_st : td;
    sim.proto.w_st_prev = cfg.w_st_prev;
    sim.proto.w_st_mean = cfg.w_st_mean;
    sim.proto.weights = {cfg.w_resources, cfg.w_proximity, cfg.w_capacity, cfg.w_stability};
    sim.proto.norm = {cfg.pp_max, cfg.c_max};
    sim.battery = cfg.battery;
    sim.reach_sample_period = cfg.reach_sample_s;
    sim.diffusion_sample_period = cfg.diffusion_sample_s;
    sim.collect_trace = cfg.trace;
    return sim;
}

std::unique_ptr<Mobility> make_mobility(const ScenarioConfig& cfg, uint64_t seed)
{
    switch (cfg.mobility) {
    case MobilityModel::StaticGrid:
        return std::make_unique<StaticGridMobility>(cfg.node_count, cfg.grid_rows,
                                                    cfg.grid_cols, cfg.grid_spacing);
    case MobilityModel::PoiWalk: {
        GridMap map = GridMap::uniform_lattice(cfg.map_width, cfg.map_height,
                                               cfg.lattice_spacing);
        Rng poi_rng(seed, 0x901);
        map.sample_pois(cfg.poi_count, poi_rng);
        PoiWalkConfig pw;
        pw.speed_min = cfg.speed_min;
        pw.speed_max = cfg.speed_max;
        pw.wait_min = cfg.wait_min;
        pw.wait_max = cfg.wait_max;
        return std::make_unique<PoiWalkMobility>(std::move(map), cfg.node_count, pw, seed);
    }
    case MobilityModel::WorkingDay: {
        WorkingDayConfig wd;
        wd.width = cfg.map_width;
        wd.height = cfg.map_height;
        wd.office_count = cfg.wd_office_count;
        wd.evening_count = cfg.wd_evening_count;
        wd.home_count = cfg.wd_home_count;
        wd.transport_speed = cfg.wd_transport_speed;
        wd.day_start = cfg.wd_day_start;
        wd.depart_home_lo = cfg.wd_depart_home_lo;
        wd.depart_home_hi = cfg.wd_depart_home_hi;
        wd.depart_work_lo = cfg.wd_depart_work_lo;
        wd.depart_work_hi = cfg.wd_depart_work_hi;
        wd.depart_evening_lo = cfg.wd_depart_evening_lo;
        wd.depart_evening_hi = cfg.wd_depart_evening_hi;
        return std::make_unique<WorkingDayMobility>(wd, cfg.node_count, seed);
    }
    }
    fail("unreachable mobility model");
}

} // namespace wfdgm
