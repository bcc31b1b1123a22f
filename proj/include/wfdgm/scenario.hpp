#pragma once

#include "wfdgm/sim.hpp"

#include <string>
#include <vector>

namespace wfdgm {

enum class MobilityModel : uint8_t { StaticGrid, PoiWalk, WorkingDay };

const char* mobility_model_name(MobilityModel m);

// Fully resolved run description: the batch grid (protocols x T_D x seeds)
// plus every simulation, protocol, battery and mobility parameter. Built
// from a preset, a config file, or both (file keys override the preset).
struct ScenarioConfig {
    std::string preset = "custom";

    // batch grid
    std::vector<Protocol> protocols{Protocol::Wfdgm, Protocol::Baseline};
    std::vector<double> td_values{30.0};
    std::vector<uint64_t> seeds{1};
    std::string out_dir = "out";
    uint32_t jobs = 1;
    bool trace = false;

    // simulation core
    double duration = 3600.0;
    double tick = 1.0;
    double radio_range = 100.0;
    uint32_t node_count = 100;
    uint32_t capacity_min = 4;
    uint32_t capacity_max = 15;

    // protocol parameters (t_d comes from the grid; t_st 0 = follow t_d)
    double res_th = 0.1;
    double t_b = 60.0;
    double t_b_travel = 60.0;
    double p0 = 0.5;
    double t_st = 0.0;
    double w_resources = 0.25;
    double w_proximity = 0.25;
    double w_capacity = 0.25;
    double w_stability = 0.25;
    double w_st_prev = 0.4;
    double w_st_mean = 0.6;
    double pp_max = 15.0;
    double c_max = 15.0;

    BatteryModelParams battery;

    double reach_sample_s = 30.0;
    double diffusion_sample_s = 1800.0;

    // mobility
    MobilityModel mobility = MobilityModel::StaticGrid;
    uint32_t grid_rows = 10;
    uint32_t grid_cols = 10;
    double grid_spacing = 1.0;
    double map_width = 800.0;
    double map_height = 400.0;
    double lattice_spacing = 20.0;
    uint32_t poi_count = 60;
    double speed_min = 0.0;
    double speed_max = 1.5;
    double wait_min = 600.0;
    double wait_max = 3600.0;
    uint32_t wd_office_count = 10;
    uint32_t wd_evening_count = 5;
    uint32_t wd_home_count = 150;
    double wd_transport_speed = 10.0;
    double wd_day_start = 50400.0;
    double wd_depart_home_lo = 27000.0, wd_depart_home_hi = 32400.0;
    double wd_depart_work_lo = 57600.0, wd_depart_work_hi = 63000.0;
    double wd_depart_evening_lo = 70200.0, wd_depart_evening_hi = 77400.0;

    void validate() const; // throws std::runtime_error with a reason
};

// Named presets: concert, concert-small, comicon, comicon-small, helsinki,
// helsinki-small. Throws on unknown names.
ScenarioConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// `key = value` per line, '#' comments, unknown or duplicate keys rejected.
// A `preset` key is applied first regardless of position.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Every key, canonical order, full precision: parsing the echo reproduces
// the identical configuration.
std::string echo_config(const ScenarioConfig& cfg);

SimConfig make_sim_config(const ScenarioConfig& cfg, Protocol protocol, double td,
                          uint64_t seed);
std::unique_ptr<Mobility> make_mobility(const ScenarioConfig& cfg, uint64_t seed);

} // namespace wfdgm
