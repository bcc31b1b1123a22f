#include "wfdgm/runner.hpp"
#include "wfdgm/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"wfdgm-sim: WiFi-Direct group management simulator"};
    app.get_formatter()->column_width(34);

    std::string config_path;
    std::string preset;
    std::string protocol;
    std::string seeds;
    std::string out_dir;
    double td = -1.0;
    int jobs = -1;
    bool trace = false;

    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--preset", preset,
                   "scenario preset: concert[-small], comicon[-small], helsinki[-small]");
    app.add_option("--protocol", protocol, "restrict to one protocol: wfdgm | baseline");
    app.add_option("--td", td, "decision period T_D in seconds (overrides the grid)");
    app.add_option("--seed", seeds, "comma-separated seed list");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "concurrent runs");
    app.add_flag("--trace", trace, "write a per-event trace.tsv for every run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    wfdgm::ScenarioConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = wfdgm::load_config_file(config_path);
            if (!preset.empty()) {
                std::cerr << "error: --preset cannot override a config file\n";
                return 2;
            }
        } else if (!preset.empty()) {
            cfg = wfdgm::preset_config(preset);
        } else {
            std::cerr << "error: either --config or --preset is required\n";
            return 2;
        }
        if (!protocol.empty()) {
            cfg.protocols = {protocol == "wfdgm" ? wfdgm::Protocol::Wfdgm
                             : protocol == "baseline"
                                 ? wfdgm::Protocol::Baseline
                                 : throw std::runtime_error("unknown protocol: " + protocol)};
        }
        if (td > 0.0) {
            cfg.td_values = {td};
        }
        if (!seeds.empty()) {
            cfg.seeds.clear();
            std::string cur;
            for (const char c : seeds + ",") {
                if (c == ',') {
                    if (!cur.empty()) {
                        cfg.seeds.push_back(std::stoull(cur));
                        cur.clear();
                    }
                } else {
                    cur += c;
                }
            }
            if (cfg.seeds.empty()) {
                throw std::runtime_error("empty seed list");
            }
        }
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (jobs > 0) {
            cfg.jobs = static_cast<uint32_t>(jobs);
        }
        if (trace) {
            cfg.trace = true;
        }
        cfg.validate();
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    }

    try {
        const wfdgm::BatchOutcome outcome = wfdgm::run_batch(cfg, std::cout);
        std::cout << outcome.runs_ok << "/" << outcome.runs_total << " runs completed, outputs in "
                  << cfg.out_dir << "\n";
        return outcome.ok() ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
