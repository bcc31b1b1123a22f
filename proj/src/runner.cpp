#include "wfdgm/runner.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace wfdgm {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

} // namespace

RunResult execute_run(const ScenarioConfig& cfg, Protocol protocol, double td, uint64_t seed,
                      bool validate_invariants)
{
    SimConfig sim_cfg = make_sim_config(cfg, protocol, td, seed);
    sim_cfg.validate_invariants = validate_invariants;
    Simulation sim(sim_cfg, make_mobility(cfg, seed));
    return sim.run();
}

std::string run_dir_name(Protocol protocol, double td, uint64_t seed)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s_td%g_seed%llu", protocol_name(protocol), td,
                  static_cast<unsigned long long>(seed));
    return buf;
}

RunOutputs serialize_run(const ScenarioConfig& cfg, Protocol protocol, double td,
                         uint64_t seed, const RunResult& result)
{
    RunOutputs out;

    out.diffusion_csv = "time_s,mean_fraction\n";
    for (const auto& [t, frac] : result.diffusion) {
        out.diffusion_csv += fmt(t) + "," + fmt(frac) + "\n";
    }

    const ComponentSummary comps = connected_components(result.cg);
    out.components_csv = "component_id,size\n";
    for (std::size_t i = 0; i < comps.components.size(); ++i) {
        out.components_csv +=
            std::to_string(i) + "," + std::to_string(comps.components[i].size()) + "\n";
    }

    out.ccdf_csv = "threshold,fraction\n";
    const auto probabilities = result.reach.pair_probabilities();
    for (const auto& [threshold, fraction] : ccdf(probabilities)) {
        out.ccdf_csv += fmt(threshold) + "," + fmt(fraction) + "\n";
    }

    const bool discharge_mode = result.battery_metric_is_discharge_time();
    const auto battery_values = result.battery_metric_values();
    out.battery_csv = "node,final_level_or_discharge_time\n";
    for (uint32_t i = 0; i < result.node_count; ++i) {
        const double v = discharge_mode ? result.discharge_time[i] : result.final_levels[i];
        out.battery_csv += std::to_string(i) + "," + fmt(v) + "\n";
    }

    const BatteryStats stats = battery_stats(battery_values);
    nlohmann::ordered_json summary;
    summary["scenario"] = cfg.preset;
    summary["protocol"] = protocol_name(protocol);
    summary["t_d"] = td;
    summary["seed"] = seed;
    summary["node_count"] = result.node_count;
    summary["duration_s"] = result.duration;
    summary["alive_count"] = result.alive_count();
    summary["component_count"] = comps.count();
    summary["largest_component_fraction"] = comps.largest_fraction;
    summary["diffusion_final"] =
        result.diffusion.empty() ? 0.0 : result.diffusion.back().second;
    summary["battery"] = {
        {"metric", discharge_mode ? "normalized_discharge_time" : "final_level"},
        {"mean", stats.mean},
        {"median", stats.median},
        {"variance", stats.variance},
    };
    out.summary_json = summary.dump(2) + "\n";

    ScenarioConfig narrowed = cfg;
    narrowed.protocols = {protocol};
    narrowed.td_values = {td};
    narrowed.seeds = {seed};
    out.run_config = echo_config(narrowed);

    if (!result.trace.empty()) {
        out.trace_tsv = format_trace(result.trace);
    }
    return out;
}

BatchOutcome run_batch(const ScenarioConfig& cfg, std::ostream& log)
{
    namespace fs = std::filesystem;
    cfg.validate();

    struct Job {
        Protocol protocol;
        double td;
        uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const Protocol p : cfg.protocols) {
        for (const double td : cfg.td_values) {
            for (const uint64_t seed : cfg.seeds) {
                jobs.push_back({p, td, seed});
            }
        }
    }

    const fs::path root(cfg.out_dir);
    fs::create_directories(root);
    write_file(root / "config.txt", echo_config(cfg));

    BatchOutcome outcome;
    outcome.runs_total = static_cast<uint32_t>(jobs.size());
    std::mutex mu;
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) {
                return;
            }
            const Job& job = jobs[k];
            const std::string name = run_dir_name(job.protocol, job.td, job.seed);
            try {
                const RunResult result = execute_run(cfg, job.protocol, job.td, job.seed);
                const RunOutputs files = serialize_run(cfg, job.protocol, job.td, job.seed,
                                                       result);
                const fs::path dir = root / name;
                fs::create_directories(dir);
                write_file(dir / "diffusion.csv", files.diffusion_csv);
                write_file(dir / "components.csv", files.components_csv);
                write_file(dir / "ccdf.csv", files.ccdf_csv);
                write_file(dir / "battery.csv", files.battery_csv);
                write_file(dir / "summary.json", files.summary_json);
                write_file(dir / "run_config.txt", files.run_config);
                if (!files.trace_tsv.empty()) {
                    write_file(dir / "trace.tsv", files.trace_tsv);
                }
                std::lock_guard<std::mutex> lock(mu);
                ++outcome.runs_ok;
                log << "done " << name << "\n";
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(mu);
                outcome.failures.push_back(name + ": " + ex.what());
                log << "FAILED " << name << ": " << ex.what() << "\n";
            }
        }
    };

    const uint32_t workers = std::min<uint32_t>(cfg.jobs, outcome.runs_total);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (uint32_t i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return outcome;
}

} // namespace wfdgm
