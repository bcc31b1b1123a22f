#pragma once

#include "wfdgm/scenario.hpp"

#include <iosfwd>
#include <string>

namespace wfdgm {

// Byte-stable serializations of one run's outputs; identical configs and
// seeds must reproduce these strings exactly.
struct RunOutputs {
    std::string diffusion_csv;
    std::string components_csv;
    std::string ccdf_csv;
    std::string battery_csv;
    std::string summary_json;
    std::string run_config; // echo narrowed to this (protocol, t_d, seed)
    std::string trace_tsv;  // empty unless tracing was enabled
};

RunResult execute_run(const ScenarioConfig& cfg, Protocol protocol, double td, uint64_t seed,
                      bool validate_invariants = false);

RunOutputs serialize_run(const ScenarioConfig& cfg, Protocol protocol, double td,
                         uint64_t seed, const RunResult& result);

std::string run_dir_name(Protocol protocol, double td, uint64_t seed);

struct BatchOutcome {
    uint32_t runs_total = 0;
    uint32_t runs_ok = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

// Executes the whole (protocol x t_d x seed) grid, one subdirectory per run
// under cfg.out_dir, with up to cfg.jobs runs in flight at once. The
// resolved batch config is echoed to <out_dir>/config.txt.
BatchOutcome run_batch(const ScenarioConfig& cfg, std::ostream& log);

} // namespace wfdgm
