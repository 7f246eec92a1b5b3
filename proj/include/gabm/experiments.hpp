#pragma once

#include "gabm/engine.hpp"
#include "gabm/experiment_id.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gabm {

/// One row of the experiment table.
struct ExperimentSpec {
    ExperimentId id;
    std::string_view title;
    std::string_view original_run_date; // recorded as metadata only
    PersonaMode persona_mode;
    bool attractor;
    double temperature;
    PromptSequence sequence;
    std::string_view name_set; // "base" or "farsi"
    double p_blue_initial;
    int iterations;
};

const ExperimentSpec& experiment_spec(ExperimentId id);

/// Run configuration for the experiment with a scripted backend; callers swap in their backend.
RunConfig get_experiment(ExperimentId id);

struct BatchRun {
    int run_id = 0;
    std::uint64_t seed = 0;
    RunResult result;
};

struct BatchResult {
    ExperimentId experiment = ExperimentId::E1;
    int requested = 0;
    std::vector<BatchRun> runs; // successful runs, sorted by run_id
    int failures = 0;
    std::vector<std::string> failure_messages;

    /// blue series per successful run, in run_id order.
    std::vector<std::vector<int>> per_run_blue_series() const;
};

/// Executes `iterations` runs of `tmpl` with seeds derive_run_seed(master_seed, i).
/// Runs sharing a live or replay backend share one client. Throws BatchFailed if no run succeeds.
BatchResult run_batch(ExperimentId id, const RunConfig& tmpl, int iterations, int parallelism,
                      std::uint64_t master_seed);
BatchResult run_batch(ExperimentId id, int iterations, int parallelism, const BackendKind& backend,
                      std::uint64_t master_seed);

/// Header `experiment,run_id,seed,b0,...,bN`; one row per successful run sorted by run_id; LF endings.
void write_batch_csv(const BatchResult& batch, std::ostream& out);

struct BatchCsvRow {
    std::string experiment;
    int run_id = 0;
    std::uint64_t seed = 0;
    std::vector<int> blue_series;
};

/// Throws IoError on malformed input.
std::vector<BatchCsvRow> read_batch_csv(std::istream& in);

struct EndpointSample {
    int run_id = 0;
    int b0 = 0;
    int b_final = 0;
};

std::vector<EndpointSample> extract_endpoints(const BatchResult& batch);
std::vector<EndpointSample> extract_endpoints(const std::vector<BatchCsvRow>& rows);

/// Run provenance as JSON: experiment row, backend, model, seeds and failure counts.
void write_batch_metadata(const BatchResult& batch, const RunConfig& tmpl, std::uint64_t master_seed,
                          std::ostream& out);

} // namespace gabm
