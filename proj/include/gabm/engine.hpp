#pragma once

#include "gabm/domain.hpp"
#include "gabm/llm.hpp"
#include "gabm/prompt.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gabm {

struct RunConfig {
    int n_agents = 20;
    int n_days = 7;
    double p_blue_initial = 0.5;
    PersonaMode persona_mode = PersonaMode::ConformityOnly;
    NameSet name_set = base_names();
    /// Explicit personas; when set, persona_mode and name_set are ignored.
    std::optional<std::vector<AgentPersona>> personas;
    bool attractor = false;
    double temperature = 0.0;
    PromptSequence sequence = PromptSequence::Base;
    std::uint64_t seed = 0;
    BackendKind backend = BackendKind::scripted(0);
    RetryPolicy retry;
    int ambiguous_reply_retries = 2;
    std::string model_id = "scripted-oracle";
    int max_reply_tokens = 1024;
    /// Concurrent backend calls within one day.
    int agent_parallelism = 1;

    /// Throws ConfigError.
    void validate() const;
    std::vector<AgentPersona> resolve_personas() const;
};

struct ReasoningEntry {
    int day = 0;
    std::string agent;
    std::string reasoning;
    ShirtColor choice = ShirtColor::Green;
    std::string raw_reply;
};

struct RunResult {
    RunConfig config;
    WorldState matrix;
    std::vector<int> blue_series;
    std::vector<ReasoningEntry> reasoning_log;
};

/// Prompt one agent sees on `day`, built from the day-1 column.
std::string agent_prompt(const WorldState& world, int agent, int day, const RunConfig& cfg);

/// Fills column `day` (must be current_day()+1). Every agent sees the same day-1 snapshot;
/// decisions are committed in agent order. Throws RunFailed.
void step_day(WorldState& world, int day, const RunConfig& cfg, CompletionClient& client,
              std::vector<ReasoningEntry>& log);

/// Scripted backends mix the run seed into the oracle seed so that runs in a batch differ;
/// every other backend is returned unchanged.
BackendKind backend_for_run(const BackendKind& backend, std::uint64_t run_seed);

RunResult run_simulation(const RunConfig& cfg);
RunResult run_simulation(const RunConfig& cfg, CompletionClient& client);

/// One JSON object per decision: {run_id, day, agent, reasoning, choice, raw_reply_digest}.
void write_reasoning_jsonl(const RunResult& result, int run_id, std::ostream& out);

/// Day-by-day reasoning printout: context line, then each agent's reasoning and response.
void print_transcript(const RunResult& result, std::ostream& out);

} // namespace gabm
