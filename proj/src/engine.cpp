#include "gabm/engine.hpp"

#include "gabm/digest.hpp"
#include "gabm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

namespace gabm {

void RunConfig::validate() const {
    if (n_agents < 1) throw ConfigError("n_agents must be at least 1");
    if (n_days < 1) throw ConfigError("n_days must be at least 1");
    if (!(p_blue_initial >= 0.0 && p_blue_initial <= 1.0)) throw ConfigError("p_blue_initial must lie in [0, 1]");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must lie in [0, 2]");
    if (ambiguous_reply_retries < 0) throw ConfigError("ambiguous_reply_retries must be non-negative");
    if (agent_parallelism < 1) throw ConfigError("agent_parallelism must be at least 1");
    if (model_id.empty()) throw ConfigError("a model id is required");
    if (personas) {
        if (static_cast<int>(personas->size()) != n_agents) throw ConfigError("persona list length must equal n_agents");
    } else if (static_cast<int>(name_set.names.size()) != n_agents) {
        throw ConfigError("name set '" + name_set.label + "' has " + std::to_string(name_set.names.size()) +
                          " names for " + std::to_string(n_agents) + " agents");
    }
}

std::vector<AgentPersona> RunConfig::resolve_personas() const {
    if (personas) return *personas;
    if (persona_mode == PersonaMode::None) {
        std::vector<AgentPersona> out;
        for (const auto& n : name_set.names) out.push_back(AgentPersona{n, std::nullopt, {}});
        return out;
    }
    return base_persona_list(persona_mode, name_set);
}

std::string agent_prompt(const WorldState& world, int agent, int day, const RunConfig& cfg) {
    const auto& persona = world.persona(agent);
    PromptContext ctx{persona.name,
                      persona.trait_sentence(),
                      day,
                      world.at(agent, day - 1),
                      world.count_blue(day - 1),
                      world.n_agents(),
                      cfg.attractor,
                      cfg.sequence};
    return build_prompt(ctx);
}

namespace {

struct AgentOutcome {
    std::optional<Decision> decision;
    std::exception_ptr error;
};

AgentOutcome decide(const WorldState& world, int agent, int day, const RunConfig& cfg, CompletionClient& client) {
    AgentOutcome out;
    try {
        CompletionRequest req{agent_prompt(world, agent, day, cfg), cfg.temperature, cfg.model_id,
                              cfg.max_reply_tokens};
        // At temperature 0 a deterministic endpoint repeats itself; one re-ask is enough to tell.
        int reasks = cfg.temperature == 0.0 ? std::min(cfg.ambiguous_reply_retries, 1) : cfg.ambiguous_reply_retries;
        for (int attempt = 0;; ++attempt) {
            auto reply = client.complete(req);
            try {
                out.decision = parse_decision(reply);
                break;
            } catch (const AmbiguousReply&) {
                if (attempt >= reasks) throw;
            }
        }
    } catch (...) {
        out.error = std::current_exception();
    }
    return out;
}

[[noreturn]] void rethrow_as_run_failure(std::exception_ptr error, int day, const std::string& agent) {
    try {
        std::rethrow_exception(error);
    } catch (const AmbiguousReply& e) {
        throw RunFailed(day, agent, FailureCause::Ambiguous, e.what());
    } catch (const TransportError& e) {
        throw RunFailed(day, agent, FailureCause::Transport, e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunFailed(day, agent, FailureCause::Other, e.what());
    }
}

} // namespace

void step_day(WorldState& world, int day, const RunConfig& cfg, CompletionClient& client,
              std::vector<ReasoningEntry>& log) {
    if (day != world.current_day() + 1 || day < 1 || day > world.n_days()) {
        throw OutOfRangeError("cannot step to day " + std::to_string(day) + " from day " +
                              std::to_string(world.current_day()));
    }
    const int n = world.n_agents();
    std::vector<AgentOutcome> outcomes(static_cast<std::size_t>(n));

    const int workers = std::min(cfg.agent_parallelism, n);
    if (workers <= 1) {
        for (int a = 0; a < n; ++a) outcomes[static_cast<std::size_t>(a)] = decide(world, a, day, cfg, client);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int a = next++; a < n; a = next++) {
                    outcomes[static_cast<std::size_t>(a)] = decide(world, a, day, cfg, client);
                }
            });
        }
    }

    for (int a = 0; a < n; ++a) {
        const auto& o = outcomes[static_cast<std::size_t>(a)];
        if (o.error) rethrow_as_run_failure(o.error, day, world.persona(a).name);
    }
    for (int a = 0; a < n; ++a) {
        auto& d = *outcomes[static_cast<std::size_t>(a)].decision;
        world.record_choice(a, day, d.color);
        log.push_back(ReasoningEntry{day, world.persona(a).name, std::move(d.reasoning), d.color,
                                     std::move(d.raw_reply)});
    }
}

BackendKind backend_for_run(const BackendKind& backend, std::uint64_t run_seed) {
    if (const auto* s = std::get_if<ScriptedBackend>(&backend.spec)) {
        return BackendKind::scripted(
            digest_u64("scripted-run:" + std::to_string(s->seed) + ":" + std::to_string(run_seed)));
    }
    return backend;
}

RunResult run_simulation(const RunConfig& cfg) {
    cfg.validate();
    auto client = make_client(backend_for_run(cfg.backend, cfg.seed), cfg.retry);
    return run_simulation(cfg, *client);
}

RunResult run_simulation(const RunConfig& cfg, CompletionClient& client) {
    cfg.validate();
    auto world = init_world(cfg.n_agents, cfg.p_blue_initial, cfg.seed, cfg.resolve_personas(), cfg.n_days);
    std::vector<ReasoningEntry> log;
    log.reserve(static_cast<std::size_t>(cfg.n_agents) * static_cast<std::size_t>(cfg.n_days));
    for (int day = 1; day <= cfg.n_days; ++day) step_day(world, day, cfg, client, log);
    auto series = world.blue_series();
    return RunResult{cfg, std::move(world), std::move(series), std::move(log)};
}

void write_reasoning_jsonl(const RunResult& result, int run_id, std::ostream& out) {
    for (const auto& e : result.reasoning_log) {
        nlohmann::json j = {{"run_id", run_id},
                            {"day", e.day},
                            {"agent", e.agent},
                            {"reasoning", e.reasoning},
                            {"choice", std::string(color_name(e.choice))},
                            {"raw_reply_digest", sha256_hex(e.raw_reply)}};
        out << j.dump() << '\n';
    }
}

void print_transcript(const RunResult& result, std::ostream& out) {
    const auto& m = result.matrix;
    int current = 0;
    for (const auto& e : result.reasoning_log) {
        if (e.day != current) {
            current = e.day;
            out << "\nContext information: Yesterday on day " << current - 1 << ", " << m.count_blue(current - 1)
                << " of " << m.n_agents() << " wore blue shirts.\n";
        }
        out << "  - " << e.agent << "'s reasoning: " << e.reasoning << '\n';
        out << "  - " << e.agent << "'s response: " << color_name(e.choice) << '\n';
    }
}

} // namespace gabm
