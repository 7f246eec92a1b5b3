#include "gabm/engine.hpp"
#include "gabm/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>

using namespace gabm;

namespace {

std::vector<AgentPersona> uniform_personas(ConformityTier tier, int n = 20) {
    std::vector<AgentPersona> out;
    for (int i = 0; i < n; ++i) out.push_back(AgentPersona{"agent" + std::to_string(i), tier, {}});
    return out;
}

WorldState seeded_world(std::vector<AgentPersona> personas, int blue) {
    WorldState w(std::move(personas), 7);
    for (int i = 0; i < w.n_agents(); ++i) w.record_choice(i, 0, i < blue ? ShirtColor::Blue : ShirtColor::Green);
    return w;
}

// Always picks yesterday's minority (or keeps its own color on a tie).
struct Contrarian final : Completer {
    std::string complete(const CompletionRequest& req) override {
        auto v = parse_oracle_view(req.prompt);
        int green = v.n_agents - v.prior_blue;
        ShirtColor c = v.prior_blue == green ? v.own_prior : (v.prior_blue > green ? ShirtColor::Green : ShirtColor::Blue);
        return "Going against the crowd.\nResponse: " + std::string(color_name(c));
    }
};

struct Recorder final : Completer {
    std::mutex m;
    std::vector<int> seen_blue;
    std::string complete(const CompletionRequest& req) override {
        auto v = parse_oracle_view(req.prompt);
        std::lock_guard lock(m);
        seen_blue.push_back(v.prior_blue);
        return "Response: blue";
    }
};

struct Scripted final : Completer {
    std::vector<std::string> replies;
    std::atomic<int> calls{0};
    std::string complete(const CompletionRequest&) override {
        int i = calls++;
        return replies[std::min<std::size_t>(static_cast<std::size_t>(i), replies.size() - 1)];
    }
};

struct Failing final : Completer {
    std::string complete(const CompletionRequest&) override { throw TransportError("connection refused"); }
};

CompletionClient client_of(std::unique_ptr<Completer> c) { return CompletionClient(std::move(c), 8); }

RunConfig with_personas(std::vector<AgentPersona> personas) {
    RunConfig cfg;
    cfg.personas = std::move(personas);
    return cfg;
}

} // namespace

TEST_CASE("extreme conformists all join a 12/20 blue majority") {
    auto cfg = with_personas(uniform_personas(ConformityTier::ExtremelyConformist));
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        cfg.backend = BackendKind::scripted(seed);
        auto client = make_client(cfg.backend, cfg.retry);
        auto world = seeded_world(*cfg.personas, 12);
        std::vector<ReasoningEntry> log;
        step_day(world, 1, cfg, *client, log);
        CHECK(world.count_blue(1) == 20);
        CHECK(log.size() == 20);
    }
}

TEST_CASE("a contrarian population oscillates") {
    auto cfg = with_personas(uniform_personas(ConformityTier::NonConformist));
    auto client = client_of(std::make_unique<Contrarian>());
    auto world = seeded_world(*cfg.personas, 12);
    std::vector<ReasoningEntry> log;
    step_day(world, 1, cfg, client, log);
    CHECK(world.count_blue(1) == 0);
    step_day(world, 2, cfg, client, log);
    CHECK(world.count_blue(2) == 20);
    step_day(world, 3, cfg, client, log);
    CHECK(world.count_blue(3) == 0);
}

TEST_CASE("every agent sees the same previous-day snapshot") {
    RunConfig cfg;
    cfg.seed = 3;
    for (int par : {1, 6}) {
        cfg.agent_parallelism = par;
        auto rec = std::make_unique<Recorder>();
        auto* raw = rec.get();
        auto client = client_of(std::move(rec));
        auto world = init_world(20, 0.5, 3, cfg.resolve_personas());
        int b0 = world.count_blue(0);
        std::vector<ReasoningEntry> log;
        step_day(world, 1, cfg, client, log);
        REQUIRE(raw->seen_blue.size() == 20);
        CHECK(std::set<int>(raw->seen_blue.begin(), raw->seen_blue.end()) == std::set<int>{b0});
        // Log follows agent order regardless of completion order.
        for (int i = 0; i < 20; ++i) CHECK(log[static_cast<std::size_t>(i)].agent == world.persona(i).name);
    }
}

TEST_CASE("agent parallelism does not change the run") {
    RunConfig cfg;
    cfg.seed = 77;
    cfg.backend = BackendKind::scripted(5);
    auto a = run_simulation(cfg);
    cfg.agent_parallelism = 8;
    auto b = run_simulation(cfg);
    CHECK(a.blue_series == b.blue_series);
    for (int i = 0; i < 20; ++i) {
        for (int d = 0; d <= 7; ++d) CHECK(a.matrix.at(i, d) == b.matrix.at(i, d));
    }
}

TEST_CASE("run_simulation shape and determinism") {
    RunConfig cfg;
    cfg.seed = 12345;
    auto a = run_simulation(cfg);
    auto b = run_simulation(cfg);
    CHECK(a.blue_series.size() == 8);
    CHECK(a.reasoning_log.size() == 140);
    CHECK(a.blue_series == b.blue_series);
    CHECK(a.matrix.current_day() == 7);
    for (int d = 0; d <= 7; ++d) CHECK(a.blue_series[static_cast<std::size_t>(d)] == a.matrix.count_blue(d));
    for (std::size_t i = 0; i < a.reasoning_log.size(); ++i) {
        CHECK(a.reasoning_log[i].raw_reply == b.reasoning_log[i].raw_reply);
        CHECK(a.reasoning_log[i].day == static_cast<int>(i / 20) + 1);
    }
}

TEST_CASE("run seed changes scripted outcomes") {
    RunConfig cfg;
    std::set<std::vector<int>> distinct;
    for (std::uint64_t s = 0; s < 20; ++s) {
        cfg.seed = s;
        distinct.insert(run_simulation(cfg).blue_series);
    }
    CHECK(distinct.size() > 5);
}

TEST_CASE("attractor runs with no initial blue start at zero") {
    RunConfig cfg;
    cfg.p_blue_initial = 0.0;
    cfg.attractor = true;
    for (std::uint64_t s = 0; s < 5; ++s) {
        cfg.seed = s;
        auto r = run_simulation(cfg);
        CHECK(r.blue_series.front() == 0);
    }
}

TEST_CASE("runs without personality traits still follow a strong majority on average") {
    RunConfig cfg;
    cfg.persona_mode = PersonaMode::None;
    int towards = 0, total = 0;
    for (std::uint64_t s = 0; s < 60; ++s) {
        cfg.seed = s;
        auto r = run_simulation(cfg);
        if (r.blue_series[0] > 12) {
            towards += r.blue_series[1] >= r.blue_series[0] - 6;
            ++total;
        }
    }
    if (total > 0) CHECK(towards * 2 >= total);
}

TEST_CASE("replay backend reproduces a recorded run") {
    auto path = std::filesystem::temp_directory_path() / "gabm_engine_replay.jsonl";
    std::filesystem::remove(path);
    RunConfig cfg;
    cfg.seed = 8;
    cfg.backend = BackendKind::replay(path, BackendKind::scripted(4));
    auto first = run_simulation(cfg);
    cfg.backend = BackendKind::replay(path);
    auto second = run_simulation(cfg);
    CHECK(first.blue_series == second.blue_series);
    std::filesystem::remove(path);
}

TEST_CASE("ambiguous replies are re-asked and then fail the run") {
    auto cfg = with_personas(uniform_personas(ConformityTier::Conformist, 2));
    cfg.n_agents = 2;

    SUBCASE("recovered by a re-ask") {
        auto s = std::make_unique<Scripted>();
        s->replies = {"I like both blue and green.", "Response: green"};
        auto client = client_of(std::move(s));
        auto world = seeded_world(*cfg.personas, 1);
        std::vector<ReasoningEntry> log;
        step_day(world, 1, cfg, client, log);
        CHECK(world.count_green(1) == 2);
    }
    SUBCASE("gives up after the re-ask budget") {
        auto s = std::make_unique<Scripted>();
        s->replies = {"I cannot decide."};
        auto* raw = s.get();
        auto client = client_of(std::move(s));
        auto world = seeded_world(*cfg.personas, 1);
        std::vector<ReasoningEntry> log;
        try {
            step_day(world, 1, cfg, client, log);
            FAIL("expected RunFailed");
        } catch (const RunFailed& e) {
            CHECK(e.cause == FailureCause::Ambiguous);
            CHECK(e.day == 1);
        }
        CHECK(raw->calls >= 2);
        CHECK(raw->calls <= 4);
    }
    SUBCASE("transport failures are reported with their cause") {
        auto client = client_of(std::make_unique<Failing>());
        auto world = seeded_world(*cfg.personas, 1);
        std::vector<ReasoningEntry> log;
        try {
            step_day(world, 1, cfg, client, log);
            FAIL("expected RunFailed");
        } catch (const RunFailed& e) {
            CHECK(e.cause == FailureCause::Transport);
        }
    }
}

TEST_CASE("step_day rejects the wrong column") {
    RunConfig cfg;
    auto client = make_client(cfg.backend, cfg.retry);
    auto world = init_world(20, 0.5, 1, cfg.resolve_personas());
    std::vector<ReasoningEntry> log;
    CHECK_THROWS(step_day(world, 2, cfg, *client, log));
}

TEST_CASE("config validation") {
    RunConfig cfg;
    cfg.p_blue_initial = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.temperature = -0.1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.n_agents = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.n_agents = 21;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("reasoning log and transcript output") {
    RunConfig cfg;
    cfg.seed = 2;
    auto r = run_simulation(cfg);
    std::ostringstream jl;
    write_reasoning_jsonl(r, 4, jl);
    std::istringstream in(jl.str());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j["run_id"] == 4);
        CHECK((j["choice"] == "blue" || j["choice"] == "green"));
        CHECK(j["raw_reply_digest"].get<std::string>().size() == 64);
        ++n;
    }
    CHECK(n == 140);

    std::ostringstream tr;
    print_transcript(r, tr);
    CHECK(tr.str().find("Adrian") != std::string::npos);
    CHECK(tr.str().find("Adrian's response:") != std::string::npos);
}
