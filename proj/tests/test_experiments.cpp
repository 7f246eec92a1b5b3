#include "gabm/digest.hpp"
#include "gabm/errors.hpp"
#include "gabm/experiments.hpp"

#include <doctest.h>
#include <json.hpp>

#include <set>
#include <sstream>

using namespace gabm;

TEST_CASE("experiment table") {
    for (auto id : kAllExperiments) {
        const auto& s = experiment_spec(id);
        CHECK(s.id == id);
        CHECK(s.iterations == 100);
        auto cfg = get_experiment(id);
        CHECK_NOTHROW(cfg.validate());
        CHECK(std::holds_alternative<ScriptedBackend>(cfg.backend.spec));
    }
    CHECK(get_experiment(ExperimentId::E2).persona_mode == PersonaMode::None);
    CHECK(get_experiment(ExperimentId::E3).persona_mode == PersonaMode::Extended);
    CHECK(get_experiment(ExperimentId::E4).persona_mode == PersonaMode::ExtrasOnly);
    auto e5 = get_experiment(ExperimentId::E5);
    CHECK(e5.attractor);
    CHECK(e5.p_blue_initial == 0.0);
    auto e6 = get_experiment(ExperimentId::E6);
    CHECK(e6.attractor);
    CHECK(e6.persona_mode == PersonaMode::Extended);
    CHECK(get_experiment(ExperimentId::E7).temperature == 0.25);
    CHECK(get_experiment(ExperimentId::E8).temperature == 0.5);
    CHECK(get_experiment(ExperimentId::E9).sequence == PromptSequence::OwnColorNearDecision);
    CHECK(get_experiment(ExperimentId::E10).sequence == PromptSequence::CoworkerInfoFirst);
    CHECK(get_experiment(ExperimentId::E11).name_set.label == "farsi");
    auto e1 = get_experiment(ExperimentId::E1);
    auto e12 = get_experiment(ExperimentId::E12);
    CHECK(e1.persona_mode == e12.persona_mode);
    CHECK(e1.sequence == e12.sequence);
    CHECK(e1.temperature == e12.temperature);
    CHECK(e1.p_blue_initial == 0.5);
    CHECK_THROWS_AS(experiment_from_index(13), ConfigError);
    CHECK_FALSE(parse_experiment_id("E13").has_value());
    CHECK_FALSE(parse_experiment_id("E01").has_value());
    CHECK(parse_experiment_id("e7") == ExperimentId::E7);
}

TEST_CASE("single-run batch matches run_simulation with the derived seed") {
    auto tmpl = get_experiment(ExperimentId::E1);
    auto batch = run_batch(ExperimentId::E1, tmpl, 1, 1, 42);
    REQUIRE(batch.runs.size() == 1);
    auto cfg = tmpl;
    cfg.seed = derive_run_seed(42, 0);
    CHECK(batch.runs[0].seed == cfg.seed);
    CHECK(batch.runs[0].result.blue_series == run_simulation(cfg).blue_series);
}

TEST_CASE("batch of 100 is reproducible across parallelism") {
    auto tmpl = get_experiment(ExperimentId::E1);
    auto serial = run_batch(ExperimentId::E1, tmpl, 100, 1, 7);
    auto parallel = run_batch(ExperimentId::E1, tmpl, 100, 8, 7);
    REQUIRE(serial.runs.size() == 100);
    CHECK(serial.failures == 0);
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < serial.runs.size(); ++i) {
        CHECK(serial.runs[i].run_id == static_cast<int>(i));
        CHECK(serial.runs[i].result.blue_series.size() == 8);
        seeds.insert(serial.runs[i].seed);
    }
    CHECK(seeds.size() == 100);

    std::ostringstream a, b;
    write_batch_csv(serial, a);
    write_batch_csv(parallel, b);
    CHECK(a.str() == b.str());

    auto series = serial.per_run_blue_series();
    CHECK(series.size() == 100);
    CHECK(std::set<std::vector<int>>(series.begin(), series.end()).size() > 20);

    auto other = run_batch(ExperimentId::E1, tmpl, 5, 1, 8);
    CHECK(other.runs[0].seed != serial.runs[0].seed);
}

TEST_CASE("batch CSV round trip and endpoints") {
    auto batch = run_batch(ExperimentId::E2, 10, 2, BackendKind::scripted(3), 99);
    std::ostringstream out;
    write_batch_csv(batch, out);
    CHECK(out.str().rfind("experiment,run_id,seed,b0,b1,b2,b3,b4,b5,b6,b7\n", 0) == 0);
    CHECK(out.str().find('\r') == std::string::npos);

    std::istringstream in(out.str());
    auto rows = read_batch_csv(in);
    REQUIRE(rows.size() == 10);
    auto from_batch = extract_endpoints(batch);
    auto from_csv = extract_endpoints(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].experiment == "E2");
        CHECK(rows[i].seed == batch.runs[i].seed);
        CHECK(rows[i].blue_series == batch.runs[i].result.blue_series);
        CHECK(from_csv[i].b0 == from_batch[i].b0);
        CHECK(from_csv[i].b_final == from_batch[i].b_final);
        CHECK(from_batch[i].b0 == batch.runs[i].result.blue_series.front());
        CHECK(from_batch[i].b_final == batch.runs[i].result.blue_series.back());
    }
}

TEST_CASE("malformed batch CSV") {
    for (const char* text : {"", "run_id,seed\n", "experiment,run_id,seed,b0\nE1,x,3,4\n",
                             "experiment,run_id,seed,b0,b1\nE1,0,3,4\n", "experiment,run_id,seed,b1\n"}) {
        std::istringstream in(text);
        CAPTURE(text);
        CHECK_THROWS_AS(read_batch_csv(in), IoError);
    }
}

TEST_CASE("batch metadata") {
    auto tmpl = get_experiment(ExperimentId::E7);
    auto batch = run_batch(ExperimentId::E7, tmpl, 3, 1, 1);
    std::ostringstream out;
    write_batch_metadata(batch, tmpl, 1, out);
    auto j = nlohmann::json::parse(out.str());
    CHECK(j["experiment"] == "E7");
    CHECK(j["temperature"] == 0.25);
    CHECK(j["succeeded"] == 3);
    CHECK(j["failures"] == 0);
}

TEST_CASE("a batch where every run fails raises BatchFailed") {
    auto tmpl = get_experiment(ExperimentId::E1);
    tmpl.backend = BackendKind::replay("/nonexistent-dir/never.jsonl");
    try {
        run_batch(ExperimentId::E1, tmpl, 3, 2, 0);
        FAIL("expected BatchFailed");
    } catch (const BatchFailed& e) {
        CHECK(e.cause == FailureCause::Transport);
    }
}

TEST_CASE("batch argument validation") {
    auto tmpl = get_experiment(ExperimentId::E1);
    CHECK_THROWS_AS(run_batch(ExperimentId::E1, tmpl, 0, 1, 0), ConfigError);
    CHECK_THROWS_AS(run_batch(ExperimentId::E1, tmpl, 1, 0, 0), ConfigError);
}
