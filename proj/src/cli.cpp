#include "gabm/cli.hpp"

#include "gabm/errors.hpp"
#include "gabm/experiments.hpp"
#include "gabm/plot.hpp"
#include "gabm/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace gabm {

namespace {

std::optional<BackendChoice> parse_backend(const std::string& s) {
    if (s == "live") return BackendChoice::Live;
    if (s == "scripted") return BackendChoice::Scripted;
    if (s == "replay") return BackendChoice::Replay;
    return std::nullopt;
}

struct RawArgs {
    std::string experiment = "E1";
    std::optional<double> temperature;
    int iterations = 100;
    int parallelism = 1;
    std::uint64_t seed = 0;
    std::string backend = "scripted";
    std::string fallback;
    std::string model;
    std::string cache;
    std::string out;
    std::string mode;
    std::vector<std::string> batches;
    std::string base;
    int agents = 20;
};

void add_backend_options(CLI::App* sub, RawArgs& raw) {
    sub->add_option("--experiment", raw.experiment, "Experiment row E1..E12 (default E1)");
    sub->add_option("--backend", raw.backend, "live | scripted | replay (default scripted)");
    sub->add_option("--fallback", raw.fallback, "Backend consulted on replay cache misses: live | scripted");
    sub->add_option("--model", raw.model, "Model id sent to the live endpoint (required for live)");
    sub->add_option("--temperature", raw.temperature, "Override the experiment's sampling temperature");
    sub->add_option("--seed", raw.seed, "Master seed (default 0)");
    sub->add_option("--cache", raw.cache, "Replay cache file (JSON lines)");
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

BackendKind backend_kind(BackendChoice choice, const CliConfig& cfg) {
    switch (choice) {
    case BackendChoice::Live: return BackendKind::live("");
    case BackendChoice::Scripted: return BackendKind::scripted(cfg.seed);
    case BackendChoice::Replay: {
        std::optional<BackendKind> fallback;
        if (cfg.fallback) fallback = backend_kind(*cfg.fallback, cfg);
        return BackendKind::replay(*cfg.cache, fallback);
    }
    }
    return BackendKind::scripted(cfg.seed);
}

RunConfig run_config_for(const CliConfig& cfg) {
    auto run = get_experiment(cfg.experiment);
    if (cfg.temperature) run.temperature = *cfg.temperature;
    run.backend = backend_kind(cfg.backend, cfg);
    if (cfg.model_id) run.model_id = *cfg.model_id;
    run.seed = cfg.seed;
    if (cfg.command == Command::Run) run.agent_parallelism = cfg.parallelism;
    return run;
}

std::vector<BatchCsvRow> load_batch(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read batch CSV " + path.string());
    auto rows = read_batch_csv(in);
    if (rows.empty()) throw IoError("batch CSV " + path.string() + " has no runs");
    return rows;
}

std::vector<EndpointRow> endpoint_rows(const std::vector<BatchCsvRow>& rows, int n_agents, bool is_experiment) {
    std::vector<EndpointRow> out;
    for (const auto& e : extract_endpoints(rows)) out.push_back(make_endpoint_row(e.b0, e.b_final, n_agents / 2, is_experiment));
    return out;
}

std::string column_label(const std::vector<BatchCsvRow>& rows, const std::filesystem::path& path) {
    return rows.front().experiment.empty() ? path.stem().string() : rows.front().experiment;
}

int do_run(const CliConfig& cfg, std::ostream& out) {
    auto run = run_config_for(cfg);
    auto result = run_simulation(run);
    const auto label = experiment_label(cfg.experiment);
    out << label << ": " << experiment_spec(cfg.experiment).title << " (backend " << run.backend.describe()
        << ", model " << run.model_id << ", temperature " << run.temperature << ", seed " << run.seed << ")\n";
    print_transcript(result, out);
    out << "\nBlue per day:";
    for (int b : result.blue_series) out << ' ' << b;
    out << '\n';
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        auto matrix = open_output(cfg.out_dir / (label + "_run_matrix.csv"));
        write_matrix_csv(result.matrix, matrix);
        auto log = open_output(cfg.out_dir / (label + "_reasoning.jsonl"));
        write_reasoning_jsonl(result, 0, log);
    }
    return exit_code::kSuccess;
}

int do_batch(const CliConfig& cfg, std::ostream& out) {
    auto tmpl = run_config_for(cfg);
    auto batch = run_batch(cfg.experiment, tmpl, cfg.iterations, cfg.parallelism, cfg.seed);
    const auto label = experiment_label(cfg.experiment);
    std::filesystem::create_directories(cfg.out_dir);
    {
        auto csv = open_output(cfg.out_dir / (label + "_batch.csv"));
        write_batch_csv(batch, csv);
        auto meta = open_output(cfg.out_dir / (label + "_meta.json"));
        write_batch_metadata(batch, tmpl, cfg.seed, meta);
        auto log = open_output(cfg.out_dir / (label + "_reasoning.jsonl"));
        for (const auto& r : batch.runs) write_reasoning_jsonl(r.result, r.run_id, log);
    }
    out << label << ": " << batch.runs.size() << " of " << batch.requested << " runs succeeded";
    if (batch.failures > 0) out << " (" << batch.failures << " failed)";
    out << "; results in " << cfg.out_dir.string() << '\n';
    return exit_code::kSuccess;
}

int do_analyze(const CliConfig& cfg, std::ostream& out) {
    std::vector<ReportColumn> columns;
    nlohmann::json json = nlohmann::json::object();
    std::string title;
    std::vector<std::string> rows;

    if (cfg.mode == AnalysisMode::A1) {
        title = "Association between blue at the final day (B7) and the starting split (B0)";
        rows = path_dependence_rows();
        for (const auto& path : cfg.batches) {
            auto batch = load_batch(path);
            auto endpoints = endpoint_rows(batch, cfg.n_agents, false);
            columns.push_back({column_label(batch, path), fit_path_dependence(endpoints)});
        }
    } else {
        title = "Comparison with the base run; dependent variable |B7 - " + std::to_string(cfg.n_agents / 2) + "|";
        rows = comparison_rows();
        auto base = endpoint_rows(load_batch(*cfg.base), cfg.n_agents, false);
        for (const auto& path : cfg.batches) {
            auto batch = load_batch(path);
            auto endpoints = endpoint_rows(batch, cfg.n_agents, true);
            columns.push_back({column_label(batch, path), fit_comparison(endpoints, base)});
        }
    }
    for (const auto& c : columns) json[c.label] = report_json(c.report);

    auto table = render_table(columns, rows, title);
    out << table;
    const std::string stem = cfg.mode == AnalysisMode::A1 ? "a1_report" : "a2_report";
    std::filesystem::create_directories(cfg.out_dir);
    auto txt = open_output(cfg.out_dir / (stem + ".txt"));
    txt << table;
    auto js = open_output(cfg.out_dir / (stem + ".json"));
    js << json.dump(2) << '\n';
    return exit_code::kSuccess;
}

int do_plot(const CliConfig& cfg, std::ostream& out) {
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& path : cfg.batches) {
        auto rows = load_batch(path);
        std::vector<std::vector<int>> series;
        for (const auto& r : rows) series.push_back(r.blue_series);
        auto target = cfg.out_dir / (path.stem().string() + ".svg");
        render_trajectories(series, cfg.n_agents, column_label(rows, path) + " (" + std::to_string(rows.size()) + " runs)",
                            target);
        out << "wrote " << target.string() << '\n';
    }
    return exit_code::kSuccess;
}

int failure_code(FailureCause cause) {
    return cause == FailureCause::Transport ? exit_code::kTransport : exit_code::kRunFailure;
}

} // namespace

CliConfig parse_args(const std::vector<std::string>& argv) {
    CLI::App app{"Generative agent-based model of shirt-color norm diffusion", "gabm"};
    app.require_subcommand(1);
    RawArgs raw;

    auto* run = app.add_subcommand("run", "Run one simulation and print the reasoning transcript");
    add_backend_options(run, raw);
    run->add_option("--parallelism", raw.parallelism, "Concurrent agent queries within a day");
    run->add_option("--out", raw.out, "Directory for the run matrix and reasoning log");

    auto* batch = app.add_subcommand("batch", "Run an experiment many times and write the batch CSV");
    add_backend_options(batch, raw);
    batch->add_option("--iterations", raw.iterations, "Number of runs (default 100)");
    batch->add_option("--parallelism", raw.parallelism, "Concurrent runs (default 1)");
    batch->add_option("--out", raw.out, "Output directory (default results)");

    auto* analyze = app.add_subcommand("analyze", "Fit the path-dependence (a1) or base-comparison (a2) regressions");
    analyze->add_option("--mode", raw.mode, "a1 | a2")->required();
    analyze->add_option("--batch", raw.batches, "Batch CSV (repeat for several columns)")->required();
    analyze->add_option("--base", raw.base, "Base-run batch CSV (a2 only)");
    analyze->add_option("--out", raw.out, "Output directory (default results)");
    analyze->add_option("--agents", raw.agents, "Agents per run (default 20)");

    auto* plot = app.add_subcommand("plot", "Draw batch trajectories as SVG");
    plot->add_option("--batch", raw.batches, "Batch CSV (repeat for several charts)")->required();
    plot->add_option("--out", raw.out, "Output directory")->required();
    plot->add_option("--agents", raw.agents, "Agents per run (default 20)");

    CliConfig cfg;
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        cfg.help = true;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::CallForAllHelp&) {
        cfg.help = true;
        cfg.help_text = app.help("", CLI::AppFormatMode::All);
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n\n" + app.help());
    }

    auto usage = [&](const std::string& msg) { return UsageError(msg + "\n\n" + app.help()); };

    if (run->parsed()) cfg.command = Command::Run;
    else if (batch->parsed()) cfg.command = Command::Batch;
    else if (analyze->parsed()) cfg.command = Command::Analyze;
    else cfg.command = Command::Plot;

    auto id = parse_experiment_id(raw.experiment);
    if (!id) throw usage("unknown experiment '" + raw.experiment + "'; expected E1..E12");
    cfg.experiment = *id;

    auto backend = parse_backend(raw.backend);
    if (!backend) throw usage("unknown backend '" + raw.backend + "'; expected live, scripted or replay");
    cfg.backend = *backend;
    if (!raw.fallback.empty()) {
        auto fb = parse_backend(raw.fallback);
        if (!fb || *fb == BackendChoice::Replay) throw usage("--fallback must be live or scripted");
        if (cfg.backend != BackendChoice::Replay) throw usage("--fallback only applies to --backend replay");
        cfg.fallback = fb;
    }
    if (cfg.backend == BackendChoice::Replay && raw.cache.empty()) throw usage("--backend replay needs --cache");
    if (!raw.cache.empty()) cfg.cache = raw.cache;
    bool uses_live = cfg.backend == BackendChoice::Live || cfg.fallback == BackendChoice::Live;
    if (!raw.model.empty()) cfg.model_id = raw.model;
    if (uses_live && !cfg.model_id) throw usage("the live backend needs --model");

    if (raw.temperature && !(*raw.temperature >= 0.0 && *raw.temperature <= 2.0)) {
        throw usage("--temperature must lie in [0, 2]");
    }
    cfg.temperature = raw.temperature;
    if (raw.iterations < 1) throw usage("--iterations must be at least 1");
    if (raw.parallelism < 1) throw usage("--parallelism must be at least 1");
    if (raw.agents < 2) throw usage("--agents must be at least 2");
    cfg.iterations = raw.iterations;
    cfg.parallelism = raw.parallelism;
    cfg.seed = raw.seed;
    cfg.n_agents = raw.agents;
    for (const auto& b : raw.batches) cfg.batches.emplace_back(b);

    if (cfg.command == Command::Analyze) {
        if (raw.mode == "a1") cfg.mode = AnalysisMode::A1;
        else if (raw.mode == "a2") cfg.mode = AnalysisMode::A2;
        else throw usage("--mode must be a1 or a2");
        if (cfg.mode == AnalysisMode::A2 && raw.base.empty()) throw usage("--mode a2 needs --base");
        if (cfg.mode == AnalysisMode::A1 && !raw.base.empty()) throw usage("--base only applies to --mode a2");
        if (!raw.base.empty()) cfg.base = raw.base;
    }
    if (!raw.out.empty()) cfg.out_dir = raw.out;
    else if (cfg.command == Command::Run) cfg.out_dir.clear();
    return cfg;
}

int run_cli(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.help) {
        out << cfg.help_text;
        return exit_code::kSuccess;
    }
    const bool analysis = cfg.command == Command::Analyze || cfg.command == Command::Plot;
    try {
        switch (cfg.command) {
        case Command::Run: return do_run(cfg, out);
        case Command::Batch: return do_batch(cfg, out);
        case Command::Analyze: return do_analyze(cfg, out);
        case Command::Plot: return do_plot(cfg, out);
        }
    } catch (const RunFailed& e) {
        err << "error: " << e.what() << '\n';
        return failure_code(e.cause);
    } catch (const BatchFailed& e) {
        err << "error: " << e.what() << '\n';
        return failure_code(e.cause);
    } catch (const TransportError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kTransport;
    } catch (const SingularDesign& e) {
        err << "analysis error: " << e.what() << '\n';
        return exit_code::kAnalysisError;
    } catch (const InsufficientData& e) {
        err << "analysis error: " << e.what() << '\n';
        return exit_code::kAnalysisError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return analysis ? exit_code::kAnalysisError : exit_code::kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return analysis ? exit_code::kAnalysisError : exit_code::kRunFailure;
    }
    return exit_code::kSuccess;
}

int cli_main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    try {
        cfg = parse_args(argv);
    } catch (const UsageError& e) {
        err << e.what();
        return exit_code::kUsage;
    }
    return run_cli(cfg, out, err);
}

} // namespace gabm
