#include "gabm/experiments.hpp"

#include "gabm/digest.hpp"
#include "gabm/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace gabm {

namespace {

using PM = PersonaMode;
using PS = PromptSequence;

constexpr std::array<ExperimentSpec, 12> kExperiments = {{
    {ExperimentId::E1, "Base run", "2023-08-13", PM::ConformityOnly, false, 0.0, PS::Base, "base", 0.5, 100},
    {ExperimentId::E2, "No personality traits", "2023-08-14", PM::None, false, 0.0, PS::Base, "base", 0.5, 100},
    {ExperimentId::E3, "Extensive personality traits", "2023-08-14", PM::Extended, false, 0.0, PS::Base, "base", 0.5,
     100},
    {ExperimentId::E4, "Less relevant traits", "2023-08-14", PM::ExtrasOnly, false, 0.0, PS::Base, "base", 0.5, 100},
    {ExperimentId::E5, "Extra attractor", "2023-08-18", PM::ConformityOnly, true, 0.0, PS::Base, "base", 0.0, 100},
    {ExperimentId::E6, "Extensive traits and extra attractor", "2023-08-15", PM::Extended, true, 0.0, PS::Base, "base",
     0.0, 100},
    {ExperimentId::E7, "Temperature 0.25", "2023-08-15", PM::ConformityOnly, false, 0.25, PS::Base, "base", 0.5, 100},
    {ExperimentId::E8, "Temperature 0.5", "2023-08-15", PM::ConformityOnly, false, 0.5, PS::Base, "base", 0.5, 100},
    {ExperimentId::E9, "Own color near decision", "2023-09-02", PM::ConformityOnly, false, 0.0,
     PS::OwnColorNearDecision, "base", 0.5, 100},
    {ExperimentId::E10, "Coworker information first", "2023-09-02", PM::ConformityOnly, false, 0.0,
     PS::CoworkerInfoFirst, "base", 0.5, 100},
    {ExperimentId::E11, "Farsi names", "2023-09-02", PM::ConformityOnly, false, 0.0, PS::Base, "farsi", 0.5, 100},
    {ExperimentId::E12, "Base run (repeat)", "2023-09-02", PM::ConformityOnly, false, 0.0, PS::Base, "base", 0.5,
     100},
}};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError(std::string("batch CSV: bad ") + what + " '" + s + "'");
    }
    return v;
}

} // namespace

std::string experiment_label(ExperimentId id) { return "E" + std::to_string(static_cast<int>(id)); }

std::optional<ExperimentId> parse_experiment_id(std::string_view text) {
    if (text.size() < 2 || (text[0] != 'E' && text[0] != 'e')) return std::nullopt;
    int n = 0;
    auto digits = text.substr(1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.front() == '0') return std::nullopt;
    if (n < 1 || n > 12) return std::nullopt;
    return static_cast<ExperimentId>(n);
}

ExperimentId experiment_from_index(int index) {
    if (index < 1 || index > 12) throw ConfigError("unknown experiment E" + std::to_string(index));
    return static_cast<ExperimentId>(index);
}

const ExperimentSpec& experiment_spec(ExperimentId id) {
    int i = static_cast<int>(id);
    if (i < 1 || i > 12) throw ConfigError("unknown experiment id " + std::to_string(i));
    return kExperiments[static_cast<std::size_t>(i - 1)];
}

RunConfig get_experiment(ExperimentId id) {
    const auto& spec = experiment_spec(id);
    RunConfig cfg;
    cfg.persona_mode = spec.persona_mode;
    cfg.name_set = spec.name_set == "farsi" ? farsi_names() : base_names();
    cfg.attractor = spec.attractor;
    cfg.temperature = spec.temperature;
    cfg.sequence = spec.sequence;
    cfg.p_blue_initial = spec.p_blue_initial;
    return cfg;
}

std::vector<std::vector<int>> BatchResult::per_run_blue_series() const {
    std::vector<std::vector<int>> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(r.result.blue_series);
    return out;
}

BatchResult run_batch(ExperimentId id, const RunConfig& tmpl, int iterations, int parallelism,
                      std::uint64_t master_seed) {
    if (iterations < 1) throw ConfigError("iterations must be at least 1");
    if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
    tmpl.validate();

    // Scripted runs get their own oracle per run; other backends share one client so the
    // replay cache and in-flight limit are common to the whole batch.
    std::shared_ptr<CompletionClient> shared;
    if (!std::holds_alternative<ScriptedBackend>(tmpl.backend.spec)) shared = make_client(tmpl.backend, tmpl.retry);

    struct Slot {
        std::optional<BatchRun> run;
        std::optional<std::string> failure;
        FailureCause cause = FailureCause::Other;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(iterations));

    auto execute = [&](int index) {
        RunConfig cfg = tmpl;
        cfg.seed = derive_run_seed(master_seed, index);
        auto& slot = slots[static_cast<std::size_t>(index)];
        try {
            auto result = shared ? run_simulation(cfg, *shared) : run_simulation(cfg);
            slot.run = BatchRun{index, cfg.seed, std::move(result)};
        } catch (const RunFailed& e) {
            slot.failure = "run " + std::to_string(index) + ": " + e.what();
            slot.cause = e.cause;
        }
    };

    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    const int workers = std::min(parallelism, iterations);
    if (workers == 1) {
        for (int i = 0; i < iterations; ++i) execute(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < iterations; i = next++) {
                    try {
                        execute(i);
                    } catch (...) {
                        std::lock_guard lock(fatal_mutex);
                        if (!fatal) fatal = std::current_exception();
                    }
                }
            });
        }
    }
    if (fatal) std::rethrow_exception(fatal);

    BatchResult batch;
    batch.experiment = id;
    batch.requested = iterations;
    std::optional<FailureCause> first_cause;
    for (auto& s : slots) {
        if (s.run) {
            batch.runs.push_back(std::move(*s.run));
        } else {
            ++batch.failures;
            batch.failure_messages.push_back(*s.failure);
            if (!first_cause) first_cause = s.cause;
        }
    }
    if (batch.runs.empty()) {
        throw BatchFailed("all " + std::to_string(iterations) + " runs of " + experiment_label(id) +
                              " failed; first: " + batch.failure_messages.front(),
                          first_cause.value_or(FailureCause::Other));
    }
    return batch;
}

BatchResult run_batch(ExperimentId id, int iterations, int parallelism, const BackendKind& backend,
                      std::uint64_t master_seed) {
    auto tmpl = get_experiment(id);
    tmpl.backend = backend;
    return run_batch(id, tmpl, iterations, parallelism, master_seed);
}

void write_batch_csv(const BatchResult& batch, std::ostream& out) {
    int columns = batch.runs.empty() ? 0 : static_cast<int>(batch.runs.front().result.blue_series.size());
    out << "experiment,run_id,seed";
    for (int d = 0; d < columns; ++d) out << ",b" << d;
    out << '\n';
    const auto label = experiment_label(batch.experiment);
    for (const auto& r : batch.runs) {
        out << label << ',' << r.run_id << ',' << r.seed;
        for (int b : r.result.blue_series) out << ',' << b;
        out << '\n';
    }
}

std::vector<BatchCsvRow> read_batch_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("batch CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "experiment" || header[1] != "run_id" || header[2] != "seed") {
        throw IoError("batch CSV header must start with experiment,run_id,seed,b0");
    }
    for (std::size_t i = 3; i < header.size(); ++i) {
        if (header[i] != "b" + std::to_string(i - 3)) throw IoError("batch CSV: unexpected column " + header[i]);
    }
    std::vector<BatchCsvRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) throw IoError("batch CSV: row has " + std::to_string(fields.size()) +
                                                          " fields, header has " + std::to_string(header.size()));
        BatchCsvRow row;
        row.experiment = fields[0];
        row.run_id = parse_number<int>(fields[1], "run_id");
        row.seed = parse_number<std::uint64_t>(fields[2], "seed");
        for (std::size_t i = 3; i < fields.size(); ++i) row.blue_series.push_back(parse_number<int>(fields[i], "count"));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<EndpointSample> extract_endpoints(const BatchResult& batch) {
    std::vector<EndpointSample> out;
    for (const auto& r : batch.runs) {
        const auto& s = r.result.blue_series;
        out.push_back(EndpointSample{r.run_id, s.front(), s.back()});
    }
    return out;
}

std::vector<EndpointSample> extract_endpoints(const std::vector<BatchCsvRow>& rows) {
    std::vector<EndpointSample> out;
    for (const auto& r : rows) out.push_back(EndpointSample{r.run_id, r.blue_series.front(), r.blue_series.back()});
    return out;
}

void write_batch_metadata(const BatchResult& batch, const RunConfig& tmpl, std::uint64_t master_seed,
                          std::ostream& out) {
    const auto& spec = experiment_spec(batch.experiment);
    nlohmann::json j = {
        {"experiment", experiment_label(batch.experiment)},
        {"title", std::string(spec.title)},
        {"original_run_date", std::string(spec.original_run_date)},
        {"persona_mode", std::string(persona_mode_name(tmpl.persona_mode))},
        {"name_set", tmpl.name_set.label},
        {"attractor", tmpl.attractor},
        {"temperature", tmpl.temperature},
        {"sequence", std::string(sequence_name(tmpl.sequence))},
        {"p_blue_initial", tmpl.p_blue_initial},
        {"model_id", tmpl.model_id},
        {"backend", tmpl.backend.describe()},
        {"master_seed", master_seed},
        {"requested", batch.requested},
        {"succeeded", batch.runs.size()},
        {"failures", batch.failures},
        {"failure_messages", batch.failure_messages},
    };
    out << j.dump(2) << '\n';
}

} // namespace gabm
