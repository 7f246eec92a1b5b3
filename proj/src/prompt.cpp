#include "gabm/prompt.hpp"

#include "gabm/errors.hpp"

#include <algorithm>
#include <cctype>

namespace gabm {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

bool iequals_prefix(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

std::string_view sequence_name(PromptSequence seq) {
    switch (seq) {
    case PromptSequence::Base: return "base";
    case PromptSequence::OwnColorNearDecision: return "own-color-near-decision";
    case PromptSequence::CoworkerInfoFirst: return "coworker-info-first";
    }
    return {};
}

std::optional<PromptSequence> parse_sequence(std::string_view name) {
    for (auto s : {PromptSequence::Base, PromptSequence::OwnColorNearDecision, PromptSequence::CoworkerInfoFirst}) {
        if (name == sequence_name(s)) return s;
    }
    return std::nullopt;
}

std::vector<std::string> PromptBlocks::ordered(PromptSequence seq) const {
    std::vector<const std::string*> order;
    switch (seq) {
    case PromptSequence::Base:
        order = {&persona, &setting, &own_history, &coworkers, &attractor, &decision, &format};
        break;
    case PromptSequence::OwnColorNearDecision:
        order = {&persona, &setting, &coworkers, &attractor, &own_history, &decision, &format};
        break;
    case PromptSequence::CoworkerInfoFirst:
        order = {&coworkers, &persona, &setting, &own_history, &attractor, &decision, &format};
        break;
    }
    std::vector<std::string> out;
    for (const auto* block : order) {
        if (!block->empty()) out.push_back(*block);
    }
    return out;
}

PromptBlocks prompt_blocks(const PromptContext& ctx) {
    if (ctx.day < 1) throw ConfigError("prompts start on day 1; day 0 is the initial assignment");
    if (ctx.n_agents < 1 || ctx.prior_blue_count < 0 || ctx.prior_blue_count > ctx.n_agents) {
        throw ConfigError("prior blue count " + std::to_string(ctx.prior_blue_count) + " is not within 0.." +
                          std::to_string(ctx.n_agents));
    }
    const auto yesterday = "Yesterday on day " + std::to_string(ctx.day - 1) + ", ";

    PromptBlocks b;
    b.persona = "You are " + ctx.agent_name + ".";
    if (!ctx.trait_sentence.empty()) b.persona += " You are a " + ctx.trait_sentence + " person.";
    b.setting = kSettingBlock;
    b.own_history = yesterday + "you wore a " + std::string(color_name(ctx.own_prior_color)) + " shirt.";
    b.coworkers = yesterday + std::to_string(ctx.prior_blue_count) + " of " + std::to_string(ctx.n_agents) +
                  " wore blue shirts.";
    if (ctx.attractor) b.attractor = std::string(kAttractorCeo) + "\n" + std::string(kAttractorNeighbor);
    b.decision = kDecisionBlock;
    b.format = kFormatBlock;
    return b;
}

std::string build_prompt(const PromptContext& ctx) {
    std::string out;
    for (const auto& block : prompt_blocks(ctx).ordered(ctx.sequence)) {
        if (!out.empty()) out += '\n';
        out += block;
    }
    return out;
}

Decision parse_decision(std::string_view reply) {
    static constexpr std::string_view kMarker = "response:";

    std::optional<std::size_t> line_start;
    std::string_view response_line;
    std::size_t pos = 0;
    while (pos <= reply.size()) {
        auto eol = reply.find('\n', pos);
        auto line = reply.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        auto trimmed = line;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) trimmed.remove_prefix(1);
        if (iequals_prefix(trimmed, kMarker)) {
            line_start = pos;
            response_line = trimmed.substr(kMarker.size());
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }

    if (line_start) {
        auto word = response_line;
        while (!word.empty() && !std::isalpha(static_cast<unsigned char>(word.front()))) word.remove_prefix(1);
        std::size_t len = 0;
        while (len < word.size() && std::isalpha(static_cast<unsigned char>(word[len]))) ++len;
        auto color = parse_color(word.substr(0, len));
        if (!color) throw AmbiguousReply("response line names no color: '" + std::string(response_line) + "'");

        auto reasoning = reply.substr(0, *line_start);
        if (reasoning.ends_with('\n')) reasoning.remove_suffix(1);
        if (reasoning.ends_with('\r')) reasoning.remove_suffix(1);
        return Decision{std::string(reasoning), *color, std::string(reply)};
    }

    auto window = to_lower(reply.substr(reply.size() > kFallbackWindow ? reply.size() - kFallbackWindow : 0));
    bool blue = window.find("blue") != std::string::npos;
    bool green = window.find("green") != std::string::npos;
    if (blue == green) {
        throw AmbiguousReply(blue ? "reply ends naming both colors" : "reply names no color");
    }
    auto reasoning = reply;
    while (!reasoning.empty() && std::isspace(static_cast<unsigned char>(reasoning.back()))) reasoning.remove_suffix(1);
    return Decision{std::string(reasoning), blue ? ShirtColor::Blue : ShirtColor::Green, std::string(reply)};
}

int count_word(std::string_view text, std::string_view word) {
    if (word.empty()) return 0;
    auto hay = to_lower(text);
    auto needle = to_lower(word);
    int count = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        bool left = pos == 0 || !is_word_char(static_cast<unsigned char>(hay[pos - 1]));
        auto end = pos + needle.size();
        bool right = end == hay.size() || !is_word_char(static_cast<unsigned char>(hay[end]));
        if (left && right) ++count;
    }
    return count;
}

PromptSequence sequence_for_experiment(ExperimentId id) {
    switch (id) {
    case ExperimentId::E9: return PromptSequence::OwnColorNearDecision;
    case ExperimentId::E10: return PromptSequence::CoworkerInfoFirst;
    case ExperimentId::E1:
    case ExperimentId::E2:
    case ExperimentId::E3:
    case ExperimentId::E4:
    case ExperimentId::E5:
    case ExperimentId::E6:
    case ExperimentId::E7:
    case ExperimentId::E8:
    case ExperimentId::E11:
    case ExperimentId::E12: return PromptSequence::Base;
    }
    throw ConfigError("unknown experiment id " + std::to_string(static_cast<int>(id)));
}

} // namespace gabm
