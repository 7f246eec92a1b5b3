#pragma once

#include "gabm/domain.hpp"
#include "gabm/experiment_id.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gabm {

enum class PromptSequence { Base, OwnColorNearDecision, CoworkerInfoFirst };

std::string_view sequence_name(PromptSequence seq);
std::optional<PromptSequence> parse_sequence(std::string_view name);

struct PromptContext {
    std::string agent_name;
    std::string trait_sentence;
    int day = 1;
    ShirtColor own_prior_color = ShirtColor::Green;
    int prior_blue_count = 0;
    int n_agents = 20;
    bool attractor = false;
    PromptSequence sequence = PromptSequence::Base;
};

struct Decision {
    std::string reasoning;
    ShirtColor color;
    std::string raw_reply;
};

// Authored prompt text. These are the only fixed sentences not taken verbatim
// from the published prompt fragments.
inline constexpr std::string_view kSettingBlock =
    "You work in an office where all of the workers see each other every day. "
    "Every day, each worker wears either a blue shirt or a green shirt to the office. "
    "You want to be successful in your job and you care about earning more money.";
inline constexpr std::string_view kFormatBlock =
    "Explain your reasoning in a few sentences. Then, on a final line of its own, "
    "write your choice exactly as \"Response: blue\" or \"Response: green\".";

inline constexpr std::string_view kAttractorCeo =
    "Michael, the new CEO, bikes to work everyday, likes coffee, and often wears blue shirts.";
inline constexpr std::string_view kAttractorNeighbor =
    "You note that your neighbor who works in a different company wears green.";
inline constexpr std::string_view kDecisionBlock =
    "Based on the above context, you need to choose whether to wear blue or green shirt.";

/// Individual blocks of a prompt, before sequencing. `attractor` is empty when disabled.
struct PromptBlocks {
    std::string persona;
    std::string setting;
    std::string own_history;
    std::string coworkers;
    std::string attractor;
    std::string decision;
    std::string format;

    /// Non-empty blocks in the order the sequence prescribes.
    std::vector<std::string> ordered(PromptSequence seq) const;
};

/// Throws ConfigError if day < 1 or the prior count exceeds n_agents.
PromptBlocks prompt_blocks(const PromptContext& ctx);
/// Blocks joined with '\n' in sequence order.
std::string build_prompt(const PromptContext& ctx);

/// The last line starting with "Response:" (case-insensitive) decides; text before it is
/// the reasoning. Without such a line, the final 40 characters must name exactly one color.
Decision parse_decision(std::string_view reply);

inline constexpr std::size_t kFallbackWindow = 40;

/// Whole-word, case-insensitive occurrences of `word` (ASCII word boundaries).
int count_word(std::string_view text, std::string_view word);

PromptSequence sequence_for_experiment(ExperimentId id);

} // namespace gabm
