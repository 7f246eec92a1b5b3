#include "gabm/digest.hpp"
#include "gabm/errors.hpp"
#include "gabm/llm.hpp"

#include <random>
#include <regex>
#include <string>

namespace gabm {

double follow_probability(std::optional<ConformityTier> tier) {
    if (!tier) return 0.5;
    switch (*tier) {
    case ConformityTier::ExtremelyConformist: return 1.0;
    case ConformityTier::HighlyConformist: return 0.9;
    case ConformityTier::Conformist: return 0.75;
    case ConformityTier::LowConformist: return 0.35;
    case ConformityTier::NonConformist: return 0.05;
    }
    return 0.5;
}

double scripted_draw(std::uint64_t seed, std::string_view agent_name, int day) {
    auto key = "scripted:" + std::to_string(seed) + ":" + sha256_hex(agent_name) + ":" + std::to_string(day);
    std::mt19937_64 gen(digest_u64(key));
    return unit_from_bits(gen());
}

OracleView parse_oracle_view(std::string_view prompt) {
    static const std::regex persona_re(R"(^You are (.+?)\.(?: You are a (.+) person\.)?$)");
    static const std::regex own_re(R"(^Yesterday on day (\d+), you wore a (blue|green) shirt\.$)");
    static const std::regex coworker_re(R"(^Yesterday on day (\d+), (\d+) of (\d+) wore blue shirts\.$)");

    OracleView view;
    bool have_persona = false, have_own = false, have_coworkers = false;
    int own_day = -1, coworker_day = -1;

    std::size_t pos = 0;
    while (pos <= prompt.size()) {
        auto eol = prompt.find('\n', pos);
        std::string line(prompt.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        std::smatch m;
        if (!have_persona && std::regex_match(line, m, persona_re)) {
            have_persona = true;
            view.agent_name = m[1];
            if (m[2].matched) {
                std::string traits = m[2];
                view.tier = parse_tier(traits.substr(0, traits.find(',')));
            }
        } else if (std::regex_match(line, m, own_re)) {
            have_own = true;
            own_day = std::stoi(m[1]);
            view.own_prior = *parse_color(m[2].str());
        } else if (std::regex_match(line, m, coworker_re)) {
            have_coworkers = true;
            coworker_day = std::stoi(m[1]);
            view.prior_blue = std::stoi(m[2]);
            view.n_agents = std::stoi(m[3]);
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (!have_persona || !have_own || !have_coworkers) {
        throw OracleParseError("prompt is missing the persona, own-history or coworker block");
    }
    if (own_day != coworker_day) throw OracleParseError("own-history and coworker blocks disagree on the day");
    if (view.prior_blue > view.n_agents) throw OracleParseError("blue count exceeds office size");
    view.day = own_day + 1;
    return view;
}

std::string scripted_reply(std::string_view prompt, std::uint64_t seed) {
    auto view = parse_oracle_view(prompt);
    std::string reasoning;
    ShirtColor choice;

    if (2 * view.prior_blue == view.n_agents) {
        choice = view.own_prior;
        reasoning = "Yesterday the office was evenly split, so I will keep wearing my " +
                    std::string(color_name(choice)) + " shirt.";
    } else {
        auto majority = 2 * view.prior_blue > view.n_agents ? ShirtColor::Blue : ShirtColor::Green;
        bool follow = scripted_draw(seed, view.agent_name, view.day) < follow_probability(view.tier);
        choice = follow ? majority : opposite(majority);
        auto maj = std::string(color_name(majority));
        reasoning = follow ? "Most of my coworkers wore " + maj + " yesterday, so I will wear " + maj + " to fit in."
                           : "Most of my coworkers wore " + maj + " yesterday, but I prefer to stand out, so I will wear " +
                                 std::string(color_name(choice)) + ".";
    }
    return reasoning + "\nResponse: " + std::string(color_name(choice));
}

} // namespace gabm
