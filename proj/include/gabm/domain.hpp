#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gabm {

// Serialized as 1 (blue) / 0 (green) everywhere a matrix or CSV is written.
enum class ShirtColor : std::uint8_t { Green = 0, Blue = 1 };

constexpr int to_bit(ShirtColor c) { return c == ShirtColor::Blue ? 1 : 0; }
constexpr ShirtColor opposite(ShirtColor c) {
    return c == ShirtColor::Blue ? ShirtColor::Green : ShirtColor::Blue;
}
std::string_view color_name(ShirtColor c);
std::optional<ShirtColor> parse_color(std::string_view word);

enum class ConformityTier { ExtremelyConformist, HighlyConformist, Conformist, LowConformist, NonConformist };

std::string_view tier_phrase(ConformityTier tier);
std::optional<ConformityTier> parse_tier(std::string_view phrase);

struct AgentPersona {
    std::string name;
    std::optional<ConformityTier> tier;
    std::vector<std::string> extra_traits;

    /// Comma-joined trait list, e.g. "extremely conformist, curious, friendly, and sensitive".
    /// Empty when the persona has neither a tier nor extra traits.
    std::string trait_sentence() const;
};

enum class PersonaMode { ConformityOnly, None, Extended, ExtrasOnly };

std::string_view persona_mode_name(PersonaMode mode);

struct NameSet {
    std::string label;
    std::vector<std::string> names;
};

/// Throws ConfigError on duplicate or empty names.
NameSet make_name_set(std::string label, std::vector<std::string> names);

const NameSet& base_names();
/// Stand-in list of common Iranian names written in Farsi script; the original list was never published.
const NameSet& farsi_names();

/// The twenty entries of the extended trait table, verbatim and in order.
std::span<const std::string_view> extended_trait_table();

/// Personas for the given mode, assigned positionally to `names`.
/// Extended keeps each trait entry verbatim, ConformityOnly keeps only the leading tier,
/// ExtrasOnly drops the tier, None leaves every persona without traits.
std::vector<AgentPersona> base_persona_list(PersonaMode mode, const NameSet& names = base_names());

/// Per-agent, per-day color matrix. Column 0 is the initial assignment; columns
/// 1..n_days are decision days. A column is complete once every agent has a value,
/// and current_day() is the last complete column (-1 before initialization).
class WorldState {
public:
    WorldState(std::vector<AgentPersona> personas, int n_days);

    int n_agents() const { return static_cast<int>(personas_.size()); }
    int n_days() const { return n_days_; }
    int current_day() const { return current_day_; }

    const std::vector<AgentPersona>& personas() const { return personas_; }
    const AgentPersona& persona(int agent) const;

    std::optional<ShirtColor> cell(int agent, int day) const;
    /// Throws OutOfRangeError when the cell is unfilled.
    ShirtColor at(int agent, int day) const;

    /// Only cells of column current_day()+1 are writable; each cell is write-once.
    void record_choice(int agent, int day, ShirtColor color);

    int count_blue(int day) const;
    int count_green(int day) const;
    /// Blue counts for days 0..current_day().
    std::vector<int> blue_series() const;

private:
    std::size_t index(int agent, int day) const;
    void check_agent(int agent) const;

    std::vector<AgentPersona> personas_;
    int n_days_;
    int current_day_ = -1;
    std::vector<int> filled_per_day_;
    std::vector<std::optional<ShirtColor>> cells_;
};

/// Column 0 is drawn with std::mt19937_64 seeded by `seed`: agents are visited in
/// index order and each consumes one 64-bit output x; u = (x >> 11) * 2^-53 and the
/// agent starts Blue iff u < p_blue_initial.
WorldState init_world(int n_agents, double p_blue_initial, std::uint64_t seed,
                      std::vector<AgentPersona> personas, int n_days = 7);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit word.
constexpr double unit_from_bits(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Header `agent,day0,...,dayN` for filled columns, one row per agent, cells 0/1, LF endings.
void write_matrix_csv(const WorldState& world, std::ostream& out);
/// Reads a fully filled matrix; personas carry names only.
WorldState read_matrix_csv(std::istream& in);

} // namespace gabm
