#include "gabm/domain.hpp"

#include "gabm/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace gabm {

namespace {

constexpr std::array<std::string_view, 20> kExtendedTraits = {
    "extremely conformist, curious, friendly, and sensitive",
    "highly conformist, cautious, friendly, and confident",
    "conformist, curious, critical, and confident",
    "low conformist, cautious, critical, and sensitive",
    "non-conformist, curious, friendly, and sensitive",
    "extremely conformist, cautious, friendly, and confident",
    "highly conformist, curious, critical, and confident",
    "conformist, cautious, critical, and sensitive",
    "low conformist, curious, friendly, and sensitive",
    "non-conformist, cautious, critical, and confident",
    "highly conformist, curious, friendly, and confident",
    "conformist, cautious, critical, and sensitive",
    "conformist, curious, critical, and sensitive",
    "conformist, cautious, friendly, and confident",
    "low conformist, curious, critical, and confident",
    "highly conformist, cautious, friendly, and sensitive",
    "conformist, curious, friendly, and sensitive",
    "conformist, cautious, friendly, and confident",
    "conformist, curious, critical, and confident",
    "low conformist, cautious, critical, and sensitive",
};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// "a, b, c, and d" -> {a, b, c, d}
std::vector<std::string> split_trait_list(std::string_view entry) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= entry.size()) {
        auto comma = entry.find(',', start);
        auto piece = entry.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
        while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
        if (piece.starts_with("and ")) piece.remove_prefix(4);
        if (!piece.empty()) items.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

std::string join_traits(const std::vector<std::string>& items) {
    if (items.empty()) return {};
    if (items.size() == 1) return items.front();
    if (items.size() == 2) return items[0] + " and " + items[1];
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += ", ";
        if (i + 1 == items.size()) out += "and ";
        out += items[i];
    }
    return out;
}

} // namespace

std::string_view color_name(ShirtColor c) { return c == ShirtColor::Blue ? "blue" : "green"; }

std::optional<ShirtColor> parse_color(std::string_view word) {
    auto w = lower(word);
    if (w == "blue") return ShirtColor::Blue;
    if (w == "green") return ShirtColor::Green;
    return std::nullopt;
}

std::string_view tier_phrase(ConformityTier tier) {
    switch (tier) {
    case ConformityTier::ExtremelyConformist: return "extremely conformist";
    case ConformityTier::HighlyConformist: return "highly conformist";
    case ConformityTier::Conformist: return "conformist";
    case ConformityTier::LowConformist: return "low conformist";
    case ConformityTier::NonConformist: return "non-conformist";
    }
    return {};
}

std::optional<ConformityTier> parse_tier(std::string_view phrase) {
    auto p = lower(phrase);
    for (auto t : {ConformityTier::ExtremelyConformist, ConformityTier::HighlyConformist, ConformityTier::Conformist,
                   ConformityTier::LowConformist, ConformityTier::NonConformist}) {
        if (p == tier_phrase(t)) return t;
    }
    return std::nullopt;
}

std::string AgentPersona::trait_sentence() const {
    std::vector<std::string> items;
    if (tier) items.emplace_back(tier_phrase(*tier));
    items.insert(items.end(), extra_traits.begin(), extra_traits.end());
    return join_traits(items);
}

std::string_view persona_mode_name(PersonaMode mode) {
    switch (mode) {
    case PersonaMode::ConformityOnly: return "conformity";
    case PersonaMode::None: return "none";
    case PersonaMode::Extended: return "extended";
    case PersonaMode::ExtrasOnly: return "extras";
    }
    return {};
}

NameSet make_name_set(std::string label, std::vector<std::string> names) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty()) throw ConfigError("name set '" + label + "' contains an empty name");
        if (!seen.insert(n).second) throw ConfigError("name set '" + label + "' repeats the name " + n);
    }
    return NameSet{std::move(label), std::move(names)};
}

const NameSet& base_names() {
    static const NameSet names = make_name_set(
        "base", {"Adrian", "Mark", "Greg", "John", "Peter", "Liz", "Rosa", "Patricia", "Julia", "Kathy",
                 "William", "Benjamin", "Mike", "David", "George", "Emma", "Olivia", "Elizabeth", "Isabella", "Mia"});
    return names;
}

// Keep in sync with data/names_farsi.txt. Gender follows the base list position by position.
const NameSet& farsi_names() {
    static const NameSet names = make_name_set(
        "farsi", {"علی", "محمد", "رضا", "حسین", "مهدی", "مریم", "زهرا", "فاطمه", "سارا", "نرگس",
                  "امیر", "سعید", "حمید", "داوود", "بهرام", "لیلا", "مینا", "شیرین", "نازنین", "پریسا"});
    return names;
}

std::span<const std::string_view> extended_trait_table() { return kExtendedTraits; }

std::vector<AgentPersona> base_persona_list(PersonaMode mode, const NameSet& names) {
    if (names.names.size() != kExtendedTraits.size()) {
        throw ConfigError("the built-in persona list has " + std::to_string(kExtendedTraits.size()) +
                          " entries but name set '" + names.label + "' has " + std::to_string(names.names.size()));
    }
    std::vector<AgentPersona> out;
    out.reserve(kExtendedTraits.size());
    for (std::size_t i = 0; i < kExtendedTraits.size(); ++i) {
        auto items = split_trait_list(kExtendedTraits[i]);
        AgentPersona p{names.names[i], parse_tier(items.front()), {items.begin() + 1, items.end()}};
        switch (mode) {
        case PersonaMode::Extended: break;
        case PersonaMode::ConformityOnly: p.extra_traits.clear(); break;
        case PersonaMode::ExtrasOnly: p.tier.reset(); break;
        case PersonaMode::None:
            p.tier.reset();
            p.extra_traits.clear();
            break;
        }
        out.push_back(std::move(p));
    }
    return out;
}

WorldState::WorldState(std::vector<AgentPersona> personas, int n_days)
    : personas_(std::move(personas)), n_days_(n_days) {
    if (personas_.empty()) throw ConfigError("a world needs at least one agent");
    if (n_days_ < 0) throw ConfigError("n_days must be non-negative");
    filled_per_day_.assign(static_cast<std::size_t>(n_days_) + 1, 0);
    cells_.assign(personas_.size() * (static_cast<std::size_t>(n_days_) + 1), std::nullopt);
}

const AgentPersona& WorldState::persona(int agent) const {
    check_agent(agent);
    return personas_[static_cast<std::size_t>(agent)];
}

void WorldState::check_agent(int agent) const {
    if (agent < 0 || agent >= n_agents()) throw OutOfRangeError("agent index " + std::to_string(agent) + " out of range");
}

std::size_t WorldState::index(int agent, int day) const {
    check_agent(agent);
    if (day < 0 || day > n_days_) throw OutOfRangeError("day " + std::to_string(day) + " out of range");
    return static_cast<std::size_t>(agent) * (static_cast<std::size_t>(n_days_) + 1) + static_cast<std::size_t>(day);
}

std::optional<ShirtColor> WorldState::cell(int agent, int day) const { return cells_[index(agent, day)]; }

ShirtColor WorldState::at(int agent, int day) const {
    auto c = cell(agent, day);
    if (!c) throw OutOfRangeError("cell (" + std::to_string(agent) + ", " + std::to_string(day) + ") is unfilled");
    return *c;
}

void WorldState::record_choice(int agent, int day, ShirtColor color) {
    auto& slot = cells_[index(agent, day)];
    if (slot) {
        throw IntegrityError("cell (" + std::to_string(agent) + ", " + std::to_string(day) + ") is already filled");
    }
    if (day != current_day_ + 1) {
        throw OutOfRangeError("day " + std::to_string(day) + " is not writable; next open day is " +
                              std::to_string(current_day_ + 1));
    }
    slot = color;
    if (++filled_per_day_[static_cast<std::size_t>(day)] == n_agents()) current_day_ = day;
}

int WorldState::count_blue(int day) const {
    if (day < 0 || day > current_day_) throw OutOfRangeError("day " + std::to_string(day) + " is not filled");
    int blue = 0;
    for (int a = 0; a < n_agents(); ++a) blue += to_bit(*cells_[index(a, day)]);
    return blue;
}

int WorldState::count_green(int day) const { return n_agents() - count_blue(day); }

std::vector<int> WorldState::blue_series() const {
    std::vector<int> out;
    for (int d = 0; d <= current_day_; ++d) out.push_back(count_blue(d));
    return out;
}

WorldState init_world(int n_agents, double p_blue_initial, std::uint64_t seed, std::vector<AgentPersona> personas,
                      int n_days) {
    if (!(p_blue_initial >= 0.0 && p_blue_initial <= 1.0)) throw ConfigError("p_blue_initial must lie in [0, 1]");
    if (static_cast<int>(personas.size()) != n_agents) {
        throw ConfigError("expected " + std::to_string(n_agents) + " personas, got " + std::to_string(personas.size()));
    }
    WorldState world(std::move(personas), n_days);
    std::mt19937_64 gen(seed);
    for (int a = 0; a < n_agents; ++a) {
        double u = unit_from_bits(gen());
        world.record_choice(a, 0, u < p_blue_initial ? ShirtColor::Blue : ShirtColor::Green);
    }
    return world;
}

void write_matrix_csv(const WorldState& world, std::ostream& out) {
    out << "agent";
    for (int d = 0; d <= world.current_day(); ++d) out << ",day" << d;
    out << '\n';
    for (int a = 0; a < world.n_agents(); ++a) {
        out << world.persona(a).name;
        for (int d = 0; d <= world.current_day(); ++d) out << ',' << to_bit(world.at(a, d));
        out << '\n';
    }
}

WorldState read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("matrix CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.starts_with("agent")) throw IoError("matrix CSV header must start with 'agent'");
    int columns = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (columns < 1) throw IoError("matrix CSV has no day columns");

    std::vector<AgentPersona> personas;
    std::vector<std::vector<int>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::getline(ss, field, ',');
        personas.push_back(AgentPersona{field, std::nullopt, {}});
        std::vector<int> row;
        while (std::getline(ss, field, ',')) {
            if (field != "0" && field != "1") throw IoError("matrix cell must be 0 or 1, got '" + field + "'");
            row.push_back(field == "1" ? 1 : 0);
        }
        if (static_cast<int>(row.size()) != columns) throw IoError("matrix row for " + personas.back().name + " is ragged");
        rows.push_back(std::move(row));
    }
    WorldState world(std::move(personas), columns - 1);
    for (int d = 0; d < columns; ++d) {
        for (std::size_t a = 0; a < rows.size(); ++a) {
            world.record_choice(static_cast<int>(a), d, rows[a][static_cast<std::size_t>(d)] ? ShirtColor::Blue
                                                                                               : ShirtColor::Green);
        }
    }
    return world;
}

} // namespace gabm
