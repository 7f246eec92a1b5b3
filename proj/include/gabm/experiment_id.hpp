#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace gabm {

enum class ExperimentId { E1 = 1, E2, E3, E4, E5, E6, E7, E8, E9, E10, E11, E12 };

inline constexpr std::array<ExperimentId, 12> kAllExperiments = {
    ExperimentId::E1, ExperimentId::E2, ExperimentId::E3, ExperimentId::E4,  ExperimentId::E5,  ExperimentId::E6,
    ExperimentId::E7, ExperimentId::E8, ExperimentId::E9, ExperimentId::E10, ExperimentId::E11, ExperimentId::E12};

std::string experiment_label(ExperimentId id);
/// Accepts "E1".."E12" (case-insensitive); nullopt otherwise.
std::optional<ExperimentId> parse_experiment_id(std::string_view text);
/// Throws ConfigError for anything other than E1..E12.
ExperimentId experiment_from_index(int index);

} // namespace gabm
