#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rlvr::prompts {

// Byte-identical copies of the files under prompts/.
extern const std::string_view kSystemPrompt;
extern const std::string_view kCotQualityScoringPrompt;  // slot: REASONING
extern const std::string_view kRlvrDifficultyPrompt;
extern const std::string_view kSpatialValidationPrompt;  // slots: QUESTION, ANSWER_CHOICES, CORRECT_ANSWER

/// Replaces every occurrence of each slot name with its value, in order.
std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string_view, std::string>>& slots);

}  // namespace rlvr::prompts
