#pragma once

#include <string_view>

namespace corrpus {

// How the model is scaffolded. The style also decides which surface forms
// the update dialect accepts.
enum class PromptStyle {
    comment_only,
    specific_functions,
    abstract_functions,
    natural_language,
};

std::string_view to_string(PromptStyle style);
// Short CLI spelling: comment | specific | abstract | natural.
std::string_view short_name(PromptStyle style);
// Accepts both the short and the long spelling; throws std::invalid_argument.
PromptStyle style_from_string(std::string_view text);

inline bool is_code_style(PromptStyle style) { return style != PromptStyle::natural_language; }

}  // namespace corrpus
