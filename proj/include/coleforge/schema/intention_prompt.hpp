#pragma once

#include <string>
#include <vector>

namespace coleforge::schema {

// Metadata of a raw design image used to synthesize an intention.
struct RawImageInfo {
    std::string title;
    std::string format;
    std::vector<std::string> keywords;
    std::vector<std::string> visible_texts;
};

inline constexpr int kIntentionPromptVersion = 1;

// Byte-stable prompt for the intention-synthesis language model. Field values
// are substituted verbatim (no escaping, no Unicode normalization).
std::string render_intention_prompt(const RawImageInfo& raw);

}  // namespace coleforge::schema
