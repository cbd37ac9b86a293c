#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coleforge/core/error.hpp"

namespace coleforge::metrics {

using Json = nlohmann::ordered_json;

enum class Criterion { design_layout, content_relevance, typography_color, graphics_images, innovation };

inline constexpr std::array<Criterion, 5> kCriteria = {
    Criterion::design_layout, Criterion::content_relevance, Criterion::typography_color,
    Criterion::graphics_images, Criterion::innovation};

std::string_view criterion_key(Criterion c) noexcept;
// Heading used in the grading instructions, e.g. "Design and Layout".
std::string_view criterion_title(Criterion c) noexcept;

struct QualityReport {
    std::array<int, 5> scores{1, 1, 1, 1, 1};
    std::array<std::string, 5> rationales;

    int score(Criterion c) const noexcept { return scores[static_cast<std::size_t>(c)]; }
    // Equal-weight mean of the five criteria.
    double aggregate() const noexcept;
    bool operator==(const QualityReport&) const = default;
};

class MalformedJudgeResponse : public FindingsError {
public:
    using FindingsError::FindingsError;
};

// Reads the first ```-fenced block of the response, or else the outermost
// {...} span, so surrounding prose is ignored. Keys may be the snake_case
// criterion keys or the criterion titles. A value is either an integer score
// or {"score": int, "rationale": string}.
QualityReport parse_judge(std::string_view response_text);

// Canonical form; parse_judge(quality_report_to_json(r).dump()) == r.
Json quality_report_to_json(const QualityReport& r);

std::string render_quality_prompt();

std::string render_pairwise_prompt(std::string_view caption, const std::vector<std::string>& required_texts);

class UnparseableVerdict : public Error {
public:
    using Error::Error;
};

// Returns 1 or 2. The last "| Image N" marker in the text decides.
int parse_verdict(std::string_view response_text);

}  // namespace coleforge::metrics
