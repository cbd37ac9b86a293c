#include "coleforge/metrics/judge.hpp"

#include <cctype>
#include <optional>

#include "coleforge/core/text.hpp"

namespace coleforge::metrics {

namespace {

#include "prompt_text.inc"

constexpr std::array<std::string_view, 5> kKeys = {"design_layout", "content_relevance", "typography_color",
                                                   "graphics_images", "innovation"};
constexpr std::array<std::string_view, 5> kTitles = {
    "Design and Layout", "Content Relevance and Effectiveness", "Typography and Color Scheme",
    "Graphics and Images", "Innovation and Originality"};

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::optional<std::size_t> criterion_index(std::string_view key) {
    const std::string k = squash(key);
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (k == squash(kKeys[i]) || k == squash(kTitles[i])) return i;
    }
    return std::nullopt;
}

// The JSON body of a response: the first ```-fenced block if there is one,
// else the span from the first '{' to the last '}', else the whole text.
std::string extract_json_body(std::string_view raw) {
    const std::string s = text::trim(raw);
    const auto open = s.find("```");
    if (open != std::string::npos) {
        const auto nl = s.find('\n', open);
        if (nl != std::string::npos) {
            const auto close = s.find("```", nl + 1);
            return text::trim(std::string_view(s).substr(nl + 1, close == std::string::npos ? std::string::npos
                                                                                             : close - nl - 1));
        }
    }
    const auto first = s.find('{');
    const auto last = s.rfind('}');
    if (first != std::string::npos && last != std::string::npos && last > first) {
        return s.substr(first, last - first + 1);
    }
    return s;
}

}  // namespace

std::string_view criterion_key(Criterion c) noexcept { return kKeys[static_cast<std::size_t>(c)]; }
std::string_view criterion_title(Criterion c) noexcept { return kTitles[static_cast<std::size_t>(c)]; }

double QualityReport::aggregate() const noexcept {
    double s = 0.0;
    for (int v : scores) s += v;
    return s / static_cast<double>(scores.size());
}

QualityReport parse_judge(std::string_view response_text) {
    const std::string body = extract_json_body(response_text);
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::parse_error& e) {
        throw MalformedJudgeResponse("judge response is not JSON", {{"response", e.what()}});
    }
    if (!j.is_object()) throw MalformedJudgeResponse("judge response is not a JSON object", {{"response", "expected an object"}});

    QualityReport r;
    std::array<bool, 5> seen{};
    Findings findings;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto idx = criterion_index(it.key());
        if (!idx) continue;  // unknown keys (overall comments etc.) are ignored
        const std::string& field = it.key();
        if (seen[*idx]) {
            findings.push_back({field, "criterion given more than once"});
            continue;
        }
        seen[*idx] = true;
        const Json* score = &it.value();
        if (it.value().is_object()) {
            auto s = it.value().find("score");
            if (s == it.value().end()) {
                findings.push_back({field, "missing score"});
                continue;
            }
            score = &*s;
            for (const char* rk : {"rationale", "reason", "comment"}) {
                auto rt = it.value().find(rk);
                if (rt != it.value().end() && rt->is_string()) {
                    r.rationales[*idx] = rt->get<std::string>();
                    break;
                }
            }
        }
        if (!score->is_number_integer() && !score->is_number_unsigned()) {
            findings.push_back({field, "score must be an integer"});
            continue;
        }
        const auto v = score->get<long long>();
        if (v < 1 || v > 10) {
            findings.push_back({field, "score " + std::to_string(v) + " outside [1, 10]"});
            continue;
        }
        r.scores[*idx] = static_cast<int>(v);
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) findings.push_back({std::string(kKeys[i]), "missing criterion"});
    }
    if (!findings.empty()) throw MalformedJudgeResponse("judge response rejected", std::move(findings));
    return r;
}

Json quality_report_to_json(const QualityReport& r) {
    Json j = Json::object();
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        j[std::string(kKeys[i])] = Json{{"score", r.scores[i]}, {"rationale", r.rationales[i]}};
    }
    return j;
}

std::string render_quality_prompt() {
    std::string out = kQualityInstruction;
    out += "\n\nRespond with one JSON object keyed by criterion, for example:\n{";
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (i) out += ", ";
        out += "\"";
        out += kKeys[i];
        out += "\": {\"score\": 7, \"rationale\": \"...\"}";
    }
    out += "}\n";
    return out;
}

std::string render_pairwise_prompt(std::string_view caption, const std::vector<std::string>& required_texts) {
    std::string out = kPairwiseInstruction;
    out += "\n\nCaption: ";
    out += caption;
    out += "\nTexts the images must contain:\n";
    for (const auto& t : required_texts) {
        out += "- ";
        out += t;
        out += "\n";
    }
    return out;
}

int parse_verdict(std::string_view response_text) {
    const auto p1 = response_text.rfind("| Image 1");
    const auto p2 = response_text.rfind("| Image 2");
    if (p1 == std::string_view::npos && p2 == std::string_view::npos) {
        throw UnparseableVerdict("no '| Image 1' or '| Image 2' marker in verdict");
    }
    if (p1 == std::string_view::npos) return 2;
    if (p2 == std::string_view::npos) return 1;
    return p1 > p2 ? 1 : 2;
}

}  // namespace coleforge::metrics
