#include "coleforge/schema/design_plan.hpp"

#include <algorithm>

#include "coleforge/core/text.hpp"

namespace coleforge::schema {

namespace {

constexpr std::array<std::string_view, 6> kCategoryNames = {
    "advertising", "events", "marketing", "posts", "covers_and_headers", "creative"};

}  // namespace

std::string_view category_name(Category c) noexcept {
    return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<Category> parse_category(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
        if (kCategoryNames[i] == name) return static_cast<Category>(i);
    }
    return std::nullopt;
}

DesignIntent make_intent(std::string text, Category category) {
    if (text::trim(text).empty()) throw InvalidIntent("intent text is empty");
    return DesignIntent{std::move(text), category};
}

bool is_plan_field(std::string_view path) noexcept {
    return std::find(kPlanFields.begin(), kPlanFields.end(), path) != kPlanFields.end();
}

Findings validate_plan(const DesignPlan& plan) {
    Findings out;
    auto check_utf8 = [&](std::string_view field, const std::string& value) {
        if (!text::is_valid_utf8(value)) out.push_back({std::string(field), "not valid UTF-8"});
    };
    check_utf8("global_caption", plan.global_caption);
    check_utf8("category", plan.category);
    check_utf8("background_caption", plan.background_caption);
    check_utf8("object_caption", plan.object_caption);
    check_utf8("heading", plan.heading);
    check_utf8("sub_heading", plan.sub_heading);
    check_utf8("body_text", plan.body_text);

    if (!parse_category(plan.category)) {
        out.push_back({"category", "unknown category '" + plan.category + "'"});
    }
    for (std::size_t i = 0; i < plan.keywords.size(); ++i) {
        const auto& k = plan.keywords[i];
        if (text::trim(k).empty()) {
            out.push_back({"keywords", "entry " + std::to_string(i) + " is empty"});
        } else if (!text::is_valid_utf8(k)) {
            out.push_back({"keywords", "entry " + std::to_string(i) + " is not valid UTF-8"});
        }
    }
    if (!plan.object_flag && !plan.object_caption.empty()) {
        out.push_back({"object_caption", "object_caption must be empty when object_flag is false"});
    }
    if (plan.object_flag && text::trim(plan.object_caption).empty()) {
        out.push_back({"object_caption", "object_caption is required when object_flag is true"});
    }
    return out;
}

Json plan_to_json(const DesignPlan& plan) {
    Json j = Json::object();
    j["global_caption"] = plan.global_caption;
    j["category"] = plan.category;
    j["keywords"] = plan.keywords;
    j["background_caption"] = plan.background_caption;
    j["object_flag"] = plan.object_flag;
    j["object_caption"] = plan.object_caption;
    j["heading"] = plan.heading;
    j["sub_heading"] = plan.sub_heading;
    j["body_text"] = plan.body_text;
    return j;
}

DesignPlan plan_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("plan must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!is_plan_field(key)) throw SchemaError("unknown plan key '" + key + "'");
    }
    auto str = [&](std::string_view key) -> std::string {
        auto it = j.find(key);
        if (it == j.end()) throw SchemaError("missing plan key '" + std::string(key) + "'");
        if (!it->is_string()) throw SchemaError("plan key '" + std::string(key) + "' must be a string");
        return it->get<std::string>();
    };
    DesignPlan p;
    p.global_caption = str("global_caption");
    p.category = str("category");
    auto kw = j.find("keywords");
    if (kw == j.end()) throw SchemaError("missing plan key 'keywords'");
    if (!kw->is_array()) throw SchemaError("plan key 'keywords' must be an array");
    for (const auto& k : *kw) {
        if (!k.is_string()) throw SchemaError("keywords entries must be strings");
        p.keywords.push_back(k.get<std::string>());
    }
    p.background_caption = str("background_caption");
    auto flag = j.find("object_flag");
    if (flag == j.end()) throw SchemaError("missing plan key 'object_flag'");
    if (!flag->is_boolean()) throw SchemaError("plan key 'object_flag' must be a boolean");
    p.object_flag = flag->get<bool>();
    p.object_caption = str("object_caption");
    p.heading = str("heading");
    p.sub_heading = str("sub_heading");
    p.body_text = str("body_text");
    return p;
}

std::string serialize_plan(const DesignPlan& plan) {
    return plan_to_json(plan).dump(2) + "\n";
}

DesignPlan deserialize_plan(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("plan is not valid JSON: ") + e.what());
    }
    return plan_from_json(j);
}

Json intent_to_json(const DesignIntent& intent) {
    Json j = Json::object();
    j["category"] = std::string(category_name(intent.category));
    j["intention"] = intent.text;
    return j;
}

DesignIntent intent_from_json(const Json& j) {
    if (!j.is_object()) throw SchemaError("intent must be a JSON object");
    auto cat = j.find("category");
    auto txt = j.find("intention");
    if (cat == j.end() || !cat->is_string()) throw SchemaError("intent needs a string 'category'");
    if (txt == j.end() || !txt->is_string()) throw SchemaError("intent needs a string 'intention'");
    auto c = parse_category(cat->get<std::string>());
    if (!c) throw SchemaError("unknown category '" + cat->get<std::string>() + "'");
    try {
        return make_intent(txt->get<std::string>(), *c);
    } catch (const InvalidIntent& e) {
        throw SchemaError(e.what());
    }
}

}  // namespace coleforge::schema
