#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "coleforge/core/error.hpp"

namespace coleforge::schema {

using Json = nlohmann::ordered_json;

enum class Category { kAdvertising, kEvents, kMarketing, kPosts, kCoversAndHeaders, kCreative };

inline constexpr std::array<Category, 6> kAllCategories = {
    Category::kAdvertising, Category::kEvents,           Category::kMarketing,
    Category::kPosts,       Category::kCoversAndHeaders, Category::kCreative};

std::string_view category_name(Category c) noexcept;
std::optional<Category> parse_category(std::string_view name) noexcept;

struct DesignIntent {
    std::string text;
    Category category = Category::kPosts;

    bool operator==(const DesignIntent&) const = default;
};

// Throws InvalidIntent when the text is blank.
DesignIntent make_intent(std::string text, Category category);

class InvalidIntent : public Error {
public:
    using Error::Error;
};

// The plan document a planner backend expands an intent into.
struct DesignPlan {
    std::string global_caption;
    std::string category;
    std::vector<std::string> keywords;
    std::string background_caption;
    bool object_flag = false;
    std::string object_caption;
    std::string heading;
    std::string sub_heading;
    std::string body_text;

    bool operator==(const DesignPlan&) const = default;
};

// Canonical field order. Serialization, masking and golden files follow it.
inline constexpr std::array<std::string_view, 9> kPlanFields = {
    "global_caption", "category",    "keywords",    "background_caption", "object_flag",
    "object_caption", "heading",     "sub_heading", "body_text"};

bool is_plan_field(std::string_view path) noexcept;

// Pure; never throws. Empty result means the plan is valid.
Findings validate_plan(const DesignPlan& plan);

class SchemaError : public Error {
public:
    using Error::Error;
};

Json plan_to_json(const DesignPlan& plan);
// Strict: all nine keys required, no unknown keys, exact types.
DesignPlan plan_from_json(const Json& j);

// UTF-8 JSON in canonical key order, two-space indent, trailing newline.
std::string serialize_plan(const DesignPlan& plan);
DesignPlan deserialize_plan(std::string_view text);

Json intent_to_json(const DesignIntent& intent);
DesignIntent intent_from_json(const Json& j);

}  // namespace coleforge::schema
