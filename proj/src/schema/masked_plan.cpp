#include "coleforge/schema/masked_plan.hpp"

#include <algorithm>
#include <set>

#include "coleforge/core/text.hpp"

namespace coleforge::schema {

namespace {

// '<' only ever appears inside JSON strings, so escaping it guarantees the
// only sentinels in the prompt are the ones we placed.
std::string dump_value(const Json& value) {
    std::string raw = value.dump();
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        if (c == '<') {
            out += "\\u003c";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

std::string coerce_fill(std::string_view field, const std::string& fill) {
    if (field == "object_flag") {
        const std::string v = text::to_lower(text::trim(fill));
        if (v == "true" || v == "false") return v;
        throw TypeCoercionFailure("object_flag fill '" + fill + "' is not a boolean");
    }
    if (field == "keywords") {
        Json arr;
        try {
            arr = Json::parse(fill);
        } catch (const nlohmann::json::parse_error&) {
            throw TypeCoercionFailure("keywords fill is not a JSON array: " + fill);
        }
        if (!arr.is_array()) throw TypeCoercionFailure("keywords fill is not a JSON array: " + fill);
        for (const auto& k : arr) {
            if (!k.is_string()) throw TypeCoercionFailure("keywords fill has a non-string entry");
        }
        return dump_value(arr);
    }
    if (!text::is_valid_utf8(fill)) {
        throw TypeCoercionFailure(std::string(field) + " fill is not valid UTF-8");
    }
    return dump_value(Json(fill));
}

}  // namespace

std::string mask_sentinel(std::string_view field_path) {
    return "<MASK:" + std::string(field_path) + ">";
}

MaskedPlanEncoding encode_masked(const DesignPlan& known, std::span<const std::string> fields_to_mask) {
    std::set<std::string_view> masked;
    for (const auto& f : fields_to_mask) {
        if (!is_plan_field(f)) throw UnknownFieldPath("unknown plan field path '" + f + "'");
        masked.insert(f);
    }
    const Json values = plan_to_json(known);
    MaskedPlanEncoding enc;
    enc.prompt_text = "{\n";
    int next_slot = 0;
    for (std::size_t i = 0; i < kPlanFields.size(); ++i) {
        const auto field = kPlanFields[i];
        enc.prompt_text += "  \"";
        enc.prompt_text += field;
        enc.prompt_text += "\": ";
        if (masked.contains(field)) {
            enc.prompt_text += mask_sentinel(field);
            enc.mask_slots.push_back({std::string(field), next_slot++});
        } else {
            enc.prompt_text += dump_value(values.at(std::string(field)));
        }
        enc.prompt_text += (i + 1 < kPlanFields.size()) ? ",\n" : "\n";
    }
    enc.prompt_text += "}";
    return enc;
}

DesignPlan decode_masked(const MaskedPlanEncoding& encoding, const SlotFills& fills) {
    std::string text = encoding.prompt_text;
    for (const auto& slot : encoding.mask_slots) {
        if (!is_plan_field(slot.field_path)) {
            throw UnknownFieldPath("unknown plan field path '" + slot.field_path + "'");
        }
        auto it = fills.find(slot.slot_id);
        if (it == fills.end()) {
            throw MissingSlot("no fill for slot " + std::to_string(slot.slot_id) + " (" + slot.field_path + ")");
        }
        const std::string sentinel = mask_sentinel(slot.field_path);
        if (count_occurrences(text, sentinel) != 1) {
            throw SchemaError("sentinel " + sentinel + " must occur exactly once");
        }
        text.replace(text.find(sentinel), sentinel.size(), coerce_fill(slot.field_path, it->second));
    }
    if (text.find("<MASK:") != std::string::npos) {
        throw SchemaError("encoding contains a sentinel with no slot");
    }
    DesignPlan plan = deserialize_plan(text);
    if (auto findings = validate_plan(plan); !findings.empty()) {
        throw InvalidPlan("decoded plan is invalid", std::move(findings));
    }
    return plan;
}

std::string fill_text(const DesignPlan& plan, std::string_view field) {
    if (field == "global_caption") return plan.global_caption;
    if (field == "category") return plan.category;
    if (field == "keywords") return Json(plan.keywords).dump();
    if (field == "background_caption") return plan.background_caption;
    if (field == "object_flag") return plan.object_flag ? "true" : "false";
    if (field == "object_caption") return plan.object_caption;
    if (field == "heading") return plan.heading;
    if (field == "sub_heading") return plan.sub_heading;
    if (field == "body_text") return plan.body_text;
    throw UnknownFieldPath("unknown plan field path '" + std::string(field) + "'");
}

SlotFills ground_truth_fills(const MaskedPlanEncoding& encoding, const DesignPlan& plan) {
    SlotFills fills;
    for (const auto& slot : encoding.mask_slots) fills[slot.slot_id] = fill_text(plan, slot.field_path);
    return fills;
}

}  // namespace coleforge::schema
