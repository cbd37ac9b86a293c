#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "coleforge/schema/design_plan.hpp"

namespace coleforge::schema {

// Masked-field encoding of a plan. The prompt text is the canonical plan
// JSON with each masked value replaced by a `<MASK:field_path>` sentinel;
// a planner backend answers with one fill string per slot.
//
// Fill text conventions:
//   string fields   raw text, no quoting
//   keywords        a JSON array of strings, e.g. ["sale","pink"]
//   object_flag     "true" or "false" (surrounding whitespace and case ignored)
struct MaskSlot {
    std::string field_path;
    int slot_id = 0;

    bool operator==(const MaskSlot&) const = default;
};

struct MaskedPlanEncoding {
    std::string prompt_text;
    std::vector<MaskSlot> mask_slots;
};

using SlotFills = std::map<int, std::string>;

class UnknownFieldPath : public Error {
public:
    using Error::Error;
};
class MissingSlot : public Error {
public:
    using Error::Error;
};
class TypeCoercionFailure : public Error {
public:
    using Error::Error;
};
class InvalidPlan : public FindingsError {
public:
    using FindingsError::FindingsError;
};

std::string mask_sentinel(std::string_view field_path);

// Values of masked fields in `known` are ignored. Slots are numbered in
// canonical field order; duplicate paths collapse to one slot.
MaskedPlanEncoding encode_masked(const DesignPlan& known, std::span<const std::string> fields_to_mask);

// Throws MissingSlot, TypeCoercionFailure, SchemaError (malformed encoding)
// or InvalidPlan (decoded plan fails validate_plan).
DesignPlan decode_masked(const MaskedPlanEncoding& encoding, const SlotFills& fills);

// Fill text a perfect planner would produce for `field` of `plan`.
std::string fill_text(const DesignPlan& plan, std::string_view field);
SlotFills ground_truth_fills(const MaskedPlanEncoding& encoding, const DesignPlan& plan);

}  // namespace coleforge::schema
