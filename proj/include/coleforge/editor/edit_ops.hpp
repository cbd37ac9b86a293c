#pragma once

#include <string>

#include <json.hpp>

#include "coleforge/pipeline/bundle.hpp"

namespace coleforge::editor {

using Json = nlohmann::ordered_json;

class InvalidEdit : public FindingsError {
public:
    using FindingsError::FindingsError;
};

enum class EditType { kMoveBlock, kResizeBlock, kSetAttribute, kSetText, kMoveObject, kScaleObject, kUndo };

std::string_view edit_type_name(EditType t) noexcept;

// Wire form, e.g.
//   {"type": "move_block", "block": 0, "dx": 0.1, "dy": 0}
//   {"type": "resize_block", "block": 0, "width": 0.8, "height": 0.2}
//   {"type": "set_attribute", "block": 0, "attr": "font_size", "value": 50}
//   {"type": "set_attribute", "block": 0, "values": {"color_r": 10, "color_g": 20, "color_b": 30}}
//   {"type": "set_text", "block": 0, "text": "Hello"}
//   {"type": "move_object", "dx": -0.1, "dy": 0.05}
//   {"type": "scale_object", "factor": 1.25}
//   {"type": "undo"}
// Moves and object offsets are in normalized canvas units; resize is absolute.
struct EditOp {
    EditType type = EditType::kUndo;
    std::size_t block = 0;
    double dx = 0.0;
    double dy = 0.0;
    double width = 0.0;
    double height = 0.0;
    double factor = 1.0;
    Json values = Json::object();  // attr -> value for set_attribute
    std::string text;

    static EditOp move_block(std::size_t block, double dx, double dy);
    static EditOp resize_block(std::size_t block, double width, double height);
    static EditOp set_attribute(std::size_t block, const std::string& attr, Json value);
    static EditOp set_text(std::size_t block, std::string text);
    static EditOp move_object(double dx, double dy);
    static EditOp scale_object(double factor);
    static EditOp undo();
};

Json edit_to_json(const EditOp& op);
// Throws InvalidEdit for unknown types or missing/ill-typed fields.
EditOp edit_from_json(const Json& j);

// The part of a bundle edits may change. Restoring a snapshot and
// re-rendering reproduces the bundle exactly.
struct EditableState {
    std::vector<codec::TypographySpec> blocks;
    std::optional<typeset::ObjectPlacement> placement;
    std::optional<metrics::QualityReport> scores;

    bool operator==(const EditableState&) const = default;
};

EditableState capture(const pipeline::DesignBundle& b);
void restore(pipeline::DesignBundle& b, const EditableState& s);
Json state_to_json(const EditableState& s);
EditableState state_from_json(const Json& j);

// Applies any op except undo to the editable state of `b` (the SVG is not
// re-rendered here). Scores are cleared: they described the old design.
// Throws InvalidEdit, leaving `b` untouched.
void apply_op(pipeline::DesignBundle& b, const EditOp& op);

}  // namespace coleforge::editor
