#include "coleforge/editor/edit_ops.hpp"

#include <array>
#include <cmath>

namespace coleforge::editor {

namespace {

constexpr std::array<std::string_view, 7> kTypeNames = {"move_block",   "resize_block", "set_attribute", "set_text",
                                                        "move_object", "scale_object", "undo"};

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
    throw InvalidEdit("malformed edit", {{field, msg}});
}

double number(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) bad(key, "number required");
    const double v = it->get<double>();
    if (!std::isfinite(v)) bad(key, "must be finite");
    return v;
}

std::size_t block_index(const Json& j) {
    auto it = j.find("block");
    if (it == j.end() || !it->is_number_unsigned()) bad("block", "non-negative integer required");
    return it->get<std::size_t>();
}

}  // namespace

std::string_view edit_type_name(EditType t) noexcept { return kTypeNames[static_cast<std::size_t>(t)]; }

EditOp EditOp::move_block(std::size_t block, double dx, double dy) {
    EditOp op;
    op.type = EditType::kMoveBlock;
    op.block = block;
    op.dx = dx;
    op.dy = dy;
    return op;
}
EditOp EditOp::resize_block(std::size_t block, double width, double height) {
    EditOp op;
    op.type = EditType::kResizeBlock;
    op.block = block;
    op.width = width;
    op.height = height;
    return op;
}
EditOp EditOp::set_attribute(std::size_t block, const std::string& attr, Json value) {
    EditOp op;
    op.type = EditType::kSetAttribute;
    op.block = block;
    op.values[attr] = std::move(value);
    return op;
}
EditOp EditOp::set_text(std::size_t block, std::string text) {
    EditOp op;
    op.type = EditType::kSetText;
    op.block = block;
    op.text = std::move(text);
    return op;
}
EditOp EditOp::move_object(double dx, double dy) {
    EditOp op;
    op.type = EditType::kMoveObject;
    op.dx = dx;
    op.dy = dy;
    return op;
}
EditOp EditOp::scale_object(double factor) {
    EditOp op;
    op.type = EditType::kScaleObject;
    op.factor = factor;
    return op;
}
EditOp EditOp::undo() { return EditOp{}; }

Json edit_to_json(const EditOp& op) {
    Json j = Json::object();
    j["type"] = edit_type_name(op.type);
    switch (op.type) {
        case EditType::kMoveBlock:
            j["block"] = op.block;
            j["dx"] = op.dx;
            j["dy"] = op.dy;
            break;
        case EditType::kResizeBlock:
            j["block"] = op.block;
            j["width"] = op.width;
            j["height"] = op.height;
            break;
        case EditType::kSetAttribute:
            j["block"] = op.block;
            j["values"] = op.values;
            break;
        case EditType::kSetText:
            j["block"] = op.block;
            j["text"] = op.text;
            break;
        case EditType::kMoveObject:
            j["dx"] = op.dx;
            j["dy"] = op.dy;
            break;
        case EditType::kScaleObject:
            j["factor"] = op.factor;
            break;
        case EditType::kUndo:
            break;
    }
    return j;
}

EditOp edit_from_json(const Json& j) {
    if (!j.is_object()) bad("op", "edit must be a JSON object");
    auto t = j.find("type");
    if (t == j.end() || !t->is_string()) bad("type", "string required");
    const std::string name = t->get<std::string>();
    EditOp op;
    bool known = false;
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) {
            op.type = static_cast<EditType>(i);
            known = true;
        }
    }
    if (!known) bad("type", "unknown edit type '" + name + "'");
    switch (op.type) {
        case EditType::kMoveBlock:
            op.block = block_index(j);
            op.dx = number(j, "dx");
            op.dy = number(j, "dy");
            break;
        case EditType::kResizeBlock:
            op.block = block_index(j);
            op.width = number(j, "width");
            op.height = number(j, "height");
            break;
        case EditType::kSetAttribute: {
            op.block = block_index(j);
            if (auto v = j.find("values"); v != j.end()) {
                if (!v->is_object() || v->empty()) bad("values", "non-empty object required");
                op.values = *v;
            } else {
                auto a = j.find("attr");
                if (a == j.end() || !a->is_string()) bad("attr", "string required");
                auto val = j.find("value");
                if (val == j.end()) bad("value", "required");
                op.values[a->get<std::string>()] = *val;
            }
            break;
        }
        case EditType::kSetText: {
            op.block = block_index(j);
            auto s = j.find("text");
            if (s == j.end() || !s->is_string()) bad("text", "string required");
            op.text = s->get<std::string>();
            break;
        }
        case EditType::kMoveObject:
            op.dx = number(j, "dx");
            op.dy = number(j, "dy");
            break;
        case EditType::kScaleObject:
            op.factor = number(j, "factor");
            break;
        case EditType::kUndo:
            break;
    }
    return op;
}

EditableState capture(const pipeline::DesignBundle& b) {
    EditableState s;
    s.blocks = b.stack.text_blocks;
    if (b.stack.object) s.placement = b.stack.object->placement;
    s.scores = b.scores;
    return s;
}

void restore(pipeline::DesignBundle& b, const EditableState& s) {
    b.stack.text_blocks = s.blocks;
    if (b.stack.object && s.placement) b.stack.object->placement = *s.placement;
    b.scores = s.scores;
}

Json state_to_json(const EditableState& s) {
    Json j = Json::object();
    j["typography"] = codec::typography_to_json(s.blocks);
    if (s.placement) {
        j["placement"] = {{"offset_x", s.placement->offset_x}, {"offset_y", s.placement->offset_y}, {"scale", s.placement->scale}};
    } else {
        j["placement"] = nullptr;
    }
    j["scores"] = s.scores ? metrics::quality_report_to_json(*s.scores) : Json(nullptr);
    return j;
}

EditableState state_from_json(const Json& j) {
    EditableState s;
    s.blocks = codec::typography_from_json(j.at("typography"));
    if (!j.at("placement").is_null()) {
        const auto& p = j["placement"];
        s.placement = typeset::ObjectPlacement{p.at("offset_x").get<double>(), p.at("offset_y").get<double>(),
                                               p.at("scale").get<double>()};
    }
    if (!j.at("scores").is_null()) s.scores = metrics::parse_judge(j["scores"].dump());
    return s;
}

void apply_op(pipeline::DesignBundle& b, const EditOp& op) {
    if (op.type == EditType::kUndo) throw InvalidEdit("undo is handled by the store", {{"type", "undo"}});
    // Work on copies of the editable parts; the rasters never change.
    std::vector<codec::TypographySpec> blocks = b.stack.text_blocks;
    std::optional<typeset::ObjectPlacement> placement;
    if (b.stack.object) placement = b.stack.object->placement;
    auto block = [&]() -> codec::TypographySpec& {
        if (op.block >= blocks.size()) {
            throw InvalidEdit("no such block", {{"block", "index " + std::to_string(op.block) + " but the design has " +
                                                              std::to_string(blocks.size()) + " blocks"}});
        }
        return blocks[op.block];
    };
    auto object = [&]() -> typeset::ObjectPlacement& {
        if (!placement) throw InvalidEdit("no object layer", {{"object", "the design has no object layer"}});
        return *placement;
    };
    switch (op.type) {
        case EditType::kMoveBlock: {
            auto& s = block();
            s.left += op.dx;
            s.top += op.dy;
            break;
        }
        case EditType::kResizeBlock: {
            auto& s = block();
            s.width = op.width;
            s.height = op.height;
            break;
        }
        case EditType::kSetAttribute: {
            auto& s = block();
            for (auto it = op.values.begin(); it != op.values.end(); ++it) {
                try {
                    codec::set_attribute(s, it.key(), it.value());
                } catch (const Error& e) {
                    throw InvalidEdit("bad attribute", {{it.key(), e.what()}});
                }
            }
            break;
        }
        case EditType::kSetText:
            block().text = op.text;
            break;
        case EditType::kMoveObject: {
            auto& p = object();
            p.offset_x += op.dx;
            p.offset_y += op.dy;
            break;
        }
        case EditType::kScaleObject: {
            if (!(op.factor > 0.0)) throw InvalidEdit("bad scale", {{"factor", "must be positive"}});
            object().scale *= op.factor;
            break;
        }
        case EditType::kUndo:
            break;
    }
    Findings f;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (auto& x : codec::validate_typography(blocks[i])) f.push_back({"text_blocks[" + std::to_string(i) + "]." + x.field, x.message});
    }
    if (placement) {
        if (!(placement->scale >= 0.05 && placement->scale <= 20.0)) f.push_back({"object.scale", "must lie within [0.05, 20]"});
        if (std::abs(placement->offset_x) > 2.0 || std::abs(placement->offset_y) > 2.0) {
            f.push_back({"object.offset", "must lie within [-2, 2]"});
        }
    }
    if (!f.empty()) throw InvalidEdit("edit rejected", std::move(f));
    b.stack.text_blocks = std::move(blocks);
    if (placement) b.stack.object->placement = *placement;
    b.scores.reset();
}

}  // namespace coleforge::editor
