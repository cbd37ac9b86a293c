#include "coleforge/typeset/layer_stack.hpp"

#include <cmath>

namespace coleforge::typeset {

Findings validate_stack(const LayerStack& stack, const Canvas& canvas) {
    Findings out;
    if (!canvas.valid()) out.push_back({"canvas", "dimensions must be positive"});
    auto check = [&](const char* field, const Raster& r, int channels) {
        if (r.empty()) {
            out.push_back({field, "raster is missing"});
        } else if (r.width() != canvas.width || r.height() != canvas.height || r.channels() != channels) {
            out.push_back({field, "raster is " + std::to_string(r.width()) + "x" + std::to_string(r.height()) + "x" +
                                      std::to_string(r.channels()) + ", canvas needs " + std::to_string(canvas.width) +
                                      "x" + std::to_string(canvas.height) + "x" + std::to_string(channels)});
        }
    };
    check("background", stack.background, 3);
    if (stack.object) {
        check("object.rgb", stack.object->rgb, 3);
        check("object.alpha", stack.object->alpha, 1);
        const auto& p = stack.object->placement;
        if (!(p.scale > 0.0) || !std::isfinite(p.scale)) out.push_back({"object.scale", "must be positive"});
        if (!std::isfinite(p.offset_x) || !std::isfinite(p.offset_y) || std::abs(p.offset_x) > 2.0 ||
            std::abs(p.offset_y) > 2.0) {
            out.push_back({"object.offset", "must lie within [-2, 2]"});
        }
    }
    for (std::size_t i = 0; i < stack.text_blocks.size(); ++i) {
        for (auto& f : codec::validate_typography(stack.text_blocks[i])) {
            out.push_back({"text_blocks[" + std::to_string(i) + "]." + f.field, f.message});
        }
    }
    return out;
}

}  // namespace coleforge::typeset
