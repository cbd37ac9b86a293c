#pragma once

#include <map>
#include <string>

#include "coleforge/typeset/layer_stack.hpp"
#include "coleforge/typeset/layout.hpp"

namespace coleforge::typeset {

class InvalidStack : public FindingsError {
public:
    using FindingsError::FindingsError;
};

struct SvgDocument {
    std::string markup;
    // group id -> layer role (background, object, text)
    std::map<std::string, std::string> layer_index;

    bool operator==(const SvgDocument&) const = default;
};

// PNG data URIs of the raster layers. Rasters rarely change between renders
// of one design, so callers may encode once and reuse.
struct EncodedLayers {
    std::string background;
    std::string object;
    std::string alpha;
};

EncodedLayers encode_layers(const LayerStack& stack);

// SVG 1.1 document:
//   <defs><mask id="object-alpha"> alpha image </mask></defs>   (object only)
//   <g id="layer-background" data-layer-role="background"> image </g>
//   <g id="layer-object" data-layer-role="object" transform=...> masked image </g>
//   <g id="layer-text-N" data-layer-role="text" data-block-role=...> text lines </g>
// Throws InvalidStack.
SvgDocument render_svg(const LayerStack& stack, const Canvas& canvas,
                       const FontMetricsProvider& metrics = default_metrics());
SvgDocument render_svg(const LayerStack& stack, const Canvas& canvas, const EncodedLayers& encoded,
                       const FontMetricsProvider& metrics = default_metrics());

}  // namespace coleforge::typeset
