#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coleforge/pipeline/backends.hpp"

namespace coleforge::pipeline {

struct MockOptions {
    // Rows of the background kept flat and calm for text, normalized y.
    double clear_band_top = -0.9;
    double clear_band_height = 0.5;
    // Overrides the planner's hashed object decision.
    std::optional<bool> object_flag;
    // Horizontal jitter applied to text blocks, so that reflect has work to do.
    double text_jitter = 0.15;
};

// Known color words, in the order they appear in `text`, without repeats.
std::vector<std::string> color_tokens(std::string_view text);

struct MockPalette {
    std::vector<std::string> tokens;
    std::uint64_t hash = 0;
    std::array<std::uint8_t, 3> top{};
    std::array<std::uint8_t, 3> bottom{};
    std::array<std::uint8_t, 3> accent{};
};

// hash = fnv1a64(join(color_tokens(caption), ",") + "|" + decimal(seed)).
// Named colors set the gradient stops directly; without any, the hash picks a hue.
MockPalette mock_palette(std::string_view caption, std::uint64_t seed);

// Center-distance score used by the mock judge for design_layout:
// clamp(10 - ceil(d / 0.05), 1, 10), d = largest |horizontal block center|.
int mock_layout_score(const std::vector<TypographySpec>& blocks);

// Reflector step: every block center moves this far toward x = 0.
inline constexpr double kMockRecenterStep = 0.05;

// Deterministic stand-ins for every model. The seed feeds the palette rule;
// per-stage randomness comes from the stage context.
BackendSuite mock_suite(std::uint64_t seed, const MockOptions& options = {});

}  // namespace coleforge::pipeline
