#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/core/error.hpp"

namespace coleforge::metrics {

using Json = nlohmann::ordered_json;

// Axis-aligned box in normalized canvas units.
struct Box {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    bool operator==(const Box&) const = default;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

Box box_of(const codec::TypographySpec& block) noexcept;

// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b) noexcept;

// Index pairing shared by every localization metric. Throws LengthMismatch.
std::vector<double> paired_ious(std::span<const Box> preds, std::span<const Box> gts);

// Mean of paired IoUs; 0 for empty input.
double miou(std::span<const Box> preds, std::span<const Box> gts);
// Fraction of pairs with IoU >= threshold; 0 for empty input.
double ap_at(std::span<const Box> preds, std::span<const Box> gts, double threshold);

struct LocalizationReport {
    std::size_t count = 0;
    double miou = 0.0;
    double ap25 = 0.0;
    double ap50 = 0.0;
    double ap75 = 0.0;
    std::vector<double> ious;
};

LocalizationReport localization_report(std::span<const Box> preds, std::span<const Box> gts);
Json localization_report_to_json(const LocalizationReport& r);

// Accepts an array of objects with left/top/width/height (typography blocks
// qualify), or an object {"boxes": [...]}.
std::vector<Box> boxes_from_json(const Json& j);

}  // namespace coleforge::metrics
