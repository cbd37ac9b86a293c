#include "coleforge/metrics/boxes.hpp"

#include <algorithm>

namespace coleforge::metrics {

Box box_of(const codec::TypographySpec& b) noexcept { return Box{b.left, b.top, b.width, b.height}; }

double iou(const Box& a, const Box& b) noexcept {
    const double ix = std::max(0.0, std::min(a.left + a.width, b.left + b.width) - std::max(a.left, b.left));
    const double iy = std::max(0.0, std::min(a.top + a.height, b.top + b.height) - std::max(a.top, b.top));
    const double inter = ix * iy;
    const double uni = a.width * a.height + b.width * b.height - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<double> paired_ious(std::span<const Box> preds, std::span<const Box> gts) {
    if (preds.size() != gts.size()) {
        throw LengthMismatch("got " + std::to_string(preds.size()) + " predicted boxes for " +
                             std::to_string(gts.size()) + " ground-truth boxes");
    }
    std::vector<double> out(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) out[i] = iou(preds[i], gts[i]);
    return out;
}

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double fraction_at_least(const std::vector<double>& v, double threshold) {
    if (v.empty()) return 0.0;
    const auto hits = std::count_if(v.begin(), v.end(), [threshold](double x) { return x >= threshold; });
    return static_cast<double>(hits) / static_cast<double>(v.size());
}

}  // namespace

double miou(std::span<const Box> preds, std::span<const Box> gts) { return mean(paired_ious(preds, gts)); }

double ap_at(std::span<const Box> preds, std::span<const Box> gts, double threshold) {
    return fraction_at_least(paired_ious(preds, gts), threshold);
}

LocalizationReport localization_report(std::span<const Box> preds, std::span<const Box> gts) {
    LocalizationReport r;
    r.ious = paired_ious(preds, gts);
    r.count = r.ious.size();
    r.miou = mean(r.ious);
    r.ap25 = fraction_at_least(r.ious, 0.25);
    r.ap50 = fraction_at_least(r.ious, 0.50);
    r.ap75 = fraction_at_least(r.ious, 0.75);
    return r;
}

Json localization_report_to_json(const LocalizationReport& r) {
    Json j = Json::object();
    j["count"] = r.count;
    j["miou"] = r.miou;
    j["ap25"] = r.ap25;
    j["ap50"] = r.ap50;
    j["ap75"] = r.ap75;
    return j;
}

std::vector<Box> boxes_from_json(const Json& j) {
    const Json* arr = &j;
    if (j.is_object()) {
        auto it = j.find("boxes");
        if (it == j.end()) throw Error("box file object needs a 'boxes' array");
        arr = &*it;
    }
    if (!arr->is_array()) throw Error("box file must be an array of boxes");
    std::vector<Box> out;
    for (const auto& b : *arr) {
        auto num = [&](const char* key) {
            auto it = b.find(key);
            if (it == b.end() || !it->is_number()) throw Error(std::string("box needs numeric '") + key + "'");
            return it->get<double>();
        };
        Box box{num("left"), num("top"), num("width"), num("height")};
        if (box.width < 0.0 || box.height < 0.0) throw Error("box width and height must be non-negative");
        out.push_back(box);
    }
    return out;
}

}  // namespace coleforge::metrics
