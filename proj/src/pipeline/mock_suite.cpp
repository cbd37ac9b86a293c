#include "coleforge/pipeline/mock_suite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "coleforge/core/digest.hpp"
#include "coleforge/core/rng.hpp"
#include "coleforge/core/text.hpp"
#include "coleforge/typeset/layout.hpp"

namespace coleforge::pipeline {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

const std::map<std::string, Rgb, std::less<>>& named_colors() {
    static const std::map<std::string, Rgb, std::less<>> m = {
        {"red", {214, 48, 49}},     {"pink", {246, 143, 179}}, {"orange", {243, 156, 18}},
        {"yellow", {250, 215, 80}}, {"gold", {212, 175, 55}},  {"green", {46, 160, 90}},
        {"teal", {0, 128, 128}},    {"blue", {52, 120, 219}},  {"navy", {20, 40, 100}},
        {"purple", {142, 68, 173}}, {"brown", {121, 85, 61}},  {"beige", {232, 220, 196}},
        {"black", {20, 20, 20}},    {"white", {250, 250, 250}}, {"grey", {140, 140, 140}},
        {"gray", {140, 140, 140}},  {"silver", {192, 192, 200}}};
    return m;
}

const std::set<std::string, std::less<>>& stopwords() {
    static const std::set<std::string, std::less<>> s = {
        "a",    "an",   "the",  "and",  "or",   "of",     "for",   "to",    "in",    "on",   "with",  "by",
        "at",   "from", "is",   "are",  "be",   "this",   "that",  "it",    "its",   "as",   "your",  "our",
        "you",  "we",   "will", "can",  "should", "must", "into",  "about", "their", "them", "they",  "has",
        "have", "was",  "were", "which", "while", "also", "all",   "any",   "more",  "most", "such",  "than",
        "then", "there", "these", "those", "design", "create", "make", "generate", "please", "use", "using",
        "include", "including", "featuring", "feature", "features", "image", "text", "s"};
    return s;
}

Rgb lighten(const Rgb& c, double t) {
    Rgb o;
    for (int i = 0; i < 3; ++i) o[i] = static_cast<std::uint8_t>(std::lround(c[i] + (255.0 - c[i]) * t));
    return o;
}

Rgb hue_color(double hue_deg, double s, double v) {
    const double c = v * s;
    const double hp = std::fmod(hue_deg, 360.0) / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1) r = c, g = x;
    else if (hp < 2) r = x, g = c;
    else if (hp < 3) g = c, b = x;
    else if (hp < 4) g = x, b = c;
    else if (hp < 5) r = x, b = c;
    else r = c, b = x;
    const double m = v - c;
    return {static_cast<std::uint8_t>(std::lround((r + m) * 255)), static_cast<std::uint8_t>(std::lround((g + m) * 255)),
            static_cast<std::uint8_t>(std::lround((b + m) * 255))};
}

std::string title_case(const std::vector<std::string>& ws) {
    std::string out;
    for (const auto& w : ws) {
        if (!out.empty()) out += ' ';
        std::string t = w;
        if (!t.empty()) t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
        out += t;
    }
    return out;
}

// Double-quoted or curly-quoted segments, in order.
std::vector<std::string> quoted_segments(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::string_view close;
        std::size_t open_len = 0;
        if (s[i] == '"') {
            close = "\"";
            open_len = 1;
        } else if (s.substr(i, 3) == "\xE2\x80\x9C") {  // left double quotation mark
            close = "\xE2\x80\x9D";
            open_len = 3;
        }
        if (open_len == 0) {
            ++i;
            continue;
        }
        const auto end = s.find(close, i + open_len);
        if (end == std::string_view::npos) break;
        auto seg = text::trim(s.substr(i + open_len, end - i - open_len));
        if (!seg.empty()) out.push_back(std::move(seg));
        i = end + close.size();
    }
    return out;
}

std::string collapse_spaces(std::string_view s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += c;
    }
    return out;
}

std::vector<std::string> first_words(std::string_view s, std::size_t n) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
            if (out.size() == n) return out;
        } else {
            cur += c;
        }
    }
    if (!cur.empty() && out.size() < n) out.push_back(std::move(cur));
    return out;
}

double smoothstep(double e0, double e1, double x) {
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

class MockPlanner final : public Planner {
public:
    MockPlanner(std::uint64_t seed, MockOptions opt) : seed_(seed), opt_(opt) {}
    std::string id() const override { return "mock-planner"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    DesignPlan plan(const DesignIntent& intent, const StageContext&) const override {
        DesignPlan p;
        p.global_caption = collapse_spaces(text::trim(intent.text));
        p.category = std::string(schema::category_name(intent.category));

        std::vector<std::string> kws;
        for (auto& w : text::words(p.global_caption)) {
            if (w.size() < 3 || stopwords().count(w)) continue;
            if (std::find(kws.begin(), kws.end(), w) != kws.end()) continue;
            kws.push_back(std::move(w));
            if (kws.size() == 5) break;
        }
        if (kws.empty()) kws.push_back(p.category);
        p.keywords = kws;

        const auto colors = color_tokens(p.global_caption);
        p.background_caption = "Soft gradient background";
        if (!colors.empty()) p.background_caption += " in " + text::join(colors, " and ");
        std::vector<std::string> theme(kws.begin(), kws.begin() + std::min<std::size_t>(3, kws.size()));
        p.background_caption += " with open space for text, evoking " + text::join(theme, ", ");

        p.object_flag = opt_.object_flag.value_or(
            fnv1a64(p.global_caption + "|" + std::to_string(seed_)) % 5 != 0);
        if (p.object_flag) p.object_caption = "A single " + kws.front() + " illustration on a transparent background";

        const auto quotes = quoted_segments(p.global_caption);
        auto kw_range = [&](std::size_t from, std::size_t n) {
            std::vector<std::string> r;
            for (std::size_t i = from; i < kws.size() && r.size() < n; ++i) r.push_back(kws[i]);
            return r;
        };
        p.heading = quotes.size() > 0 ? quotes[0] : title_case(kw_range(0, 3));
        p.sub_heading = quotes.size() > 1 ? quotes[1] : title_case(kw_range(3, 2));
        p.body_text = quotes.size() > 2 ? quotes[2] : text::join(first_words(p.global_caption, 10), " ");
        return p;
    }

private:
    std::uint64_t seed_;
    MockOptions opt_;
};

class MockBackground final : public BackgroundGenerator {
public:
    MockBackground(std::uint64_t seed, MockOptions opt) : seed_(seed), opt_(opt) {}
    std::string id() const override { return "mock-background"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    Raster generate(const DesignPlan& plan, const StageContext& ctx) const override {
        const auto pal = mock_palette(plan.background_caption, seed_);
        Rng rng(ctx.seed);
        // Gradient direction tilted a little off vertical.
        const double tilt = uniform(rng, -0.35, 0.35);
        const int W = ctx.canvas.width, H = ctx.canvas.height;
        Raster out(W, H, 3);
        const double band0 = typeset::to_px_y(opt_.clear_band_top, ctx.canvas);
        const double band1 = typeset::to_px_y(opt_.clear_band_top + opt_.clear_band_height, ctx.canvas);
        Rgb band_color;
        for (int c = 0; c < 3; ++c) band_color[c] = static_cast<std::uint8_t>((pal.top[c] + 255) / 2);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const double u = (x + 0.5) / W - 0.5;
                const double v = (y + 0.5) / H;
                const double t = std::clamp(v + tilt * u, 0.0, 1.0);
                // Soft transition into the clear band.
                const double py = y + 0.5;
                const double edge = 0.03 * H;
                const double band = smoothstep(band0 - edge, band0, py) * (1.0 - smoothstep(band1, band1 + edge, py));
                for (int c = 0; c < 3; ++c) {
                    const double g = pal.top[c] + (pal.bottom[c] - pal.top[c]) * t;
                    out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(g + (band_color[c] - g) * band));
                }
            }
        }
        return out;
    }

private:
    std::uint64_t seed_;
    MockOptions opt_;
};

class MockObject final : public ObjectGenerator {
public:
    explicit MockObject(std::uint64_t seed) : seed_(seed) {}
    std::string id() const override { return "mock-object"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    SevenChannelFrame generate(const DesignPlan& plan, const Raster& background, const StageContext& ctx) const override {
        const auto pal = mock_palette(plan.background_caption, seed_);
        Rng rng(ctx.seed);
        const double cx = typeset::to_px_x(uniform(rng, -0.35, 0.35), ctx.canvas);
        const double cy = typeset::to_px_y(uniform(rng, 0.1, 0.45), ctx.canvas);
        const double rx = typeset::extent_to_px_x(uniform(rng, 0.25, 0.4), ctx.canvas);
        const double ry = typeset::extent_to_px_y(uniform(rng, 0.2, 0.35), ctx.canvas);
        // A few lobes make the outline irregular.
        const double lobes = 3.0 + std::floor(uniform(rng, 0.0, 3.0));
        const double phase = uniform(rng, 0.0, 6.283185307179586);
        const int W = ctx.canvas.width, H = ctx.canvas.height;
        Raster rgb(W, H, 3), alpha(W, H, 1);
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                const double dx = (x + 0.5 - cx) / rx;
                const double dy = (y + 0.5 - cy) / ry;
                const double r = std::sqrt(dx * dx + dy * dy);
                const double th = std::atan2(dy, dx);
                const double rim = 1.0 + 0.12 * std::sin(lobes * th + phase);
                const double a = 1.0 - smoothstep(rim - 0.15, rim, r);
                alpha.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(255.0 * a));
                const double shade = 1.0 - 0.35 * std::clamp(r, 0.0, 1.0);
                for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = static_cast<std::uint8_t>(std::lround(pal.accent[c] * shade));
            }
        }
        const Raster composed = compositor::blend(background, rgb, alpha);
        return compositor::assemble_frame(rgb, alpha, composed);
    }

private:
    std::uint64_t seed_;
};

double mean_luminance(const Raster& img, const TypographySpec& b, const Canvas& canvas) {
    const int x0 = std::clamp(static_cast<int>(typeset::to_px_x(b.left, canvas)), 0, canvas.width - 1);
    const int y0 = std::clamp(static_cast<int>(typeset::to_px_y(b.top, canvas)), 0, canvas.height - 1);
    const int x1 = std::clamp(static_cast<int>(typeset::to_px_x(b.left + b.width, canvas)), x0 + 1, canvas.width);
    const int y1 = std::clamp(static_cast<int>(typeset::to_px_y(b.top + b.height, canvas)), y0 + 1, canvas.height);
    double sum = 0.0;
    long n = 0;
    // Every fourth pixel is plenty for a contrast decision.
    for (int y = y0; y < y1; y += 4) {
        for (int x = x0; x < x1; x += 4) {
            sum += 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
            ++n;
        }
    }
    return n ? sum / n : 0.0;
}

class MockTypographer final : public Typographer {
public:
    MockTypographer(std::uint64_t seed, MockOptions opt) : seed_(seed), opt_(opt) {}
    std::string id() const override { return "mock-typographer"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    std::vector<TypographySpec> typeset(const DesignPlan& plan, const Raster& image,
                                        const StageContext& ctx) const override {
        struct Slot {
            const std::string* text;
            codec::BlockRole role;
            double top, height, max_size;
        };
        // top-center, middle, lower third
        const Slot slots[] = {{&plan.heading, codec::BlockRole::kHeading, -0.85, 0.3, 120.0},
                              {&plan.sub_heading, codec::BlockRole::kSubHeading, -0.1, 0.2, 64.0},
                              {&plan.body_text, codec::BlockRole::kBodyText, 0.4, 0.3, 40.0}};
        const auto pal = mock_palette(plan.background_caption, seed_);
        const auto& fonts = codec::font_vocabulary();
        Rng rng(ctx.seed);
        const double scale = ctx.canvas.width / 1024.0;
        std::vector<TypographySpec> out;
        for (const auto& s : slots) {
            const double jitter = uniform(rng, -opt_.text_jitter, opt_.text_jitter);
            if (text::trim(*s.text).empty()) continue;
            TypographySpec b;
            b.text = *s.text;
            b.role = s.role;
            b.alignment = codec::Alignment::kCenter;
            b.font_family = fonts[(pal.hash >> (8 * static_cast<int>(s.role))) % fonts.size()];
            b.width = 1.6;
            b.left = -0.8 + jitter;
            b.top = s.top;
            b.height = s.height;
            b.line_spacing = 0.2;
            b.opacity = 255.0;
            b.font_size = std::max(2.0, std::floor(s.max_size * scale));
            while (b.font_size > 2.0 && typeset::layout_text(b, ctx.canvas).overflow()) b.font_size -= 1.0;
            if (mean_luminance(image, b, ctx.canvas) > 140.0) {
                b.color_r = std::floor(pal.top[0] * 0.2);
                b.color_g = std::floor(pal.top[1] * 0.2);
                b.color_b = std::floor(pal.top[2] * 0.2);
            } else {
                b.color_r = b.color_g = b.color_b = 245.0;
            }
            out.push_back(std::move(b));
        }
        return out;
    }

private:
    std::uint64_t seed_;
    MockOptions opt_;
};

class MockJudge final : public QualityJudge {
public:
    std::string id() const override { return "mock-judge"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    QualityReport judge(const JudgeRequest& req, const StageContext&) const override {
        QualityReport r;
        using metrics::Criterion;
        auto set = [&r](Criterion c, int score, std::string why) {
            r.scores[static_cast<std::size_t>(c)] = std::clamp(score, 1, 10);
            r.rationales[static_cast<std::size_t>(c)] = std::move(why);
        };
        set(Criterion::design_layout, mock_layout_score(req.blocks), "text blocks scored by horizontal centering");
        int wanted = 0, shown = 0;
        for (const std::string* t : {&req.plan.heading, &req.plan.sub_heading, &req.plan.body_text}) {
            if (t->empty()) continue;
            ++wanted;
            for (const auto& b : req.blocks) {
                if (b.text == *t) {
                    ++shown;
                    break;
                }
            }
        }
        set(Criterion::content_relevance, wanted ? 4 + (6 * shown) / wanted : 5, "planned texts present on canvas");
        const bool solid = std::all_of(req.blocks.begin(), req.blocks.end(), [](const auto& b) { return b.opacity >= 128.0; });
        set(Criterion::typography_color, solid ? 8 : 5, "text opacity");
        set(Criterion::graphics_images, req.plan.object_flag ? 8 : 6, "object layer present");
        set(Criterion::innovation, 5 + static_cast<int>(fnv1a64(req.plan.global_caption) % 4), "fixed per caption");
        return r;
    }
};

class MockReflector final : public Reflector {
public:
    std::string id() const override { return "mock-reflector"; }
    BackendKind kind() const override { return BackendKind::kMock; }

    std::vector<TypographyDelta> propose(const DesignPlan&, const std::vector<TypographySpec>& blocks, const Raster&,
                                         const QualityReport&, const StageContext&) const override {
        std::vector<TypographyDelta> out;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const auto& b = blocks[i];
            const double cx = b.left + b.width / 2.0;
            if (std::abs(cx) < 1e-12) continue;
            const double moved = cx > 0 ? std::max(0.0, cx - kMockRecenterStep) : std::min(0.0, cx + kMockRecenterStep);
            TypographyDelta d;
            d.block = i;
            d.left = moved - b.width / 2.0;
            out.push_back(d);
        }
        return out;
    }
};

}  // namespace

std::vector<std::string> color_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& w : text::words(s)) {
        if (!named_colors().count(w)) continue;
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
    }
    return out;
}

MockPalette mock_palette(std::string_view caption, std::uint64_t seed) {
    MockPalette p;
    p.tokens = color_tokens(caption);
    p.hash = fnv1a64(text::join(p.tokens, ",") + "|" + std::to_string(seed));
    const auto& named = named_colors();
    if (!p.tokens.empty()) {
        p.top = named.find(p.tokens[0])->second;
        p.bottom = p.tokens.size() > 1 ? named.find(p.tokens[1])->second : lighten(p.top, 0.55);
    } else {
        p.top = hue_color(static_cast<double>(p.hash % 360), 0.45, 0.85);
        p.bottom = lighten(p.top, 0.55);
    }
    const double hue = static_cast<double>((p.hash >> 16) % 360);
    p.accent = hue_color(hue, 0.7, 0.75);
    return p;
}

int mock_layout_score(const std::vector<TypographySpec>& blocks) {
    if (blocks.empty()) return 5;
    double d = 0.0;
    for (const auto& b : blocks) d = std::max(d, std::abs(b.left + b.width / 2.0));
    // The small slack absorbs rounding from repeated recentering steps.
    const int steps = static_cast<int>(std::ceil(d / kMockRecenterStep - 1e-6));
    return std::clamp(10 - steps, 1, 10);
}

BackendSuite mock_suite(std::uint64_t seed, const MockOptions& options) {
    BackendSuite s;
    s.planner = std::make_shared<MockPlanner>(seed, options);
    s.background_gen = std::make_shared<MockBackground>(seed, options);
    s.object_gen = std::make_shared<MockObject>(seed);
    s.typographer = std::make_shared<MockTypographer>(seed, options);
    s.reflector = std::make_shared<MockReflector>();
    s.quality_judge = std::make_shared<MockJudge>();
    return s;
}

}  // namespace coleforge::pipeline
