#include <doctest.h>

#include <cmath>

#include "support.hpp"

#include "coleforge/core/rng.hpp"
#include "coleforge/metrics/boxes.hpp"
#include "coleforge/metrics/judge.hpp"

using namespace coleforge;
using namespace coleforge::metrics;

namespace {

// IoU by counting cells of a uniform grid over [-1, 3]^2 whose centers fall
// inside each box.
double pixel_iou(const Box& a, const Box& b, int cells = 2000) {
    const double lo = -1.0;
    const double step = 4.0 / cells;
    auto inside = [](const Box& r, double x, double y) {
        return x >= r.left && x < r.left + r.width && y >= r.top && y < r.top + r.height;
    };
    long inter = 0;
    long uni = 0;
    for (int j = 0; j < cells; ++j) {
        const double y = lo + (j + 0.5) * step;
        const bool ya = y >= a.top && y < a.top + a.height;
        const bool yb = y >= b.top && y < b.top + b.height;
        if (!ya && !yb) continue;
        for (int i = 0; i < cells; ++i) {
            const double x = lo + (i + 0.5) * step;
            const bool ia = ya && inside(a, x, y);
            const bool ib = yb && inside(b, x, y);
            inter += ia && ib;
            uni += ia || ib;
        }
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Box random_box(Rng& rng) {
    Box b;
    b.left = uniform(rng, -1.0, 0.8);
    b.top = uniform(rng, -1.0, 0.8);
    b.width = uniform(rng, 0.05, 1.0 - b.left);
    b.height = uniform(rng, 0.05, 1.0 - b.top);
    return b;
}

// Boxes (0,0,1,1) vs (0,0,1,h) have IoU h for h in (0,1].
std::pair<std::vector<Box>, std::vector<Box>> pairs_with_ious(const std::vector<double>& ious) {
    std::vector<Box> p, g;
    for (double v : ious) {
        g.push_back({0, 0, 1, 1});
        p.push_back({0, 0, 1, v});
    }
    return {p, g};
}

}  // namespace

TEST_CASE("iou basics") {
    const Box a{0, 0, 2, 2};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, {3, 3, 1, 1}) == 0.0);
    CHECK(iou(a, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0));
    CHECK(std::abs(pixel_iou(a, {1, 1, 2, 2}) - 1.0 / 7.0) <= 1e-3);
    CHECK(iou({0, 0, 0, 0}, {0, 0, 0, 0}) == 0.0);
    CHECK(iou(a, {2, 0, 1, 2}) == 0.0);
}

TEST_CASE("iou against the pixel oracle on random pairs") {
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
        const Box a = random_box(rng);
        const Box b = random_box(rng);
        CHECK(std::abs(iou(a, b) - pixel_iou(a, b, 1000)) <= 1e-2);
    }
}

TEST_CASE("miou and ap") {
    const std::vector<Box> same{{0, 0, 1, 1}};
    CHECK(miou(same, same) == 1.0);
    auto [p, g] = pairs_with_ious({1.0, 0.0});
    p[1] = {5, 5, 1, 1};
    CHECK(miou(p, g) == doctest::Approx(0.5));

    auto [p2, g2] = pairs_with_ious({0.3, 0.6});
    CHECK(ap_at(p2, g2, 0.25) == 1.0);
    CHECK(ap_at(p2, g2, 0.50) == 0.5);
    CHECK(ap_at(p2, g2, 0.75) == 0.0);
    for (double t : {0.25, 0.5, 0.75}) CHECK(ap_at(same, same, t) == 1.0);

    const std::vector<Box> none;
    CHECK(miou(none, none) == 0.0);
    CHECK(ap_at(none, none, 0.5) == 0.0);
    CHECK_THROWS_AS(miou(same, none), LengthMismatch);
}

TEST_CASE("miou equals the mean of pixel ious; ap is ordered") {
    Rng rng(32);
    std::vector<Box> p, g;
    for (int i = 0; i < 100; ++i) {
        p.push_back(random_box(rng));
        g.push_back(random_box(rng));
    }
    double sum = 0;
    for (int i = 0; i < 100; ++i) sum += pixel_iou(p[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(i)], 600);
    CHECK(std::abs(miou(p, g) - sum / 100) <= 5e-3);
    const auto r = localization_report(p, g);
    CHECK(r.count == 100);
    CHECK(r.ap25 >= r.ap50);
    CHECK(r.ap50 >= r.ap75);
    const auto j = localization_report_to_json(r);
    CHECK(j.at("miou").get<double>() == r.miou);
}

TEST_CASE("boxes from json") {
    const auto a = boxes_from_json(Json::parse(R"([{"left":0,"top":0,"width":1,"height":1}])"));
    REQUIRE(a.size() == 1);
    CHECK(a[0] == Box{0, 0, 1, 1});
    const auto b = boxes_from_json(Json::parse(R"({"boxes":[{"left":0.5,"top":0,"width":1,"height":1}]})"));
    CHECK(b[0].left == 0.5);
    CHECK_THROWS(boxes_from_json(Json::parse(R"([{"left":0}])")));
}

TEST_CASE("parse_judge accepts well-formed responses") {
    const auto r = parse_judge(R"({"design_layout":7,"content_relevance":8,"typography_color":6,"graphics_images":5,"innovation":4})");
    CHECK(r.score(Criterion::design_layout) == 7);
    CHECK(r.score(Criterion::innovation) == 4);
    CHECK(r.aggregate() == doctest::Approx(6.0));
    CHECK(parse_judge(quality_report_to_json(r).dump()) == r);
}

TEST_CASE("parse_judge rejects malformed responses with findings") {
    const std::string base =
        R"({"design_layout":7,"content_relevance":8,"typography_color":6,"graphics_images":5,"innovation":X})";
    auto with = [&](const std::string& v) {
        auto s = base;
        s.replace(s.find('X'), 1, v);
        return s;
    };
    try {
        parse_judge(with("11"));
        FAIL("expected MalformedJudgeResponse");
    } catch (const MalformedJudgeResponse& e) {
        REQUIRE(e.findings().size() == 1);
        CHECK(e.findings()[0].field == "innovation");
    }
    CHECK_THROWS_AS(parse_judge(with("0")), MalformedJudgeResponse);
    CHECK_THROWS_AS(parse_judge(with("7.5")), MalformedJudgeResponse);
    CHECK_THROWS_AS(parse_judge(with("\"7\"")), MalformedJudgeResponse);
    CHECK_THROWS_AS(parse_judge(R"({"design_layout":7})"), MalformedJudgeResponse);
    CHECK_THROWS_AS(parse_judge("not json"), MalformedJudgeResponse);
}

TEST_CASE("GPT-style judge response fixture") {
    const auto r = parse_judge(testing::read_file(testing::golden_path("judge_response_gpt.txt")));
    CHECK(r.scores == std::array<int, 5>{8, 9, 7, 6, 5});
    CHECK(r.rationales[0].find("Clear hierarchy") == 0);
    CHECK(r.rationales[2] == "Fonts are legible, though the pink body text is a little low in contrast.");
    CHECK(r.rationales[4] == "A familiar template.");
}

TEST_CASE("prompt templates match golden files") {
    testing::check_golden("quality_prompt.txt", render_quality_prompt());
    testing::check_golden("pairwise_prompt.txt",
                          render_pairwise_prompt("A poster for a summer jazz night in the park",
                                                 {"Summer Jazz Night", "Central Park, 8 PM"}));
}

TEST_CASE("pairwise verdicts") {
    CHECK(parse_verdict("Image 1 has better layout. | Image 2") == 2);
    CHECK(parse_verdict("| Image 1") == 1);
    CHECK(parse_verdict("Thinking of | Image 1 ... final: | Image 2") == 2);
    CHECK_THROWS_AS(parse_verdict("Image 2 wins"), UnparseableVerdict);
}
