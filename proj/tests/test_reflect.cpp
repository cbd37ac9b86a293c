#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coleforge/reflect/pairs.hpp"

using namespace coleforge;
using namespace coleforge::reflect;

namespace {

TypographySpec centered(double left, double top, double w, double h) {
    TypographySpec s;
    s.text = "Block";
    s.left = left;
    s.top = top;
    s.width = w;
    s.height = h;
    return s;
}

std::vector<PairSource> sources() {
    return {{"a", "a/preview.png", {centered(-0.4, -0.8, 0.8, 0.3), centered(-0.5, 0.2, 1.0, 0.2)}},
            {"b", "b/preview.png", {centered(-0.2, -0.2, 0.4, 0.4)}}};
}

// Kolmogorov-Smirnov distance of a sample from U[lo, hi].
double ks_uniform(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = (xs[i] - lo) / (hi - lo);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

}  // namespace

TEST_CASE("zero delta is the identity") {
    Rng rng(1);
    const auto blocks = sources()[0].blocks;
    CHECK(perturb_typography(blocks, 0.0, rng) == blocks);
    for (const auto& r : make_pairs(sources(), 0.0, 5, 3)) CHECK(r.noisy == r.ground_truth);
}

TEST_CASE("shifted boxes are pulled back inside the canvas") {
    Rng rng(2);
    const std::vector<TypographySpec> edge{centered(0.95 - 0.1, 0.0, 0.1, 0.1)};
    for (int i = 0; i < 1000; ++i) {
        const auto out = perturb_typography(edge, 0.3, rng);
        CHECK(out[0].left + out[0].width <= 1.0 + 1e-12);
        CHECK(out[0].left >= -1.0);
        CHECK(out[0].top >= -1.0);
        CHECK(out[0].top + out[0].height <= 1.0 + 1e-12);
        CHECK(out[0].width == 0.1);
        CHECK(out[0].height == 0.1);
        CHECK(codec::validate_typography(out[0]).empty());
    }
}

TEST_CASE("shifts are uniform on [-delta, delta]") {
    Rng rng(3);
    const std::vector<TypographySpec> mid{centered(-0.1, -0.1, 0.2, 0.2)};
    std::vector<double> dx, dy;
    for (int i = 0; i < 10000; ++i) {
        const auto out = perturb_typography(mid, 0.2, rng);
        dx.push_back(out[0].left - mid[0].left);
        dy.push_back(out[0].top - mid[0].top);
        CHECK(out[0].text == mid[0].text);
        CHECK(out[0].font_size == mid[0].font_size);
    }
    // Critical value at the 0.1% level for n = 10^4 is 1.95 / sqrt(n).
    CHECK(ks_uniform(dx, -0.2, 0.2) < 1.95 / 100.0);
    CHECK(ks_uniform(dy, -0.2, 0.2) < 1.95 / 100.0);
}

TEST_CASE("make_pairs indexing and independence") {
    const auto recs = make_pairs(sources(), 0.1, 3, 9);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].source == "a");
    CHECK(recs[1].source == "b");
    CHECK(recs[2].source == "a");
    CHECK(recs[0].noisy != recs[2].noisy);
    CHECK(recs[0].ground_truth == recs[2].ground_truth);
    const auto tail = make_pairs(sources(), 0.1, 2, 9, 1);
    CHECK(tail[0] == recs[1]);
    CHECK(tail[1] == recs[2]);
    std::vector<PairSource> none;
    CHECK_THROWS_AS(make_pairs(none, 0.1, 3, 9), EmptyDataset);

    const std::vector<PairSource> one{sources()[0]};
    const auto three = make_pairs(one, 0.1, 3, 4);
    CHECK(three[0].noisy != three[1].noisy);
    CHECK(three[1].noisy != three[2].noisy);
}

TEST_CASE("pairs JSONL round trip") {
    PairSet set;
    set.delta = 0.15;
    set.seed = 77;
    set.records = make_pairs(sources(), 0.15, 6, 77);
    std::stringstream ss;
    write_pairs(ss, set);
    const auto back = read_pairs(ss);
    CHECK(back.delta == 0.15);
    CHECK(back.seed == 77);
    CHECK(back.records == set.records);
    for (const auto& r : set.records) {
        CHECK(codec::deserialize_typography(codec::serialize_typography(r.noisy)) == r.noisy);
    }

    std::stringstream bad("{\"schema\":\"something-else\",\"version\":1}\n");
    CHECK_THROWS(read_pairs(bad));
}
