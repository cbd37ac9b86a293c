#include <doctest.h>

#include <atomic>
#include <regex>

#include "stub_server.hpp"
#include "support.hpp"

#include "coleforge/core/digest.hpp"
#include "coleforge/core/text.hpp"
#include "coleforge/pipeline/mock_suite.hpp"
#include "coleforge/pipeline/pipeline.hpp"
#include "coleforge/pipeline/remote_backend.hpp"

using namespace coleforge;
using namespace coleforge::pipeline;
using nlohmann::ordered_json;

namespace {

const schema::DesignIntent kFixture{
    "Design a poster for a \"Summer Jazz Night\" concert in the park with \"Live music under the stars\" and "
    "\"Central Park, Saturday 8 PM\" in pink and gold",
    schema::Category::kEvents};

PipelineConfig small(std::uint64_t seed) {
    PipelineConfig c;
    c.seed = seed;
    c.canvas = {128, 128};
    return c;
}

// Wraps a judge and fails on the given call (0-based).
class FlakyJudge final : public QualityJudge {
public:
    FlakyJudge(std::shared_ptr<const QualityJudge> inner, int fail_on) : inner_(std::move(inner)), fail_on_(fail_on) {}
    std::string id() const override { return "flaky-judge"; }
    BackendKind kind() const override { return BackendKind::kMock; }
    QualityReport judge(const JudgeRequest& r, const StageContext& ctx) const override {
        if (calls_++ == fail_on_) throw Error("judge service fell over");
        return inner_->judge(r, ctx);
    }

private:
    std::shared_ptr<const QualityJudge> inner_;
    int fail_on_;
    mutable std::atomic<int> calls_{0};
};

RemoteConfig fast_remote(const std::string& url) {
    RemoteConfig rc;
    rc.base_url = url;
    rc.backoff = std::chrono::milliseconds(1);
    rc.max_backoff = std::chrono::milliseconds(4);
    rc.read_timeout = std::chrono::milliseconds(5000);
    return rc;
}

BackendSuite remote_generation(const RemoteConfig& rc) {
    BackendSuite s;
    s.planner = remote_planner(rc);
    s.background_gen = remote_background(rc);
    s.object_gen = remote_object(rc);
    s.typographer = remote_typographer(rc);
    return s;
}

}  // namespace

TEST_CASE("mock pipeline runs all stages and is reproducible") {
    const auto suite = mock_suite(7, {.object_flag = true});
    const auto a = run_pipeline(kFixture, suite, small(7));
    const auto b = run_pipeline(kFixture, suite, small(7));
    CHECK(bundle_digest(a) == bundle_digest(b));
    CHECK(a.provenance.completed_stages ==
          std::vector<std::string>{kStagePlanner, kStageBackground, kStageObject, kStageTypographer, kStageRender});
    CHECK(a.stack.object.has_value());
    CHECK(a.svg.layer_index.size() == 2 + a.stack.text_blocks.size());
    CHECK(a.plan.heading == "Summer Jazz Night");
    CHECK(a.plan.sub_heading == "Live music under the stars");
    CHECK(schema::validate_plan(a.plan).empty());
    CHECK(a.provenance.consistency_residual.value_or(99) <= 1);
    CHECK(bundle_digest(run_pipeline(kFixture, suite, small(8))) != bundle_digest(a));
}

TEST_CASE("golden bundle digest for mock seed 7") {
    const auto b = run_pipeline(kFixture, mock_suite(7), small(7));
    testing::check_golden("mock_seed7_digest.txt", bundle_digest(b) + "\n");
}

TEST_CASE("object stage is skipped when the plan has no object") {
    const auto b = run_pipeline(kFixture, mock_suite(7, {.object_flag = false}), small(3));
    CHECK_FALSE(b.plan.object_flag);
    CHECK_FALSE(b.stack.object.has_value());
    CHECK(b.provenance.skipped_stages == std::vector<std::string>{kStageObject});
    CHECK(b.svg.markup.find("layer-object") == std::string::npos);
    CHECK(b.svg.layer_index.size() == 1 + b.stack.text_blocks.size());
}

TEST_CASE("bundle json round trip") {
    const auto b = run_pipeline(kFixture, mock_suite(7, {.object_flag = true}), small(7));
    const auto j = bundle_to_json(b);
    const auto back = bundle_from_json(ordered_json::parse(j.dump()));
    CHECK(bundle_digest(back) == bundle_digest(b));
    CHECK(back.stack == b.stack);
    CHECK(back.svg == b.svg);
    CHECK(bundle_to_json(b, false).at("provenance").contains("stage_ms") == false);
}

TEST_CASE("mock palette hash rule") {
    const auto p = mock_palette("Soft gradient background in pink and gold", 7);
    CHECK(p.tokens == std::vector<std::string>{"pink", "gold"});
    CHECK(p.hash == fnv1a64("pink,gold|7"));
    const auto b = run_pipeline(kFixture, mock_suite(7), small(7));
    CHECK(b.plan.background_caption.find("pink") != std::string::npos);
    CHECK(color_tokens(b.plan.background_caption).front() == "pink");
    CHECK(mock_palette("no colours here", 1).tokens.empty());
}

TEST_CASE("every category yields a valid plan") {
    const auto suite = mock_suite(11);
    for (auto c : schema::kAllCategories) {
        const schema::DesignIntent intent{"Create a bold design about coffee and books for " +
                                              std::string(schema::category_name(c)),
                                          c};
        const auto plan = suite.planner->plan(intent, {1, {64, 64}, nullptr});
        CHECK(schema::validate_plan(plan).empty());
        CHECK(plan.category == schema::category_name(c));
    }
}

TEST_CASE("pipeline refuses incomplete suites and reports stage failures") {
    auto suite = mock_suite(1);
    suite.typographer.reset();
    CHECK_THROWS_AS(run_pipeline(kFixture, suite, small(1)), StageFailure);

    class BadPlanner final : public Planner {
    public:
        std::string id() const override { return "bad"; }
        BackendKind kind() const override { return BackendKind::kMock; }
        DesignPlan plan(const DesignIntent&, const StageContext&) const override {
            DesignPlan p;
            p.category = "posts";
            p.object_caption = "a dog";
            return p;
        }
    };
    suite = mock_suite(1);
    suite.planner = std::make_shared<BadPlanner>();
    try {
        run_pipeline(kFixture, suite, small(1));
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == kStagePlanner);
        REQUIRE_FALSE(e.findings().empty());
        CHECK(e.findings()[0].field == "object_caption");
        CHECK(e.partial().provenance.completed_stages.empty());
    }
}

TEST_CASE("reflect loop") {
    const auto suite = mock_suite(5, {.object_flag = true});
    const auto base = run_pipeline(kFixture, suite, small(5));

    CHECK(bundle_digest(run_reflect(base, suite, {0, nullptr})) == bundle_digest(base));

    const auto r = run_reflect(base, suite, {3, nullptr});
    const auto& h = r.provenance.reflect_history;
    REQUIRE(h.size() >= 2);
    for (std::size_t i = 1; i < h.size(); ++i) {
        if (h[i].accepted) CHECK(h[i].score >= h[i - 1].score);
    }
    double best = 0;
    for (const auto& s : h) {
        if (s.accepted) best = std::max(best, s.score);
    }
    REQUIRE(r.scores.has_value());
    CHECK(quality_score(*r.scores) == best);
    CHECK(mock_layout_score(r.stack.text_blocks) >= mock_layout_score(base.stack.text_blocks));
}

TEST_CASE("reflect keeps the best bundle when the judge fails") {
    auto suite = mock_suite(5, {.object_flag = true, .text_jitter = 0.15});
    const auto base = run_pipeline(kFixture, suite, small(5));
    const auto clean = run_reflect(base, suite, {1, nullptr});
    suite.quality_judge = std::make_shared<FlakyJudge>(mock_suite(5).quality_judge, 2);
    const auto r = run_reflect(base, suite, {3, nullptr});
    const auto& h = r.provenance.reflect_history;
    REQUIRE(h.size() == 3);
    CHECK(h[2].error.find("judge service fell over") != std::string::npos);
    CHECK(r.stack.text_blocks == clean.stack.text_blocks);
}

TEST_CASE("prompt token budget") {
    CHECK(count_prompt_tokens("Hello, world!") == 4);
    CHECK(count_prompt_tokens("  ") == 0);
    CHECK(count_prompt_tokens("café au lait") == 3);
    const auto toks = prompt_tokens("a-b c");
    CHECK(toks == std::vector<std::string_view>{"a", "-", "b", "c"});

    std::string longp;
    for (int i = 0; i < 600; ++i) longp += "word ";
    CHECK(count_prompt_tokens(longp) == 600);
    CHECK_THROWS_AS(fit_prompt(longp, 512, OversizePolicy::kReject), PromptTooLong);
    const auto cut = fit_prompt(longp, 512, OversizePolicy::kTruncate);
    CHECK(count_prompt_tokens(cut) == 512);
    CHECK(fit_prompt("short one", 512, OversizePolicy::kReject) == "short one");
}

TEST_CASE("remote suite against a stub server") {
    const auto mock = mock_suite(9, {.object_flag = true});
    testing::StubServer stub;
    testing::serve_suite(stub.server(), mock);
    stub.start();

    const auto remote = run_pipeline(kFixture, remote_generation(fast_remote(stub.url())), small(9));
    const auto local = run_pipeline(kFixture, mock, small(9));
    CHECK(remote.plan == local.plan);
    CHECK(remote.stack == local.stack);
    CHECK(remote.svg == local.svg);
    CHECK(remote.provenance.backend_ids.at("planner") == "remote-planner");

    bool saw_digest = false;
    for (const auto& e : remote.provenance.payload_log) {
        const std::string s = e.dump();
        if (s.find("<sha256:") != std::string::npos) saw_digest = true;
        CHECK(s.size() < 20000);
    }
    CHECK(saw_digest);
}

TEST_CASE("remote planner returning an invalid plan fails the planner stage") {
    const auto mock = mock_suite(9);
    testing::StubServer stub;
    testing::serve_suite(stub.server(), mock, [](const ordered_json&) {
        schema::DesignPlan p;
        p.category = "posts";
        p.object_caption = "a dog";
        return schema::plan_to_json(p);
    });
    stub.start();
    try {
        run_pipeline(kFixture, remote_generation(fast_remote(stub.url())), small(9));
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == kStagePlanner);
        CHECK_FALSE(e.findings().empty());
    }
}

TEST_CASE("remote retries 5xx, then gives up") {
    testing::StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Post("/v1/plan", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 500;
    });
    stub.start();
    RemoteClient client(fast_remote(stub.url()));
    CHECK_THROWS_AS(client.post("plan", ordered_json::object(), "x", nullptr), Unreachable);
    CHECK(hits == 3);
}

TEST_CASE("remote recovers after a transient 5xx") {
    testing::StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Post("/v1/plan", [&](const httplib::Request&, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 503;
            return;
        }
        res.set_content("{\"ok\":true}", "application/json");
    });
    stub.start();
    RemoteClient client(fast_remote(stub.url()));
    CHECK(client.post("plan", ordered_json::object(), "x", nullptr).at("ok") == true);
    CHECK(hits == 2);
}

TEST_CASE("remote 4xx and bad bodies are not retried") {
    testing::StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Post("/v1/plan", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 422;
        res.set_content("{\"error\":\"nope\"}", "application/json");
    });
    stub.server().Post("/v1/judge", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("this is not json", "text/plain");
    });
    stub.start();
    RemoteClient client(fast_remote(stub.url()));
    CHECK_THROWS_AS(client.post("plan", ordered_json::object(), "x", nullptr), BadResponse);
    CHECK(hits == 1);
    CHECK_THROWS_AS(client.post("judge", ordered_json::object(), "x", nullptr), BadResponse);
}

TEST_CASE("remote read timeout") {
    testing::StubServer stub;
    stub.server().Post("/v1/plan", [&](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(400));
        res.set_content("{}", "application/json");
    });
    stub.start();
    auto rc = fast_remote(stub.url());
    rc.read_timeout = std::chrono::milliseconds(100);
    RemoteClient client(rc);
    CHECK_THROWS_AS(client.post("plan", ordered_json::object(), "x", nullptr), Timeout);
}

TEST_CASE("remote endpoint that is down") {
    int port = 0;
    {
        testing::StubServer probe;
        probe.start();
        port = probe.port();
    }
    auto rc = fast_remote("http://127.0.0.1:" + std::to_string(port));
    RemoteClient client(rc);
    CHECK_FALSE(client.health().ok);
    CHECK_THROWS_AS(client.post("plan", ordered_json::object(), "x", nullptr), Unreachable);
    try {
        run_pipeline(kFixture, remote_suite(rc), small(1));
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == "health");
    }
}

TEST_CASE("oversized background prompt is rejected or truncated per policy") {
    const auto mock = mock_suite(9, {.object_flag = false});
    testing::StubServer stub;
    std::string seen_prompt;
    std::mutex mu;
    // Registered first, so it wins over the suite's background route.
    stub.server().Post("/v1/background", [&](const httplib::Request& req, httplib::Response& res) {
        const auto body = ordered_json::parse(req.body);
        {
            std::lock_guard lk(mu);
            seen_prompt = body.at("prompt").get<std::string>();
        }
        const auto plan = schema::plan_from_json(body.at("plan"));
        const auto img = mock.background_gen->generate(plan, {body.at("seed").get<std::uint64_t>(), {128, 128}, nullptr});
        res.set_content(ordered_json{{"image", testing::png_b64(img)}}.dump(), "application/json");
    });
    testing::serve_suite(stub.server(), mock, [&](const ordered_json& req) {
        auto plan = mock.planner->plan(schema::intent_from_json(req.at("intent")), {});
        for (int i = 0; i < 600; ++i) plan.background_caption += " glow";
        return schema::plan_to_json(plan);
    });
    stub.start();

    auto rc = fast_remote(stub.url());
    try {
        run_pipeline(kFixture, remote_generation(rc), small(9));
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == kStageBackground);
        CHECK(e.cause().find("token") != std::string::npos);
    }
    CHECK(seen_prompt.empty());

    rc.oversize = OversizePolicy::kTruncate;
    const auto b = run_pipeline(kFixture, remote_generation(rc), small(9));
    CHECK(b.completed(kStageRender));
    std::lock_guard lk(mu);
    CHECK(count_prompt_tokens(seen_prompt) == 512);
}
