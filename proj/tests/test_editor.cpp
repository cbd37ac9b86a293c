#include <doctest.h>

#include <boost/property_tree/xml_parser.hpp>

#include "stub_server.hpp"
#include "support.hpp"

#include "coleforge/editor/service.hpp"
#include "coleforge/pipeline/mock_suite.hpp"
#include "coleforge/typeset/rasterizer.hpp"

using namespace coleforge;
using namespace coleforge::editor;
using Json = nlohmann::ordered_json;

namespace {

pipeline::DesignBundle make_bundle(std::uint64_t seed = 7, bool object = true) {
    pipeline::MockOptions o;
    o.object_flag = object;
    pipeline::PipelineConfig pc;
    pc.seed = seed;
    pc.canvas = {128, 128};
    return pipeline::run_pipeline(schema::make_intent("Spring sale poster with bold headline", schema::Category::kPosts),
                                  pipeline::mock_suite(seed, o), pc);
}

std::string canonical(const pipeline::DesignBundle& b) { return pipeline::bundle_to_json(b, false).dump(); }

EditOp random_op(Rng& rng, std::size_t blocks) {
    const auto b = static_cast<std::size_t>(uniform(rng, 0.0, static_cast<double>(blocks) - 1e-9));
    switch (static_cast<int>(uniform(rng, 0.0, 6.0))) {
        case 0: return EditOp::move_block(b, uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05));
        case 1: return EditOp::resize_block(b, uniform(rng, 0.2, 0.6), uniform(rng, 0.05, 0.2));
        case 2: return EditOp::set_attribute(b, "font_size", static_cast<int>(uniform(rng, 12, 90)));
        case 3: return EditOp::set_text(b, testing::random_text(rng, 4, false));
        case 4: return EditOp::move_object(uniform(rng, -0.1, 0.1), uniform(rng, -0.1, 0.1));
        default: return EditOp::scale_object(uniform(rng, 0.8, 1.25));
    }
}

}  // namespace

TEST_CASE("store starts empty and adds idempotently") {
    testing::TempDir dir("store");
    DesignStore store(dir.path());
    CHECK(store.list().empty());
    const auto b = make_bundle();
    const auto id = store.add(b);
    CHECK(store.add(b) == id);
    const auto ls = store.list();
    REQUIRE(ls.size() == 1);
    CHECK(ls[0].version == 0);
    CHECK(ls[0].category == "posts");
    CHECK(ls[0].has_object);
    CHECK_THROWS_AS(store.get("0123456789ab"), NotFound);
}

TEST_CASE("edit then undo is byte-identical") {
    testing::TempDir dir("undo");
    DesignStore store(dir.path());
    const auto id = store.add(make_bundle());
    const auto original = store.get(id);
    const auto moved = store.apply_edit(id, 0, EditOp::move_block(0, 0.05, 0.02));
    CHECK(moved.version == 1);
    CHECK(moved.bundle.stack.text_blocks[0].left == doctest::Approx(original.bundle.stack.text_blocks[0].left + 0.05));
    CHECK_FALSE(moved.bundle.scores.has_value());
    const auto back = store.apply_edit(id, 1, EditOp::undo());
    CHECK(back.version == 2);
    CHECK(back.bundle.svg.markup == original.bundle.svg.markup);
    CHECK(canonical(back.bundle) == canonical(original.bundle));
    CHECK_THROWS_AS(store.apply_edit(id, 2, EditOp::undo()), InvalidEdit);
}

TEST_CASE("random edit sequences fully undone restore the original") {
    testing::TempDir dir("random");
    DesignStore store(dir.path());
    const auto id = store.add(make_bundle(11));
    const auto original = canonical(store.get(id).bundle);
    const auto blocks = store.get(id).bundle.stack.text_blocks.size();
    REQUIRE(blocks > 0);
    Rng rng(5);
    for (int round = 0; round < 10; ++round) {
        const int n = 1 + static_cast<int>(uniform(rng, 0.0, 20.0));
        int applied = 0;
        for (int i = 0; i < n; ++i) {
            const auto v = store.get(id).version;
            try {
                store.apply_edit(id, v, random_op(rng, blocks));
                ++applied;
            } catch (const InvalidEdit&) {
                CHECK(store.get(id).version == v);
            }
        }
        for (int i = 0; i < applied; ++i) store.apply_edit(id, store.get(id).version, EditOp::undo());
        CHECK(canonical(store.get(id).bundle) == original);
    }
}

TEST_CASE("invalid edits are rejected without changing the design") {
    testing::TempDir dir("invalid");
    DesignStore store(dir.path());
    const auto id = store.add(make_bundle());
    const auto before = canonical(store.get(id).bundle);
    CHECK_THROWS_AS(store.apply_edit(id, 0, EditOp::resize_block(0, 0.0, 0.1)), InvalidEdit);
    CHECK_THROWS_AS(store.apply_edit(id, 0, EditOp::move_block(99, 0.1, 0.0)), InvalidEdit);
    CHECK_THROWS_AS(store.apply_edit(id, 0, EditOp::set_attribute(0, "font_size", "big")), InvalidEdit);
    CHECK_THROWS_AS(store.apply_edit(id, 0, EditOp::scale_object(-1.0)), InvalidEdit);
    CHECK(store.get(id).version == 0);
    CHECK(canonical(store.get(id).bundle) == before);

    const auto no_obj = store.add(make_bundle(7, false));
    CHECK_THROWS_AS(store.apply_edit(no_obj, 0, EditOp::move_object(0.1, 0.0)), InvalidEdit);
}

TEST_CASE("attribute edits show in the SVG") {
    testing::TempDir dir("attr");
    DesignStore store(dir.path());
    const auto id = store.add(make_bundle());
    const auto t = store.apply_edit(id, 0, EditOp::set_text(0, "Fish & <Chips>"));
    CHECK(t.bundle.svg.markup.find("Fish &amp; &lt;Chips&gt;") != std::string::npos);
    const auto r = store.apply_edit(id, 1, EditOp::set_attribute(0, "font_size", 50));
    CHECK(r.bundle.stack.text_blocks[0].font_size == 50);
    CHECK(r.bundle.svg.markup.find("font-size=\"50\"") != std::string::npos);
    boost::property_tree::ptree pt;
    std::istringstream in(r.bundle.svg.markup);
    CHECK_NOTHROW(boost::property_tree::read_xml(in, pt));
}

TEST_CASE("stale versions conflict") {
    testing::TempDir dir("conflict");
    DesignStore store(dir.path());
    const auto id = store.add(make_bundle());
    store.apply_edit(id, 0, EditOp::move_block(0, 0.01, 0.0));
    try {
        store.apply_edit(id, 0, EditOp::move_block(0, 0.01, 0.0));
        FAIL("expected Conflict");
    } catch (const Conflict& c) {
        CHECK(c.current_version() == 1);
    }
}

TEST_CASE("exports and reload from disk") {
    testing::TempDir dir("export");
    std::string id;
    pipeline::DesignBundle edited;
    {
        DesignStore store(dir.path());
        id = store.add(make_bundle());
        store.apply_edit(id, 0, EditOp::move_block(0, 0.02, 0.0));
        store.apply_edit(id, 1, EditOp::scale_object(1.1));
        edited = store.get(id).bundle;
        CHECK(store.export_svg(id) == edited.svg.markup);
        CHECK(compositor::decode_png(store.export_png(id)) == typeset::rasterize_preview(edited.svg));
    }
    DesignStore reopened(dir.path());
    const auto v = reopened.get(id);
    CHECK(v.version == 2);
    CHECK(canonical(v.bundle) == canonical(edited));
    reopened.apply_edit(id, 2, EditOp::undo());
    reopened.apply_edit(id, 3, EditOp::undo());
    CHECK(canonical(reopened.get(id).bundle) == canonical(make_bundle()));
}

TEST_CASE("edit wire form round trip") {
    const std::vector<EditOp> ops{EditOp::move_block(1, 0.1, -0.2), EditOp::resize_block(0, 0.5, 0.25),
                                  EditOp::set_attribute(0, "font_size", 50), EditOp::set_text(2, "hi"),
                                  EditOp::move_object(0.1, 0.2), EditOp::scale_object(1.5), EditOp::undo()};
    for (const auto& op : ops) CHECK(edit_to_json(edit_from_json(edit_to_json(op))) == edit_to_json(op));
    CHECK_THROWS_AS(edit_from_json(Json{{"type", "teleport"}}), InvalidEdit);
    CHECK_THROWS_AS(edit_from_json(Json{{"type", "move_block"}, {"block", 0}}), InvalidEdit);
}

TEST_CASE("HTTP API") {
    testing::TempDir dir("http");
    DesignStore store(dir.path());
    pipeline::MockOptions o;
    o.object_flag = true;
    ServiceConfig cfg;
    cfg.pipeline.canvas = {128, 128};
    EditorService svc(store, pipeline::mock_suite(3, o), cfg);
    testing::StubServer stub;
    svc.bind(stub.server());
    stub.start();
    httplib::Client cli(stub.url());

    auto health = cli.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto opt = cli.Options("/designs");
    REQUIRE(opt);
    CHECK(opt->status == 204);

    auto codec = cli.Get("/codec");
    REQUIRE(codec);
    CHECK(Json::parse(codec->body).at("table").contains("font_size"));

    auto list = cli.Get("/designs");
    CHECK(Json::parse(list->body).at("designs").empty());

    auto created = cli.Post("/designs", R"({"category":"posts","intention":"Night market flyer","seed":4})",
                            "application/json");
    REQUIRE(created);
    REQUIRE(created->status == 201);
    const auto cj = Json::parse(created->body);
    const std::string id = cj.at("id");
    CHECK(cj.at("version") == 0);

    CHECK(cli.Post("/designs", R"({"category":"billboards","intention":"x"})", "application/json")->status == 400);
    CHECK(cli.Post("/designs", "not json", "application/json")->status == 400);
    CHECK(cli.Get("/designs/ffffffffffff")->status == 404);

    auto edit = cli.Post("/designs/" + id + "/edits", R"({"version":0,"op":{"type":"move_block","block":0,"dx":0.05,"dy":0}})",
                         "application/json");
    REQUIRE(edit);
    CHECK(edit->status == 200);
    CHECK(Json::parse(edit->body).at("version") == 1);

    auto stale = cli.Post("/designs/" + id + "/edits", R"({"version":0,"op":{"type":"undo"}})", "application/json");
    CHECK(stale->status == 409);
    CHECK(Json::parse(stale->body).at("current_version") == 1);

    auto bad = cli.Post("/designs/" + id + "/edits",
                        R"({"version":1,"op":{"type":"resize_block","block":0,"width":0,"height":0.1}})", "application/json");
    CHECK(bad->status == 422);
    CHECK_FALSE(Json::parse(bad->body).at("findings").empty());

    auto svg = cli.Get("/designs/" + id + "/export?format=svg");
    CHECK(svg->status == 200);
    CHECK(svg->body == store.export_svg(id));
    auto png = cli.Get("/designs/" + id + "/export?format=png");
    CHECK(png->status == 200);
    CHECK(png->get_header_value("Content-Type") == "image/png");
    CHECK(cli.Get("/designs/" + id + "/export?format=gif")->status == 400);

    CHECK(Json::parse(cli.Get("/designs")->body).at("designs").size() == 1);
}
