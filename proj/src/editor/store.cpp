#include "coleforge/editor/store.hpp"

#include <algorithm>
#include <fstream>

#include "coleforge/compositor/png_io.hpp"
#include "coleforge/pipeline/pipeline.hpp"
#include "coleforge/typeset/rasterizer.hpp"

namespace coleforge::editor {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw Error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

}  // namespace

DesignStore::DesignStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

std::shared_ptr<DesignStore::Entry> DesignStore::load(const std::string& id) const {
    const fs::path dir = root_ / id;
    auto e = std::make_shared<Entry>();
    e->bundle = pipeline::bundle_from_json(read_json(dir / "bundle.json"));
    e->encoded = typeset::encode_layers(e->bundle.stack);
    if (fs::exists(dir / "state.json")) {
        const Json st = read_json(dir / "state.json");
        e->version = st.at("version").get<std::uint64_t>();
        restore(e->bundle, state_from_json(st.at("state")));
        pipeline::rerender(e->bundle, e->encoded);
    }
    // Rebuild the undo stack from the journal.
    std::ifstream journal(dir / "journal.jsonl", std::ios::binary);
    std::string line;
    while (std::getline(journal, line)) {
        if (line.empty()) continue;
        const Json j = Json::parse(line);
        if (j.at("op").at("type") == "undo") {
            if (!e->undo.empty()) e->undo.pop_back();
        } else {
            e->undo.push_back(state_from_json(j.at("before")));
        }
    }
    return e;
}

std::shared_ptr<DesignStore::Entry> DesignStore::find(const std::string& id) const {
    if (!valid_id(id)) throw NotFound("no design '" + id + "'");
    std::lock_guard lock(mu_);
    if (auto it = entries_.find(id); it != entries_.end()) return it->second;
    if (!fs::exists(root_ / id / "bundle.json")) throw NotFound("no design '" + id + "'");
    auto e = load(id);
    entries_[id] = e;
    return e;
}

std::string DesignStore::add(const pipeline::DesignBundle& bundle) {
    if (!bundle.completed(pipeline::kStageRender)) throw Error("only rendered bundles can be stored");
    const std::string id = pipeline::bundle_digest(bundle).substr(0, 16);
    std::lock_guard lock(mu_);
    if (entries_.count(id) || fs::exists(root_ / id / "bundle.json")) return id;
    const fs::path dir = root_ / id;
    fs::create_directories(dir);
    write_file(dir / "bundle.json", pipeline::bundle_to_json(bundle).dump() + "\n");
    auto e = std::make_shared<Entry>();
    e->bundle = bundle;
    e->encoded = typeset::encode_layers(bundle.stack);
    entries_[id] = std::move(e);
    return id;
}

std::vector<DesignSummary> DesignStore::list() const {
    std::vector<std::string> ids;
    for (const auto& d : fs::directory_iterator(root_)) {
        const std::string name = d.path().filename().string();
        if (d.is_directory() && valid_id(name) && fs::exists(d.path() / "bundle.json")) ids.push_back(name);
    }
    std::sort(ids.begin(), ids.end());
    std::vector<DesignSummary> out;
    for (const auto& id : ids) {
        auto e = find(id);
        std::shared_lock lock(e->mu);
        DesignSummary s;
        s.id = id;
        s.category = std::string(schema::category_name(e->bundle.intent.category));
        s.intention = e->bundle.intent.text;
        s.version = e->version;
        s.text_blocks = e->bundle.stack.text_blocks.size();
        s.has_object = e->bundle.stack.object.has_value();
        out.push_back(std::move(s));
    }
    return out;
}

VersionedBundle DesignStore::get(const std::string& id) const {
    auto e = find(id);
    std::shared_lock lock(e->mu);
    return {id, e->version, e->bundle};
}

void DesignStore::persist(const std::string& id, const Entry& e, const Json& journal_line) const {
    const fs::path dir = root_ / id;
    {
        std::ofstream j(dir / "journal.jsonl", std::ios::binary | std::ios::app);
        j << journal_line.dump() << '\n';
        if (!j) throw Error("cannot append to journal of " + id);
    }
    write_file(dir / "state.json", Json{{"version", e.version}, {"state", state_to_json(capture(e.bundle))}}.dump() + "\n");
}

VersionedBundle DesignStore::apply_edit(const std::string& id, std::uint64_t base_version, const EditOp& op) {
    auto e = find(id);
    std::unique_lock lock(e->mu);
    if (base_version != e->version) throw Conflict(base_version, e->version);

    Json line = Json::object();
    line["version"] = e->version + 1;
    line["op"] = edit_to_json(op);
    if (op.type == EditType::kUndo) {
        if (e->undo.empty()) throw InvalidEdit("nothing to undo", {{"op", "the journal has no edit to revert"}});
        restore(e->bundle, e->undo.back());
        e->undo.pop_back();
    } else {
        const EditableState before = capture(e->bundle);
        apply_op(e->bundle, op);
        e->undo.push_back(before);
        line["before"] = state_to_json(before);
    }
    pipeline::rerender(e->bundle, e->encoded);
    ++e->version;
    persist(id, *e, line);
    return {id, e->version, e->bundle};
}

std::string DesignStore::export_svg(const std::string& id) const {
    auto e = find(id);
    std::shared_lock lock(e->mu);
    return e->bundle.svg.markup;
}

std::vector<std::uint8_t> DesignStore::export_png(const std::string& id) const {
    auto e = find(id);
    std::shared_lock lock(e->mu);
    return compositor::encode_png(typeset::rasterize_preview(e->bundle.svg));
}

}  // namespace coleforge::editor
