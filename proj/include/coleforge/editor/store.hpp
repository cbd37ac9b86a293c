#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "coleforge/editor/edit_ops.hpp"

namespace coleforge::editor {

class NotFound : public Error {
public:
    using Error::Error;
};

class Conflict : public Error {
public:
    Conflict(std::uint64_t expected, std::uint64_t current)
        : Error("stale version " + std::to_string(expected) + ", design is at version " + std::to_string(current)),
          current_(current) {}
    std::uint64_t current_version() const noexcept { return current_; }

private:
    std::uint64_t current_;
};

struct DesignSummary {
    std::string id;
    std::string category;
    std::string intention;
    std::uint64_t version = 0;
    std::size_t text_blocks = 0;
    bool has_object = false;
};

struct VersionedBundle {
    std::string id;
    std::uint64_t version = 0;
    pipeline::DesignBundle bundle;
};

// Directory store, one directory per design:
//   <root>/<id>/bundle.json    the bundle as first stored (never rewritten)
//   <root>/<id>/state.json     {"version": n, "state": editable state}
//   <root>/<id>/journal.jsonl  one line per edit: version, op and before-image
// The id is a prefix of the bundle digest, so storing the same bundle twice
// yields the same design. The version counter lives outside the bundle.
// Readers of one design run concurrently; writers to one design are serialized.
class DesignStore {
public:
    explicit DesignStore(std::filesystem::path root);

    const std::filesystem::path& root() const noexcept { return root_; }

    std::string add(const pipeline::DesignBundle& bundle);
    std::vector<DesignSummary> list() const;
    VersionedBundle get(const std::string& id) const;

    // Throws NotFound, Conflict (base_version != current) or InvalidEdit.
    VersionedBundle apply_edit(const std::string& id, std::uint64_t base_version, const EditOp& op);

    std::string export_svg(const std::string& id) const;
    std::vector<std::uint8_t> export_png(const std::string& id) const;

private:
    struct Entry {
        mutable std::shared_mutex mu;
        pipeline::DesignBundle bundle;
        typeset::EncodedLayers encoded;  // rasters never change, so encode once
        std::uint64_t version = 0;
        std::vector<EditableState> undo;
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    std::shared_ptr<Entry> load(const std::string& id) const;
    void persist(const std::string& id, const Entry& e, const Json& journal_line) const;

    std::filesystem::path root_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<Entry>> entries_;
};

}  // namespace coleforge::editor
