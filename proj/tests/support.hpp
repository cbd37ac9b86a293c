#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <doctest.h>

#include "coleforge/core/rng.hpp"
#include "coleforge/schema/design_plan.hpp"

namespace testing {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << s;
}

inline fs::path golden_path(const std::string& name) { return fs::path(COLEFORGE_GOLDEN_DIR) / name; }
inline fs::path data_path(const std::string& name) { return fs::path(COLEFORGE_DATA_DIR) / name; }

// Compares against tests/golden/<name>. With COLEFORGE_UPDATE_GOLDEN=1 a
// missing file is captured instead; review the diff before committing it.
inline void check_golden(const std::string& name, const std::string& actual) {
    const auto p = golden_path(name);
    if (!fs::exists(p)) {
        const char* update = std::getenv("COLEFORGE_UPDATE_GOLDEN");
        if (update && std::string(update) == "1") {
            write_file(p, actual);
            MESSAGE("captured golden " << name);
            return;
        }
        FAIL("missing golden file " << p.string());
    }
    const std::string expected = read_file(p);
    CHECK_MESSAGE(expected == actual, "golden mismatch: " << name);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "t") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("coleforge-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

inline std::string random_text(coleforge::Rng& rng, int max_words, bool allow_empty) {
    static const char* kWords[] = {"summer", "Sale", "50%", "off", "\"quoted\"", "naïve", "café", "日本",
                                   "line\nbreak", "tab\there", "{braces}", "[brackets]", "back\\slash", "x",
                                   "<MASK:heading>", "emoji🎉", "a,b", "  padded  "};
    const int lo = allow_empty ? 0 : 1;
    const int n = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(max_words - lo + 1));
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += kWords[rng() % (sizeof(kWords) / sizeof(kWords[0]))];
    }
    return out;
}

// A random plan that passes validate_plan.
inline coleforge::schema::DesignPlan random_plan(coleforge::Rng& rng) {
    using namespace coleforge::schema;
    DesignPlan p;
    p.global_caption = random_text(rng, 12, true);
    p.category = std::string(category_name(kAllCategories[rng() % kAllCategories.size()]));
    const int nk = static_cast<int>(rng() % 6);
    for (int i = 0; i < nk; ++i) p.keywords.push_back(random_text(rng, 2, false));
    p.background_caption = random_text(rng, 10, true);
    p.object_flag = rng() % 2 == 0;
    if (p.object_flag) p.object_caption = "a " + random_text(rng, 4, false);
    p.heading = random_text(rng, 5, true);
    p.sub_heading = random_text(rng, 6, true);
    p.body_text = random_text(rng, 15, true);
    return p;
}

}  // namespace testing
