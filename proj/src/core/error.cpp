#include "coleforge/core/error.hpp"

namespace coleforge {

std::string describe(const Findings& findings) {
    std::string out;
    for (const auto& f : findings) {
        if (!out.empty()) out += "; ";
        out += f.field;
        out += ": ";
        out += f.message;
    }
    return out.empty() ? std::string("no findings") : out;
}

}  // namespace coleforge
