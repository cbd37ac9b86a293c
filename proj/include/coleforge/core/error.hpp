#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace coleforge {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One violated invariant: which field, and what is wrong with it.
struct Finding {
    std::string field;
    std::string message;

    bool operator==(const Finding&) const = default;
};

using Findings = std::vector<Finding>;

std::string describe(const Findings& findings);

// An error that carries the findings which caused it.
class FindingsError : public Error {
public:
    FindingsError(const std::string& what, Findings findings)
        : Error(what + ": " + describe(findings)), findings_(std::move(findings)) {}

    const Findings& findings() const noexcept { return findings_; }

private:
    Findings findings_;
};

}  // namespace coleforge
