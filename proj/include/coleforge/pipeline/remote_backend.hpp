#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "coleforge/pipeline/backends.hpp"

namespace coleforge::pipeline {

class Unreachable : public Error {
public:
    using Error::Error;
};
class BadResponse : public Error {
public:
    using Error::Error;
};
class Timeout : public Error {
public:
    using Error::Error;
};
class PromptTooLong : public Error {
public:
    using Error::Error;
};

enum class OversizePolicy { kReject, kTruncate };

// Word-piece approximation of a text encoder's tokenizer: runs of word
// characters (ASCII alphanumerics, '_' and any non-ASCII byte) and single
// punctuation characters. Whitespace separates tokens and is dropped.
std::vector<std::string_view> prompt_tokens(std::string_view text);
std::size_t count_prompt_tokens(std::string_view text);

// Returns the text unchanged when it fits. Otherwise rejects (PromptTooLong)
// or cuts it right after the budget-th token.
std::string fit_prompt(std::string_view text, std::size_t budget, OversizePolicy policy);

struct RemoteConfig {
    // "http://host:port" with an optional path prefix.
    std::string base_url;
    std::chrono::milliseconds connect_timeout{2000};
    std::chrono::milliseconds read_timeout{60000};
    int max_attempts = 3;
    std::chrono::milliseconds backoff{100};
    std::chrono::milliseconds max_backoff{1000};
    std::size_t token_budget = 512;
    OversizePolicy oversize = OversizePolicy::kReject;
    // Strings longer than this are logged as a digest instead of verbatim.
    std::size_t log_inline_limit = 4096;
};

// JSON over HTTP: POST {base}/v1/{stage}, GET {base}/health.
// Retries connection failures and 5xx responses with exponential backoff
// (bounded by max_backoff); throws Unreachable once the attempts are spent,
// BadResponse on 4xx or an unusable body, Timeout when a read times out.
// Thread-safe: each call opens its own connection.
class RemoteClient {
public:
    explicit RemoteClient(RemoteConfig cfg);

    Json post(std::string_view stage, const Json& body, const std::string& backend_id, PayloadLog* log) const;
    Health health() const;
    const RemoteConfig& config() const noexcept { return cfg_; }

private:
    RemoteConfig cfg_;
    std::string host_;
    std::string prefix_;
};

// All six adapters talking to one endpoint.
BackendSuite remote_suite(const RemoteConfig& cfg);

std::shared_ptr<const Planner> remote_planner(const RemoteConfig& cfg);
std::shared_ptr<const BackgroundGenerator> remote_background(const RemoteConfig& cfg);
std::shared_ptr<const ObjectGenerator> remote_object(const RemoteConfig& cfg);
std::shared_ptr<const Typographer> remote_typographer(const RemoteConfig& cfg);
std::shared_ptr<const Reflector> remote_reflector(const RemoteConfig& cfg);
std::shared_ptr<const QualityJudge> remote_judge(const RemoteConfig& cfg);

}  // namespace coleforge::pipeline
