#pragma once

#include <string>

#include "coleforge/editor/store.hpp"
#include "coleforge/pipeline/pipeline.hpp"

namespace httplib {
class Server;
}

namespace coleforge::editor {

inline constexpr int kApiVersion = 1;

struct ServiceConfig {
    std::string cors_origin = "*";
    pipeline::PipelineConfig pipeline;  // seed is overridden per request when given
    int reflect_iters = 0;
};

// HTTP JSON API over a DesignStore:
//   GET  /health
//   GET  /codec                               codec table (attribute ranges and bins)
//   GET  /designs                             summaries
//   POST /designs                             {"category", "intention", "seed"?} -> runs the pipeline
//   GET  /designs/{id}                        {"id", "version", "bundle"}
//   POST /designs/{id}/edits                  {"version", "op"} -> {"id", "version", "bundle"}
//   GET  /designs/{id}/export?format=svg|png
// Errors are {"error": kind, "message", ...} with 400, 404, 409, 422 or 502.
class EditorService {
public:
    EditorService(DesignStore& store, pipeline::BackendSuite suite, ServiceConfig cfg = {});

    void bind(httplib::Server& server);

private:
    DesignStore& store_;
    pipeline::BackendSuite suite_;
    ServiceConfig cfg_;
};

}  // namespace coleforge::editor
