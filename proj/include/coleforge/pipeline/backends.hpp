#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coleforge/codec/typography_codec.hpp"
#include "coleforge/compositor/blend.hpp"
#include "coleforge/metrics/judge.hpp"
#include "coleforge/schema/design_plan.hpp"
#include "coleforge/typeset/layer_stack.hpp"

namespace coleforge::pipeline {

using Json = nlohmann::ordered_json;
using codec::TypographySpec;
using compositor::Raster;
using compositor::SevenChannelFrame;
using metrics::QualityReport;
using schema::DesignIntent;
using schema::DesignPlan;
using typeset::Canvas;

enum class BackendKind { kMock, kRemote };
std::string_view backend_kind_name(BackendKind k) noexcept;

struct Health {
    bool ok = true;
    std::string detail;
};

// Request/response bodies exchanged with a backend, in call order.
// Shared by the stages of one run; safe to append from several threads.
class PayloadLog {
public:
    void record(std::string_view stage, std::string_view backend_id, std::string_view direction, Json body);
    std::vector<Json> entries() const;

private:
    mutable std::mutex mu_;
    std::vector<Json> entries_;
};

struct StageContext {
    std::uint64_t seed = 0;
    Canvas canvas;
    PayloadLog* log = nullptr;  // may be null
};

// Adapters are shared between concurrently running pipelines; every
// implementation must be safe to call from several threads at once.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string id() const = 0;
    virtual BackendKind kind() const = 0;
    virtual Health health() const { return {}; }
};

class Planner : public Backend {
public:
    virtual DesignPlan plan(const DesignIntent& intent, const StageContext& ctx) const = 0;
};

class BackgroundGenerator : public Backend {
public:
    // RGB raster of canvas size.
    virtual Raster generate(const DesignPlan& plan, const StageContext& ctx) const = 0;
};

class ObjectGenerator : public Backend {
public:
    virtual SevenChannelFrame generate(const DesignPlan& plan, const Raster& background,
                                       const StageContext& ctx) const = 0;
};

class Typographer : public Backend {
public:
    // `image` is the composed background (+ object) the text goes on.
    virtual std::vector<TypographySpec> typeset(const DesignPlan& plan, const Raster& image,
                                                const StageContext& ctx) const = 0;
};

struct JudgeRequest {
    const DesignIntent& intent;
    const DesignPlan& plan;
    const std::vector<TypographySpec>& blocks;
    const Raster& preview;
};

class QualityJudge : public Backend {
public:
    virtual QualityReport judge(const JudgeRequest& request, const StageContext& ctx) const = 0;
};

// A proposed change to one block's box. Absolute values replace the field;
// relative values are added to it. Unset fields are left alone.
struct TypographyDelta {
    enum class Mode { kAbsolute, kRelative };

    std::size_t block = 0;
    Mode mode = Mode::kAbsolute;
    std::optional<double> left;
    std::optional<double> top;
    std::optional<double> width;
    std::optional<double> height;

    bool operator==(const TypographyDelta&) const = default;
};

Json delta_to_json(const TypographyDelta& d);
TypographyDelta delta_from_json(const Json& j);

// Throws InvalidTypography when the result breaks a block invariant and
// Error when a delta names a block that does not exist.
std::vector<TypographySpec> apply_deltas(std::vector<TypographySpec> blocks,
                                         const std::vector<TypographyDelta>& deltas);

class Reflector : public Backend {
public:
    virtual std::vector<TypographyDelta> propose(const DesignPlan& plan, const std::vector<TypographySpec>& blocks,
                                                 const Raster& preview, const QualityReport& report,
                                                 const StageContext& ctx) const = 0;
};

struct BackendSuite {
    std::shared_ptr<const Planner> planner;
    std::shared_ptr<const BackgroundGenerator> background_gen;
    std::shared_ptr<const ObjectGenerator> object_gen;
    std::shared_ptr<const Typographer> typographer;
    std::shared_ptr<const Reflector> reflector;
    std::shared_ptr<const QualityJudge> quality_judge;

    // Empty when all six adapters are present with non-empty ids.
    Findings check_complete() const;
    // stage name -> backend id, for the adapters that are present.
    Json backend_ids() const;
};

}  // namespace coleforge::pipeline
