#pragma once

#include <string>
#include <string_view>

#include "bipan/exec.hpp"
#include "bipan/model.hpp"
#include "bipan/pdt.hpp"
#include "bipan/plan.hpp"
#include "bipan/validate.hpp"

// Native JSON documents. Every save_* function emits the canonical form:
// sorted keys, two-space indentation, LF line endings, UTF-8, trailing
// newline. Optional fields are omitted when absent or empty.
//
// Load errors: parse-error (with line and column, or the JSON path of a
// malformed field), plus the reference errors raised by BiPanModel.

namespace bipan {

BiPanModel load_model(std::string_view bytes);
std::string save_model(const BiPanModel& model);

Plan load_plan(std::string_view bytes);
std::string save_plan(const Plan& plan);

PdtInstance load_pdt(std::string_view bytes);
std::string save_pdt(const PdtInstance& pdt);

/// `{"resources": [{"id": ..., "skills": [...]}]}`
ResourceRegistry load_registry(std::string_view bytes);

/// `{"mapping": {"screwing": "unscrewing", ...}}`
SkillInversion load_inversion(std::string_view bytes);

/// `{"inventory": [ids...]}`, optionally with `"substitutions"`.
ExecState load_inventory(std::string_view bytes);

std::string diagnostics_json(const Diagnostics& diagnostics);
std::string trace_json(const Trace& trace, const ExecState& start);
std::string feasibility_json(const FeasibilityReport& report, const Plan& plan);

}  // namespace bipan
