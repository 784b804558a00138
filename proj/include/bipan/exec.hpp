#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "bipan/error.hpp"
#include "bipan/model.hpp"
#include "bipan/plan.hpp"

namespace bipan {

/// Items that currently exist as free parts or topmost assemblies, plus the
/// broken -> replacement substitutions applied so far.
struct ExecState {
  std::set<NodeId> present;
  std::map<NodeId, NodeId> substitutions;

  friend bool operator==(const ExecState&, const ExecState&) = default;
};

struct TraceEntry {
  std::size_t step_index = 0;
  ExecState state;
};

using Trace = std::vector<TraceEntry>;

/// Failure raised while interpreting a step. `step_index` is set by run().
class ExecError : public Error {
 public:
  ExecError(std::string code, std::string detail, std::vector<NodeId> nodes = {})
      : Error(std::move(code), std::move(detail)), nodes_(std::move(nodes)) {}

  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  std::optional<std::size_t> step_index() const noexcept { return step_index_; }
  void set_step_index(std::size_t index) { step_index_ = index; }

 private:
  std::vector<NodeId> nodes_;
  std::optional<std::size_t> step_index_;
};

/// All products without a producer.
ExecState initial_inventory(const BiPanModel& model);

/// {Final product} plus the replacement parts the plan swaps in.
ExecState final_inventory(const BiPanModel& model, const Plan& plan);

/// The start state a plan of this kind is meant to be replayed from.
ExecState declared_start(const BiPanModel& model, const Plan& plan);

/// Applies one step. What a step consumes and produces is derived from the
/// model and the substitutions in `state`; the lists in `step` must agree
/// with that derivation (`step-mismatch` otherwise).
///
///   Forward  inputs present  -> replaced by the output
///   Reverse  output present  -> replaced by the inputs
///   Swap     output of the site and the replacement present
///            -> replacement leaves, broken part appears, substitution recorded
///
/// Errors: unknown-process, missing-input (lists absent ids), double-produce,
/// step-mismatch, invalid-swap.
ExecState apply_step(const ExecState& state, const PlanStep& step, const BiPanModel& model);

/// Folds apply_step over the plan. Throws ExecError("digest-mismatch") when
/// the plan was extracted from another model version; step failures carry
/// their index.
Trace run(const Plan& plan, const ExecState& start, const BiPanModel& model);

}  // namespace bipan
