#include "bipan/exec.hpp"

#include <algorithm>

#include "bipan/digest.hpp"
#include "bipan/validate.hpp"

namespace bipan {

namespace {

std::vector<NodeId> sorted(std::vector<NodeId> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<NodeId> inputs_under(const BiPanModel& model, const NodeId& process, const ExecState& state) {
  std::vector<NodeId> out;
  for (const auto& input : model.inputs_of(process)) {
    auto it = state.substitutions.find(input);
    out.push_back(it == state.substitutions.end() ? input : it->second);
  }
  return sorted(std::move(out));
}

void expect_lists(const PlanStep& step, const std::vector<NodeId>& consumed, const std::vector<NodeId>& produced) {
  if (sorted(step.consumed) != consumed || sorted(step.produced) != produced) {
    throw ExecError("step-mismatch", std::string(to_string(step.direction)) + " " + step.process.str() +
                                         " expects consumed [" + join(consumed) + "] produced [" + join(produced) +
                                         "]");
  }
}

void require_present(const ExecState& state, const std::vector<NodeId>& ids) {
  std::vector<NodeId> missing;
  for (const auto& id : ids) {
    if (!state.present.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) throw ExecError("missing-input", join(missing), missing);
}

ExecState transfer(const ExecState& state, const std::vector<NodeId>& consumed, const std::vector<NodeId>& produced) {
  require_present(state, consumed);
  ExecState next = state;
  for (const auto& id : consumed) next.present.erase(id);
  std::vector<NodeId> clashes;
  for (const auto& id : produced) {
    if (!next.present.insert(id).second) clashes.push_back(id);
  }
  if (!clashes.empty()) throw ExecError("double-produce", join(clashes), clashes);
  return next;
}

}  // namespace

ExecState initial_inventory(const BiPanModel& model) {
  require_valid(model);
  ExecState state;
  for (const auto& product : model.data().products) {
    if (model.producers_of(product.id).empty()) state.present.insert(product.id);
  }
  return state;
}

ExecState final_inventory(const BiPanModel& model, const Plan& plan) {
  require_valid(model);
  ExecState state;
  state.present.insert(final_product(model));
  for (const auto& step : plan.steps) {
    if (step.direction == Direction::Swap && step.swap_replacement) state.present.insert(*step.swap_replacement);
  }
  return state;
}

ExecState declared_start(const BiPanModel& model, const Plan& plan) {
  return plan.kind == PlanKind::Assembly ? initial_inventory(model) : final_inventory(model, plan);
}

ExecState apply_step(const ExecState& state, const PlanStep& step, const BiPanModel& model) {
  if (model.find_process(step.process) == nullptr) throw ExecError("unknown-process", step.process.str());
  auto outputs = model.outputs_of(step.process);
  if (outputs.size() != 1) {
    throw ExecError("invalid-model", step.process.str() + " does not have exactly one output");
  }
  const NodeId& output = outputs.front();

  switch (step.direction) {
    case Direction::Forward: {
      auto inputs = inputs_under(model, step.process, state);
      expect_lists(step, inputs, {output});
      return transfer(state, inputs, {output});
    }
    case Direction::Reverse: {
      auto inputs = inputs_under(model, step.process, state);
      expect_lists(step, {output}, inputs);
      return transfer(state, {output}, inputs);
    }
    case Direction::Swap: {
      if (!step.swap_target || !step.swap_replacement) {
        throw ExecError("invalid-swap", "swap at " + step.process.str() + " lacks target or replacement");
      }
      const auto& target = *step.swap_target;
      const auto& replacement = *step.swap_replacement;
      auto inputs = model.inputs_of(step.process);
      if (!std::binary_search(inputs.begin(), inputs.end(), target)) {
        throw ExecError("invalid-swap", target.str() + " is not an input of " + step.process.str());
      }
      if (state.substitutions.count(target)) {
        throw ExecError("invalid-swap", target.str() + " was already replaced");
      }
      if (model.contains(replacement)) {
        throw ExecError("invalid-swap", "replacement " + replacement.str() + " is a model node");
      }
      for (const auto& [old_id, new_id] : state.substitutions) {
        if (new_id == replacement) throw ExecError("invalid-swap", "replacement " + replacement.str() + " reused");
      }
      expect_lists(step, {replacement}, {target});

      std::vector<NodeId> needed{output, replacement};
      require_present(state, sorted(needed));
      ExecState next = transfer(state, {replacement}, {target});
      next.substitutions[target] = replacement;
      return next;
    }
  }
  throw ExecError("invalid-step", "unknown direction");
}

Trace run(const Plan& plan, const ExecState& start, const BiPanModel& model) {
  auto digest = model_digest(model);
  if (plan.model_digest != digest) {
    throw ExecError("digest-mismatch", "plan was extracted from " + plan.model_digest + ", model is " + digest);
  }
  Trace trace;
  trace.reserve(plan.steps.size());
  ExecState state = start;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    try {
      state = apply_step(state, plan.steps[i], model);
    } catch (ExecError& e) {
      e.set_step_index(i);
      throw;
    }
    trace.push_back({i, state});
  }
  return trace;
}

}  // namespace bipan
