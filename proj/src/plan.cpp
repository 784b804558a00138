#include "bipan/plan.hpp"

#include <algorithm>
#include <queue>

#include "bipan/digest.hpp"
#include "bipan/error.hpp"
#include "bipan/validate.hpp"

namespace bipan {

namespace {

constexpr std::string_view kManipulation = "manipulation";

Plan empty_plan(const BiPanModel& model, PlanKind kind) {
  Plan plan;
  plan.model_id = model.id();
  plan.model_digest = model_digest(model);
  plan.kind = kind;
  return plan;
}

NodeId substituted(const NodeId& id, const std::map<NodeId, NodeId>& substitutions) {
  auto it = substitutions.find(id);
  return it == substitutions.end() ? id : it->second;
}

std::vector<NodeId> effective_inputs(const BiPanModel& model, const NodeId& process,
                                     const std::map<NodeId, NodeId>& substitutions) {
  std::vector<NodeId> out;
  for (const auto& input : model.inputs_of(process)) out.push_back(substituted(input, substitutions));
  std::sort(out.begin(), out.end());
  return out;
}

PlanStep forward_step(const BiPanModel& model, const NodeId& process,
                      const std::map<NodeId, NodeId>& substitutions = {}) {
  PlanStep step;
  step.process = process;
  step.direction = Direction::Forward;
  step.consumed = effective_inputs(model, process, substitutions);
  step.produced = {output_of(model, process)};
  step.required_skills = model.skill_labels_of(process);
  return step;
}

PlanStep reverse_step(const BiPanModel& model, const NodeId& process, const SkillInversion& inversion,
                      const std::map<NodeId, NodeId>& substitutions = {}) {
  PlanStep step;
  step.process = process;
  step.direction = Direction::Reverse;
  step.consumed = {output_of(model, process)};
  step.produced = effective_inputs(model, process, substitutions);
  step.required_skills = inversion.apply(model.skill_labels_of(process));
  return step;
}

// Skill ids needed to take `component` out of the output of `process`: the
// skills of the fasteners securing it plus manipulation when known, else
// every skill of the process.
std::vector<NodeId> swap_scope(const BiPanModel& model, const NodeId& process, const NodeId& component) {
  auto process_skills = model.skills_of(process);
  std::vector<NodeId> all(process_skills.begin(), process_skills.end());
  auto inputs = model.inputs_of(process);

  std::set<NodeId> scope;
  bool covered = false;
  for (const auto& link : model.data().fastens) {
    if (!std::binary_search(inputs.begin(), inputs.end(), link.fastener)) continue;
    if (!std::binary_search(link.secures.begin(), link.secures.end(), component)) continue;
    covered = true;
    if (link.skills.empty()) return all;
    scope.insert(link.skills.begin(), link.skills.end());
  }
  if (!covered) return all;
  for (const auto& skill : all) {
    if (model.find_skill(skill)->label == kManipulation) scope.insert(skill);
  }
  return {scope.begin(), scope.end()};
}

PlanStep swap_step(const BiPanModel& model, const NodeId& process, const NodeId& component,
                   const NodeId& replacement, const SkillInversion& inversion) {
  PlanStep step;
  step.process = process;
  step.direction = Direction::Swap;
  step.consumed = {replacement};
  step.produced = {component};
  std::set<std::string> skills;
  for (const auto& skill : swap_scope(model, process, component)) {
    const auto& label = model.find_skill(skill)->label;
    skills.insert(label);
    skills.insert(inversion.apply(label));
  }
  step.required_skills.assign(skills.begin(), skills.end());
  step.swap_target = component;
  step.swap_replacement = replacement;
  return step;
}

// Kahn's algorithm over the process dependency graph, smallest id first.
std::vector<NodeId> assembly_order(const BiPanModel& model) {
  std::map<NodeId, std::size_t> pending;
  std::map<NodeId, std::vector<NodeId>> dependants;
  for (const auto& process : model.data().processes) {
    pending[process.id];
    for (const auto& input : model.inputs_of(process.id)) {
      for (const auto& producer : model.producers_of(input)) {
        ++pending[process.id];
        dependants[producer].push_back(process.id);
      }
    }
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (const auto& [process, count] : pending) {
    if (count == 0) ready.push(process);
  }
  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId next = ready.top();
    ready.pop();
    order.push_back(next);
    for (const auto& dependant : dependants[next]) {
      if (--pending[dependant] == 0) ready.push(dependant);
    }
  }
  if (order.size() != pending.size()) throw Error("invalid-model", "process graph has a cycle");
  return order;
}

}  // namespace

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::Forward: return "Forward";
    case Direction::Reverse: return "Reverse";
    case Direction::Swap: return "Swap";
  }
  return "?";
}

std::optional<Direction> parse_direction(std::string_view name) {
  for (auto d : {Direction::Forward, Direction::Reverse, Direction::Swap}) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

std::string_view to_string(PlanKind kind) {
  switch (kind) {
    case PlanKind::Assembly: return "Assembly";
    case PlanKind::Disassembly: return "Disassembly";
    case PlanKind::Repair: return "Repair";
  }
  return "?";
}

std::optional<PlanKind> parse_plan_kind(std::string_view name) {
  for (auto k : {PlanKind::Assembly, PlanKind::Disassembly, PlanKind::Repair}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(DisassemblyMode mode) { return mode == DisassemblyMode::Expose ? "expose" : "extract"; }

std::optional<DisassemblyMode> parse_disassembly_mode(std::string_view name) {
  if (name == "expose") return DisassemblyMode::Expose;
  if (name == "extract") return DisassemblyMode::Extract;
  return std::nullopt;
}

SkillInversion SkillInversion::defaults() {
  return SkillInversion({{"screwing", "unscrewing"},
                         {"connecting-cables", "disconnecting-cables"},
                         {std::string(kManipulation), std::string(kManipulation)}});
}

SkillInversion SkillInversion::identity() { return SkillInversion(); }

std::string SkillInversion::apply(const std::string& label) const {
  auto it = mapping_.find(label);
  return it == mapping_.end() ? label : it->second;
}

std::vector<std::string> SkillInversion::apply(const std::vector<std::string>& labels) const {
  std::set<std::string> out;
  for (const auto& label : labels) out.insert(apply(label));
  return {out.begin(), out.end()};
}

SkillInversion SkillInversion::with_inverse_pairs() const {
  auto extended = mapping_;
  for (const auto& [from, to] : mapping_) extended.emplace(to, from);
  return SkillInversion(std::move(extended));
}

ResourceRegistry::ResourceRegistry(std::vector<Resource> resources) : resources_(std::move(resources)) {
  std::sort(resources_.begin(), resources_.end(), [](const Resource& a, const Resource& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < resources_.size(); ++i) {
    if (resources_[i].id == resources_[i - 1].id) throw Error("duplicate-id", "resource " + resources_[i].id);
  }
}

std::set<std::string> ResourceRegistry::all_skills() const {
  std::set<std::string> out;
  for (const auto& r : resources_) out.insert(r.skills.begin(), r.skills.end());
  return out;
}

Plan assembly_recipe(const BiPanModel& model) {
  require_valid(model);
  Plan plan = empty_plan(model, PlanKind::Assembly);
  for (const auto& process : assembly_order(model)) plan.steps.push_back(forward_step(model, process));
  return plan;
}

Plan full_disassembly(const BiPanModel& model, const SkillInversion& inversion) {
  require_valid(model);
  Plan plan = empty_plan(model, PlanKind::Disassembly);
  auto order = assembly_order(model);
  for (auto it = order.rbegin(); it != order.rend(); ++it) plan.steps.push_back(reverse_step(model, *it, inversion));
  return plan;
}

Plan disassembly_to(const BiPanModel& model, const NodeId& target, DisassemblyMode mode,
                    const SkillInversion& inversion) {
  require_valid(model);
  if (model.product(target).kind == ProductKind::Final) {
    throw Error("target-is-final", target.str() + " is the Final product");
  }
  auto chain = spine(model, target);
  Plan plan = empty_plan(model, PlanKind::Disassembly);
  const std::size_t stop = mode == DisassemblyMode::Extract ? 0 : 1;
  for (std::size_t i = chain.size(); i > stop; --i) plan.steps.push_back(reverse_step(model, chain[i - 1], inversion));
  return plan;
}

Plan repair_plan(const BiPanModel& model, const std::set<NodeId>& broken,
                 const std::map<NodeId, NodeId>& replacements, const SkillInversion& inversion) {
  require_valid(model);

  std::set<NodeId> used;
  for (const auto& component : broken) {
    const auto& node = model.product(component);
    if (node.kind == ProductKind::Stage || node.kind == ProductKind::Final) {
      throw Error("broken-kind-not-replaceable",
                  component.str() + " is a " + std::string(to_string(node.kind)) + " product");
    }
    auto it = replacements.find(component);
    if (it == replacements.end()) throw Error("missing-replacement", component.str());
    const auto& replacement = it->second;
    if (model.contains(replacement) || !used.insert(replacement).second) {
      throw Error("invalid-replacement", replacement.str() + " is not a fresh id");
    }
  }
  for (const auto& [component, replacement] : replacements) {
    if (!broken.count(component)) throw Error("invalid-replacement", component.str() + " is not broken");
  }

  Plan plan = empty_plan(model, PlanKind::Repair);
  if (broken.empty()) return plan;

  // Swap sites and every process that must be opened to reach them.
  std::map<NodeId, std::vector<NodeId>> sites;
  std::set<NodeId> opened;
  for (const auto& component : broken) {
    auto chain = spine(model, component);
    sites[chain.front()].push_back(component);
    opened.insert(chain.begin() + 1, chain.end());
  }

  std::map<NodeId, NodeId> substitutions;
  std::vector<NodeId> reversed;
  auto descend = [&](auto&& self, const NodeId& process) -> void {
    if (auto site = sites.find(process); site != sites.end()) {
      for (const auto& component : site->second) {
        const auto& replacement = replacements.at(component);
        plan.steps.push_back(swap_step(model, process, component, replacement, inversion));
        substitutions[component] = replacement;
      }
    }
    if (!opened.count(process)) return;
    plan.steps.push_back(reverse_step(model, process, inversion, substitutions));
    reversed.push_back(process);
    std::set<NodeId> children;
    for (const auto& input : model.inputs_of(process)) {
      for (const auto& producer : model.producers_of(input)) children.insert(producer);
    }
    for (const auto& child : children) {
      if (opened.count(child) || sites.count(child)) self(self, child);
    }
  };
  descend(descend, *producer_of(model, final_product(model)));

  for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) {
    plan.steps.push_back(forward_step(model, *it, substitutions));
  }
  return plan;
}

FeasibilityReport check_feasibility(const Plan& plan, const ResourceRegistry& registry) {
  const auto available = registry.all_skills();
  FeasibilityReport report;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    StepShortfall shortfall{i, {}};
    for (const auto& skill : plan.steps[i].required_skills) {
      if (!available.count(skill)) shortfall.missing_skills.push_back(skill);
    }
    std::sort(shortfall.missing_skills.begin(), shortfall.missing_skills.end());
    if (!shortfall.missing_skills.empty()) report.feasible = false;
    report.per_step.push_back(std::move(shortfall));
  }
  return report;
}

}  // namespace bipan
