#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bipan/model.hpp"

namespace bipan {

enum class Direction { Forward, Reverse, Swap };

std::string_view to_string(Direction direction);
std::optional<Direction> parse_direction(std::string_view name);

/// Which start inventory a plan is meant to be replayed from. Assembly plans
/// start from the free leaf products; the others from the finished product
/// plus any replacement parts.
enum class PlanKind { Assembly, Disassembly, Repair };

std::string_view to_string(PlanKind kind);
std::optional<PlanKind> parse_plan_kind(std::string_view name);

/// Maps assembly-direction skill labels to their disassembly counterparts.
/// Unmapped labels invert to themselves.
class SkillInversion {
 public:
  /// screwing -> unscrewing, connecting-cables -> disconnecting-cables,
  /// manipulation -> manipulation.
  static SkillInversion defaults();
  static SkillInversion identity();

  SkillInversion() = default;
  explicit SkillInversion(std::map<std::string, std::string> mapping) : mapping_(std::move(mapping)) {}

  std::string apply(const std::string& label) const;
  /// Element-wise, sorted and de-duplicated.
  std::vector<std::string> apply(const std::vector<std::string>& labels) const;

  /// The mapping extended with every reverse pair (unscrewing -> screwing),
  /// which makes it an involution. Forward pairs win on conflicts.
  SkillInversion with_inverse_pairs() const;

  const std::map<std::string, std::string>& mapping() const noexcept { return mapping_; }

 private:
  std::map<std::string, std::string> mapping_;
};

struct PlanStep {
  NodeId process;
  Direction direction = Direction::Forward;
  std::vector<NodeId> consumed;
  std::vector<NodeId> produced;
  std::vector<std::string> required_skills;
  /// Set iff direction == Swap: the broken component taken out and the part
  /// put in its place.
  std::optional<NodeId> swap_target;
  std::optional<NodeId> swap_replacement;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::string model_id;
  std::string model_digest;
  PlanKind kind = PlanKind::Assembly;
  std::vector<PlanStep> steps;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct Resource {
  std::string id;
  std::set<std::string> skills;

  friend bool operator==(const Resource&, const Resource&) = default;
};

class ResourceRegistry {
 public:
  ResourceRegistry() = default;
  /// Throws Error("duplicate-id") on repeated resource ids.
  explicit ResourceRegistry(std::vector<Resource> resources);

  const std::vector<Resource>& resources() const noexcept { return resources_; }
  std::set<std::string> all_skills() const;

 private:
  std::vector<Resource> resources_;
};

struct StepShortfall {
  std::size_t step_index = 0;
  std::vector<std::string> missing_skills;

  friend bool operator==(const StepShortfall&, const StepShortfall&) = default;
};

struct FeasibilityReport {
  bool feasible = true;
  /// One entry per plan step, in plan order.
  std::vector<StepShortfall> per_step;
};

enum class DisassemblyMode { Expose, Extract };

std::string_view to_string(DisassemblyMode mode);
std::optional<DisassemblyMode> parse_disassembly_mode(std::string_view name);

/// Every process Forward, in topological assembly order; ties broken by
/// ascending process id.
Plan assembly_recipe(const BiPanModel& model);

/// assembly_recipe reversed, every step Reverse, skills inverted.
Plan full_disassembly(const BiPanModel& model, const SkillInversion& inversion = SkillInversion::defaults());

/// Reverses the processes above `target` on its spine so that the stage
/// containing it is on top (Expose), and optionally the consuming process as
/// well so that `target` ends up free (Extract).
Plan disassembly_to(const BiPanModel& model, const NodeId& target, DisassemblyMode mode,
                    const SkillInversion& inversion = SkillInversion::defaults());

/// Replaces every component in `broken` with the part named in
/// `replacements` during one descend/ascend pass over the assembly tree.
///
/// Descending from the root, each process whose output has to be opened is
/// reversed; whenever the output of a process consuming a broken component is
/// the topmost present assembly, a Swap step exchanges the component in place.
/// The reversed processes are then re-applied Forward in LIFO order. Steps
/// after a swap consume or release the replacement instead of the broken id.
///
/// Errors: invalid-model, unknown-node, broken-kind-not-replaceable,
/// missing-replacement, invalid-replacement.
Plan repair_plan(const BiPanModel& model, const std::set<NodeId>& broken,
                 const std::map<NodeId, NodeId>& replacements,
                 const SkillInversion& inversion = SkillInversion::defaults());

FeasibilityReport check_feasibility(const Plan& plan, const ResourceRegistry& registry);

}  // namespace bipan
