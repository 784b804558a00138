#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bipan/model.hpp"
#include "bipan/plan.hpp"

namespace bipan {

enum class Health { Ok, Degraded, Broken, Unknown };

std::string_view to_string(Health health);
/// Case-insensitive ("broken", "Broken").
std::optional<Health> parse_health(std::string_view name);

/// ISO-8601 UTC timestamp, `YYYY-MM-DDTHH:MM:SS[.fraction]Z`.
class Timestamp {
 public:
  /// Throws Error("invalid-timestamp").
  explicit Timestamp(std::string text);

  const std::string& str() const noexcept { return text_; }

  friend bool operator==(const Timestamp& a, const Timestamp& b) { return a.key() == b.key(); }
  friend auto operator<=>(const Timestamp& a, const Timestamp& b) { return a.key() <=> b.key(); }

 private:
  std::string key() const;
  std::string text_;
};

struct Event {
  std::string timestamp;
  std::string kind;
  std::map<std::string, std::string> payload;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Per-serial twin of one physical product.
struct PdtInstance {
  std::string instance_id;
  std::string model_id;
  std::string model_digest;
  std::map<NodeId, Health> health;
  std::vector<Event> events;

  std::set<NodeId> broken() const;

  friend bool operator==(const PdtInstance&, const PdtInstance&) = default;
};

/// Every replaceable product (not Stage, not Final) starts as Unknown.
PdtInstance create_instance(const std::string& instance_id, const BiPanModel& model);

/// Errors: unknown-component, invalid-timestamp, time-regression.
PdtInstance set_health(PdtInstance pdt, const NodeId& component, Health health, const std::string& timestamp);

/// Throws Error("digest-mismatch") unless `pdt` was created from `model`.
void check_binding(const PdtInstance& pdt, const BiPanModel& model);

struct RepairOutcome {
  Plan plan;
  PdtInstance pdt;
};

/// repair_plan over every Broken component, recorded as a "plan-created"
/// event. Without `timestamp` the event reuses the latest logged time.
///
/// Errors: digest-mismatch, nothing-broken, missing-timestamp, plus
/// whatever repair_plan raises.
RepairOutcome plan_repair_for(PdtInstance pdt, const BiPanModel& model, const std::map<NodeId, NodeId>& replacements,
                              const SkillInversion& inversion = SkillInversion::defaults(),
                              const std::optional<std::string>& timestamp = std::nullopt);

}  // namespace bipan
