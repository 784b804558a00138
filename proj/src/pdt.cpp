#include "bipan/pdt.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <regex>

#include "bipan/digest.hpp"
#include "bipan/error.hpp"
#include "bipan/validate.hpp"

namespace bipan {

std::string_view to_string(Health health) {
  switch (health) {
    case Health::Ok: return "Ok";
    case Health::Degraded: return "Degraded";
    case Health::Broken: return "Broken";
    case Health::Unknown: return "Unknown";
  }
  return "?";
}

std::optional<Health> parse_health(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
  };
  for (auto h : {Health::Ok, Health::Degraded, Health::Broken, Health::Unknown}) {
    if (lower(to_string(h)) == lower(name)) return h;
  }
  return std::nullopt;
}

Timestamp::Timestamp(std::string text) : text_(std::move(text)) {
  static const std::regex pattern(R"(^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d{1,9})?Z$)");
  std::smatch m;
  if (!std::regex_match(text_, m, pattern)) {
    throw Error("invalid-timestamp", "'" + text_ + "' is not YYYY-MM-DDTHH:MM:SS[.fff]Z");
  }
  auto num = [&](int group) { return std::stoi(m[group].str()); };
  std::chrono::year_month_day date{std::chrono::year{num(1)}, std::chrono::month{static_cast<unsigned>(num(2))},
                                   std::chrono::day{static_cast<unsigned>(num(3))}};
  if (!date.ok() || num(4) > 23 || num(5) > 59 || num(6) > 59) {
    throw Error("invalid-timestamp", "'" + text_ + "' is out of range");
  }
}

// Fixed-width form that orders lexicographically.
std::string Timestamp::key() const {
  std::string fraction;
  if (text_.size() > 20) fraction = text_.substr(20, text_.size() - 21);
  fraction.resize(9, '0');
  return text_.substr(0, 19) + fraction;
}

std::set<NodeId> PdtInstance::broken() const {
  std::set<NodeId> out;
  for (const auto& [id, h] : health) {
    if (h == Health::Broken) out.insert(id);
  }
  return out;
}

PdtInstance create_instance(const std::string& instance_id, const BiPanModel& model) {
  if (instance_id.empty()) throw Error("empty-id", "instance id must not be empty");
  require_valid(model);
  PdtInstance pdt;
  pdt.instance_id = instance_id;
  pdt.model_id = model.id();
  pdt.model_digest = model_digest(model);
  for (const auto& product : model.data().products) {
    if (product.kind != ProductKind::Stage && product.kind != ProductKind::Final) {
      pdt.health[product.id] = Health::Unknown;
    }
  }
  return pdt;
}

namespace {

void append_event(PdtInstance& pdt, Event event) {
  Timestamp at(event.timestamp);
  if (!pdt.events.empty() && at < Timestamp(pdt.events.back().timestamp)) {
    throw Error("time-regression", event.timestamp + " is before " + pdt.events.back().timestamp);
  }
  pdt.events.push_back(std::move(event));
}

}  // namespace

PdtInstance set_health(PdtInstance pdt, const NodeId& component, Health health, const std::string& timestamp) {
  auto it = pdt.health.find(component);
  if (it == pdt.health.end()) throw Error("unknown-component", component.str());
  Event event{timestamp,
              "health-update",
              {{"component", component.str()},
               {"health", std::string(to_string(health))},
               {"previous", std::string(to_string(it->second))}}};
  append_event(pdt, std::move(event));
  it->second = health;
  return pdt;
}

void check_binding(const PdtInstance& pdt, const BiPanModel& model) {
  auto digest = model_digest(model);
  if (pdt.model_digest != digest) {
    throw Error("digest-mismatch", "instance " + pdt.instance_id + " is bound to " + pdt.model_digest +
                                       ", model is " + digest);
  }
}

RepairOutcome plan_repair_for(PdtInstance pdt, const BiPanModel& model, const std::map<NodeId, NodeId>& replacements,
                              const SkillInversion& inversion, const std::optional<std::string>& timestamp) {
  check_binding(pdt, model);
  auto broken = pdt.broken();
  if (broken.empty()) throw Error("nothing-broken", "instance " + pdt.instance_id + " has no Broken component");
  std::string at;
  if (timestamp) {
    at = *timestamp;
  } else if (!pdt.events.empty()) {
    at = pdt.events.back().timestamp;
  } else {
    throw Error("missing-timestamp", "no --at given and the event log is empty");
  }

  Plan plan = repair_plan(model, broken, replacements, inversion);

  std::string replaced;
  for (const auto& [old_id, new_id] : replacements) {
    if (!replaced.empty()) replaced += ",";
    replaced += old_id.str() + "=" + new_id.str();
  }
  append_event(pdt, Event{at,
                          "plan-created",
                          {{"broken", join(std::vector<NodeId>(broken.begin(), broken.end()))},
                           {"replacements", replaced},
                           {"steps", std::to_string(plan.steps.size())}}});
  return {std::move(plan), std::move(pdt)};
}

}  // namespace bipan
