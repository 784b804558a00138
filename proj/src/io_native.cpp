#include <cmath>
#include <limits>

#include "bipan/error.hpp"
#include "bipan/io.hpp"
#include "json.hpp"

namespace bipan {

using json = nlohmann::json;

namespace {

std::string canonical(const json& doc) { return doc.dump(2) + "\n"; }

json parse_document(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, bytes.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (bytes[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw Error("parse-error", "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
  }
}

[[noreturn]] void malformed(const std::string& path, const std::string& what) {
  throw Error("parse-error", path + ": " + what);
}

// Typed field access with JSON-path error messages.
class Fields {
 public:
  Fields(const json& object, std::string path, std::initializer_list<std::string_view> allowed)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) malformed(path_, "expected an object");
    for (const auto& [key, value] : object_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) malformed(path_, "unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return object_.contains(key); }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  const json& get(const std::string& key) const {
    if (!has(key)) malformed(path_, "missing key '" + key + "'");
    return object_.at(key);
  }

  std::string string(const std::string& key) const {
    const auto& value = get(key);
    if (!value.is_string()) malformed(at(key), "expected a string");
    return value.get<std::string>();
  }

  std::optional<std::string> optional_string(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return string(key);
  }

  NodeId id(const std::string& key) const { return make_id(get(key), at(key)); }

  std::vector<NodeId> ids(const std::string& key) const {
    std::vector<NodeId> out;
    if (!has(key)) return out;
    const auto& value = get(key);
    if (!value.is_array()) malformed(at(key), "expected an array");
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(make_id(value[i], at(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const auto& value = get(key);
    if (!value.is_array()) malformed(at(key), "expected an array");
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!value[i].is_string()) malformed(at(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(value[i].get<std::string>());
    }
    return out;
  }

  std::map<std::string, std::string> string_map(const std::string& key) const {
    std::map<std::string, std::string> out;
    if (!has(key)) return out;
    const auto& value = get(key);
    if (!value.is_object()) malformed(at(key), "expected an object");
    for (const auto& [k, v] : value.items()) {
      if (!v.is_string()) malformed(at(key) + "." + k, "expected a string");
      out[k] = v.get<std::string>();
    }
    return out;
  }

  const json& array(const std::string& key) const {
    static const json empty = json::array();
    if (!has(key)) return empty;
    const auto& value = get(key);
    if (!value.is_array()) malformed(at(key), "expected an array");
    return value;
  }

  static NodeId make_id(const json& value, const std::string& path) {
    if (!value.is_string()) malformed(path, "expected an id string");
    auto text = value.get<std::string>();
    if (!NodeId::is_valid(text)) malformed(path, "invalid id '" + text + "'");
    return NodeId(text);
  }

 private:
  const json& object_;
  std::string path_;
};

std::string item_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

json coordinate_to_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

double coordinate_from_json(const json& value, const std::string& path) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    auto text = value.get<std::string>();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
  }
  malformed(path, "expected a number");
}

json ids_to_json(std::span<const NodeId> ids) { return to_strings(ids); }

json string_map_to_json(const std::map<std::string, std::string>& values) {
  json out = json::object();
  for (const auto& [k, v] : values) out[k] = v;
  return out;
}

json state_to_json(const ExecState& state) {
  json out;
  out["present"] = ids_to_json(std::vector<NodeId>(state.present.begin(), state.present.end()));
  if (!state.substitutions.empty()) {
    json subs = json::object();
    for (const auto& [from, to] : state.substitutions) subs[from.str()] = to.str();
    out["substitutions"] = subs;
  }
  return out;
}

}  // namespace

BiPanModel load_model(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"id", "products", "processes", "skills", "flows", "skill_edges", "fastens"});
  ModelData data;
  data.id = top.string("id");

  const auto& products = top.array("products");
  for (std::size_t i = 0; i < products.size(); ++i) {
    const auto path = item_path(top.at("products"), i);
    Fields f(products[i], path, {"id", "label", "kind", "type_ref", "position", "attributes"});
    ProductNode node;
    node.id = f.id("id");
    node.label = f.string("label");
    auto kind = parse_product_kind(f.string("kind"));
    if (!kind) malformed(f.at("kind"), "unknown product kind '" + f.string("kind") + "'");
    node.kind = *kind;
    node.type_ref = f.optional_string("type_ref");
    if (f.has("position")) {
      Fields pos(f.get("position"), f.at("position"), {"x", "y", "z"});
      node.position = Position{coordinate_from_json(pos.get("x"), pos.at("x")),
                               coordinate_from_json(pos.get("y"), pos.at("y")),
                               coordinate_from_json(pos.get("z"), pos.at("z"))};
    }
    node.attributes = f.string_map("attributes");
    data.products.push_back(std::move(node));
  }

  const auto& processes = top.array("processes");
  for (std::size_t i = 0; i < processes.size(); ++i) {
    Fields f(processes[i], item_path(top.at("processes"), i), {"id", "label"});
    data.processes.push_back({f.id("id"), f.string("label")});
  }

  const auto& skills = top.array("skills");
  for (std::size_t i = 0; i < skills.size(); ++i) {
    Fields f(skills[i], item_path(top.at("skills"), i), {"id", "label"});
    data.skills.push_back({f.id("id"), f.string("label")});
  }

  const auto& flows = top.array("flows");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    Fields f(flows[i], item_path(top.at("flows"), i), {"product", "process", "role"});
    auto role = parse_flow_role(f.string("role"));
    if (!role) malformed(f.at("role"), "expected Input or Output");
    data.flows.push_back({f.id("product"), f.id("process"), *role});
  }

  const auto& skill_edges = top.array("skill_edges");
  for (std::size_t i = 0; i < skill_edges.size(); ++i) {
    Fields f(skill_edges[i], item_path(top.at("skill_edges"), i), {"process", "skill"});
    data.skill_edges.push_back({f.id("process"), f.id("skill")});
  }

  const auto& fastens = top.array("fastens");
  for (std::size_t i = 0; i < fastens.size(); ++i) {
    Fields f(fastens[i], item_path(top.at("fastens"), i), {"fastener", "secures", "skills"});
    data.fastens.push_back({f.id("fastener"), f.ids("secures"), f.ids("skills")});
  }

  return BiPanModel(std::move(data));
}

std::string save_model(const BiPanModel& model) {
  const auto& data = model.data();
  json doc;
  doc["id"] = data.id;

  doc["products"] = json::array();
  for (const auto& p : data.products) {
    json node;
    node["id"] = p.id.str();
    node["label"] = p.label;
    node["kind"] = std::string(to_string(p.kind));
    if (p.type_ref) node["type_ref"] = *p.type_ref;
    if (p.position) {
      node["position"] = {{"x", coordinate_to_json(p.position->x)},
                          {"y", coordinate_to_json(p.position->y)},
                          {"z", coordinate_to_json(p.position->z)}};
    }
    if (!p.attributes.empty()) node["attributes"] = string_map_to_json(p.attributes);
    doc["products"].push_back(std::move(node));
  }

  doc["processes"] = json::array();
  for (const auto& p : data.processes) doc["processes"].push_back({{"id", p.id.str()}, {"label", p.label}});

  doc["skills"] = json::array();
  for (const auto& s : data.skills) doc["skills"].push_back({{"id", s.id.str()}, {"label", s.label}});

  doc["flows"] = json::array();
  for (const auto& f : data.flows) {
    doc["flows"].push_back(
        {{"product", f.product.str()}, {"process", f.process.str()}, {"role", std::string(to_string(f.role))}});
  }

  doc["skill_edges"] = json::array();
  for (const auto& e : data.skill_edges) {
    doc["skill_edges"].push_back({{"process", e.process.str()}, {"skill", e.skill.str()}});
  }

  doc["fastens"] = json::array();
  for (const auto& link : data.fastens) {
    json item;
    item["fastener"] = link.fastener.str();
    item["secures"] = ids_to_json(link.secures);
    if (!link.skills.empty()) item["skills"] = ids_to_json(link.skills);
    doc["fastens"].push_back(std::move(item));
  }

  return canonical(doc);
}

Plan load_plan(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"model_id", "model_digest", "kind", "steps"});
  Plan plan;
  plan.model_id = top.string("model_id");
  plan.model_digest = top.string("model_digest");
  auto kind = parse_plan_kind(top.string("kind"));
  if (!kind) malformed(top.at("kind"), "expected Assembly, Disassembly or Repair");
  plan.kind = *kind;

  const auto& steps = top.array("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto path = item_path(top.at("steps"), i);
    Fields f(steps[i], path,
             {"process", "direction", "consumed", "produced", "required_skills", "swap_target", "swap_replacement"});
    PlanStep step;
    step.process = f.id("process");
    auto direction = parse_direction(f.string("direction"));
    if (!direction) malformed(f.at("direction"), "expected Forward, Reverse or Swap");
    step.direction = *direction;
    step.consumed = f.ids("consumed");
    step.produced = f.ids("produced");
    step.required_skills = f.strings("required_skills");
    if (f.has("swap_target")) step.swap_target = f.id("swap_target");
    if (f.has("swap_replacement")) step.swap_replacement = f.id("swap_replacement");
    if ((step.direction == Direction::Swap) != (step.swap_target && step.swap_replacement)) {
      malformed(path, "swap_target and swap_replacement are required exactly for Swap steps");
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

std::string save_plan(const Plan& plan) {
  json doc;
  doc["model_id"] = plan.model_id;
  doc["model_digest"] = plan.model_digest;
  doc["kind"] = std::string(to_string(plan.kind));
  doc["steps"] = json::array();
  for (const auto& step : plan.steps) {
    json item;
    item["process"] = step.process.str();
    item["direction"] = std::string(to_string(step.direction));
    item["consumed"] = ids_to_json(step.consumed);
    item["produced"] = ids_to_json(step.produced);
    item["required_skills"] = step.required_skills;
    if (step.swap_target) item["swap_target"] = step.swap_target->str();
    if (step.swap_replacement) item["swap_replacement"] = step.swap_replacement->str();
    doc["steps"].push_back(std::move(item));
  }
  return canonical(doc);
}

PdtInstance load_pdt(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"instance_id", "model_id", "model_digest", "health", "events"});
  PdtInstance pdt;
  pdt.instance_id = top.string("instance_id");
  if (pdt.instance_id.empty()) malformed(top.at("instance_id"), "must not be empty");
  pdt.model_id = top.string("model_id");
  pdt.model_digest = top.string("model_digest");
  for (const auto& [component, value] : top.string_map("health")) {
    if (!NodeId::is_valid(component)) malformed(top.at("health"), "invalid id '" + component + "'");
    auto health = parse_health(value);
    if (!health) malformed(top.at("health") + "." + component, "unknown health '" + value + "'");
    pdt.health[NodeId(component)] = *health;
  }
  const auto& events = top.array("events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    Fields f(events[i], item_path(top.at("events"), i), {"timestamp", "kind", "payload"});
    Event event{f.string("timestamp"), f.string("kind"), f.string_map("payload")};
    Timestamp at(event.timestamp);
    if (!pdt.events.empty() && at < Timestamp(pdt.events.back().timestamp)) {
      throw Error("time-regression", f.at("timestamp") + ": " + event.timestamp + " precedes the previous event");
    }
    pdt.events.push_back(std::move(event));
  }
  return pdt;
}

std::string save_pdt(const PdtInstance& pdt) {
  json doc;
  doc["instance_id"] = pdt.instance_id;
  doc["model_id"] = pdt.model_id;
  doc["model_digest"] = pdt.model_digest;
  doc["health"] = json::object();
  for (const auto& [component, health] : pdt.health) doc["health"][component.str()] = std::string(to_string(health));
  doc["events"] = json::array();
  for (const auto& event : pdt.events) {
    json item;
    item["timestamp"] = event.timestamp;
    item["kind"] = event.kind;
    if (!event.payload.empty()) item["payload"] = string_map_to_json(event.payload);
    doc["events"].push_back(std::move(item));
  }
  return canonical(doc);
}

ResourceRegistry load_registry(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"resources"});
  std::vector<Resource> resources;
  const auto& items = top.array("resources");
  for (std::size_t i = 0; i < items.size(); ++i) {
    Fields f(items[i], item_path(top.at("resources"), i), {"id", "skills"});
    auto skills = f.strings("skills");
    resources.push_back({f.string("id"), {skills.begin(), skills.end()}});
  }
  return ResourceRegistry(std::move(resources));
}

SkillInversion load_inversion(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"mapping"});
  return SkillInversion(top.string_map("mapping"));
}

ExecState load_inventory(std::string_view bytes) {
  const json doc = parse_document(bytes);
  Fields top(doc, "$", {"inventory", "substitutions"});
  ExecState state;
  for (const auto& id : top.ids("inventory")) state.present.insert(id);
  for (const auto& [from, to] : top.string_map("substitutions")) {
    if (!NodeId::is_valid(from) || !NodeId::is_valid(to)) malformed(top.at("substitutions"), "invalid id");
    state.substitutions[NodeId(from)] = NodeId(to);
  }
  return state;
}

std::string diagnostics_json(const Diagnostics& diagnostics) {
  json doc;
  doc["errors"] = diagnostics.error_count();
  doc["warnings"] = diagnostics.warning_count();
  doc["diagnostics"] = json::array();
  for (const auto& d : diagnostics.items) {
    json item;
    item["code"] = d.code;
    item["severity"] = std::string(to_string(d.severity));
    if (!d.nodes.empty()) item["nodes"] = ids_to_json(d.nodes);
    item["message"] = d.message;
    doc["diagnostics"].push_back(std::move(item));
  }
  return canonical(doc);
}

std::string trace_json(const Trace& trace, const ExecState& start) {
  json doc;
  doc["start"] = state_to_json(start);
  doc["steps"] = json::array();
  for (const auto& entry : trace) {
    json item = state_to_json(entry.state);
    item["index"] = entry.step_index;
    doc["steps"].push_back(std::move(item));
  }
  return canonical(doc);
}

std::string feasibility_json(const FeasibilityReport& report, const Plan& plan) {
  json doc;
  doc["feasible"] = report.feasible;
  doc["per_step"] = json::array();
  for (const auto& entry : report.per_step) {
    json item;
    item["index"] = entry.step_index;
    if (entry.step_index < plan.steps.size()) {
      const auto& step = plan.steps[entry.step_index];
      item["process"] = step.process.str();
      item["direction"] = std::string(to_string(step.direction));
    }
    if (!entry.missing_skills.empty()) item["missing_skills"] = entry.missing_skills;
    doc["per_step"].push_back(std::move(item));
  }
  return canonical(doc);
}

}  // namespace bipan
