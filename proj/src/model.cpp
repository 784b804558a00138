#include "bipan/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "bipan/error.hpp"

namespace bipan {

namespace {

bool is_id_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
         c == '-';
}

template <typename Node>
void sort_by_id(std::vector<Node>& nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
}

void sort_unique(std::vector<NodeId>& ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
}

}  // namespace

NodeId::NodeId(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) {
    throw Error("invalid-id", "'" + value_ + "' does not match [A-Za-z0-9_.-]+");
  }
}

bool NodeId::is_valid(std::string_view value) {
  return !value.empty() && std::all_of(value.begin(), value.end(), is_id_char);
}

std::vector<std::string> to_strings(std::span<const NodeId> ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

std::string join(std::span<const NodeId> ids, std::string_view sep) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += sep;
    out += id.str();
  }
  return out;
}

std::string_view to_string(ProductKind kind) {
  switch (kind) {
    case ProductKind::Elementary: return "Elementary";
    case ProductKind::SubProduct: return "SubProduct";
    case ProductKind::Fastener: return "Fastener";
    case ProductKind::Final: return "Final";
    case ProductKind::Stage: return "Stage";
  }
  return "?";
}

std::optional<ProductKind> parse_product_kind(std::string_view name) {
  for (auto kind : {ProductKind::Elementary, ProductKind::SubProduct, ProductKind::Fastener, ProductKind::Final,
                    ProductKind::Stage}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

bool Position::is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

std::string_view to_string(FlowRole role) { return role == FlowRole::Input ? "Input" : "Output"; }

std::optional<FlowRole> parse_flow_role(std::string_view name) {
  if (name == "Input") return FlowRole::Input;
  if (name == "Output") return FlowRole::Output;
  return std::nullopt;
}

BiPanModel::BiPanModel() : BiPanModel(ModelData{}) {}

BiPanModel::BiPanModel(ModelData data) : data_(std::move(data)) {
  sort_by_id(data_.products);
  sort_by_id(data_.processes);
  sort_by_id(data_.skills);
  // Flows grouped per process reads better in saved documents.
  std::sort(data_.flows.begin(), data_.flows.end(), [](const FlowEdge& a, const FlowEdge& b) {
    return std::tie(a.process, a.role, a.product) < std::tie(b.process, b.role, b.product);
  });
  std::sort(data_.skill_edges.begin(), data_.skill_edges.end());
  for (auto& link : data_.fastens) {
    sort_unique(link.secures);
    sort_unique(link.skills);
  }
  std::sort(data_.fastens.begin(), data_.fastens.end());

  auto claim = [this](const NodeId& id, NodeClass cls) {
    if (id.empty()) throw Error("invalid-id", "empty node id");
    if (!classes_.emplace(id, cls).second) throw Error("duplicate-id", id.str());
  };
  for (std::size_t i = 0; i < data_.products.size(); ++i) {
    claim(data_.products[i].id, NodeClass::Product);
    product_pos_[data_.products[i].id] = i;
  }
  for (std::size_t i = 0; i < data_.processes.size(); ++i) {
    claim(data_.processes[i].id, NodeClass::Process);
    process_pos_[data_.processes[i].id] = i;
  }
  for (std::size_t i = 0; i < data_.skills.size(); ++i) {
    claim(data_.skills[i].id, NodeClass::Skill);
    skill_pos_[data_.skills[i].id] = i;
  }

  auto require = [this](const NodeId& id, NodeClass cls, std::string_view where) {
    auto it = classes_.find(id);
    if (it == classes_.end() || it->second != cls) {
      throw Error("dangling-reference", id.str() + " (referenced by " + std::string(where) + ")");
    }
  };

  for (std::size_t i = 0; i < data_.flows.size(); ++i) {
    const auto& flow = data_.flows[i];
    require(flow.product, NodeClass::Product, "flow to " + flow.process.str());
    require(flow.process, NodeClass::Process, "flow from " + flow.product.str());
    if (i > 0 && data_.flows[i - 1] == flow) {
      throw Error("duplicate-edge",
                  flow.product.str() + " " + std::string(to_string(flow.role)) + " " + flow.process.str());
    }
    if (flow.role == FlowRole::Input) {
      inputs_[flow.process].push_back(flow.product);
      consumers_[flow.product].push_back(flow.process);
    } else {
      outputs_[flow.process].push_back(flow.product);
      producers_[flow.product].push_back(flow.process);
    }
  }
  for (std::size_t i = 0; i < data_.skill_edges.size(); ++i) {
    const auto& edge = data_.skill_edges[i];
    require(edge.process, NodeClass::Process, "skill edge to " + edge.skill.str());
    require(edge.skill, NodeClass::Skill, "skill edge from " + edge.process.str());
    if (i > 0 && data_.skill_edges[i - 1] == edge) {
      throw Error("duplicate-edge", edge.process.str() + " -> " + edge.skill.str());
    }
    skills_[edge.process].push_back(edge.skill);
  }
  for (const auto& link : data_.fastens) {
    require(link.fastener, NodeClass::Product, "fastens link");
    for (const auto& id : link.secures) require(id, NodeClass::Product, "fastens link of " + link.fastener.str());
    for (const auto& id : link.skills) require(id, NodeClass::Skill, "fastens link of " + link.fastener.str());
  }

  for (auto* index : {&inputs_, &outputs_, &producers_, &consumers_, &skills_}) {
    for (auto& [key, ids] : *index) std::sort(ids.begin(), ids.end());
  }
}

const ProductNode* BiPanModel::find_product(const NodeId& id) const {
  auto it = product_pos_.find(id);
  return it == product_pos_.end() ? nullptr : &data_.products[it->second];
}

const ProcessNode* BiPanModel::find_process(const NodeId& id) const {
  auto it = process_pos_.find(id);
  return it == process_pos_.end() ? nullptr : &data_.processes[it->second];
}

const SkillNode* BiPanModel::find_skill(const NodeId& id) const {
  auto it = skill_pos_.find(id);
  return it == skill_pos_.end() ? nullptr : &data_.skills[it->second];
}

std::optional<NodeClass> BiPanModel::class_of(const NodeId& id) const {
  auto it = classes_.find(id);
  if (it == classes_.end()) return std::nullopt;
  return it->second;
}

const ProductNode& BiPanModel::product(const NodeId& id) const {
  const auto* node = find_product(id);
  if (node == nullptr) throw Error("unknown-node", id.str() + " is not a product");
  return *node;
}

const ProcessNode& BiPanModel::process(const NodeId& id) const {
  const auto* node = find_process(id);
  if (node == nullptr) throw Error("unknown-node", id.str() + " is not a process");
  return *node;
}

std::span<const NodeId> BiPanModel::lookup(const Index& index, const NodeId& key) {
  auto it = index.find(key);
  if (it == index.end()) return {};
  return it->second;
}

std::span<const NodeId> BiPanModel::inputs_of(const NodeId& process) const { return lookup(inputs_, process); }
std::span<const NodeId> BiPanModel::outputs_of(const NodeId& process) const { return lookup(outputs_, process); }
std::span<const NodeId> BiPanModel::producers_of(const NodeId& product) const { return lookup(producers_, product); }
std::span<const NodeId> BiPanModel::consumers_of(const NodeId& product) const { return lookup(consumers_, product); }
std::span<const NodeId> BiPanModel::skills_of(const NodeId& process) const { return lookup(skills_, process); }

std::vector<std::string> BiPanModel::skill_labels_of(const NodeId& process) const {
  std::set<std::string> labels;
  for (const auto& skill : skills_of(process)) labels.insert(find_skill(skill)->label);
  return {labels.begin(), labels.end()};
}

std::vector<NodeId> BiPanModel::products_of_kind(ProductKind kind) const {
  std::vector<NodeId> out;
  for (const auto& p : data_.products) {
    if (p.kind == kind) out.push_back(p.id);
  }
  return out;
}

std::optional<NodeId> producer_of(const BiPanModel& model, const NodeId& product) {
  model.product(product);
  auto producers = model.producers_of(product);
  if (producers.empty()) return std::nullopt;
  return producers.front();
}

std::optional<NodeId> consumer_of(const BiPanModel& model, const NodeId& product) {
  model.product(product);
  auto consumers = model.consumers_of(product);
  if (consumers.empty()) return std::nullopt;
  return consumers.front();
}

const NodeId& output_of(const BiPanModel& model, const NodeId& process) {
  model.process(process);
  auto outputs = model.outputs_of(process);
  if (outputs.size() != 1) {
    throw Error("invalid-model", process.str() + " has " + std::to_string(outputs.size()) + " outputs");
  }
  return outputs.front();
}

NodeId final_product(const BiPanModel& model) {
  auto finals = model.products_of_kind(ProductKind::Final);
  if (finals.size() != 1) {
    throw Error("invalid-model", "expected exactly one Final product, found " + std::to_string(finals.size()));
  }
  return finals.front();
}

std::vector<NodeId> spine(const BiPanModel& model, const NodeId& product) {
  model.product(product);
  std::vector<NodeId> chain;
  NodeId current = product;
  // A cycle-free chain visits each process at most once.
  const std::size_t limit = model.data().processes.size();
  while (true) {
    auto consumer = consumer_of(model, current);
    if (!consumer) {
      if (model.product(current).kind != ProductKind::Final) {
        throw Error("detached-node", current.str() + " has no consumer and is not Final");
      }
      break;
    }
    if (chain.size() == limit) throw Error("invalid-model", "cycle on the spine of " + product.str());
    chain.push_back(*consumer);
    current = output_of(model, *consumer);
  }
  return chain;
}

}  // namespace bipan
