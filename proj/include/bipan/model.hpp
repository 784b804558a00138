#pragma once

#include <array>
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bipan {

/// Identifier of a node. Non-empty, restricted to `[A-Za-z0-9_.-]+`.
class NodeId {
 public:
  NodeId() = default;
  /// Throws Error("invalid-id") when `value` violates the pattern.
  explicit NodeId(std::string value);
  NodeId(const char* value) : NodeId(std::string(value)) {}  // NOLINT: literals in fixtures and tests

  static bool is_valid(std::string_view value);

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

std::vector<std::string> to_strings(std::span<const NodeId> ids);
std::string join(std::span<const NodeId> ids, std::string_view sep = ",");

enum class ProductKind { Elementary, SubProduct, Fastener, Final, Stage };

std::string_view to_string(ProductKind kind);
/// Exact, case-sensitive category name; nullopt for anything else.
std::optional<ProductKind> parse_product_kind(std::string_view name);

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_finite() const;
  friend bool operator==(const Position&, const Position&) = default;
};

struct ProductNode {
  NodeId id;
  std::string label;
  ProductKind kind = ProductKind::Elementary;
  std::optional<std::string> type_ref;
  std::optional<Position> position;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const ProductNode&, const ProductNode&) = default;
};

struct ProcessNode {
  NodeId id;
  std::string label;

  friend bool operator==(const ProcessNode&, const ProcessNode&) = default;
};

struct SkillNode {
  NodeId id;
  std::string label;

  friend bool operator==(const SkillNode&, const SkillNode&) = default;
};

enum class FlowRole { Input, Output };

std::string_view to_string(FlowRole role);
std::optional<FlowRole> parse_flow_role(std::string_view name);

/// One edge serves both directions: an Input is consumed when assembling
/// and released when disassembling.
struct FlowEdge {
  NodeId product;
  NodeId process;
  FlowRole role = FlowRole::Input;

  friend auto operator<=>(const FlowEdge&, const FlowEdge&) = default;
  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

struct SkillEdge {
  NodeId process;
  NodeId skill;

  friend auto operator<=>(const SkillEdge&, const SkillEdge&) = default;
  friend bool operator==(const SkillEdge&, const SkillEdge&) = default;
};

/// Optional refinement: which co-inputs a fastener or connector secures and,
/// optionally, which of the process skills handle it.
struct FastensLink {
  NodeId fastener;
  std::vector<NodeId> secures;
  std::vector<NodeId> skills;

  friend auto operator<=>(const FastensLink&, const FastensLink&) = default;
  friend bool operator==(const FastensLink&, const FastensLink&) = default;
};

/// Plain contents of a model. BiPanModel normalizes it (everything sorted
/// by id) so that equal graphs compare equal.
struct ModelData {
  std::string id;
  std::vector<ProductNode> products;
  std::vector<ProcessNode> processes;
  std::vector<SkillNode> skills;
  std::vector<FlowEdge> flows;
  std::vector<SkillEdge> skill_edges;
  std::vector<FastensLink> fastens;

  friend bool operator==(const ModelData&, const ModelData&) = default;
};

enum class NodeClass { Product, Process, Skill };

/// Immutable, reference-checked product/process/resource graph with adjacency indexes.
///
/// Construction rejects duplicate ids (`duplicate-id`), duplicate edges
/// (`duplicate-edge`) and edge endpoints that do not resolve to a node of
/// the right class (`dangling-reference`). Structural rules are left to
/// validate().
class BiPanModel {
 public:
  BiPanModel();
  explicit BiPanModel(ModelData data);

  const ModelData& data() const noexcept { return data_; }
  const std::string& id() const noexcept { return data_.id; }

  const ProductNode* find_product(const NodeId& id) const;
  const ProcessNode* find_process(const NodeId& id) const;
  const SkillNode* find_skill(const NodeId& id) const;
  std::optional<NodeClass> class_of(const NodeId& id) const;
  bool contains(const NodeId& id) const { return class_of(id).has_value(); }

  /// Throws Error("unknown-node") when absent.
  const ProductNode& product(const NodeId& id) const;
  const ProcessNode& process(const NodeId& id) const;

  /// Sorted by id; empty for unknown ids.
  std::span<const NodeId> inputs_of(const NodeId& process) const;
  std::span<const NodeId> outputs_of(const NodeId& process) const;
  std::span<const NodeId> producers_of(const NodeId& product) const;
  std::span<const NodeId> consumers_of(const NodeId& product) const;
  std::span<const NodeId> skills_of(const NodeId& process) const;

  /// Sorted, de-duplicated labels of the skills linked to `process`.
  std::vector<std::string> skill_labels_of(const NodeId& process) const;

  /// Ids of all products of the given kind, ascending.
  std::vector<NodeId> products_of_kind(ProductKind kind) const;

  friend bool operator==(const BiPanModel& a, const BiPanModel& b) { return a.data_ == b.data_; }

 private:
  using Index = std::map<NodeId, std::vector<NodeId>>;

  static std::span<const NodeId> lookup(const Index& index, const NodeId& key);

  ModelData data_;
  std::map<NodeId, NodeClass> classes_;
  std::map<NodeId, std::size_t> product_pos_;
  std::map<NodeId, std::size_t> process_pos_;
  std::map<NodeId, std::size_t> skill_pos_;
  Index inputs_;
  Index outputs_;
  Index producers_;
  Index consumers_;
  Index skills_;
};

/// The process with an Output edge to `product`, if any. With several
/// producers (an invalid model) the lowest id is returned.
/// Throws Error("unknown-node") when `product` is not a product of the model.
std::optional<NodeId> producer_of(const BiPanModel& model, const NodeId& product);

/// The process with an Input edge from `product`, if any.
std::optional<NodeId> consumer_of(const BiPanModel& model, const NodeId& product);

/// Processes from the consumer of `product` up to the producer of the Final
/// product, leaf-to-root. Empty for the Final product itself.
/// Throws Error("detached-node") if the chain stops before a Final product.
std::vector<NodeId> spine(const BiPanModel& model, const NodeId& product);

/// The single output of `process`; throws Error("invalid-model") otherwise.
const NodeId& output_of(const BiPanModel& model, const NodeId& process);

/// The Final product; throws Error("invalid-model") unless exactly one exists.
NodeId final_product(const BiPanModel& model);

}  // namespace bipan

template <>
struct std::hash<bipan::NodeId> {
  std::size_t operator()(const bipan::NodeId& id) const noexcept { return std::hash<std::string>{}(id.str()); }
};
