#include "bipan/validate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "bipan/error.hpp"

namespace bipan {

std::string_view to_string(Severity severity) { return severity == Severity::Error ? "error" : "warning"; }

std::size_t Diagnostics::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; }));
}

std::size_t Diagnostics::warning_count() const { return items.size() - error_count(); }

bool Diagnostics::contains(std::string_view code) const {
  return std::any_of(items.begin(), items.end(), [&](const Diagnostic& d) { return d.code == code; });
}

bool Diagnostics::contains(std::string_view code, const NodeId& node) const {
  return std::any_of(items.begin(), items.end(), [&](const Diagnostic& d) {
    return d.code == code && std::find(d.nodes.begin(), d.nodes.end(), node) != d.nodes.end();
  });
}

namespace {

class Checker {
 public:
  explicit Checker(const BiPanModel& model) : model_(model) {}

  Diagnostics run() {
    check_processes();
    check_products();
    check_finals();
    check_cycles();
    check_reachability();
    check_fastens();

    std::stable_sort(out_.items.begin(), out_.items.end(), [](const Diagnostic& a, const Diagnostic& b) {
      const std::string empty;
      const auto& na = a.nodes.empty() ? empty : a.nodes.front().str();
      const auto& nb = b.nodes.empty() ? empty : b.nodes.front().str();
      return std::tie(a.code, na) < std::tie(b.code, nb);
    });
    return std::move(out_);
  }

 private:
  void add(std::string code, std::vector<NodeId> nodes, std::string message, Severity severity = Severity::Error) {
    out_.items.push_back({std::move(code), severity, std::move(nodes), std::move(message)});
  }

  void check_processes() {
    for (const auto& process : model_.data().processes) {
      const auto& id = process.id;
      auto outputs = model_.outputs_of(id);
      if (outputs.size() != 1) {
        std::vector<NodeId> nodes{id};
        nodes.insert(nodes.end(), outputs.begin(), outputs.end());
        add("V001", std::move(nodes),
            "process " + id.str() + " has " + std::to_string(outputs.size()) + " output products, expected 1");
      }
      if (model_.inputs_of(id).empty()) {
        add("V002", {id}, "process " + id.str() + " has no input products");
      }
      if (model_.skills_of(id).empty()) {
        add("V009", {id}, "process " + id.str() + " has no skill edges", Severity::Warning);
      }
    }
  }

  void check_products() {
    for (const auto& product : model_.data().products) {
      const auto& id = product.id;
      auto producers = model_.producers_of(id);
      auto consumers = model_.consumers_of(id);
      if (producers.size() > 1 || consumers.size() > 1) {
        std::vector<NodeId> nodes{id};
        if (producers.size() > 1) nodes.insert(nodes.end(), producers.begin(), producers.end());
        if (consumers.size() > 1) nodes.insert(nodes.end(), consumers.begin(), consumers.end());
        add("V003", std::move(nodes),
            "product " + id.str() + " has " + std::to_string(producers.size()) + " producers and " +
                std::to_string(consumers.size()) + " consumers, at most one of each allowed");
      }
      switch (product.kind) {
        case ProductKind::Final:
          if (!consumers.empty() || producers.empty()) {
            add("V005", {id},
                "Final product " + id.str() + (producers.empty() ? " has no producer" : " has a consumer"));
          }
          break;
        case ProductKind::Stage:
          if (producers.empty() || consumers.empty()) {
            add("V006", {id}, "Stage " + id.str() + (producers.empty() ? " has no producer" : " has no consumer"));
          }
          break;
        default:
          if (!producers.empty()) {
            std::vector<NodeId> nodes{id};
            nodes.insert(nodes.end(), producers.begin(), producers.end());
            add("V007", std::move(nodes),
                std::string(to_string(product.kind)) + " product " + id.str() + " is produced by " +
                    join(producers));
          }
          break;
      }
      if (product.position && !product.position->is_finite()) {
        add("V012", {id}, "product " + id.str() + " has a non-finite position component");
      }
    }
  }

  void check_finals() {
    auto finals = model_.products_of_kind(ProductKind::Final);
    if (finals.size() != 1) {
      add("V004", finals, "expected exactly one Final product, found " + std::to_string(finals.size()));
    }
  }

  // Tarjan's SCC over the bipartite product/process flow graph in assembly
  // direction (input -> process -> output).
  void check_cycles() {
    std::map<NodeId, std::vector<NodeId>> successors;
    for (const auto& flow : model_.data().flows) {
      if (flow.role == FlowRole::Input) {
        successors[flow.product].push_back(flow.process);
      } else {
        successors[flow.process].push_back(flow.product);
      }
    }

    std::map<NodeId, int> index;
    std::map<NodeId, int> lowlink;
    std::set<NodeId> on_stack;
    std::vector<NodeId> stack;
    int counter = 0;

    std::function<void(const NodeId&)> connect = [&](const NodeId& v) {
      index[v] = lowlink[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (const auto& w : successors[v]) {
        if (!index.count(w)) {
          connect(w);
          lowlink[v] = std::min(lowlink[v], lowlink[w]);
        } else if (on_stack.count(w)) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
      }
      if (lowlink[v] == index[v]) {
        std::vector<NodeId> component;
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          component.push_back(w);
        } while (w != v);
        if (component.size() > 1) {
          std::sort(component.begin(), component.end());
          add("V008", component, "flow cycle through " + join(component));
        }
      }
    };

    std::vector<NodeId> roots;
    for (const auto& p : model_.data().products) roots.push_back(p.id);
    for (const auto& p : model_.data().processes) roots.push_back(p.id);
    std::sort(roots.begin(), roots.end());
    for (const auto& v : roots) {
      if (!index.count(v)) connect(v);
    }
  }

  void check_reachability() {
    auto finals = model_.products_of_kind(ProductKind::Final);
    if (finals.empty()) return;

    std::set<NodeId> seen(finals.begin(), finals.end());
    std::vector<NodeId> frontier(finals.begin(), finals.end());
    auto visit = [&](const NodeId& id) {
      if (seen.insert(id).second) frontier.push_back(id);
    };
    while (!frontier.empty()) {
      NodeId current = frontier.back();
      frontier.pop_back();
      if (model_.class_of(current) == NodeClass::Product) {
        for (const auto& producer : model_.producers_of(current)) visit(producer);
      } else if (model_.class_of(current) == NodeClass::Process) {
        for (const auto& input : model_.inputs_of(current)) visit(input);
        for (const auto& skill : model_.skills_of(current)) visit(skill);
      }
    }

    auto report = [&](const NodeId& id, std::string_view what) {
      if (!seen.count(id)) {
        add("V010", {id}, std::string(what) + " " + id.str() + " is unreachable from the Final product",
            Severity::Warning);
      }
    };
    for (const auto& p : model_.data().products) report(p.id, "product");
    for (const auto& p : model_.data().processes) report(p.id, "process");
    for (const auto& s : model_.data().skills) report(s.id, "skill");
  }

  void check_fastens() {
    for (const auto& link : model_.data().fastens) {
      std::vector<NodeId> nodes{link.fastener};
      nodes.insert(nodes.end(), link.secures.begin(), link.secures.end());

      const auto& fastener = model_.product(link.fastener);
      if (fastener.kind != ProductKind::Fastener) {
        add("V011", nodes, "fastens link on " + link.fastener.str() + " which is not a Fastener");
        continue;
      }
      if (link.secures.empty() ||
          std::find(link.secures.begin(), link.secures.end(), link.fastener) != link.secures.end()) {
        add("V011", nodes, "fastens link of " + link.fastener.str() + " must secure other products");
        continue;
      }
      auto is_input = [&](const NodeId& process, const NodeId& product) {
        auto inputs = model_.inputs_of(process);
        return std::binary_search(inputs.begin(), inputs.end(), product);
      };
      bool shared = false;
      for (const auto& process : model_.consumers_of(link.fastener)) {
        bool all = std::all_of(link.secures.begin(), link.secures.end(),
                               [&](const NodeId& id) { return is_input(process, id); });
        auto skills = model_.skills_of(process);
        bool skills_ok = std::all_of(link.skills.begin(), link.skills.end(), [&](const NodeId& id) {
          return std::binary_search(skills.begin(), skills.end(), id);
        });
        if (all && skills_ok) shared = true;
      }
      if (!shared) {
        add("V011", nodes,
            "fastens link of " + link.fastener.str() + " does not match the inputs and skills of one process");
      }
    }
  }

  const BiPanModel& model_;
  Diagnostics out_;
};

}  // namespace

Diagnostics validate(const BiPanModel& model) { return Checker(model).run(); }

void require_valid(const BiPanModel& model) {
  auto diagnostics = validate(model);
  if (!diagnostics.has_errors()) return;
  std::string codes;
  for (const auto& d : diagnostics.items) {
    if (d.severity != Severity::Error) continue;
    if (!codes.empty()) codes += ", ";
    codes += d.code;
    if (!d.nodes.empty()) codes += "(" + d.nodes.front().str() + ")";
  }
  throw Error("invalid-model", std::to_string(diagnostics.error_count()) + " error(s): " + codes);
}

}  // namespace bipan
