#include "bipan/dot.hpp"

#include <sstream>

namespace bipan {

namespace {

std::string quoted(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string_view product_fill(ProductKind kind) {
  switch (kind) {
    case ProductKind::Final: return "#b71c1c";
    case ProductKind::Stage: return "#e53935";
    case ProductKind::SubProduct: return "#ef9a9a";
    case ProductKind::Fastener: return "#f48fb1";
    case ProductKind::Elementary: return "#ffcdd2";
  }
  return "#ffffff";
}

void write_graph(std::ostream& out, const BiPanModel& model, const Plan* plan) {
  const auto& data = model.data();
  out << "digraph " << quoted(data.id) << " {\n";
  out << "  rankdir=TB;\n";
  out << "  node [fontname=\"Helvetica\", fontsize=10];\n";
  out << "  edge [fontname=\"Helvetica\", fontsize=9];\n";

  out << "\n  // products\n";
  for (const auto& p : data.products) {
    out << "  " << quoted(p.id.str()) << " [label=" << quoted(p.label) << ", shape=circle, style=filled, fillcolor=\""
        << product_fill(p.kind) << "\", tooltip=" << quoted(to_string(p.kind)) << "];\n";
  }
  out << "\n  // processes\n";
  for (const auto& p : data.processes) {
    out << "  " << quoted(p.id.str()) << " [label=" << quoted(p.label)
        << ", shape=box, style=filled, fillcolor=\"#a5d6a7\"];\n";
  }
  out << "\n  // skills\n";
  for (const auto& s : data.skills) {
    out << "  " << quoted(s.id.str()) << " [label=" << quoted(s.label)
        << ", shape=box, style=\"rounded,filled\", fillcolor=\"#90caf9\"];\n";
  }

  out << "\n  // flows\n";
  for (const auto& f : data.flows) {
    const auto& from = f.role == FlowRole::Input ? f.product : f.process;
    const auto& to = f.role == FlowRole::Input ? f.process : f.product;
    out << "  " << quoted(from.str()) << " -> " << quoted(to.str()) << " [color=black];\n";
  }
  out << "\n  // skill edges\n";
  for (const auto& e : data.skill_edges) {
    out << "  " << quoted(e.process.str()) << " -> " << quoted(e.skill.str())
        << " [style=dashed, color=\"#fbc02d\", arrowhead=dot];\n";
  }

  if (plan != nullptr) {
    out << "\n  // plan overlay\n";
    for (std::size_t i = 0; i < plan->steps.size(); ++i) {
      const auto& step = plan->steps[i];
      auto outputs = model.outputs_of(step.process);
      const std::string output = outputs.empty() ? step.process.str() : outputs.front().str();
      std::string from;
      std::string to;
      std::string label = std::to_string(i + 1);
      switch (step.direction) {
        case Direction::Forward:
          from = step.process.str();
          to = output;
          break;
        case Direction::Reverse:
          from = output;
          to = step.process.str();
          break;
        case Direction::Swap:
          from = output;
          to = step.swap_target ? step.swap_target->str() : step.process.str();
          label += ": swap " + to + " -> " + (step.swap_replacement ? step.swap_replacement->str() : "?");
          break;
      }
      out << "  " << quoted(from) << " -> " << quoted(to) << " [color=red, penwidth=2, constraint=false, label="
          << quoted(label) << ", fontcolor=red];\n";
    }
  }
  out << "}\n";
}

}  // namespace

std::string export_dot(const BiPanModel& model) {
  std::ostringstream out;
  write_graph(out, model, nullptr);
  return out.str();
}

std::string export_dot(const BiPanModel& model, const Plan& plan) {
  std::ostringstream out;
  write_graph(out, model, &plan);
  return out.str();
}

}  // namespace bipan
