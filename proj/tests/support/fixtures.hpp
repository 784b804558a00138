#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bipan/model.hpp"

namespace bipan::testing {

inline std::string data_path(const std::string& name) { return std::string(BIPAN_TEST_DATA_DIR) + "/" + name; }

inline std::string read_data(const std::string& name) {
  std::ifstream in(data_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing test data " + name);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// The simplified EV battery: five processes building four stages and the
/// final battery from 23 leaf parts. Built in code, independently of the
/// shipped f1.bipan.json.
inline ModelData f1_data() {
  ModelData d;
  d.id = "f1";
  auto product = [&](const char* id, const char* label, ProductKind kind, const char* type_ref = nullptr) {
    ProductNode node{NodeId(id), label, kind, std::nullopt, std::nullopt, {}};
    if (type_ref != nullptr) node.type_ref = type_ref;
    d.products.push_back(node);
  };
  auto process = [&](const char* id, const char* label, std::vector<std::string> inputs, const char* output,
                     std::vector<std::string> skills) {
    d.processes.push_back({NodeId(id), label});
    for (const auto& in : inputs) d.flows.push_back({NodeId(in), NodeId(id), FlowRole::Input});
    d.flows.push_back({NodeId(output), NodeId(id), FlowRole::Output});
    for (const auto& s : skills) d.skill_edges.push_back({NodeId(id), NodeId(s)});
  };

  product("screws1", "Screws", ProductKind::Fastener, "M6-screw");
  product("cooling", "Cooling system", ProductKind::SubProduct);
  product("box", "Battery box", ProductKind::Elementary);
  product("stage1", "Stage 1", ProductKind::Stage);
  product("bolts1", "Bolts", ProductKind::Fastener, "M8-bolt");
  product("bms", "BMS", ProductKind::SubProduct);
  product("cables", "Cables", ProductKind::Elementary);
  for (int i = 1; i <= 8; ++i) {
    auto id = "mod" + std::to_string(i);
    auto label = "Module " + std::to_string(i);
    product(id.c_str(), label.c_str(), ProductKind::SubProduct, "i3-module");
  }
  product("stage2", "Stage 2", ProductKind::Stage);
  product("bolts2", "Bolts", ProductKind::Fastener, "M8-bolt");
  for (int i = 1; i <= 5; ++i) {
    auto id = "brace" + std::to_string(i);
    auto label = "Brace " + std::to_string(i);
    product(id.c_str(), label.c_str(), ProductKind::Elementary, "brace");
  }
  product("stage3", "Stage 3", ProductKind::Stage);
  product("blanket", "Isolation blanket", ProductKind::Elementary);
  product("stage4", "Stage 4", ProductKind::Stage);
  product("screws2", "Screws", ProductKind::Fastener, "M6-screw");
  product("cover", "Cover", ProductKind::Elementary);
  product("battery", "EV battery", ProductKind::Final);

  d.skills = {{"manip", "manipulation"}, {"screw", "screwing"}, {"connect", "connecting-cables"}};

  process("p1", "Insert cooling system into box", {"screws1", "cooling", "box"}, "stage1", {"manip", "screw"});
  process("p2", "Insert modules, BMS and cables",
          {"stage1", "bolts1", "bms", "cables", "mod1", "mod2", "mod3", "mod4", "mod5", "mod6", "mod7", "mod8"},
          "stage2", {"manip", "screw", "connect"});
  process("p3", "Mount braces", {"stage2", "bolts2", "brace1", "brace2", "brace3", "brace4", "brace5"}, "stage3",
          {"manip", "screw"});
  process("p4", "Lay isolation blanket", {"stage3", "blanket"}, "stage4", {"manip"});
  process("p5", "Mount cover", {"stage4", "screws2", "cover"}, "battery", {"manip", "screw"});
  return d;
}

inline BiPanModel f1() { return BiPanModel(f1_data()); }

/// {a, b} -> q -> f
inline BiPanModel single_process_model() {
  ModelData d;
  d.id = "single";
  d.products = {{"a", "A", ProductKind::Elementary, {}, {}, {}},
                {"b", "B", ProductKind::Fastener, {}, {}, {}},
                {"f", "F", ProductKind::Final, {}, {}, {}}};
  d.processes = {{"q", "Q"}};
  d.skills = {{"m", "manipulation"}};
  d.flows = {{"a", "q", FlowRole::Input}, {"b", "q", FlowRole::Input}, {"f", "q", FlowRole::Output}};
  d.skill_edges = {{"q", "m"}};
  return BiPanModel(d);
}

inline void remove_flow(ModelData& d, const char* product, const char* process, FlowRole role) {
  FlowEdge edge{NodeId(product), NodeId(process), role};
  auto it = std::find(d.flows.begin(), d.flows.end(), edge);
  if (it == d.flows.end()) throw std::runtime_error("no such flow");
  d.flows.erase(it);
}

inline void set_kind(ModelData& d, const char* product, ProductKind kind) {
  for (auto& p : d.products) {
    if (p.id == NodeId(product)) p.kind = kind;
  }
}

}  // namespace bipan::testing
