#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "bipan/validate.hpp"
#include "support/fixtures.hpp"

using namespace bipan;
using bipan::testing::f1;
using bipan::testing::f1_data;
using bipan::testing::remove_flow;
using bipan::testing::set_kind;

namespace {

std::set<std::string> codes(const Diagnostics& d) {
  std::set<std::string> out;
  for (const auto& item : d.items) out.insert(item.code);
  return out;
}

}  // namespace

TEST_CASE("F1 is valid with no findings") {
  auto diagnostics = validate(f1());
  CHECK(diagnostics.items.empty());
  CHECK_NOTHROW(require_valid(f1()));
}

TEST_CASE("removing stage4 -> p5 leaves stage4 without consumer") {
  auto d = f1_data();
  remove_flow(d, "stage4", "p5", FlowRole::Input);
  auto diagnostics = validate(BiPanModel(d));
  CHECK(diagnostics.contains("V006", "stage4"));
  CHECK_FALSE(diagnostics.contains("V002"));
  // Everything below stage4 is cut off from the battery.
  CHECK(diagnostics.contains("V010", "p4"));
  CHECK(diagnostics.contains("V010", "mod1"));
  CHECK_FALSE(diagnostics.contains("V010", "cover"));
}

TEST_CASE("rekinding the battery to Stage gives exactly V004 and V006") {
  auto d = f1_data();
  set_kind(d, "battery", ProductKind::Stage);
  auto diagnostics = validate(BiPanModel(d));
  REQUIRE(diagnostics.items.size() == 2);
  CHECK(diagnostics.items[0].code == "V004");
  CHECK(diagnostics.items[0].nodes.empty());
  CHECK(diagnostics.items[1].code == "V006");
  CHECK(diagnostics.items[1].nodes == std::vector<NodeId>{"battery"});
}

TEST_CASE("seeded single mutations trigger each error code") {
  SUBCASE("V001 process without output") {
    auto d = f1_data();
    remove_flow(d, "stage1", "p1", FlowRole::Output);
    auto diagnostics = validate(BiPanModel(d));
    CHECK(diagnostics.contains("V001", "p1"));
  }
  SUBCASE("V001 process with two outputs") {
    auto d = f1_data();
    d.products.push_back({"scrap", "Scrap", ProductKind::Stage, {}, {}, {}});
    d.flows.push_back({"scrap", "p3", FlowRole::Output});
    CHECK(validate(BiPanModel(d)).contains("V001", "p3"));
  }
  SUBCASE("V002 process without inputs") {
    auto d = f1_data();
    remove_flow(d, "stage3", "p4", FlowRole::Input);
    remove_flow(d, "blanket", "p4", FlowRole::Input);
    CHECK(validate(BiPanModel(d)).contains("V002", "p4"));
  }
  SUBCASE("V003 product consumed twice") {
    auto d = f1_data();
    d.flows.push_back({"mod1", "p3", FlowRole::Input});
    auto diagnostics = validate(BiPanModel(d));
    CHECK(diagnostics.contains("V003", "mod1"));
  }
  SUBCASE("V004 second Final product") {
    auto d = f1_data();
    set_kind(d, "cover", ProductKind::Final);
    CHECK(validate(BiPanModel(d)).contains("V004"));
  }
  SUBCASE("V005 Final product without producer") {
    auto d = f1_data();
    remove_flow(d, "battery", "p5", FlowRole::Output);
    CHECK(validate(BiPanModel(d)).contains("V005", "battery"));
  }
  SUBCASE("V006 Stage without consumer") {
    auto d = f1_data();
    remove_flow(d, "stage2", "p3", FlowRole::Input);
    CHECK(validate(BiPanModel(d)).contains("V006", "stage2"));
  }
  SUBCASE("V007 leaf kind with a producer") {
    auto d = f1_data();
    set_kind(d, "stage1", ProductKind::Elementary);
    auto diagnostics = validate(BiPanModel(d));
    CHECK(diagnostics.contains("V007", "stage1"));
    CHECK(diagnostics.items.size() == 1);
  }
  SUBCASE("V008 cycle") {
    auto d = f1_data();
    d.flows.push_back({"stage3", "p2", FlowRole::Input});
    auto diagnostics = validate(BiPanModel(d));
    CHECK(diagnostics.contains("V008", "p2"));
    CHECK(diagnostics.contains("V008", "stage3"));
  }
}

TEST_CASE("warnings do not make a model invalid") {
  auto d = f1_data();
  d.skill_edges.erase(std::remove_if(d.skill_edges.begin(), d.skill_edges.end(),
                                     [](const SkillEdge& e) { return e.process == NodeId("p4"); }),
                      d.skill_edges.end());
  d.skills.push_back({"weld", "welding"});
  auto diagnostics = validate(BiPanModel(d));
  CHECK(codes(diagnostics) == std::set<std::string>{"V009", "V010"});
  CHECK(diagnostics.contains("V009", "p4"));
  CHECK(diagnostics.contains("V010", "weld"));
  CHECK_FALSE(diagnostics.has_errors());
  CHECK(diagnostics.warning_count() == 2);
}

TEST_CASE("V011 fastens links must stay inside one process") {
  auto d = f1_data();
  SUBCASE("valid link") {
    d.fastens.push_back({"bolts1", {"mod8"}, {"screw"}});
    CHECK(validate(BiPanModel(d)).items.empty());
  }
  SUBCASE("secured part belongs to another process") {
    d.fastens.push_back({"bolts1", {"brace1"}, {}});
    CHECK(validate(BiPanModel(d)).contains("V011", "bolts1"));
  }
  SUBCASE("fastener is not a Fastener") {
    d.fastens.push_back({"cables", {"mod8"}, {}});
    CHECK(validate(BiPanModel(d)).contains("V011", "cables"));
  }
  SUBCASE("skill not linked to the process") {
    d.fastens.push_back({"bolts2", {"brace1"}, {"connect"}});
    CHECK(validate(BiPanModel(d)).contains("V011", "bolts2"));
  }
}

TEST_CASE("V012 non-finite positions") {
  auto d = f1_data();
  for (auto& p : d.products) {
    if (p.id == NodeId("mod2")) p.position = Position{1.0, std::numeric_limits<double>::infinity(), 0.0};
    if (p.id == NodeId("mod3")) p.position = Position{1.0, 0.5, 0.1};
  }
  auto diagnostics = validate(BiPanModel(d));
  CHECK(diagnostics.contains("V012", "mod2"));
  CHECK_FALSE(diagnostics.contains("V012", "mod3"));
}

TEST_CASE("diagnostics are sorted and deterministic") {
  auto d = f1_data();
  remove_flow(d, "stage4", "p5", FlowRole::Input);
  set_kind(d, "stage1", ProductKind::Elementary);
  auto first = validate(BiPanModel(d));
  auto second = validate(BiPanModel(d));
  CHECK(first == second);
  for (std::size_t i = 1; i < first.items.size(); ++i) {
    const auto& a = first.items[i - 1];
    const auto& b = first.items[i];
    CHECK((a.code < b.code || (a.code == b.code && a.nodes.front() <= b.nodes.front())));
  }
}

TEST_CASE("empty model only lacks a Final product") {
  auto diagnostics = validate(BiPanModel());
  REQUIRE(diagnostics.items.size() == 1);
  CHECK(diagnostics.items[0].code == "V004");
}
