#include "doctest.h"

#include <cmath>
#include <limits>

#include "bipan/aml.hpp"
#include "bipan/digest.hpp"
#include "bipan/dot.hpp"
#include "bipan/error.hpp"
#include "bipan/io.hpp"
#include "bipan/validate.hpp"
#include "support/fixtures.hpp"

using namespace bipan;
using bipan::testing::f1;
using bipan::testing::f1_data;
using bipan::testing::read_data;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  return Error("", "");
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

const char* const kCaexHead =
    R"(<?xml version="1.0"?>
<CAEXFile SchemaVersion="2.15" xmlns="http://www.dke.de/CAEX_ClassModel">
  <SystemUnitClassLib Name="Lib">
    <SystemUnitClass Name="Battery">
)";
const char* const kCaexTail = R"(
    </SystemUnitClass>
  </SystemUnitClassLib>
</CAEXFile>
)";

std::string caex(const std::string& body) { return kCaexHead + body + kCaexTail; }

}  // namespace

TEST_CASE("the shipped fixture is F1") {
  auto bytes = read_data("f1.bipan.json");
  auto model = load_model(bytes);
  CHECK(model == f1());
  CHECK(save_model(model) == bytes);
  CHECK(model_digest(model) == sha256_hex(bytes));
}

TEST_CASE("sha256 matches a known vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("load errors") {
  auto e = error_of([] {
    load_model(R"({"id": "x", "products": [{"id": "p1", "label": "P", "kind": "Stage"}],
                   "processes": [{"id": "q", "label": "Q"}],
                   "flows": [{"product": "stage9", "process": "q", "role": "Input"}]})");
  });
  CHECK(e.code() == "dangling-reference");
  CHECK(e.detail().find("stage9") != std::string::npos);

  auto syntax = error_of([] { load_model("{\n  \"id\": \"x\",\n  oops\n}"); });
  CHECK(syntax.code() == "parse-error");
  CHECK(syntax.detail().find("line 3") != std::string::npos);

  auto path = error_of([] { load_model(R"({"id": "x", "products": [{"id": "a", "label": "A", "kind": "Bolt"}]})"); });
  CHECK(path.code() == "parse-error");
  CHECK(path.detail().find("$.products[0].kind") != std::string::npos);

  CHECK(error_of([] { load_model(R"({"id": "x", "extra": 1})"); }).code() == "parse-error");
  CHECK(error_of([] {
          load_model(R"({"id": "x", "products": [{"id": "a", "label": "A", "kind": "Stage"},
                                                  {"id": "a", "label": "B", "kind": "Stage"}]})");
        }).code() == "duplicate-id");
}

TEST_CASE("an empty document loads and lacks a Final product") {
  auto model = load_model(R"({"id": "empty", "products": [], "processes": [], "skills": [], "flows": [],
                              "skill_edges": [], "fastens": []})");
  CHECK(model.data().products.empty());
  auto diagnostics = validate(model);
  REQUIRE(diagnostics.items.size() == 1);
  CHECK(diagnostics.items[0].code == "V004");
}

TEST_CASE("saving normalizes a non-canonical document") {
  const std::string messy =
      "{\"skills\":[{\"label\":\"manipulation\",\"id\":\"m\"}],\"id\":\"single\","
      "\"processes\":[{\"id\":\"q\",\"label\":\"Q\"}],"
      "\"flows\":[{\"role\":\"Output\",\"product\":\"f\",\"process\":\"q\"},"
      "{\"product\":\"b\",\"process\":\"q\",\"role\":\"Input\"},{\"product\":\"a\",\"process\":\"q\",\"role\":\"Input\"}],"
      "\"products\":[{\"kind\":\"Final\",\"id\":\"f\",\"label\":\"F\"},{\"id\":\"b\",\"label\":\"B\",\"kind\":\"Fastener\"},"
      "{\"id\":\"a\",\"label\":\"A\",\"kind\":\"Elementary\"}],"
      "\"skill_edges\":[{\"skill\":\"m\",\"process\":\"q\"}]}";
  auto model = load_model(messy);
  CHECK(model == bipan::testing::single_process_model());
  auto canonical = save_model(model);
  CHECK(canonical == save_model(bipan::testing::single_process_model()));
  CHECK(canonical.back() == '\n');
  CHECK(canonical.find("\r") == std::string::npos);
  CHECK(canonical.find("\n  \"fastens\"") < canonical.find("\n  \"flows\""));
  CHECK(save_model(load_model(canonical)) == canonical);
}

TEST_CASE("positions and attributes survive a round trip") {
  auto d = f1_data();
  for (auto& p : d.products) {
    if (p.id == NodeId("mod1")) {
      p.position = Position{1.0, 0.5, 0.30000000000000004};
      p.attributes = {{"Capacity", "94"}, {"Supplier", "ACME"}};
    }
    if (p.id == NodeId("mod2")) p.position = Position{std::numeric_limits<double>::quiet_NaN(), 0.0, -1e-300};
  }
  d.fastens.push_back({"bolts1", {"mod1", "mod2"}, {"screw"}});
  BiPanModel model(d);
  auto bytes = save_model(model);
  auto back = load_model(bytes);
  CHECK(save_model(back) == bytes);
  auto mod1 = back.find_product("mod1");
  REQUIRE(mod1);
  CHECK(mod1->position->z == 0.30000000000000004);
  CHECK(mod1->attributes.at("Supplier") == "ACME");
  CHECK(std::isnan(back.find_product("mod2")->position->x));
  CHECK(back.find_product("mod2")->position->z == -1e-300);
  CHECK(back.data().fastens == model.data().fastens);
}

TEST_CASE("plan documents round trip") {
  auto model = f1();
  for (const auto& plan : {assembly_recipe(model), full_disassembly(model),
                           repair_plan(model, {"mod2", "blanket"}, {{"mod2", "m2"}, {"blanket", "b2"}})}) {
    auto bytes = save_plan(plan);
    CHECK(load_plan(bytes) == plan);
    CHECK(save_plan(load_plan(bytes)) == bytes);
  }
  CHECK(error_of([] {
          load_plan(R"({"model_id": "f1", "model_digest": "00", "kind": "Repair",
                        "steps": [{"process": "p2", "direction": "Swap", "consumed": [], "produced": []}]})");
        }).code() == "parse-error");
}

TEST_CASE("registry, inversion and inventory documents") {
  auto registry = load_registry(read_data("registry_no_cables.json"));
  CHECK(registry.all_skills() == std::set<std::string>{"manipulation", "unscrewing"});
  CHECK(load_registry(read_data("registry_full.json")).resources().size() == 2);

  auto inversion = load_inversion(R"({"mapping": {"manipulation": "removal"}})");
  CHECK(inversion.apply("manipulation") == "removal");
  CHECK(inversion.apply("screwing") == "screwing");

  auto state = load_inventory(R"({"inventory": ["stage2", "mod8r"], "substitutions": {"mod1": "mod1r"}})");
  CHECK(state.present == std::set<NodeId>{"mod8r", "stage2"});
  CHECK(state.substitutions.at("mod1") == NodeId("mod1r"));
}

TEST_CASE("AML import of the battery library") {
  auto fragment = import_aml(read_data("battery.aml"));
  REQUIRE(fragment.products.size() == 10);
  auto mod1 = fragment.find("mod1");
  REQUIRE(mod1);
  CHECK(mod1->label == "Module 1");
  CHECK(mod1->position == Position{1.0, 0.5, 0.1});
  CHECK(mod1->attributes.at("Capacity") == "94");
  CHECK(fragment.find("mod8")->position->z == 0.30000000000000004);
  CHECK(fragment.find("cooling")->kind == ProductKind::SubProduct);
  CHECK(fragment.find("cooling")->attributes.at("Coolant") == "glycol");
  CHECK_FALSE(fragment.find("bms")->kind);
  CHECK_FALSE(fragment.find("bms")->position);
  std::size_t positioned = 0;
  for (const auto& p : fragment.products) positioned += p.position ? 1 : 0;
  CHECK(positioned == 8);
}

TEST_CASE("AML subset edge cases") {
  CHECK(import_aml(caex("")).products.empty());

  auto nested = import_aml(caex(R"(
      <InternalElement Name="Pack" ID="pack">
        <InternalElement Name="Cell" ID="cell">
          <Attribute Name="Rating"><Attribute Name="Voltage"><Value>3.7</Value></Attribute></Attribute>
        </InternalElement>
      </InternalElement>)"));
  REQUIRE(nested.products.size() == 2);
  CHECK(nested.find("cell")->attributes.at("parent") == "pack");
  CHECK(nested.find("cell")->attributes.at("Rating.Voltage") == "3.7");

  auto missing = error_of([] { import_aml(caex(R"(<InternalElement Name="NoId"/>)")); });
  CHECK(missing.code() == "xml-parse-error");
  CHECK(missing.detail().find("/CAEXFile/SystemUnitClassLib[@Name='Lib']/SystemUnitClass[@Name='Battery']/"
                              "InternalElement[@Name='NoId']") != std::string::npos);

  CHECK(error_of([] { import_aml("<CAEXFile SchemaVersion=\"3.0\"><unclosed></CAEXFile>"); }).code() ==
        "xml-parse-error");
  CHECK(error_of([] { import_aml("<Plant/>"); }).code() == "unsupported-root");
  CHECK(error_of([] { import_aml("<CAEXFile SchemaVersion=\"4.0\"/>"); }).code() == "unsupported-root");
  CHECK(error_of([] {
          import_aml(caex(R"(<InternalElement Name="A" ID="a"/><InternalElement Name="B" ID="a"/>)"));
        }).code() == "duplicate-id");
  CHECK(error_of([] {
          import_aml(caex(R"(<InternalElement Name="A" ID="a">
            <Attribute Name="Position"><Attribute Name="x"><Value>left</Value></Attribute></Attribute>
          </InternalElement>)"));
        }).code() == "non-numeric-position");
}

TEST_CASE("merging the battery library into F1") {
  auto model = f1();
  auto merged = merge(import_aml(read_data("battery.aml")), model);
  std::size_t positioned = 0;
  for (const auto& p : merged.data().products) positioned += p.position ? 1 : 0;
  CHECK(positioned == 8);
  CHECK(merged.find_product("mod1")->position == Position{1.0, 0.5, 0.1});
  CHECK(merged.find_product("bms")->attributes.at("Supplier") == "ACME Electronics");
  CHECK(merged.data().flows == model.data().flows);
  CHECK(merged.data().skill_edges == model.data().skill_edges);
  CHECK(merged.data().products.size() == model.data().products.size());
  CHECK(validate(merged).items.empty());

  CHECK(merge(AmlFragment{}, model) == model);

  AmlFragment added{{{"sensor", std::nullopt, std::nullopt, std::nullopt, {}}}};
  auto grown = merge(added, model);
  CHECK(grown.find_product("sensor")->kind == ProductKind::Elementary);
  CHECK(grown.find_product("sensor")->label == "sensor");

  AmlFragment rekind{{{"box", std::nullopt, ProductKind::Fastener, std::nullopt, {}}}};
  auto conflict = error_of([&] { merge(rekind, model); });
  CHECK(conflict.code() == "kind-conflict");
  CHECK(conflict.detail().find("box") != std::string::npos);

  AmlFragment relabel{{{"box", std::string("Crate"), std::nullopt, std::nullopt, {}},
                       {"cover", std::string("Lid"), std::nullopt, std::nullopt, {}}}};
  auto labels = error_of([&] { merge(relabel, model); });
  CHECK(labels.code() == "label-conflict");
  CHECK(labels.detail().find("box") != std::string::npos);
  CHECK(labels.detail().find("cover") != std::string::npos);

  AmlFragment clash{{{"p1", std::nullopt, std::nullopt, std::nullopt, {}}}};
  CHECK(error_of([&] { merge(clash, model); }).code() == "duplicate-id");
}

TEST_CASE("DOT export of F1") {
  auto model = f1();
  auto dot = export_dot(model);
  CHECK(dot == read_data("f1.dot"));
  CHECK(dot == export_dot(f1()));
  const auto& d = model.data();
  CHECK(count(dot, "shape=circle") == d.products.size());
  CHECK(count(dot, "fillcolor=\"#a5d6a7\"") == d.processes.size());
  CHECK(count(dot, "style=\"rounded,filled\"") == d.skills.size());
  CHECK(count(dot, "color=black") == d.flows.size());
  CHECK(count(dot, "style=dashed") == d.skill_edges.size());
  CHECK(count(dot, "[color=red") == 0);
}

TEST_CASE("DOT overlay of the repair plan") {
  auto model = f1();
  auto dot = export_dot(model, repair_plan(model, {"mod8"}, {{"mod8", "mod8r"}}));
  CHECK(count(dot, "[color=red") == 7);
  for (int i = 1; i <= 7; ++i) CHECK(count(dot, "label=\"" + std::to_string(i) + ":") + count(dot, "label=\"" + std::to_string(i) + "\"") == 1);
  CHECK(dot.find("swap mod8 -> mod8r") != std::string::npos);
}

TEST_CASE("DOT export of an empty model") {
  auto dot = export_dot(BiPanModel());
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("->") == std::string::npos);
  CHECK(dot.back() == '\n');
}
