#include "bipan/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bipan/aml.hpp"
#include "bipan/dot.hpp"
#include "bipan/error.hpp"
#include "bipan/exec.hpp"
#include "bipan/io.hpp"
#include "bipan/pdt.hpp"
#include "bipan/plan.hpp"
#include "bipan/validate.hpp"

namespace bipan::cli {

namespace fs = std::filesystem;

namespace {

/// Error raised by the CLI itself with a chosen exit code.
class Failure : public Error {
 public:
  Failure(int exit_code, std::string code, std::string detail)
      : Error(std::move(code), std::move(detail)), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kUsage, "io-error", "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Readers see either the old or the new file, never a partial one.
void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure(kRuntime, "io-error", "cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw Failure(kRuntime, "io-error", "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Failure(kRuntime, "io-error", "cannot rename " + tmp.string() + ": " + ec.message());
}

void emit(const std::string& payload, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << payload;
  } else {
    write_file_atomic(out_path, payload);
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep)) {
    if (!current.empty()) parts.push_back(current);
  }
  return parts;
}

std::string one_line(std::string text) {
  for (auto& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  while (!text.empty() && text.back() == ' ') text.pop_back();
  return text;
}

NodeId parse_id(const std::string& text, const std::string& flag) {
  if (!NodeId::is_valid(text)) throw Failure(kUsage, "bad-flag", flag + ": invalid id '" + text + "'");
  return NodeId(text);
}

std::map<NodeId, NodeId> parse_replacements(const std::vector<std::string>& values) {
  std::map<NodeId, NodeId> out;
  for (const auto& value : values) {
    for (const auto& pair : split(value, ',')) {
      auto eq = pair.find('=');
      if (eq == std::string::npos) throw Failure(kUsage, "bad-flag", "--replace expects old=new, got '" + pair + "'");
      auto from = parse_id(pair.substr(0, eq), "--replace");
      auto to = parse_id(pair.substr(eq + 1), "--replace");
      if (!out.emplace(from, to).second) throw Failure(kUsage, "bad-flag", "--replace names " + from.str() + " twice");
    }
  }
  return out;
}

std::string set_text(const std::set<NodeId>& ids) {
  std::string out = "{";
  bool first = true;
  for (const auto& id : ids) {
    if (!first) out += ", ";
    out += id.str();
    first = false;
  }
  return out + "}";
}

std::string step_text(const PlanStep& step) {
  std::string text = std::string(to_string(step.direction)) + " " + step.process.str();
  if (step.direction == Direction::Swap) text += " " + step.swap_target->str() + "->" + step.swap_replacement->str();
  return text;
}

void print_diagnostics(const Diagnostics& diagnostics, std::ostream& out) {
  for (const auto& d : diagnostics.items) {
    out << d.code << " " << to_string(d.severity);
    if (!d.nodes.empty()) out << " [" << join(d.nodes) << "]";
    out << ": " << d.message << "\n";
  }
  out << (diagnostics.has_errors() ? "FAILED" : "OK") << " (" << diagnostics.error_count() << " errors, "
      << diagnostics.warning_count() << " warnings)\n";
}

/// Prints the report; returns false when infeasible.
bool report_feasibility(const Plan& plan, const std::string& registry_path, std::ostream& err) {
  auto registry = load_registry(read_file(registry_path));
  auto report = check_feasibility(plan, registry);
  std::string missing_all;
  for (const auto& entry : report.per_step) {
    if (entry.missing_skills.empty()) continue;
    std::string missing;
    for (const auto& skill : entry.missing_skills) missing += (missing.empty() ? "" : ",") + skill;
    err << "step " << entry.step_index << " (" << step_text(plan.steps[entry.step_index]) << ") missing " << missing
        << "\n";
    missing_all += (missing_all.empty() ? "" : "; ") + std::string("step ") + std::to_string(entry.step_index) + " " +
                   missing;
  }
  if (!report.feasible) throw Failure(kFindings, "infeasible", missing_all);
  err << "feasible: all " << plan.steps.size() << " steps covered by " << registry.resources().size()
      << " resource(s)\n";
  return true;
}

SkillInversion inversion_from(const std::string& path) {
  return path.empty() ? SkillInversion::defaults() : load_inversion(read_file(path));
}

fs::path pdt_path(const std::string& dir, const std::string& instance) {
  if (instance.empty() || instance.find('/') != std::string::npos || instance == "." || instance == "..") {
    throw Failure(kUsage, "bad-flag", "invalid instance id '" + instance + "'");
  }
  return fs::path(dir) / (instance + ".pdt.json");
}

PdtInstance read_pdt(const fs::path& path) { return load_pdt(read_file(path.string())); }

struct Options {
  std::string format = "text";
  std::string model;
  std::string plan;
  std::string out;
  std::string registry;
  std::string inversion;
  std::string target;
  std::string mode = "extract";
  std::vector<std::string> broken;
  std::vector<std::string> replace;
  std::string inventory;
  std::string aml;
  std::string merge;
  std::string fragment_id;
  std::string instance;
  std::string component;
  std::string health;
  std::string at;
  std::string dir = ".";
  bool force = false;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream&) {
  auto model = load_model(read_file(o.model));
  auto diagnostics = validate(model);
  if (o.format == "json") {
    out << diagnostics_json(diagnostics);
  } else {
    print_diagnostics(diagnostics, out);
  }
  if (diagnostics.has_errors()) {
    throw Failure(kFindings, "invalid-model", std::to_string(diagnostics.error_count()) + " error(s) in " + o.model);
  }
  return kSuccess;
}

int finish_plan(const Plan& plan, const Options& o, std::ostream& out, std::ostream& err) {
  emit(save_plan(plan), o.out, out);
  if (!o.registry.empty()) report_feasibility(plan, o.registry, err);
  return kSuccess;
}

int cmd_plan(const std::string& which, const Options& o, std::ostream& out, std::ostream& err) {
  auto model = load_model(read_file(o.model));
  auto inversion = inversion_from(o.inversion);
  Plan plan;
  if (which == "assemble") {
    plan = assembly_recipe(model);
  } else if (which == "disassemble") {
    if (o.target.empty()) {
      plan = full_disassembly(model, inversion);
    } else {
      auto mode = parse_disassembly_mode(o.mode);
      if (!mode) throw Failure(kUsage, "bad-flag", "--mode must be expose or extract");
      plan = disassembly_to(model, parse_id(o.target, "--target"), *mode, inversion);
    }
  } else {
    std::set<NodeId> broken;
    for (const auto& value : o.broken) {
      for (const auto& id : split(value, ',')) broken.insert(parse_id(id, "--broken"));
    }
    if (broken.empty()) throw Failure(kUsage, "bad-flag", "--broken needs at least one id");
    plan = repair_plan(model, broken, parse_replacements(o.replace), inversion);
  }
  return finish_plan(plan, o, out, err);
}

int cmd_exec(const Options& o, std::ostream& out, std::ostream&) {
  auto plan = load_plan(read_file(o.plan));
  auto model = load_model(read_file(o.model));
  ExecState start;
  if (o.inventory.empty()) {
    start = declared_start(model, plan);
  } else if (o.inventory == "initial") {
    start = initial_inventory(model);
  } else if (o.inventory == "final") {
    start = final_inventory(model, plan);
  } else {
    start = load_inventory(read_file(o.inventory));
  }

  Trace trace;
  try {
    trace = run(plan, start, model);
  } catch (const ExecError& e) {
    std::string detail = e.detail();
    if (auto index = e.step_index()) {
      detail = "step " + std::to_string(*index) + " (" + step_text(plan.steps[*index]) + "): " + detail;
    }
    throw Failure(kRuntime, e.code(), detail);
  }

  if (o.format == "json") {
    out << trace_json(trace, start);
    return kSuccess;
  }
  out << "start: " << set_text(start.present) << "\n";
  for (const auto& entry : trace) {
    out << "[" << entry.step_index << "] " << step_text(plan.steps[entry.step_index]) << " -> "
        << set_text(entry.state.present) << "\n";
  }
  const auto& last = trace.empty() ? start : trace.back().state;
  out << "final: " << set_text(last.present) << "\n";
  for (const auto& [from, to] : last.substitutions) out << "substituted: " << from.str() << " -> " << to.str() << "\n";
  return kSuccess;
}

int cmd_import_aml(const Options& o, std::ostream& out, std::ostream&) {
  auto fragment = import_aml(read_file(o.aml));
  BiPanModel base;
  if (!o.merge.empty()) {
    base = load_model(read_file(o.merge));
  } else {
    ModelData data;
    data.id = o.fragment_id.empty() ? fs::path(o.aml).stem().string() : o.fragment_id;
    base = BiPanModel(std::move(data));
  }
  emit(save_model(merge(fragment, base)), o.out, out);
  return kSuccess;
}

int cmd_export_dot(const Options& o, std::ostream& out, std::ostream&) {
  auto model = load_model(read_file(o.model));
  if (o.plan.empty()) {
    emit(export_dot(model), o.out, out);
  } else {
    emit(export_dot(model, load_plan(read_file(o.plan))), o.out, out);
  }
  return kSuccess;
}

int cmd_pdt_new(const Options& o, std::ostream& out, std::ostream&) {
  auto path = pdt_path(o.dir, o.instance);
  if (fs::exists(path) && !o.force) throw Failure(kUsage, "instance-exists", path.string());
  auto model = load_model(read_file(o.model));
  auto pdt = create_instance(o.instance, model);
  write_file_atomic(path, save_pdt(pdt));
  out << path.string() << "\n";
  return kSuccess;
}

int cmd_pdt_set_health(const Options& o, std::ostream& out, std::ostream&) {
  auto path = pdt_path(o.dir, o.instance);
  auto health = parse_health(o.health);
  if (!health) throw Failure(kUsage, "bad-flag", "unknown health '" + o.health + "'");
  auto pdt = set_health(read_pdt(path), parse_id(o.component, "component"), *health, o.at);
  write_file_atomic(path, save_pdt(pdt));
  out << o.instance << ": " << o.component << " = " << to_string(*health) << "\n";
  return kSuccess;
}

int cmd_pdt_log(const Options& o, std::ostream& out, std::ostream&) {
  auto pdt = read_pdt(pdt_path(o.dir, o.instance));
  if (o.format == "json") {
    out << save_pdt(pdt);
    return kSuccess;
  }
  out << pdt.instance_id << " (model " << pdt.model_id << ", " << pdt.model_digest << ")\n";
  for (const auto& event : pdt.events) {
    out << event.timestamp << " " << event.kind;
    for (const auto& [key, value] : event.payload) out << " " << key << "=" << value;
    out << "\n";
  }
  for (const auto& [component, health] : pdt.health) {
    if (health != Health::Unknown) out << "health " << component.str() << " " << to_string(health) << "\n";
  }
  return kSuccess;
}

int cmd_pdt_plan_repair(const Options& o, std::ostream& out, std::ostream& err) {
  auto path = pdt_path(o.dir, o.instance);
  auto pdt = read_pdt(path);
  auto model_path = o.model.empty() ? (fs::path(o.dir) / (pdt.model_id + ".bipan.json")).string() : o.model;
  auto model = load_model(read_file(model_path));
  std::optional<std::string> at;
  if (!o.at.empty()) at = o.at;
  auto outcome = plan_repair_for(std::move(pdt), model, parse_replacements(o.replace), inversion_from(o.inversion), at);
  write_file_atomic(path, save_pdt(outcome.pdt));
  return finish_plan(outcome.plan, o, out, err);
}

int exit_code_for(const Error& e) {
  if (const auto* failure = dynamic_cast<const Failure*>(&e)) return failure->exit_code();
  if (dynamic_cast<const ExecError*>(&e) != nullptr) return kRuntime;
  const auto& code = e.code();
  if (code == "invalid-model") return kFindings;
  if (code == "digest-mismatch" || code == "digest-failure") return kRuntime;
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Bidirectional product/process/resource graphs: validate, plan, replay, twin", "bipan"};
  app.require_subcommand(1);

  auto* validate_cmd = app.add_subcommand("validate", "Check a model and print diagnostics");
  validate_cmd->add_option("model", o.model, "Model document")->required();
  validate_cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* plan_cmd = app.add_subcommand("plan", "Extract a plan from a model");
  plan_cmd->require_subcommand(1);
  std::map<std::string, CLI::App*> plan_subs;
  for (const auto* name : {"assemble", "disassemble", "repair"}) {
    auto* sub = plan_cmd->add_subcommand(name, std::string(name) + " plan");
    sub->add_option("model", o.model, "Model document")->required();
    sub->add_option("--out", o.out, "Write the plan here instead of stdout");
    sub->add_option("--registry", o.registry, "Resource registry; exit 1 if the plan is infeasible");
    sub->add_option("--inversion", o.inversion, "Skill inversion mapping document");
    plan_subs[name] = sub;
  }
  plan_subs["disassemble"]->add_option("--target", o.target, "Stop once this product is reachable");
  plan_subs["disassemble"]
      ->add_option("--mode", o.mode, "expose or extract (default extract)")
      ->check(CLI::IsMember({"expose", "extract"}));
  plan_subs["repair"]->add_option("--broken", o.broken, "Broken component ids, comma separated")->required();
  plan_subs["repair"]->add_option("--replace", o.replace, "Replacements as old=new, comma separated");

  auto* exec_cmd = app.add_subcommand("exec", "Replay a plan against the inventory oracle");
  exec_cmd->add_option("plan", o.plan, "Plan document")->required();
  exec_cmd->add_option("model", o.model, "Model document")->required();
  exec_cmd->add_option("--inventory", o.inventory, "initial, final or an inventory document");
  exec_cmd->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* import_cmd = app.add_subcommand("import-aml", "Read products from an AutomationML (CAEX) file");
  import_cmd->add_option("file", o.aml, "CAEX document")->required();
  import_cmd->add_option("--merge", o.merge, "Model to enrich with the imported products");
  import_cmd->add_option("--id", o.fragment_id, "Model id when not merging (default: file stem)");
  import_cmd->add_option("--out", o.out, "Output path");

  auto* dot_cmd = app.add_subcommand("export-dot", "Render a model as Graphviz DOT");
  dot_cmd->add_option("model", o.model, "Model document")->required();
  dot_cmd->add_option("--plan", o.plan, "Overlay this plan");
  dot_cmd->add_option("--out", o.out, "Output path");

  auto* pdt_cmd = app.add_subcommand("pdt", "Product digital twin instances");
  pdt_cmd->require_subcommand(1);
  auto* pdt_new = pdt_cmd->add_subcommand("new", "Create <instance>.pdt.json");
  pdt_new->add_option("instance", o.instance, "Serial number")->required();
  pdt_new->add_option("model", o.model, "Model document")->required();
  pdt_new->add_flag("--force", o.force, "Overwrite an existing instance");
  auto* pdt_set = pdt_cmd->add_subcommand("set-health", "Record a component health state");
  pdt_set->add_option("instance", o.instance, "Serial number")->required();
  pdt_set->add_option("component", o.component, "Product id")->required();
  pdt_set->add_option("health", o.health, "ok, degraded, broken or unknown")->required();
  pdt_set->add_option("--at", o.at, "ISO-8601 UTC timestamp")->required();
  auto* pdt_log = pdt_cmd->add_subcommand("log", "Print the event log");
  pdt_log->add_option("instance", o.instance, "Serial number")->required();
  pdt_log->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  auto* pdt_repair = pdt_cmd->add_subcommand("plan-repair", "Plan the replacement of every Broken component");
  pdt_repair->add_option("instance", o.instance, "Serial number")->required();
  pdt_repair->add_option("--replace", o.replace, "Replacements as old=new, comma separated");
  pdt_repair->add_option("--model", o.model, "Model document (default: <dir>/<model_id>.bipan.json)");
  pdt_repair->add_option("--at", o.at, "Timestamp of the plan-created event (default: latest event)");
  pdt_repair->add_option("--out", o.out, "Write the plan here instead of stdout");
  pdt_repair->add_option("--registry", o.registry, "Resource registry; exit 1 if the plan is infeasible");
  pdt_repair->add_option("--inversion", o.inversion, "Skill inversion mapping document");
  for (auto* sub : {pdt_new, pdt_set, pdt_log, pdt_repair}) {
    sub->add_option("--dir", o.dir, "Directory holding instance files (default .)");
  }

  std::vector<const char*> argv{"bipan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(o, out, err);
    for (const auto& [name, sub] : plan_subs) {
      if (sub->parsed()) return cmd_plan(name, o, out, err);
    }
    if (exec_cmd->parsed()) return cmd_exec(o, out, err);
    if (import_cmd->parsed()) return cmd_import_aml(o, out, err);
    if (dot_cmd->parsed()) return cmd_export_dot(o, out, err);
    if (pdt_new->parsed()) return cmd_pdt_new(o, out, err);
    if (pdt_set->parsed()) return cmd_pdt_set_health(o, out, err);
    if (pdt_log->parsed()) return cmd_pdt_log(o, out, err);
    if (pdt_repair->parsed()) return cmd_pdt_plan_repair(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << one_line(e.detail()) << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return kRuntime;
  }
  err << "error: usage: no command\n";
  return kUsage;
}

}  // namespace bipan::cli
