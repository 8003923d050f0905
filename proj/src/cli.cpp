#include "atchan/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "atchan/attributes.hpp"
#include "atchan/causal.hpp"
#include "atchan/dsl.hpp"
#include "atchan/errors.hpp"
#include "atchan/mitigation.hpp"
#include "json.hpp"

namespace atchan::cli {

using nlohmann::json;

namespace {

int worst(int a, int b) {
  auto rank = [](int c) { return c == kUsage ? 3 : c == kFound ? 2 : c == kUnverified ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

std::string nf(const LatticeFormula& f, const TypeOrder& order) { return to_string(to_formula(normal_form(f, order))); }

json diagnostic_json(const dsl::Diagnostic& d) {
  return {{"severity", d.severity == dsl::Severity::Error ? "error" : "warning"},
          {"line", d.span.line},
          {"column", d.span.column},
          {"length", d.span.length},
          {"code", d.code},
          {"message", d.message}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  os << text;
}

// Commands -------------------------------------------------------------------

int check(const dsl::Model& m, const Options& opts, json& r) {
  CheckOptions co;
  co.search_cap = opts.max_search;
  const auto report = check_tree_consistency(m.tree, m.effects, m.witnesses, co);
  auto branches = report.branches;
  std::sort(branches.begin(), branches.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
  r["branches"] = json::array();
  for (const auto& b : branches)
    r["branches"].push_back({{"node", b.node},
                             {"op", std::string(to_string(b.op))},
                             {"verdict", to_string(b.verdict)},
                             {"complete", b.complete ? json(*b.complete) : json(nullptr)},
                             {"reasons", b.reasons}});
  r["verdict"] = to_string(report.verdict);
  switch (report.verdict) {
    case Verdict::Consistent: return kPass;
    case Verdict::Inconsistent: return kFound;
    case Verdict::Unverified: return kUnverified;
  }
  return kUnverified;
}

template <class Value>
json law_json(const AttributeSpec<Value>& spec, const std::vector<std::vector<Value>>& samples) {
  const auto laws = validate_attribute_laws(spec, samples);
  json v = json::array();
  for (const auto& x : laws.violations) v.push_back({{"sample", x.sample}, {"position", x.position}, {"detail", x.detail}});
  return {{"ok", laws.ok()}, {"samples", samples.size()}, {"violations", v}};
}

template <class Value>
int evaluate(const dsl::Model& m, const AttributeSpec<Value>& spec, const std::vector<Value>& pool,
             std::uint64_t seed, json& r) {
  json values = json::object();
  std::vector<std::vector<Value>> samples;
  try {
    for (const auto* n : nodes(m.tree)) {
      values[n->id] = evaluate_attribute(*n, spec);
      if (n->is_leaf()) continue;
      std::vector<Value> kids;
      for (const auto& c : n->children) kids.push_back(evaluate_attribute(c, spec));
      samples.push_back(std::move(kids));
    }
  } catch (const UnvaluedLeafError& e) {
    r["status"] = "error";
    r["error"] = e.what();
    return kUsage;
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 100; ++i) {
    std::vector<Value> xs(std::uniform_int_distribution<std::size_t>(1, 4)(rng));
    for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    samples.push_back(std::move(xs));
  }
  r["value"] = values[m.tree.id];
  r["nodes"] = values;
  r["laws"] = law_json(spec, samples);
  return r["laws"]["ok"].get<bool>() ? kPass : kFound;
}

int attr(const dsl::Model& m, const Options& opts, json& r) {
  r["attribute"] = opts.attribute;
  auto it = m.attributes.find(opts.attribute);
  if (it == m.attributes.end()) {
    r["status"] = "error";
    r["error"] = "no attribute block '" + opts.attribute + "'";
    return kUsage;
  }
  if (opts.attribute == "possibility") {
    std::map<std::string, bool> leaves;
    for (const auto& [id, v] : it->second) leaves[id] = v == "true";
    return evaluate(m, possibility(leaves), std::vector<bool>{false, true}, opts.seed, r);
  }
  std::map<std::string, std::uint64_t> leaves;
  std::vector<std::uint64_t> pool{0, 1, 2, 3, 5, 8};
  for (const auto& [id, v] : it->second) pool.push_back(leaves[id] = std::stoull(v));
  return evaluate(m, min_experts(leaves), pool, opts.seed, r);
}

int mitigate(const dsl::Model& m, const Options& opts, json& r) {
  int code = kPass;
  r["residuals"] = json::array();
  for (const auto& [id, g] : m.residuals) {
    const Effect& e = m.effects.at(id);
    const bool ok = is_reduction(e.formula, g, e.cls->order());
    if (!ok) code = worst(code, kFound);
    r["residuals"].push_back(
        {{"node", id}, {"original", to_string(e.formula)}, {"residual", to_string(g)}, {"reduction", ok}});
  }
  CheckOptions co;
  co.search_cap = opts.max_search;
  r["branches"] = json::array();
  std::vector<const AttackTree*> branches;
  for (const auto* n : nodes(m.tree)) {
    if (n->is_leaf()) continue;
    bool touched = m.residuals.count(n->id) > 0;
    for (const auto& c : n->children) touched = touched || m.residuals.count(c.id) > 0;
    if (touched) branches.push_back(n);
  }
  std::sort(branches.begin(), branches.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const auto* n : branches) {
    json b{{"node", n->id}, {"op", std::string(to_string(n->op))}};
    auto wit = m.witnesses.find(n->id);
    const BranchReport br =
        check_branch_consistency(*n, m.effects, wit == m.witnesses.end() ? nullptr : &wit->second, co);
    if (br.verdict != Verdict::Consistent) {
      b["status"] = "unverified";
      b["reason"] = "branch is " + to_string(br.verdict) + "; residuals need a consistent witness";
      code = worst(code, kUnverified);
      r["branches"].push_back(std::move(b));
      continue;
    }
    const ConsistencyWitness& w = br.used;
    const Effect& parent = m.effects.at(n->id);
    const TypeOrder& order = parent.cls->order();
    const auto pr = m.residuals.find(n->id);
    const LatticeFormula target = pr == m.residuals.end() ? parent.formula : pr->second;
    try {
      const LatticeFormula image = residual_image(*n, m.effects, w, m.residuals);
      const LatticeFormula least = join(image, parent.formula);
      const bool bound = check_mitigation_bound(image, parent.formula, target, order);
      b["image"] = nf(image, order);
      b["parent_residual"] = to_string(target);
      b["bound"] = bound;
      b["realized"] = equivalent(least, target, order);
      if (!bound) code = worst(code, kFound);
      json weak = json::array();
      for (const auto& v : check_or_branch_weakening(*n, m.effects, w, m.residuals))
        weak.push_back({{"child", v.child}, {"image", nf(v.image, order)}});
      if (!weak.empty()) code = worst(code, kFound);
      b["weakening"] = weak;
      json pre = json::array();
      for (const auto& [child, reason] : check_residual_preconditions(*n, m.effects, w, m.residuals))
        pre.push_back({{"child", child}, {"reason", reason}});
      if (!pre.empty()) code = worst(code, kFound);
      b["preconditions"] = pre;
      const auto space = admissible_parent_residuals(*n, m.effects, w, m.residuals);
      b["admissible"] = {{"count", space.formulas.size()}, {"partial", space.partial}, {"least", nf(least, order)}};
      if (space.partial) code = worst(code, kUnverified);
      if (pr != m.residuals.end()) {
        json req = json::array();
        for (const auto& c : n->children) {
          if (m.residuals.count(c.id)) continue;
          Residuals fixed = m.residuals;
          fixed.erase(n->id);
          json cands = json::array();
          for (const auto& g : required_child_reductions(*n, m.effects, w, fixed, c.id, target)) {
            Residuals trial = fixed;
            trial[c.id] = g;
            json breaks = json::array();
            for (const auto& [child, reason] : check_residual_preconditions(*n, m.effects, w, trial))
              breaks.push_back(child);
            cands.push_back({{"residual", to_string(g)}, {"breaks_preconditions_of", breaks}});
          }
          req.push_back({{"child", c.id}, {"candidates", cands}});
        }
        b["required"] = req;
      }
    } catch (const Error& e) {
      b["status"] = "unverified";
      b["reason"] = e.what();
      code = worst(code, kUnverified);
    }
    r["branches"].push_back(std::move(b));
  }
  r["verdict"] = code == kPass ? "pass" : code == kFound ? "violation" : "unverified";
  return code;
}

int project_cmd(const dsl::Model& m, const Options& opts, const std::string& stem, json& r) {
  try {
    const auto rep = commutation_report(m.tree, CommutationMode::Closure);
    r["commutes"] = rep.commutes;
    r["literal_commutes"] = check_commutation(m.tree, CommutationMode::Literal);
    r["scenarios"] = semantics(m.tree).size();
    json graphs = json::array();
    for (const auto& g : rep.intermediate) graphs.push_back(dsl::export_dot(g));
    r["graphs"] = graphs;
    if (opts.dot_dir)
      for (std::size_t k = 0; k < rep.intermediate.size(); ++k)
        write_file(std::filesystem::path(*opts.dot_dir) / (stem + ".graph" + std::to_string(k) + ".dot"),
                   dsl::export_dot(rep.intermediate[k]) + "\n");
    return rep.commutes ? kPass : kFound;
  } catch (const CapExceededError& e) {
    r["status"] = "unverified";
    r["reason"] = e.what();
    return kUnverified;
  }
}

int scenarios(const dsl::Model& m, json& r) {
  const auto sem = semantics(m.tree);
  json list = json::array();
  for (std::size_t i = 0; i < sem.size();) {
    std::size_t j = i;
    while (j < sem.size() && sem[j] == sem[i]) ++j;
    list.push_back({{"scenario", to_sexpr(sem[i].tree())}, {"multiplicity", j - i}});
    i = j;
  }
  r["scenarios"] = list;
  return kPass;
}

json run_file(const std::string& path, const Options& opts, int& code) {
  json r{{"file", path}, {"diagnostics", json::array()}};
  std::ifstream in(path);
  if (!in) {
    r["status"] = "error";
    r["error"] = "cannot read " + path;
    code = kUsage;
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parsed = dsl::parse_model(buf.str());
  bool blocked = parsed.has_errors();
  for (const auto& d : parsed.diagnostics) {
    r["diagnostics"].push_back(diagnostic_json(d));
    blocked = blocked || (opts.strict && d.severity == dsl::Severity::Warning);
  }
  if (blocked || !parsed.model) {
    r["status"] = "error";
    code = kUsage;
    return r;
  }
  const dsl::Model& m = *parsed.model;
  r["tree"] = m.tree_name;
  const std::string stem = std::filesystem::path(path).stem().string();
  try {
    if (opts.dot_dir && opts.command != "scenarios")
      write_file(std::filesystem::path(*opts.dot_dir) / (stem + ".dot"), dsl::export_dot(m.tree, m.effects));
    if (opts.command == "check") {
      code = check(m, opts, r);
    } else if (opts.command == "attr") {
      code = attr(m, opts, r);
    } else if (opts.command == "mitigate") {
      code = mitigate(m, opts, r);
    } else if (opts.command == "project") {
      code = project_cmd(m, opts, stem, r);
    } else {
      code = scenarios(m, r);
    }
  } catch (const Error& e) {
    r["status"] = "error";
    r["error"] = e.what();
    code = kUsage;
  }
  if (!r.contains("status")) r["status"] = "ok";
  return r;
}

// Text rendering ---------------------------------------------------------------

struct Painter {
  bool on;
  std::string operator()(const std::string& word) const {
    if (!on) return word;
    const char* c = word == "consistent" || word == "pass" || word == "true" ? "32"
                    : word == "inconsistent" || word == "violation" || word == "false" ? "31"
                                                                                      : "33";
    return std::string("\x1b[") + c + "m" + word + "\x1b[0m";
  }
};

std::string str(const json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

void render_text(const json& file, const Options& opts, std::ostream& out) {
  const Painter paint{opts.color};
  const std::string path = file["file"];
  out << "== " << path;
  if (file.contains("tree")) out << " (tree " << str(file["tree"]) << ")";
  out << "\n";
  for (const auto& d : file["diagnostics"])
    out << path << ":" << d["line"] << ":" << d["column"] << ": " << str(d["severity"]) << " " << str(d["code"])
        << ": " << str(d["message"]) << "\n";
  if (file.contains("error")) out << "error: " << str(file["error"]) << "\n";
  if (file["status"] == "error") return;

  if (opts.command == "check") {
    for (const auto& b : file["branches"]) {
      out << "  " << str(b["node"]) << "  " << str(b["op"]) << "  " << paint(str(b["verdict"]));
      if (b["complete"].is_boolean()) out << (b["complete"].get<bool>() ? "  complete" : "  incomplete");
      out << "\n";
      for (const auto& reason : b["reasons"]) out << "      " << str(reason) << "\n";
    }
    out << "result: " << paint(str(file["verdict"])) << "\n";
  } else if (opts.command == "attr") {
    for (const auto& [id, v] : file["nodes"].items()) out << "  " << id << " = " << v.dump() << "\n";
    out << "value: " << file["value"].dump() << "\n";
    out << "laws: " << paint(file["laws"]["ok"].get<bool>() ? "pass" : "violation") << " ("
        << file["laws"]["samples"] << " samples)\n";
  } else if (opts.command == "mitigate") {
    for (const auto& x : file["residuals"])
      out << "  residual " << str(x["node"]) << ": " << str(x["original"]) << " -> " << str(x["residual"])
          << (x["reduction"].get<bool>() ? "" : "  " + paint("not a reduction")) << "\n";
    for (const auto& b : file["branches"]) {
      out << "  branch " << str(b["node"]) << " " << str(b["op"]);
      if (b.contains("reason")) {
        out << "  " << paint("unverified") << ": " << str(b["reason"]) << "\n";
        continue;
      }
      out << ": image " << str(b["image"]) << ", residual " << str(b["parent_residual"]) << ", bound "
          << paint(b["bound"].get<bool>() ? "true" : "false") << ", realized " << b["realized"].dump() << "\n";
      for (const auto& v : b["weakening"])
        out << "    " << paint("violation") << ": image of " << str(v["child"]) << " is " << str(v["image"])
            << ", not below the parent residual\n";
      for (const auto& p : b["preconditions"])
        out << "    " << paint("violation") << ": precondition of " << str(p["child"]) << ": " << str(p["reason"])
            << "\n";
      out << "    admissible parent residuals: " << b["admissible"]["count"] << (b["admissible"]["partial"].get<bool>() ? "+" : "")
          << ", least " << str(b["admissible"]["least"]) << "\n";
      if (b.contains("required"))
        for (const auto& q : b["required"]) {
          out << "    required for " << str(q["child"]) << ":";
          if (q["candidates"].empty()) out << " none";
          for (const auto& c : q["candidates"]) {
            out << " " << str(c["residual"]);
            if (!c["breaks_preconditions_of"].empty())
              out << " (breaks precondition of " << str(c["breaks_preconditions_of"][0]) << ")";
          }
          out << "\n";
        }
    }
    out << "result: " << paint(str(file["verdict"])) << "\n";
  } else if (opts.command == "project") {
    if (file.contains("reason")) {
      out << paint("unverified") << ": " << str(file["reason"]) << "\n";
      return;
    }
    for (const auto& g : file["graphs"]) out << "  " << str(g) << "\n";
    out << "scenarios: " << file["scenarios"] << ", graphs: " << file["graphs"].size() << "\n";
    out << "commutes: " << paint(file["commutes"].get<bool>() ? "true" : "false")
        << " (without closing projections: " << file["literal_commutes"].dump() << ")\n";
  } else {
    for (const auto& s : file["scenarios"]) {
      out << "  " << str(s["scenario"]);
      if (s["multiplicity"] != 1) out << "  x" << s["multiplicity"];
      out << "\n";
    }
  }
}

}  // namespace

bool use_color(const char* env_value, bool tty) {
  const std::string v = env_value ? env_value : "auto";
  if (v == "always") return true;
  if (v == "never") return false;
  return tty;
}

int run(const Options& opts, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kCommands{"check", "attr", "mitigate", "project", "scenarios"};
  if (std::find(kCommands.begin(), kCommands.end(), opts.command) == kCommands.end()) {
    err << "unknown command '" << opts.command << "'\n";
    return kUsage;
  }
  if (opts.files.empty()) {
    err << "no model files given\n";
    return kUsage;
  }
  auto files = opts.files;
  std::sort(files.begin(), files.end());
  json report{{"schema", kReportSchema}, {"command", opts.command}, {"files", json::array()}};
  int code = kPass;
  for (const auto& f : files) {
    int c = kPass;
    json r = run_file(f, opts, c);
    r["exit_code"] = c;
    code = worst(code, c);
    report["files"].push_back(std::move(r));
  }
  report["exit_code"] = code;
  if (opts.format == Format::Json) {
    out << report.dump(2) << "\n";
  } else {
    for (const auto& f : report["files"]) render_text(f, opts, out);
  }
  return code;
}

}  // namespace atchan::cli
