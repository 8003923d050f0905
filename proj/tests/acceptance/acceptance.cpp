// Acceptance run. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "atchan/attributes.hpp"
#include "atchan/causal.hpp"
#include "atchan/dsl.hpp"
#include "atchan/effects.hpp"
#include "atchan/errors.hpp"
#include "atchan/mitigation.hpp"
#include "case_study.hpp"
#include "generators.hpp"

using namespace atchan;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

std::unique_ptr<dsl::Model> load(const std::string& name) {
  std::ifstream in(std::string(ATCHAN_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  auto r = dsl::parse_model(ss.str());
  if (!r.model)
    for (const auto& d : r.diagnostics) std::cerr << name << ":" << dsl::to_string(d) << "\n";
  return std::move(r.model);
}

LatticeFormula p(const char* t, const char* i) { return LatticeFormula::prim(t, i); }

const BranchReport* branch(const ConsistencyReport& r, const std::string& id) {
  for (const auto& b : r.branches)
    if (b.node == id) return &b;
  return nullptr;
}

Outcome ac1() {
  Outcome o;
  const auto t0 = Clock::now();
  auto m = load("auth.atc");
  o.expect(m != nullptr, "auth fixture does not resolve");
  if (!m) return o;
  const auto report = check_tree_consistency(m->tree, m->effects, m->witnesses);
  const double elapsed = seconds_since(t0);

  const auto* a1 = branch(report, "A1");
  o.expect(a1 && a1->verdict == Verdict::Consistent, "branch A1 is not consistent");
  o.expect(report.verdict == Verdict::Consistent, "tree is not consistent");

  // The witness is the one written in the model.
  const auto& w = m->witnesses.at("A1");
  o.expect(w.tuple.has_value(), "A1 has no tuple witness");
  if (w.tuple) {
    const auto& f = *w.tuple;
    using testing::slot;
    const auto img = [&](const char* x, const char* y) {
      auto it = f.type_map.find({slot(x, "Data"), slot(y, "AuI.I")});
      return it == f.type_map.end() ? std::string("-") : to_string(it->second);
    };
    o.expect(img("Disc", "Disc") == "Disc@AuI.I", "<Disc, Disc> does not map to Disc");
    o.expect(img("Disc", "Acc") == "Acc@AuI.I" && img("Acc", "Disc") == "Acc@AuI.I" &&
                 img("Acc", "Acc") == "Acc@AuI.I",
             "mixed generators do not map to Acc");
    o.expect(f.default_type && f.default_type->kind == LatticeFormula::Kind::Top, "default image is not top");
    const FamilyTuple want{TokenFamily{{{"Data", "Data"}}}, TokenFamily{{{"AuI.I", "AuI.I"}}}};
    o.expect(f.token_map.count("AuI.I") && f.token_map.at("AuI.I") == want, "token map of AuI.I differs");
  }

  // Cut sequence <{Data} |= Disc, {AuI.I} |= Disc>.
  const auto* n = find_node(m->tree, "A1");
  std::vector<Effect> kids;
  for (const auto& c : n->children) kids.push_back(m->effects.at(c.id));
  const auto cut = cut_sequence(kids);
  o.expect(cut.size() == 2, "cut sequence length is not 2");
  if (cut.size() == 2) {
    o.expect(cut[0].family == TokenFamily{{{"Data", "Data"}}} && cut[0].formula == p("Disc", "Data"),
             "first cut effect differs");
    o.expect(cut[1].family == TokenFamily{{{"AuI.I", "AuI.I"}}} && cut[1].formula == p("Disc", "AuI.I"),
             "second cut effect differs");
  }
  o.expect(elapsed < 1.0, "took " + seconds(elapsed));
  if (o.pass) o.detail = "A1 consistent, tree consistent, " + seconds(elapsed);
  return o;
}

Outcome ac2() {
  Outcome o;
  const auto t0 = Clock::now();
  const CheckOptions opts{10000};
  auto early = load("tpms_early.atc");
  auto revised = load("tpms_revised.atc");
  o.expect(early && revised, "TPMS fixtures do not resolve");
  if (!early || !revised) return o;
  const auto r1 = check_tree_consistency(early->tree, early->effects, early->witnesses, opts);
  for (const char* id : {"A0", "A1"}) {
    const auto* b = branch(r1, id);
    o.expect(b && b->verdict == Verdict::Inconsistent, std::string("early ") + id + " is not inconsistent");
  }
  const auto r2 = check_tree_consistency(revised->tree, revised->effects, revised->witnesses, opts);
  o.expect(!r2.branches.empty(), "revised tree has no branches");
  for (const auto& b : r2.branches)
    o.expect(b.verdict == Verdict::Consistent, "revised " + b.node + " is not consistent");
  const double elapsed = seconds_since(t0);
  o.expect(elapsed < 5.0, "took " + seconds(elapsed));
  if (o.pass)
    o.detail = "early A0, A1 inconsistent; revised " + std::to_string(r2.branches.size()) +
               " branches consistent, " + seconds(elapsed);
  return o;
}

Outcome ac3() {
  Outcome o;
  TypeOrder order;
  order.add("a", "b");
  order.close();
  // Two primitive types on one index, and again on two indices.
  std::size_t pairs = 0, disagreements = 0;
  for (const auto& pool : {std::vector<Literal>{{"a", "1"}, {"b", "1"}},
                           std::vector<Literal>{{"a", "1"}, {"b", "1"}, {"a", "2"}, {"b", "2"}}}) {
    const auto fs = testing::enumerate_formulas(pool, 3);
    for (const auto& g : fs)
      for (const auto& d : fs) {
        ++pairs;
        if (leq(g, d, order) != leq_oracle(g, d, order)) ++disagreements;
      }
  }
  o.expect(disagreements == 0, std::to_string(disagreements) + " exhaustive disagreements");

  std::mt19937 rng(3);
  const std::vector<Literal> big{{"a", "1"}, {"b", "1"}, {"c", "1"}, {"a", "2"}, {"b", "2"}, {"c", "2"}, {"a", "3"}};
  std::size_t random_disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto g = testing::random_formula(rng, big, 6);
    const auto d = testing::random_formula(rng, big, 6);
    if (leq(g, d, order) != leq_oracle(g, d, order)) ++random_disagreements;
  }
  o.expect(random_disagreements == 0, std::to_string(random_disagreements) + " random disagreements");
  if (o.pass) o.detail = std::to_string(pairs) + " exhaustive pairs, 100000 random pairs, 0 disagreements";
  return o;
}

Outcome ac4() {
  Outcome o;
  const std::vector<std::string> idx{"1", "2"};
  std::mt19937 rng(4);
  std::size_t failures = 0;
  for (int i = 0; i < 50; ++i) {
    const auto c1 = testing::random_classification(rng, "C1", 1 + i % 3, 2);
    const auto c2 = testing::random_classification(rng, "C2", 1 + (i / 3) % 3, 2);
    const auto s = sum_classification(c1, c2);
    if (!im_violations(lift_embedding(c1, "1"), base_satisfaction(c1), fd_satisfaction(c1),
                       testing::singleton_families_for(c1), c1.types())
             .empty())
      ++failures;
    for (std::size_t k : {1u, 2u}) {
      const Classification& part = k == 1 ? c1 : c2;
      if (!check_infomorphism(inc_embedding(k, part, s)).empty()) ++failures;
      if (!im_violations(lifted_inc(k), fd_satisfaction(part), fd_satisfaction(s), singleton_families(s, idx),
                         generator_types(part, idx))
               .empty())
        ++failures;
    }
    // conj: (IM), and mono by enumeration over every generator tuple.
    const std::vector<const Classification*> parts{&c1, &c2};
    const auto conj = conj_embedding(2);
    std::vector<FormulaTuple> types;
    for (const auto& g1 : testing::generator_slots(c1, idx))
      for (const auto& g2 : testing::generator_slots(c2, idx)) types.push_back({g1, g2});
    Satisfaction<FamilyTuple, FormulaTuple> tuple_sat = [&](const FamilyTuple& a, const FormulaTuple& g) {
      return tuple_holds(parts, a, g);
    };
    if (!im_violations(conj, tuple_sat, fd_satisfaction(s), testing::mixed_families(s, idx), types).empty())
      ++failures;
    for (std::size_t x = 0; x < types.size(); ++x)
      for (std::size_t y = x + 1; y < types.size(); ++y) {
        const bool same =
            equivalent(types[x][0], types[y][0], c1.order()) && equivalent(types[x][1], types[y][1], c2.order());
        if (same != equivalent(conj.up(types[x]), conj.up(types[y]), s.order())) ++failures;
      }
  }
  o.expect(failures == 0, std::to_string(failures) + " embedding failures");

  std::size_t law_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto c3 = testing::random_classification(rng, "C3", 2, 3);
    auto g = testing::random_infomorphism(rng, c3, "C2", 3, 1);
    auto f = testing::random_infomorphism(rng, *g.source, "C1", 3, 1);
    const auto Fgf = fd_map(compose(g.f, f.f));
    const auto Fg = fd_map(g.f);
    const auto Ff = fd_map(f.f);
    const auto Fid = fd_map(identity_infomorphism(*f.source));
    std::vector<Literal> pool;
    for (const auto& t : f.source->types())
      for (const auto& x : idx) pool.push_back({t, x});
    const auto x = testing::random_formula(rng, pool, 4);
    const auto y = testing::random_formula(rng, pool, 4);
    if (!(Fgf.up(x) == Fg.up(Ff.up(x)))) ++law_failures;
    if (!(Fid.up(x) == x)) ++law_failures;
    if (leq(x, y, f.source->order()) && !leq(Ff.up(x), Ff.up(y), g.source->order())) ++law_failures;
    const auto a = testing::random_family(rng, c3.tokens(), idx, 2);
    if (!(Fgf.down(a) == Ff.down(Fg.down(a)))) ++law_failures;
    const auto b = testing::random_family(rng, f.source->tokens(), idx, 2);
    if (!(Fid.down(b) == b)) ++law_failures;
  }
  o.expect(law_failures == 0, std::to_string(law_failures) + " fd_map law failures");
  if (o.pass) o.detail = "50 classifications, 1000 fd_map samples, 0 failures";
  return o;
}

Outcome ac5() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937 rng(5);
  testing::TreeGenerator unique(rng, {4, 3, 8, 0});
  testing::TreeGenerator shared(rng, {4, 3, 8, 3});
  std::size_t failures = 0;
  for (int i = 0; i < 200; ++i) {
    const auto t = i % 2 ? unique() : shared();
    if (!check_commutation(t)) ++failures;
  }
  const double elapsed = seconds_since(t0);
  o.expect(failures == 0, std::to_string(failures) + " trees do not commute");
  o.expect(elapsed < 30.0, "took " + seconds(elapsed));
  if (o.pass) o.detail = "200 trees commute, " + seconds(elapsed);
  return o;
}

Outcome ac6() {
  Outcome o;
  std::mt19937 rng(6);
  std::bernoulli_distribution half(0.5);
  std::size_t failures = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    std::deque<Classification> cs;
    std::vector<Effect> es;
    bool any = false, all = true;
    for (std::size_t k = 0; k < n; ++k) {
      auto& c = cs.emplace_back(testing::random_classification(rng, "C" + std::to_string(k), 2, 2, false));
      const std::string tok = "t" + std::to_string(k % 2);
      es.push_back(Effect{std::to_string(k), &c, TokenFamily{{{tok, tok}}}, p(half(rng) ? "y0" : "y1", tok.c_str())});
      const bool h = fd_holds(c, es.back().family, es.back().formula);
      any = any || h;
      all = all && h;
    }
    const auto ior = integrate(Op::Or, es);
    const auto iand = integrate(Op::And, es);
    if (fd_holds(ior.sum, ior.family, ior.formula) != any) ++failures;
    if (fd_holds(iand.sum, iand.family, iand.formula) != all) ++failures;

    const std::vector<Effect> one{es.front()};
    const auto so = integrate(Op::Or, one), sa = integrate(Op::And, one), ss = integrate(Op::Sand, one);
    if (!(so.family == sa.family && sa.family == ss.family)) ++failures;
    if (!(equivalent(so.formula, sa.formula, so.sum.order()) && equivalent(sa.formula, ss.formula, sa.sum.order())))
      ++failures;
  }
  o.expect(failures == 0, std::to_string(failures) + " failures");
  if (o.pass) o.detail = "100 branch instances and singleton agreement, 0 failures";
  return o;
}

Outcome ac7() {
  Outcome o;
  auto m = load("auth.atc");
  o.expect(m != nullptr, "auth fixture does not resolve");
  if (!m) return o;
  const AttackTree* a1 = find_node(m->tree, "A1");
  const auto& w = m->witnesses.at("A1");
  const TypeOrder& order = m->effects.at("A1").cls->order();
  const auto acc = p("Acc", "AuI.I");

  // With E1.2 at Disc, the only reduction of E1.3 reaching Acc is Acc.
  const auto req = required_child_reductions(*a1, m->effects, w, {{"A1.2", p("Disc", "Data")}}, "A1.3", acc);
  o.expect(req.size() == 1 && equivalent(req.front(), acc, order), "required reduction of A1.3 is not Acc@AuI.I");

  // Reducing E1.3 to Acc admits Acc as a parent residual, and the bound holds.
  const Residuals reduced{{"A1.2", p("Disc", "Data")}, {"A1.3", acc}};
  const auto space = admissible_parent_residuals(*a1, m->effects, w, reduced);
  bool has_acc = false, has_disc = false;
  for (const auto& d : space.formulas) {
    has_acc = has_acc || equivalent(d, acc, order);
    has_disc = has_disc || equivalent(d, p("Disc", "AuI.I"), order);
  }
  o.expect(!space.partial && has_acc && !has_disc, "admissible parent residuals differ");
  const auto image = residual_image(*a1, m->effects, w, reduced);
  o.expect(check_mitigation_bound(image, m->effects.at("A1").formula, acc, order), "bound fails for Acc");
  o.expect(check_residual_preconditions(*a1, m->effects, w, reduced).empty(), "reduction breaks a precondition");
  o.expect(equivalent(join(image, m->effects.at("A1").formula), acc, order), "reduced image is not Acc@AuI.I");
  // Without reducing E1.3 the image stays at Disc, so Acc is not realized.
  const auto unreduced = residual_image(*a1, m->effects, w, {{"A1.2", p("Disc", "Data")}});
  o.expect(!equivalent(join(unreduced, m->effects.at("A1").formula), acc, order),
           "Acc@AuI.I realized without reducing A1.3");

  std::mt19937 rng(7);
  const std::vector<Literal> pool{{"a", "x"}, {"b", "x"}, {"c", "x"}, {"a", "y"}, {"b", "y"}};
  TypeOrder ab;
  ab.add("a", "b");
  ab.close();
  std::size_t unsound = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto orig = testing::random_formula(rng, pool, 3);
    const auto img = testing::random_formula(rng, pool, 4);
    // A reduction of the parent effect: something above it.
    const auto res = join(orig, testing::random_formula(rng, pool, 3));
    if (check_mitigation_bound(img, orig, res, ab) != leq_oracle(join(img, orig), res, ab)) ++unsound;
  }
  o.expect(unsound == 0, std::to_string(unsound) + " bound disagreements");
  if (o.pass) o.detail = "A1.3 must move to Acc@AuI.I; 1000 random bounds, 0 violations";
  return o;
}

std::uint64_t fold_experts(const AttackTree& t, const std::map<std::string, std::uint64_t>& v) {
  if (t.is_leaf()) return v.at(t.id);
  std::uint64_t acc = t.op == Op::Or ? UINT64_MAX : 0;
  for (const auto& c : t.children) {
    const std::uint64_t x = fold_experts(c, v);
    if (t.op == Op::Or) acc = std::min(acc, x);
    else if (t.op == Op::And) acc += x;
    else acc = std::max(acc, x);
  }
  return acc;
}

Outcome ac8() {
  Outcome o;
  std::mt19937 rng(8);
  testing::TreeGenerator gen(rng, {});
  std::uniform_int_distribution<std::uint64_t> val(0, 9);
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const AttackTree t = gen();
    std::map<std::string, std::uint64_t> v;
    for (const AttackTree* n : nodes(t))
      if (n->is_leaf()) v[n->id] = val(rng);
    if (evaluate_attribute(t, min_experts(v)) != fold_experts(t, v)) ++failures;
  }
  o.expect(failures == 0, std::to_string(failures) + " fold disagreements");

  auto m = load("intro.atc");
  o.expect(m != nullptr, "intro fixture does not resolve");
  if (!m) return o;
  std::map<std::string, bool> poss;
  for (const auto& [leaf_id, value] : m->attributes.at("possibility")) poss[leaf_id] = value == "true";
  o.expect(evaluate_attribute(m->tree, possibility(poss)), "root is not possible");
  // The root is possible only through A1: dropping any of its steps blocks it.
  for (const char* id : {"A1.1", "A1.2", "A1.3"}) {
    auto less = poss;
    less[id] = false;
    o.expect(!evaluate_attribute(m->tree, possibility(less)), std::string("root still possible without ") + id);
  }
  if (o.pass) o.detail = "1000 trees match the fold oracle; root possible via A1.1-A1.3 only";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
