#include <algorithm>
#include <map>
#include <set>
#include <random>

#include "atchan/errors.hpp"
#include "atchan/tree.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace atchan;

namespace {

// Independent counting recursion: OR sums, AND/SAND multiply.
std::size_t count_scenarios(const AttackTree& t) {
  if (t.is_leaf()) return 1;
  std::size_t n = t.op == Op::Or ? 0 : 1;
  for (const auto& c : t.children) n = t.op == Op::Or ? n + count_scenarios(c) : n * count_scenarios(c);
  return n;
}

// Brute-force enumerator: every assignment of a child to every OR node,
// keeping only assignments whose unreachable OR nodes pick child 0.
AttackTree prune(const AttackTree& t, const std::map<std::string, std::size_t>& choice) {
  if (t.is_leaf()) return t;
  if (t.op == Op::Or) {
    const std::size_t k = choice.at(t.id);
    return node(t.id, Op::And, {prune(t.children[k], choice)}, t.action);
  }
  std::vector<AttackTree> kids;
  for (const auto& c : t.children) kids.push_back(prune(c, choice));
  return node(t.id, t.op, std::move(kids), t.action);
}

void reachable_ors(const AttackTree& t, const std::map<std::string, std::size_t>& choice,
                   std::set<std::string>& out) {
  if (t.is_leaf()) return;
  if (t.op == Op::Or) {
    out.insert(t.id);
    reachable_ors(t.children[choice.at(t.id)], choice, out);
    return;
  }
  for (const auto& c : t.children) reachable_ors(c, choice, out);
}

std::vector<std::string> brute_force_scenarios(const AttackTree& t) {
  std::vector<const AttackTree*> ors;
  for (const AttackTree* n : nodes(t))
    if (!n->is_leaf() && n->op == Op::Or) ors.push_back(n);
  std::vector<std::string> out;
  std::vector<std::size_t> pick(ors.size(), 0);
  while (true) {
    std::map<std::string, std::size_t> choice;
    for (std::size_t i = 0; i < ors.size(); ++i) choice[ors[i]->id] = pick[i];
    std::set<std::string> reach;
    reachable_ors(t, choice, reach);
    bool effective = true;
    for (std::size_t i = 0; i < ors.size(); ++i)
      if (!reach.count(ors[i]->id) && pick[i] != 0) effective = false;
    if (effective) out.push_back(to_sexpr(prune(t, choice)));
    std::size_t i = 0;
    for (; i < ors.size(); ++i) {
      if (++pick[i] < ors[i]->children.size()) break;
      pick[i] = 0;
    }
    if (i == ors.size()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sexprs(const std::vector<RTree>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(to_sexpr(r.tree()));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> normalized_keys(const std::vector<RTree>& rs) {
  std::vector<std::string> out;
  for (const auto& r : rs) out.push_back(structural_key(normalize(r.tree())));
  std::sort(out.begin(), out.end());
  return out;
}

AttackTree intro_tree() {
  return node("A0", Op::Or,
              {node("A1", Op::Sand, {leaf("A1.1"), leaf("A1.2"), leaf("A1.3")}), leaf("A2"),
               node("A3", Op::Sand, {leaf("A3.1"), leaf("A3.2"), leaf("A3.3")})});
}

}  // namespace

TEST_CASE("construction and validation") {
  CHECK_THROWS_AS(node("n", Op::And, {}), TreeError);
  CHECK_THROWS_AS(validate(node("n", Op::And, {leaf("a"), leaf("a")})), TreeError);
  CHECK_NOTHROW(validate(intro_tree()));
  CHECK(leaf_count(intro_tree()) == 7);
  CHECK(depth(intro_tree()) == 3);
  CHECK_THROWS_AS(RTree{intro_tree()}, TreeError);
}

TEST_CASE("normalize") {
  SUBCASE("OR children order is not observable") {
    auto x = node("n", Op::Or, {leaf("a"), leaf("b")});
    auto y = node("n", Op::Or, {leaf("b"), leaf("a")});
    CHECK(normalize(x) == normalize(y));
  }
  SUBCASE("single-child branches share one form") {
    auto s = node("n", Op::Sand, {leaf("a")});
    auto o = node("n", Op::Or, {leaf("a")});
    CHECK(normalize(s) == normalize(o));
    CHECK(normalize(s).op == Op::And);
  }
  SUBCASE("leaf is fixed") { CHECK(normalize(leaf("n")) == leaf("n")); }
  SUBCASE("SAND order is kept") {
    auto s = node("n", Op::Sand, {leaf("b"), leaf("a")});
    CHECK(normalize(s) == s);
  }
}

TEST_CASE("semantics") {
  SUBCASE("leaf") {
    auto r = semantics(leaf("n"));
    REQUIRE(r.size() == 1);
    CHECK(r[0].tree() == leaf("n"));
  }
  SUBCASE("OR wraps each alternative in a single-child AND") {
    auto r = semantics(node("n", Op::Or, {leaf("a"), leaf("b")}));
    CHECK(sexprs(r) == std::vector<std::string>{"(n AND a)", "(n AND b)"});
    CHECK(sexprs(r) == brute_force_scenarios(node("n", Op::Or, {leaf("a"), leaf("b")})));
  }
  SUBCASE("introductory tree has three scenarios") {
    auto r = semantics(intro_tree());
    CHECK(r.size() == 3);
    CHECK(sexprs(r) == brute_force_scenarios(intro_tree()));
  }
  SUBCASE("multiplicity is kept for duplicated alternatives") {
    auto r = semantics(node("m", Op::Or, {leaf("p", "q"), leaf("r", "q")}));
    CHECK(r.size() == 2);
    CHECK(normalized_keys(r)[0] == normalized_keys(r)[1]);
  }
}

TEST_CASE("equivalent") {
  auto t = intro_tree();
  CHECK(equivalent(t, t));
  CHECK(equivalent(node("n", Op::And, {leaf("a"), leaf("b")}, "act"), node("m", Op::And, {leaf("b"), leaf("a")}, "act")));
  CHECK_FALSE(equivalent(node("n", Op::Sand, {leaf("a"), leaf("b")}), node("n", Op::Sand, {leaf("b"), leaf("a")})));
  CHECK_FALSE(equivalent(leaf("a", "x"), leaf("a", "y")));
}

TEST_CASE("semantics properties on random trees") {
  std::mt19937 rng(20201);
  testing::TreeGenerator gen(rng, {});
  for (int i = 0; i < 300; ++i) {
    const AttackTree t = gen();
    CAPTURE(to_sexpr(t));
    REQUIRE_NOTHROW(validate(t));
    const auto sem = semantics(t);
    for (const auto& r : sem) CHECK_FALSE(contains_or(r.tree()));
    CHECK(sem.size() == count_scenarios(t));
    CHECK(sexprs(sem) == brute_force_scenarios(t));

    const AttackTree n = normalize(t);
    CHECK(normalize(n) == n);
    CHECK(equivalent(n, t));
    CHECK(normalized_keys(semantics(n)) == normalized_keys(sem));
  }
}
