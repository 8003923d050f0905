#include <random>

#include "atchan/attributes.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace atchan;

namespace {

// Exhaustive fold oracle written against the (min, Sum, max) definition
// directly, without the generic combinator machinery.
std::uint64_t fold_experts(const AttackTree& t, const std::map<std::string, std::uint64_t>& v) {
  if (t.is_leaf()) return v.at(t.id);
  std::uint64_t acc = t.op == Op::Or ? UINT64_MAX : 0;
  for (const auto& c : t.children) {
    const std::uint64_t x = fold_experts(c, v);
    if (t.op == Op::Or) acc = x < acc ? x : acc;
    else if (t.op == Op::And) acc += x;
    else acc = x > acc ? x : acc;
  }
  return acc;
}

}  // namespace

TEST_CASE("min-experts") {
  auto spec = min_experts({{"a", 2}, {"b", 1}, {"c", 3}});
  CHECK(evaluate_attribute(leaf("a"), spec) == 2);
  auto t = node("n", Op::Or, {leaf("a"), node("m", Op::And, {leaf("b"), leaf("c")})});
  CHECK(evaluate_attribute(t, spec) == 2);
  CHECK(evaluate_attribute(node("m", Op::Sand, {leaf("b"), leaf("c")}), spec) == 3);
}

TEST_CASE("unvalued leaf names the node") {
  auto spec = min_experts({{"a", 2}});
  try {
    evaluate_attribute(node("n", Op::And, {leaf("a"), leaf("zz")}), spec);
    FAIL("expected UnvaluedLeafError");
  } catch (const UnvaluedLeafError& e) {
    CHECK(e.node_id() == "zz");
  }
}

TEST_CASE("possibility reproduces the introductory example") {
  auto t = node("A0", Op::Or,
                {node("A1", Op::Sand, {leaf("A1.1"), leaf("A1.2"), leaf("A1.3")}), leaf("A2"),
                 node("A3", Op::Sand, {leaf("A3.1"), leaf("A3.2"), leaf("A3.3")})});
  auto spec = possibility({{"A1.1", true}, {"A1.2", true}, {"A1.3", true}, {"A2", false},
                           {"A3.1", true}, {"A3.2", false}, {"A3.3", true}});
  CHECK(evaluate_attribute(t, spec));
  spec.leaf_values["A1.2"] = false;
  CHECK_FALSE(evaluate_attribute(t, spec));
}

TEST_CASE("attribute laws") {
  SUBCASE("(min, Sum, max) is lawful on all small tuples") {
    std::vector<std::vector<std::uint64_t>> samples;
    for (std::uint64_t a = 0; a < 4; ++a) {
      samples.push_back({a});
      for (std::uint64_t b = 0; b < 4; ++b) {
        samples.push_back({a, b});
        for (std::uint64_t c = 0; c < 4; ++c) samples.push_back({a, b, c});
      }
    }
    auto report = validate_attribute_laws(min_experts({}), samples);
    CHECK(report.ok());
  }
  SUBCASE("subtraction for AND breaks transposition") {
    AttributeSpec<std::int64_t> spec;
    spec.mu_or = [](const std::vector<std::int64_t>& xs) { return xs[0]; };
    spec.mu_and = [](const std::vector<std::int64_t>& xs) {
      std::int64_t acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc -= xs[i];
      return acc;
    };
    spec.mu_sand = spec.mu_and;
    std::vector<std::vector<std::int64_t>> samples{{5, 2}};
    auto report = validate_attribute_laws(spec, samples);
    bool found = false;
    for (const auto& v : report.violations) found |= v.kind == LawViolation::Kind::AndTransposition;
    CHECK(found);
  }
  SUBCASE("singleton disagreement") {
    auto spec = min_experts({});
    spec.mu_sand = [](const std::vector<std::uint64_t>& xs) { return xs[0] + 1; };
    std::vector<std::vector<std::uint64_t>> samples{{7}};
    auto report = validate_attribute_laws(spec, samples);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == LawViolation::Kind::SingletonAgreement);
  }
}

TEST_CASE("quasi-attribute hook runs after the children are combined") {
  auto spec = min_experts({{"a", 1}, {"b", 2}});
  spec.node_contribution = [](const AttackTree& n, const std::uint64_t& v) { return n.id == "n" ? v * 10 : v; };
  CHECK(evaluate_attribute(node("n", Op::And, {leaf("a"), leaf("b")}), spec) == 30);
}

TEST_CASE("min-experts matches the fold oracle and is invariant under normalize") {
  std::mt19937 rng(7);
  testing::TreeGenerator gen(rng, {});
  std::uniform_int_distribution<std::uint64_t> val(0, 9);
  for (int i = 0; i < 300; ++i) {
    const AttackTree t = gen();
    std::map<std::string, std::uint64_t> v;
    for (const AttackTree* n : nodes(t))
      if (n->is_leaf()) v[n->id] = val(rng);
    auto spec = min_experts(v);
    const auto x = evaluate_attribute(t, spec);
    CHECK(x == fold_experts(t, v));
    CHECK(evaluate_attribute(normalize(t), spec) == x);
  }
}
