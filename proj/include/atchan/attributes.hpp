#pragma once

#include <cstdint>
#include <functional>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atchan/errors.hpp"
#include "atchan/tree.hpp"

namespace atchan {

/// Bottom-up attribute over attack trees. The three combinators fold the
/// children's values of OR, AND and SAND branches respectively. When
/// `node_contribution` is set, an intermediate node's own contribution is
/// applied after its children have been combined (quasi-attributes).
template <class Value>
struct AttributeSpec {
  using Combinator = std::function<Value(const std::vector<Value>&)>;
  using Contribution = std::function<Value(const AttackTree&, const Value&)>;

  std::string codomain;
  Combinator mu_or;
  Combinator mu_and;
  Combinator mu_sand;
  std::map<std::string, Value> leaf_values;
  Contribution node_contribution;
};

template <class Value>
Value evaluate_attribute(const AttackTree& t, const AttributeSpec<Value>& spec) {
  if (t.is_leaf()) {
    auto it = spec.leaf_values.find(t.id);
    if (it == spec.leaf_values.end()) throw UnvaluedLeafError(t.id);
    return it->second;
  }
  std::vector<Value> values;
  values.reserve(t.children.size());
  for (const auto& c : t.children) values.push_back(evaluate_attribute(c, spec));
  const auto& mu = t.op == Op::Or ? spec.mu_or : t.op == Op::And ? spec.mu_and : spec.mu_sand;
  Value combined = mu(values);
  if (spec.node_contribution) return spec.node_contribution(t, combined);
  return combined;
}

struct LawViolation {
  enum class Kind { OrTransposition, AndTransposition, SingletonAgreement };
  Kind kind;
  std::size_t sample;    // index into the samples sequence
  std::size_t position;  // transposed pair (i, i+1) or singleton element
  std::string detail;
};

struct LawReport {
  std::vector<LawViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks transposition invariance of mu_or/mu_and on every adjacent swap of
/// every sample, and singleton agreement of all three combinators on every
/// element of every sample.
template <class Value>
LawReport validate_attribute_laws(const AttributeSpec<Value>& spec, const std::vector<std::vector<Value>>& samples) {
  LawReport report;
  auto transposition = [&](const typename AttributeSpec<Value>::Combinator& mu, LawViolation::Kind kind,
                           std::size_t s, const std::vector<Value>& xs) {
    if (xs.empty()) return;
    const Value base = mu(xs);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      auto swapped = xs;
      std::iter_swap(swapped.begin() + i, swapped.begin() + i + 1);
      if (!(mu(swapped) == base))
        report.violations.push_back({kind, s, i, "result changes when swapping positions " + std::to_string(i) +
                                                     " and " + std::to_string(i + 1)});
    }
  };
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& xs = samples[s];
    transposition(spec.mu_or, LawViolation::Kind::OrTransposition, s, xs);
    transposition(spec.mu_and, LawViolation::Kind::AndTransposition, s, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const std::vector<Value> one{xs[i]};
      const Value o = spec.mu_or(one);
      if (!(o == spec.mu_and(one)) || !(o == spec.mu_sand(one)))
        report.violations.push_back({LawViolation::Kind::SingletonAgreement, s, i,
                                     "combinators disagree on a singleton"});
    }
  }
  return report;
}

/// Minimum number of experts: (min, Sum, max) over naturals.
AttributeSpec<std::uint64_t> min_experts(std::map<std::string, std::uint64_t> leaf_values);

/// Possibility: OR = any, AND = SAND = all.
AttributeSpec<bool> possibility(std::map<std::string, bool> leaf_values);

}  // namespace atchan
