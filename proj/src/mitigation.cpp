#include "atchan/mitigation.hpp"

#include <algorithm>
#include <set>

#include "atchan/errors.hpp"

namespace atchan {

bool is_reduction(const LatticeFormula& gamma, const LatticeFormula& gamma_prime, const TypeOrder& order) {
  return leq(gamma, gamma_prime, order);
}

bool check_mitigation_bound(const LatticeFormula& child_image, const LatticeFormula& parent_original,
                            const LatticeFormula& parent_residual, const TypeOrder& order) {
  return leq(join(child_image, parent_original), parent_residual, order);
}

bool check_mitigation_bound(const TupleInfomorphism& f, const FormulaTuple& child_residuals,
                            const LatticeFormula& parent_original, const LatticeFormula& parent_residual) {
  return check_mitigation_bound(map_type(f, child_residuals), parent_original, parent_residual, f.target->order());
}

namespace {

const Effect& effect_at(const EffectMap& phi, const std::string& id) {
  auto it = phi.find(id);
  if (it == phi.end()) throw SchemaError("no effect assigned to " + id);
  return it->second;
}

LatticeFormula residual_of(const EffectMap& phi, const Residuals& residuals, const std::string& id) {
  auto it = residuals.find(id);
  return it == residuals.end() ? effect_at(phi, id).formula : it->second;
}

EffectMap apply_residuals(const EffectMap& phi, const Residuals& residuals) {
  EffectMap out = phi;
  for (const auto& [id, g] : residuals) {
    auto it = out.find(id);
    if (it == out.end()) throw SchemaError("no effect assigned to " + id);
    it->second.formula = g;
  }
  return out;
}

// Literals of `f` plus every type related to them by the declared order,
// on the same index.
void add_closed(const LatticeFormula& f, const Classification& c, std::set<Literal>& out) {
  for (const auto& l : literals(f)) {
    out.insert(l);
    for (const auto& t : c.types())
      if (c.order().below(l.type, t) || c.order().below(t, l.type)) out.insert({t, l.index});
  }
}

}  // namespace

LatticeFormula residual_image(const AttackTree& branch, const EffectMap& phi, const ConsistencyWitness& witness,
                              const Residuals& residuals) {
  if (branch.op == Op::Or) {
    std::vector<LatticeFormula> images;
    for (const auto& c : branch.children) {
      auto it = witness.per_child.find(c.id);
      if (it == witness.per_child.end()) throw SchemaError("missing witness for child " + c.id);
      images.push_back(map_type(it->second, {residual_of(phi, residuals, c.id)}));
    }
    return join_all(std::move(images));
  }
  if (!witness.tuple) throw SchemaError("missing witness for branch " + branch.id);
  std::vector<Effect> kids;
  for (const auto& c : branch.children) {
    Effect e = effect_at(phi, c.id);
    e.formula = residual_of(phi, residuals, c.id);
    kids.push_back(std::move(e));
  }
  if (branch.op == Op::Sand) kids = cut_sequence(kids);
  FormulaTuple types;
  for (const auto& e : kids) types.push_back(e.formula);
  return map_type(*witness.tuple, types);
}

std::vector<WeakeningViolation> check_or_branch_weakening(const AttackTree& branch, const EffectMap& phi,
                                                          const ConsistencyWitness& witness,
                                                          const Residuals& residuals) {
  std::vector<WeakeningViolation> out;
  if (branch.op != Op::Or) return out;
  const Effect& parent = effect_at(phi, branch.id);
  const LatticeFormula parent_residual = residual_of(phi, residuals, branch.id);
  for (const auto& c : branch.children) {
    auto it = witness.per_child.find(c.id);
    if (it == witness.per_child.end()) throw SchemaError("missing witness for child " + c.id);
    LatticeFormula image = map_type(it->second, {residual_of(phi, residuals, c.id)});
    if (!leq(image, parent_residual, parent.cls->order())) out.push_back({c.id, std::move(image)});
  }
  return out;
}

ResidualSpace formula_space(const std::vector<Literal>& lits, const TypeOrder& order, std::size_t cap) {
  ResidualSpace space;
  std::vector<Literal> base;
  for (const auto& l : lits) base.push_back({order.canonical(l.type), l.index});
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  if (base.size() > 16) {
    space.partial = true;
    return space;
  }

  // Irredundant clauses, one per subset.
  std::set<std::vector<Literal>> clause_set;
  for (std::size_t mask = 0; mask < (std::size_t{1} << base.size()); ++mask) {
    std::vector<LatticeFormula> ms;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (mask >> i & 1) ms.push_back(LatticeFormula::prim(base[i]));
    const NormalForm nf = normal_form(meet_all(std::move(ms)), order);
    clause_set.insert(nf.clauses.front());
  }
  const std::vector<std::vector<Literal>> clauses(clause_set.begin(), clause_set.end());

  std::vector<std::size_t> chosen;
  auto emit = [&] {
    std::vector<LatticeFormula> joins;
    for (std::size_t i : chosen) {
      std::vector<LatticeFormula> ms;
      for (const auto& l : clauses[i]) ms.push_back(LatticeFormula::prim(l));
      joins.push_back(meet_all(std::move(ms)));
    }
    space.formulas.push_back(to_formula(normal_form(join_all(std::move(joins)), order)));
  };
  auto comparable = [&](std::size_t a, std::size_t b) {
    return clause_leq(clauses[a], clauses[b], order) || clause_leq(clauses[b], clauses[a], order);
  };
  // Antichains in index order.
  auto walk = [&](auto&& self, std::size_t from) -> void {
    if (space.formulas.size() >= cap) {
      space.partial = true;
      return;
    }
    emit();
    for (std::size_t j = from; j < clauses.size(); ++j) {
      if (std::any_of(chosen.begin(), chosen.end(), [&](std::size_t i) { return comparable(i, j); })) continue;
      chosen.push_back(j);
      self(self, j + 1);
      chosen.pop_back();
      if (space.partial) return;
    }
  };
  walk(walk, 0);
  return space;
}

std::vector<Literal> residual_literals(const AttackTree& branch, const EffectMap& phi,
                                       const ConsistencyWitness& witness, const Residuals& residuals) {
  const Effect& parent = effect_at(phi, branch.id);
  std::set<Literal> out;
  add_closed(parent.formula, *parent.cls, out);
  add_closed(residual_image(branch, phi, witness, residuals), *parent.cls, out);
  return {out.begin(), out.end()};
}

ResidualSpace admissible_parent_residuals(const AttackTree& branch, const EffectMap& phi,
                                          const ConsistencyWitness& witness, const Residuals& child_residuals,
                                          std::size_t cap) {
  const Effect& parent = effect_at(phi, branch.id);
  const TypeOrder& order = parent.cls->order();
  const LatticeFormula image = residual_image(branch, phi, witness, child_residuals);
  ResidualSpace space = formula_space(residual_literals(branch, phi, witness, child_residuals), order, cap);
  std::erase_if(space.formulas, [&](const LatticeFormula& g) {
    return !check_mitigation_bound(image, parent.formula, g, order);
  });
  return space;
}

std::vector<LatticeFormula> required_child_reductions(const AttackTree& branch, const EffectMap& phi,
                                                      const ConsistencyWitness& witness, const Residuals& fixed,
                                                      const std::string& child,
                                                      const LatticeFormula& parent_residual, std::size_t cap) {
  const Effect& parent = effect_at(phi, branch.id);
  const Effect& original = effect_at(phi, child);
  std::set<Literal> lits;
  add_closed(original.formula, *original.cls, lits);
  const ResidualSpace space = formula_space({lits.begin(), lits.end()}, original.cls->order(), cap);
  if (space.partial) throw CapExceededError("residual space of " + child + " exceeds the cap");

  const TypeOrder& order = parent.cls->order();
  std::vector<LatticeFormula> out;
  for (const auto& g : space.formulas) {
    if (!is_reduction(original.formula, g, original.cls->order())) continue;
    Residuals trial = fixed;
    trial[child] = g;
    LatticeFormula image;
    try {
      image = residual_image(branch, phi, witness, trial);
    } catch (const SchemaError&) {
      continue;  // no image for this generator
    }
    if (equivalent(join(image, parent.formula), parent_residual, order)) out.push_back(g);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> check_residual_preconditions(const AttackTree& branch,
                                                                              const EffectMap& phi,
                                                                              const ConsistencyWitness& witness,
                                                                              const Residuals& residuals) {
  return check_preconditions(branch, apply_residuals(phi, residuals), witness);
}

}  // namespace atchan
