#include "atchan/effects.hpp"

#include <algorithm>
#include <set>

#include "atchan/errors.hpp"

namespace atchan {

std::string to_string(const Effect& e) { return to_string(e.family) + " |= " + to_string(e.formula); }

void check_effect(const Effect& e) {
  if (!e.cls) throw SchemaError("effect of " + e.node + " has no classification");
  if (!fd_holds(*e.cls, e.family, e.formula))
    throw EffectError("effect of " + e.node + " does not hold in " + e.cls->id() + ": " + to_string(e));
}

std::vector<Effect> cut_sequence(const std::vector<Effect>& effects) {
  std::vector<Effect> out;
  std::set<std::set<std::string>> seen;
  for (auto it = effects.rbegin(); it != effects.rend(); ++it)
    if (seen.insert(token_set(reduce_family(it->family))).second) out.push_back(*it);
  std::reverse(out.begin(), out.end());
  return out;
}

std::pair<TokenFamily, std::vector<std::map<std::string, std::string>>> merge_families(
    const std::vector<TokenFamily>& parts) {
  TokenFamily out;
  std::vector<std::map<std::string, std::string>> renamed(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::vector<std::pair<std::string, std::string>> placed;
    for (const auto& [idx, tok] : parts[k].members) {
      std::string at = idx;
      if (out.members.count(idx)) {
        at = idx + "#" + std::to_string(k + 1);
        renamed[k][idx] = at;
      }
      placed.emplace_back(at, tag(tok, k + 1));
    }
    for (auto& [at, tok] : placed) out.members.emplace(std::move(at), std::move(tok));
  }
  return {out, renamed};
}

namespace {

LatticeFormula rename_indices(const LatticeFormula& f, const std::map<std::string, std::string>& renaming) {
  if (renaming.empty()) return f;
  return substitute(f, [&](const Literal& l) {
    auto it = renaming.find(l.index);
    return LatticeFormula::prim(l.type, it == renaming.end() ? l.index : it->second);
  });
}

// Undoes the renaming of merge_families for component k (1-based).
std::string original_index(const std::string& idx, std::size_t k) {
  const std::string suffix = "#" + std::to_string(k);
  if (idx.size() > suffix.size() && idx.compare(idx.size() - suffix.size(), suffix.size(), suffix) == 0)
    return idx.substr(0, idx.size() - suffix.size());
  return idx;
}

}  // namespace

IntegratedEffect integrate(Op op, const std::vector<Effect>& effects) {
  const std::vector<Effect> es = op == Op::Sand ? cut_sequence(effects) : effects;
  std::vector<const Classification*> cls;
  std::vector<TokenFamily> fams;
  for (const auto& e : es) {
    cls.push_back(e.cls);
    fams.push_back(e.family);
  }
  auto [family, renamed] = merge_families(fams);
  std::vector<LatticeFormula> parts;
  for (std::size_t k = 0; k < es.size(); ++k)
    parts.push_back(tag_formula(rename_indices(es[k].formula, renamed[k]), k + 1));
  LatticeFormula formula = op == Op::Or ? join_all(std::move(parts)) : meet_all(std::move(parts));
  return IntegratedEffect{sum_classification(cls), std::move(family), std::move(formula), std::move(renamed)};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Unverified: return "unverified";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

struct Outcome {
  Verdict verdict;
  std::string reason;
};

const Effect* effect_of(const EffectMap& phi, const std::string& id) {
  auto it = phi.find(id);
  return it == phi.end() ? nullptr : &it->second;
}

Outcome refine(const std::vector<Effect>& children, const Effect& parent, const TupleInfomorphism& f) {
  if (f.arity() != children.size())
    return {Verdict::Unverified, "witness arity " + std::to_string(f.arity()) + " does not match " +
                                     std::to_string(children.size()) + " child effects"};
  FamilyTuple fams;
  FormulaTuple types;
  for (const auto& c : children) {
    fams.push_back(c.family);
    types.push_back(c.formula);
  }
  try {
    const auto violations = check_infomorphism(f);
    if (!violations.empty()) {
      const auto& v = violations.front();
      return {Verdict::Unverified, "witness fails (IM) at (" + to_string(v.token) + ", " + to_string(v.type) + ")"};
    }
    if (check_refinement_relation(fams, types, parent.family, parent.formula, f)) return {Verdict::Consistent, {}};
    return {Verdict::Inconsistent, "image " + to_string(map_type(f, types)) + " is not below " +
                                       to_string(parent.formula)};
  } catch (const UnliftableTokenError& e) {
    return {Verdict::Unverified, std::string("unliftable token: ") + e.what()};
  } catch (const SchemaError& e) {
    return {Verdict::Unverified, std::string("malformed witness: ") + e.what()};
  }
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Inconsistent || b == Verdict::Inconsistent) return Verdict::Inconsistent;
  if (a == Verdict::Unverified || b == Verdict::Unverified) return Verdict::Unverified;
  return Verdict::Consistent;
}

// Explicit witness, else search, else nothing.
Outcome resolve(const std::vector<Effect>& children, const Effect& parent, const TupleInfomorphism* explicit_f,
                const ConsistencyWitness* witness, const CheckOptions& opts, std::optional<TupleInfomorphism>& used,
                const std::string& what) {
  if (explicit_f) {
    used = *explicit_f;
    return refine(children, parent, *explicit_f);
  }
  if (witness && witness->search) {
    const auto r = search_infomorphism(children, parent, *witness->search, opts.search_cap);
    switch (r.status) {
      case SearchResult::Status::Found:
        used = r.witness;
        return refine(children, parent, *r.witness);
      case SearchResult::Status::None:
        return {Verdict::Inconsistent, "no witness for " + what + " within the constraint space (" +
                                           std::to_string(r.explored) + " type maps tried)"};
      case SearchResult::Status::CapExceeded:
        return {Verdict::Unverified, "search space for " + what + " exceeds the cap of " +
                                         std::to_string(opts.search_cap) + " type maps"};
    }
  }
  return {Verdict::Unverified, "missing witness for " + what};
}

std::vector<Effect> child_effects(const AttackTree& branch, const EffectMap& phi, std::vector<std::string>& missing) {
  std::vector<Effect> out;
  for (const auto& c : branch.children) {
    if (const Effect* e = effect_of(phi, c.id)) out.push_back(*e);
    else missing.push_back(c.id);
  }
  return out;
}

// A literal alpha@lambda becomes the join of alpha^(r)@lambda over the
// components r that declare alpha.
LatticeFormula lift_precondition(const LatticeFormula& pre, const std::vector<Effect>& cut,
                                 const IntegratedEffect& integrated) {
  return substitute(pre, [&](const Literal& l) {
    std::vector<LatticeFormula> alts;
    for (std::size_t r = 0; r < cut.size(); ++r) {
      if (!cut[r].cls->has_type(l.type)) continue;
      auto it = integrated.renamed[r].find(l.index);
      const std::string idx = it == integrated.renamed[r].end() ? l.index : it->second;
      alts.push_back(LatticeFormula::prim(tag(l.type, r + 1), idx));
    }
    return join_all(std::move(alts));
  });
}

}  // namespace

std::vector<std::pair<std::string, std::string>> check_preconditions(const AttackTree& branch, const EffectMap& phi,
                                                                     const ConsistencyWitness& witness) {
  std::vector<std::pair<std::string, std::string>> out;
  if (branch.op != Op::Sand) return out;
  std::vector<Effect> preceding;
  for (const auto& c : branch.children) {
    auto pre = witness.preconditions.find(c.id);
    if (pre != witness.preconditions.end()) {
      const auto cut = cut_sequence(preceding);
      const auto integrated = integrate(Op::And, cut);
      const auto lifted = lift_precondition(pre->second, cut, integrated);
      if (!leq(integrated.formula, lifted, integrated.sum.order()))
        out.emplace_back(c.id, "precondition " + to_string(pre->second) + " of " + c.id +
                                   " does not follow from the preceding effects " + to_string(integrated.formula));
    }
    if (const Effect* e = effect_of(phi, c.id)) preceding.push_back(*e);
  }
  return out;
}

BranchReport check_branch_consistency(const AttackTree& branch, const EffectMap& phi,
                                      const ConsistencyWitness* witness, const CheckOptions& opts) {
  BranchReport report;
  report.node = branch.id;
  report.op = branch.op;
  if (branch.is_leaf()) throw TreeError("node " + branch.id + " is not a branch");

  const Effect* parent = effect_of(phi, branch.id);
  std::vector<std::string> missing;
  const auto children = child_effects(branch, phi, missing);
  if (!parent) missing.insert(missing.begin(), branch.id);
  if (!missing.empty()) {
    for (const auto& id : missing) report.reasons.push_back("no effect assigned to " + id);
    report.verdict = Verdict::Unverified;
    return report;
  }
  if (witness) {
    report.used.preconditions = witness->preconditions;
    report.used.search = witness->search;
  }

  Verdict verdict = Verdict::Consistent;
  if (branch.op == Op::Or) {
    for (std::size_t i = 0; i < children.size(); ++i) {
      const std::string& id = branch.children[i].id;
      const TupleInfomorphism* f = nullptr;
      if (witness) {
        auto it = witness->per_child.find(id);
        if (it != witness->per_child.end()) f = &it->second;
      }
      std::optional<TupleInfomorphism> used;
      const Outcome o = resolve({children[i]}, *parent, f, witness, opts, used, "child " + id);
      if (used) report.used.per_child.emplace(id, *used);
      if (!o.reason.empty()) report.reasons.push_back(o.reason);
      verdict = combine(verdict, o.verdict);
    }
  } else {
    if (witness && branch.op == Op::Sand) {
      for (const auto& [id, why] : check_preconditions(branch, phi, *witness)) {
        report.reasons.push_back(why);
        verdict = Verdict::Inconsistent;
      }
    }
    const auto domain = branch.op == Op::Sand ? cut_sequence(children) : children;
    const TupleInfomorphism* f = witness && witness->tuple ? &*witness->tuple : nullptr;
    std::optional<TupleInfomorphism> used;
    const Outcome o = resolve(domain, *parent, f, witness, opts, used, "branch " + branch.id);
    report.used.tuple = used;
    if (!o.reason.empty()) report.reasons.push_back(o.reason);
    verdict = combine(verdict, o.verdict);
  }
  report.verdict = verdict;
  if (verdict == Verdict::Consistent) report.complete = check_completeness(branch, phi, report.used);
  return report;
}

ConsistencyReport check_tree_consistency(const AttackTree& tree, const EffectMap& phi,
                                         const std::map<std::string, ConsistencyWitness>& witnesses,
                                         const CheckOptions& opts) {
  ConsistencyReport out;
  for (const AttackTree* n : nodes(tree)) {
    if (n->is_leaf()) continue;
    auto it = witnesses.find(n->id);
    out.branches.push_back(check_branch_consistency(*n, phi, it == witnesses.end() ? nullptr : &it->second, opts));
    out.verdict = combine(out.verdict, out.branches.back().verdict);
  }
  return out;
}

bool check_completeness(const AttackTree& branch, const EffectMap& phi, const ConsistencyWitness& witness) {
  const Effect* parent = effect_of(phi, branch.id);
  std::vector<std::string> missing;
  const auto children = child_effects(branch, phi, missing);
  if (!parent || !missing.empty()) return false;
  const TypeOrder& order = parent->cls->order();
  if (branch.op == Op::Or) {
    std::vector<LatticeFormula> images;
    for (std::size_t i = 0; i < children.size(); ++i) {
      auto it = witness.per_child.find(branch.children[i].id);
      if (it == witness.per_child.end()) return false;
      images.push_back(map_type(it->second, {children[i].formula}));
    }
    return leq(parent->formula, join_all(std::move(images)), order);
  }
  if (!witness.tuple) return false;
  const auto domain = branch.op == Op::Sand ? cut_sequence(children) : children;
  FormulaTuple types;
  for (const auto& c : domain) types.push_back(c.formula);
  return leq(parent->formula, map_type(*witness.tuple, types), order);
}

// ---------------------------------------------------------------------------

namespace {

bool allowed(const std::map<std::string, std::vector<std::string>>& rules, const std::string& from,
             const std::string& to) {
  auto it = rules.find(from);
  return it == rules.end() || std::find(it->second.begin(), it->second.end(), to) != it->second.end();
}

// Generator tuples reached by map_type on the given types.
std::vector<Generator> needed_generators(const std::vector<Effect>& children) {
  std::vector<NormalForm> nfs;
  for (const auto& c : children) {
    nfs.push_back(normal_form(c.formula, c.cls->order()));
    if (nfs.back().is_bottom()) return {};
  }
  std::set<Generator> out;
  std::vector<Generator> gens{{}};
  for (const auto& nf : nfs) {
    std::vector<Generator> next;
    for (const auto& prefix : gens)
      for (const auto& clause : nf.clauses) {
        if (clause.empty()) {
          auto row = prefix;
          row.emplace_back(std::nullopt);
          next.push_back(std::move(row));
        }
        for (const auto& l : clause) {
          auto row = prefix;
          row.emplace_back(l);
          next.push_back(std::move(row));
        }
      }
    gens = std::move(next);
  }
  for (auto& g : gens)
    if (std::any_of(g.begin(), g.end(), [](const Slot& s) { return s.has_value(); })) out.insert(std::move(g));
  return {out.begin(), out.end()};
}

}  // namespace

SearchResult search_infomorphism(const std::vector<Effect>& children, const Effect& parent,
                                 const SearchConstraints& constraints, std::size_t cap) {
  SearchResult result;
  std::vector<const Classification*> sources;
  for (const auto& c : children) sources.push_back(c.cls);

  // Token part: every child member goes to exactly one parent token that
  // may map to it.
  std::vector<std::string> parent_tokens;
  std::vector<std::string> parent_indices;
  for (const auto& [idx, tok] : reduce_family(parent.family).members) {
    parent_tokens.push_back(tok);
    parent_indices.push_back(idx);
  }
  struct Member {
    std::size_t component;
    std::string index, token;
    std::vector<std::size_t> owners;
  };
  std::vector<Member> members;
  for (std::size_t r = 0; r < children.size(); ++r)
    for (const auto& [idx, tok] : reduce_family(children[r].family).members) {
      Member m{r, idx, tok, {}};
      for (std::size_t p = 0; p < parent_tokens.size(); ++p)
        if (allowed(constraints.tokens, parent_tokens[p], tok)) m.owners.push_back(p);
      if (m.owners.empty()) return result;
      members.push_back(std::move(m));
    }
  std::size_t token_maps = 1;
  for (const auto& m : members) token_maps *= m.owners.size();

  // Type part: each needed generator goes to a parent literal or top.
  const auto gens = needed_generators(children);
  std::vector<std::vector<LatticeFormula>> candidates;
  std::size_t type_maps = 1;
  for (const auto& g : gens) {
    std::vector<LatticeFormula> cs;
    for (const auto& t : parent.cls->types()) {
      bool ok = true;
      for (const auto& s : g)
        if (s && !allowed(constraints.types, s->type, t)) ok = false;
      if (!ok) continue;
      for (const auto& idx : parent_indices) cs.push_back(LatticeFormula::prim(t, idx));
    }
    cs.push_back(LatticeFormula::top());
    type_maps *= cs.size();
    if (type_maps > cap) {
      result.status = SearchResult::Status::CapExceeded;
      return result;
    }
    candidates.push_back(std::move(cs));
  }
  if (type_maps * token_maps > cap) {
    result.status = SearchResult::Status::CapExceeded;
    return result;
  }

  std::vector<std::size_t> owner_pick(members.size(), 0);
  while (true) {
    TupleInfomorphism f;
    f.sources = sources;
    f.target = parent.cls;
    for (const auto& tok : parent_tokens) f.token_map[tok] = FamilyTuple(children.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& m = members[i];
      f.token_map[parent_tokens[m.owners[owner_pick[i]]]][m.component].members[m.index] = m.token;
    }
    std::vector<std::size_t> type_pick(gens.size(), 0);
    while (true) {
      for (std::size_t g = 0; g < gens.size(); ++g) f.type_map[gens[g]] = candidates[g][type_pick[g]];
      ++result.explored;
      const Outcome o = refine(children, parent, f);
      if (o.verdict == Verdict::Consistent) {
        result.status = SearchResult::Status::Found;
        result.witness = f;
        return result;
      }
      std::size_t g = 0;
      for (; g < gens.size(); ++g) {
        if (++type_pick[g] < candidates[g].size()) break;
        type_pick[g] = 0;
      }
      if (g == gens.size()) break;
    }
    std::size_t i = 0;
    for (; i < members.size(); ++i) {
      if (++owner_pick[i] < members[i].owners.size()) break;
      owner_pick[i] = 0;
    }
    if (i == members.size()) break;
  }
  return result;
}

// ---------------------------------------------------------------------------

LatticeFormula IntegratedInfomorphism::up(const LatticeFormula& integrated) const {
  const std::size_t n = per_component ? parts.size() : parts.front()->arity();
  const NormalForm nf = normal_form(integrated, source->order());
  std::vector<LatticeFormula> joins;
  for (const auto& clause : nf.clauses) {
    std::vector<std::vector<LatticeFormula>> by_component(n);
    for (const auto& l : clause) {
      auto parsed = untag(l.type);
      if (!parsed || parsed->first == 0 || parsed->first > n)
        throw SchemaError("type '" + l.type + "' is not a component type");
      const std::size_t k = parsed->first - 1;
      by_component[k].push_back(LatticeFormula::prim(parsed->second, original_index(l.index, k + 1)));
    }
    if (per_component) {
      std::vector<LatticeFormula> meets;
      for (std::size_t k = 0; k < n; ++k)
        if (!by_component[k].empty()) meets.push_back(map_type(*parts[k], {meet_all(std::move(by_component[k]))}));
      joins.push_back(meet_all(std::move(meets)));
    } else {
      FormulaTuple tuple;
      for (auto& c : by_component) tuple.push_back(meet_all(std::move(c)));
      joins.push_back(map_type(*parts.front(), tuple));
    }
  }
  return join_all(std::move(joins));
}

TokenFamily IntegratedInfomorphism::down(const TokenFamily& parent) const {
  std::vector<TokenFamily> images;
  if (per_component) {
    for (const auto* f : parts) images.push_back(map_token(*f, parent).front());
  } else {
    images = map_token(*parts.front(), parent);
  }
  return merge_families(images).first;
}

std::vector<std::pair<TokenFamily, LatticeFormula>> check_integrated(const IntegratedInfomorphism& g) {
  auto conj_image = [&](const Generator& gen, std::size_t offset) {
    std::vector<LatticeFormula> parts;
    for (std::size_t r = 0; r < gen.size(); ++r) {
      if (!gen[r]) continue;
      const std::size_t k = r + offset;
      auto it = g.renamed[k].find(gen[r]->index);
      parts.push_back(
          LatticeFormula::prim(tag(gen[r]->type, k + 1), it == g.renamed[k].end() ? gen[r]->index : it->second));
    }
    return meet_all(std::move(parts));
  };
  std::vector<LatticeFormula> types;
  std::set<std::string> tokens;
  for (std::size_t k = 0; k < g.parts.size(); ++k) {
    for (const auto& [gen, image] : g.parts[k]->type_map) types.push_back(conj_image(gen, g.per_component ? k : 0));
    for (const auto& [a, images] : g.parts[k]->token_map) tokens.insert(a);
  }
  std::vector<TokenFamily> families{TokenFamily{}};
  for (const auto& a : tokens) families.push_back(TokenFamily{{{a, a}}});

  std::vector<std::pair<TokenFamily, LatticeFormula>> out;
  for (const auto& a : families) {
    const TokenFamily pulled = g.down(a);
    for (const auto& t : types)
      if (fd_holds(*g.source, pulled, t) != fd_holds(*g.target, a, g.up(t))) out.emplace_back(a, t);
  }
  return out;
}

}  // namespace atchan
