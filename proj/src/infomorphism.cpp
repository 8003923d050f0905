#include "atchan/infomorphism.hpp"

#include <algorithm>

#include "atchan/errors.hpp"

namespace atchan {

std::string BaseInfomorphism::up(const std::string& type) const {
  auto it = type_map.find(type);
  if (it == type_map.end()) throw SchemaError("type '" + type + "' has no image");
  return it->second;
}

std::string BaseInfomorphism::down(const std::string& token) const {
  auto it = token_map.find(token);
  if (it == token_map.end()) throw SchemaError("token '" + token + "' has no image");
  return it->second;
}

Satisfaction<std::string, std::string> base_satisfaction(const Classification& c) {
  return [&c](const std::string& a, const std::string& g) { return c.holds(a, g); };
}

Satisfaction<TokenFamily, LatticeFormula> fd_satisfaction(const Classification& c) {
  return [&c](const TokenFamily& a, const LatticeFormula& g) { return fd_holds(c, a, g); };
}

std::vector<BaseViolation> check_infomorphism(const BaseInfomorphism& f) {
  const Classification& src = *f.source;
  const Classification& tgt = *f.target;
  for (const auto& t : src.types()) {
    const std::string& image = f.up(t);
    if (!tgt.has_type(image)) throw SchemaError("type image '" + image + "' is not declared in " + tgt.id());
  }
  for (const auto& a : tgt.tokens()) {
    const std::string& image = f.down(a);
    if (!src.has_token(image)) throw SchemaError("token image '" + image + "' is not declared in " + src.id());
  }
  Infomorphism<std::string, std::string, std::string, std::string> g{
      [&](const std::string& t) { return f.up(t); }, [&](const std::string& a) { return f.down(a); }};
  return im_violations(g, base_satisfaction(src), base_satisfaction(tgt), tgt.tokens(), src.types());
}

BaseInfomorphism identity_infomorphism(const Classification& c) {
  BaseInfomorphism f{&c, &c, {}, {}};
  for (const auto& t : c.types()) f.type_map.emplace(t, t);
  for (const auto& a : c.tokens()) f.token_map.emplace(a, a);
  return f;
}

BaseInfomorphism compose(const BaseInfomorphism& g, const BaseInfomorphism& f) {
  BaseInfomorphism out{f.source, g.target, {}, {}};
  for (const auto& [t, image] : f.type_map) out.type_map.emplace(t, g.up(image));
  for (const auto& [a, image] : g.token_map) out.token_map.emplace(a, f.down(image));
  return out;
}

FdInfomorphism fd_map(const BaseInfomorphism& f) {
  for (const auto& [lo, hi] : f.source->order().pairs())
    if (!f.target->order().below(f.up(lo), f.up(hi)))
      throw SchemaError("type map is incompatible with the declared order " + lo + " <= " + hi);
  FdInfomorphism out;
  out.up = [f](const LatticeFormula& g) {
    return substitute(g, [&](const Literal& l) { return LatticeFormula::prim(f.up(l.type), l.index); });
  };
  out.down = [f](const TokenFamily& a) {
    TokenFamily b;
    for (const auto& [idx, tok] : a.members) b.members.emplace(idx, f.down(tok));
    return b;
  };
  return out;
}

std::vector<TokenFamily> singleton_families(const Classification& c, const std::vector<std::string>& indices) {
  std::vector<TokenFamily> out{TokenFamily{}};
  for (const auto& a : c.tokens())
    for (const auto& idx : indices) out.push_back(TokenFamily{{{idx, a}}});
  return out;
}

std::vector<LatticeFormula> generator_types(const Classification& c, const std::vector<std::string>& indices) {
  std::vector<LatticeFormula> out;
  for (const auto& t : c.types())
    for (const auto& idx : indices) out.push_back(LatticeFormula::prim(t, idx));
  return out;
}

Infomorphism<std::string, std::string, TokenFamily, LatticeFormula> lift_embedding(const Classification& c,
                                                                                  std::string mu) {
  (void)c;
  Infomorphism<std::string, std::string, TokenFamily, LatticeFormula> f;
  f.up = [mu](const std::string& alpha) { return LatticeFormula::prim(alpha, mu); };
  f.down = [mu](const TokenFamily& a) {
    auto it = a.members.find(mu);
    return it == a.members.end() ? std::string(kEpsilon) : it->second;
  };
  return f;
}

BaseInfomorphism inc_embedding(std::size_t i, const Classification& part, const Classification& sum) {
  BaseInfomorphism f{&part, &sum, {}, {}};
  for (const auto& t : part.types()) f.type_map.emplace(t, tag(t, i));
  for (const auto& x : sum.tokens()) {
    auto parsed = untag(x);
    f.token_map.emplace(x, parsed && parsed->first == i ? parsed->second : std::string(kEpsilon));
  }
  return f;
}

LatticeFormula tag_formula(const LatticeFormula& f, std::size_t k) {
  return substitute(f, [k](const Literal& l) { return LatticeFormula::prim(tag(l.type, k), l.index); });
}

TokenFamily tag_family(const TokenFamily& f, std::size_t k) {
  TokenFamily out;
  for (const auto& [idx, tok] : f.members) out.members.emplace(idx, tag(tok, k));
  return out;
}

TokenFamily component_family(const TokenFamily& mixed, std::size_t k) {
  TokenFamily out;
  for (const auto& [idx, tok] : mixed.members) {
    auto parsed = untag(tok);
    if (parsed && parsed->first == k) out.members.emplace(idx, parsed->second);
  }
  return out;
}

FdInfomorphism lifted_inc(std::size_t i) {
  FdInfomorphism f;
  f.up = [i](const LatticeFormula& g) { return tag_formula(g, i); };
  f.down = [i](const TokenFamily& a) { return component_family(a, i); };
  return f;
}

Infomorphism<FamilyTuple, FormulaTuple, TokenFamily, LatticeFormula> conj_embedding(std::size_t arity) {
  Infomorphism<FamilyTuple, FormulaTuple, TokenFamily, LatticeFormula> f;
  f.up = [arity](const FormulaTuple& gs) {
    if (gs.size() != arity) throw SchemaError("conj: tuple arity mismatch");
    std::vector<LatticeFormula> parts;
    for (std::size_t k = 0; k < arity; ++k) parts.push_back(tag_formula(gs[k], k + 1));
    return meet_all(std::move(parts));
  };
  f.down = [arity](const TokenFamily& a) {
    FamilyTuple out;
    for (std::size_t k = 0; k < arity; ++k) out.push_back(component_family(a, k + 1));
    return out;
  };
  return f;
}

// ---------------------------------------------------------------------------

std::string to_string(const Generator& g) {
  std::string out = g.size() == 1 ? "" : "<";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ", ";
    out += g[i] ? to_string(*g[i]) : "top";
  }
  return g.size() == 1 ? out : out + ">";
}

namespace {

FormulaTuple as_formulas(const Generator& g) {
  FormulaTuple out;
  for (const auto& s : g) out.push_back(s ? LatticeFormula::prim(*s) : LatticeFormula::top());
  return out;
}

LatticeFormula lookup(const TupleInfomorphism& f, const Generator& g) {
  if (std::all_of(g.begin(), g.end(), [](const Slot& s) { return !s; })) return LatticeFormula::top();
  if (auto it = f.type_map.find(g); it != f.type_map.end()) return it->second;
  if (f.default_type) return *f.default_type;
  throw SchemaError("generator " + to_string(g) + " has no image");
}

// All tuples of literal-or-top choices for one tuple of meets.
LatticeFormula map_meet_tuple(const TupleInfomorphism& f, const std::vector<std::vector<Literal>>& meets) {
  std::vector<Generator> gens{{}};
  for (const auto& m : meets) {
    std::vector<Slot> choices;
    if (m.empty()) choices.emplace_back(std::nullopt);
    for (const auto& l : m) choices.emplace_back(l);
    std::vector<Generator> next;
    for (const auto& prefix : gens) {
      for (const auto& s : choices) {
        auto row = prefix;
        row.push_back(s);
        next.push_back(std::move(row));
      }
    }
    gens = std::move(next);
  }
  std::vector<LatticeFormula> parts;
  for (const auto& g : gens) parts.push_back(lookup(f, g));
  return meet_all(std::move(parts));
}

}  // namespace

LatticeFormula map_type(const TupleInfomorphism& f, const FormulaTuple& types) {
  if (types.size() != f.arity()) throw SchemaError("type tuple arity mismatch");
  std::vector<NormalForm> nfs;
  for (std::size_t r = 0; r < types.size(); ++r) {
    nfs.push_back(normal_form(types[r], f.sources[r]->order()));
    if (nfs.back().is_bottom()) return LatticeFormula::bottom();
  }
  std::vector<LatticeFormula> joins;
  std::vector<std::size_t> pick(nfs.size(), 0);
  while (true) {
    std::vector<std::vector<Literal>> meets;
    for (std::size_t r = 0; r < nfs.size(); ++r) meets.push_back(nfs[r].clauses[pick[r]]);
    joins.push_back(map_meet_tuple(f, meets));
    std::size_t r = 0;
    for (; r < nfs.size(); ++r) {
      if (++pick[r] < nfs[r].clauses.size()) break;
      pick[r] = 0;
    }
    if (r == nfs.size()) break;
  }
  return join_all(std::move(joins));
}

FamilyTuple map_token(const TupleInfomorphism& f, const TokenFamily& parent) {
  FamilyTuple out(f.arity());
  for (const auto& [idx, tok] : reduce_family(parent).members) {
    auto it = f.token_map.find(tok);
    if (it == f.token_map.end()) throw UnliftableTokenError("token '" + tok + "' has no image under the token map");
    for (std::size_t r = 0; r < out.size(); ++r) {
      for (const auto& [j, a] : it->second[r].members) {
        auto [pos, inserted] = out[r].members.emplace(j, a);
        if (!inserted && pos->second != a)
          throw UnliftableTokenError("token images collide on index '" + j + "'");
      }
    }
  }
  return out;
}

std::vector<TupleViolation> check_infomorphism(const TupleInfomorphism& f) {
  const std::size_t n = f.arity();
  auto check_target = [&](const LatticeFormula& g) {
    for (const auto& l : literals(g))
      if (!f.target->has_type(l.type))
        throw SchemaError("type '" + l.type + "' is not declared in " + f.target->id());
  };
  for (const auto& [gen, image] : f.type_map) {
    if (gen.size() != n) throw SchemaError("generator " + to_string(gen) + " has the wrong arity");
    for (std::size_t r = 0; r < n; ++r)
      if (gen[r] && !f.sources[r]->has_type(gen[r]->type))
        throw SchemaError("type '" + gen[r]->type + "' is not declared in " + f.sources[r]->id());
    check_target(image);
  }
  if (f.default_type) check_target(*f.default_type);
  for (const auto& [a, images] : f.token_map) {
    if (!f.target->has_token(a)) throw SchemaError("token '" + a + "' is not declared in " + f.target->id());
    if (images.size() != n) throw SchemaError("token image of '" + a + "' has the wrong arity");
    for (std::size_t r = 0; r < n; ++r)
      for (const auto& [idx, tok] : images[r].members)
        if (!f.sources[r]->has_token(tok))
          throw SchemaError("token '" + tok + "' is not declared in " + f.sources[r]->id());
  }

  std::vector<TokenFamily> tokens{TokenFamily{}};
  for (const auto& [a, images] : f.token_map) tokens.push_back(TokenFamily{{{a, a}}});

  std::vector<TupleViolation> out;
  for (const auto& a : tokens) {
    const FamilyTuple pulled = map_token(f, a);
    for (const auto& [gen, image] : f.type_map) {
      const bool lhs = tuple_holds(f.sources, pulled, as_formulas(gen));
      const bool rhs = fd_holds(*f.target, a, image);
      if (lhs != rhs) out.push_back({a, gen, lhs, rhs});
    }
  }
  return out;
}

TupleInfomorphism identity_witness(std::vector<const Classification*> sources, const Classification* target,
                                   const std::vector<std::vector<Literal>>& component_literals,
                                   const std::vector<std::string>& parent_tokens) {
  TupleInfomorphism f;
  f.sources = std::move(sources);
  f.target = target;
  std::vector<Generator> gens{{}};
  for (const auto& lits : component_literals) {
    std::vector<Generator> next;
    for (const auto& prefix : gens) {
      auto row = prefix;
      row.emplace_back(std::nullopt);
      next.push_back(row);
      for (const auto& l : lits) {
        auto with = prefix;
        with.emplace_back(l);
        next.push_back(std::move(with));
      }
    }
    gens = std::move(next);
  }
  for (const auto& g : gens) {
    std::vector<LatticeFormula> parts;
    for (const auto& s : g)
      if (s) parts.push_back(LatticeFormula::prim(*s));
    if (!parts.empty()) f.type_map.emplace(g, meet_all(std::move(parts)));
  }
  for (const auto& a : parent_tokens) {
    if (a == kEpsilon) continue;
    FamilyTuple images;
    for (const auto* c : f.sources) images.push_back(c->has_token(a) ? TokenFamily{{{a, a}}} : TokenFamily{});
    f.token_map.emplace(a, std::move(images));
  }
  return f;
}

bool check_refinement_relation(const FamilyTuple& child_families, const FormulaTuple& child_types,
                               const TokenFamily& parent_family, const LatticeFormula& parent_type,
                               const TupleInfomorphism& f) {
  FamilyTuple image = map_token(f, parent_family);
  if (image.size() != child_families.size()) throw SchemaError("child tuple arity mismatch");
  for (std::size_t r = 0; r < image.size(); ++r) {
    if (reduce_family(image[r]) != reduce_family(child_families[r]))
      throw UnliftableTokenError("child token " + to_string(child_families[r]) +
                                 " is not the image of the parent token " + to_string(parent_family) +
                                 " (image " + to_string(image[r]) + ")");
  }
  return leq(map_type(f, child_types), parent_type, f.target->order());
}

}  // namespace atchan
