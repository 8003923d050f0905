#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atchan/classification.hpp"
#include "atchan/lattice.hpp"

namespace atchan {

/// Contravariant pair between two classifications: `up` carries source
/// types to target types, `down` carries target tokens back to source tokens.
template <class SourceToken, class SourceType, class TargetToken, class TargetType>
struct Infomorphism {
  std::function<TargetType(const SourceType&)> up;
  std::function<SourceToken(const TargetToken&)> down;
};

template <class Token, class Type>
using Satisfaction = std::function<bool(const Token&, const Type&)>;

template <class TargetToken, class SourceType>
struct ImViolation {
  TargetToken token;
  SourceType type;
  bool source_holds;  // down(token) |= type
  bool target_holds;  // token |= up(type)
};

/// Every (token, type) pair of the check sets on which
/// down(a) |= g  <=>  a |= up(g)  fails.
template <class ST, class SY, class TT, class TY>
std::vector<ImViolation<TT, SY>> im_violations(const Infomorphism<ST, SY, TT, TY>& f,
                                                const Satisfaction<ST, SY>& source,
                                                const Satisfaction<TT, TY>& target,
                                                const std::vector<TT>& tokens, const std::vector<SY>& types) {
  std::vector<ImViolation<TT, SY>> out;
  for (const auto& a : tokens) {
    const ST pulled = f.down(a);
    for (const auto& g : types) {
      const bool lhs = source(pulled, g);
      const bool rhs = target(a, f.up(g));
      if (lhs != rhs) out.push_back({a, g, lhs, rhs});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Base classifications with finite, explicit maps.

struct BaseInfomorphism {
  const Classification* source = nullptr;
  const Classification* target = nullptr;
  std::map<std::string, std::string> type_map;   // Typ(source) -> Typ(target)
  std::map<std::string, std::string> token_map;  // Tok(target) -> Tok(source)

  std::string up(const std::string& type) const;
  std::string down(const std::string& token) const;
};

using BaseViolation = ImViolation<std::string, std::string>;

/// Exhaustive (IM) check. Throws SchemaError for unmapped or undeclared
/// types and tokens.
std::vector<BaseViolation> check_infomorphism(const BaseInfomorphism& f);

BaseInfomorphism identity_infomorphism(const Classification& c);
/// g after f, for f: C1 -> C2 and g: C2 -> C3.
BaseInfomorphism compose(const BaseInfomorphism& g, const BaseInfomorphism& f);

// ---------------------------------------------------------------------------
// FD(C) level.

using FdInfomorphism = Infomorphism<TokenFamily, LatticeFormula, TokenFamily, LatticeFormula>;

/// FD applied to f: indexed primitives mapped pointwise, families mapped
/// memberwise. Throws SchemaError when f's type part does not respect the
/// declared orders (the construction would not be well defined).
FdInfomorphism fd_map(const BaseInfomorphism& f);

/// Empty family plus {lambda -> a} for every token a and index lambda.
std::vector<TokenFamily> singleton_families(const Classification& c, const std::vector<std::string>& indices);
/// alpha_lambda for every type alpha and index lambda.
std::vector<LatticeFormula> generator_types(const Classification& c, const std::vector<std::string>& indices);

Satisfaction<TokenFamily, LatticeFormula> fd_satisfaction(const Classification& c);
Satisfaction<std::string, std::string> base_satisfaction(const Classification& c);

// ---------------------------------------------------------------------------
// Standard embeddings.

/// C -> FD(C): alpha -> alpha_mu; {a_l} -> a_mu, or eps when mu is absent.
Infomorphism<std::string, std::string, TokenFamily, LatticeFormula> lift_embedding(const Classification& c,
                                                                                  std::string mu);

/// C_i -> C_1 (+) ... (+) C_n with 1-based i; `sum` must be the sum of `parts`.
BaseInfomorphism inc_embedding(std::size_t i, const Classification& part, const Classification& sum);

/// FD(C_i) -> FD(sum): alpha_l -> (alpha^(i))_l; a mixed family is
/// restricted to its members tagged i and untagged.
FdInfomorphism lifted_inc(std::size_t i);

/// (FD(C_1), ..., FD(C_n)) -> FD(sum): <G_1..G_n> -> G_1^(1) /\ ... /\ G_n^(n);
/// a mixed family is split by component tag.
Infomorphism<FamilyTuple, FormulaTuple, TokenFamily, LatticeFormula> conj_embedding(std::size_t arity);

/// Retags every literal of `f` into component k.
LatticeFormula tag_formula(const LatticeFormula& f, std::size_t k);
/// Members of `f` tagged into component k.
TokenFamily tag_family(const TokenFamily& f, std::size_t k);
/// Members of a mixed family tagged k, untagged.
TokenFamily component_family(const TokenFamily& mixed, std::size_t k);

// ---------------------------------------------------------------------------
// Witness infomorphisms from (FD(C_1), ..., FD(C_n)) to FD(C_p), given on
// generators. n = 1 covers the single-classification case.

/// One component of a generator tuple; nullopt stands for top.
using Slot = std::optional<Literal>;
using Generator = std::vector<Slot>;

std::string to_string(const Generator& g);

struct TupleInfomorphism {
  std::vector<const Classification*> sources;
  const Classification* target = nullptr;
  std::map<Generator, LatticeFormula> type_map;
  /// Image of generators absent from type_map. Not part of the checked domain.
  std::optional<LatticeFormula> default_type;
  /// Base token of the target -> tuple of source families. Extended to
  /// families by disjoint union.
  std::map<std::string, FamilyTuple> token_map;

  std::size_t arity() const { return sources.size(); }
};

/// Lattice extension of the generator map to arbitrary formula tuples.
/// Throws SchemaError for a generator without image and no default.
LatticeFormula map_type(const TupleInfomorphism& f, const FormulaTuple& types);

/// Disjoint-union extension of the token map. Throws UnliftableTokenError
/// when a member token has no image or images collide on an index.
FamilyTuple map_token(const TupleInfomorphism& f, const TokenFamily& parent);

struct TupleViolation {
  TokenFamily token;
  Generator type;
  bool source_holds;
  bool target_holds;
};

/// (IM) over the empty family and {a -> a} for every mapped token a, and
/// every generator in type_map. Throws SchemaError on undeclared names.
std::vector<TupleViolation> check_infomorphism(const TupleInfomorphism& f);

/// Identity-shaped witness: tuple of literals -> their meet; token a of
/// `parent_tokens` -> ({a -> a} where C_r declares a, else the empty family).
/// Generators range over the given literals of each component, plus top.
TupleInfomorphism identity_witness(std::vector<const Classification*> sources, const Classification* target,
                                   const std::vector<std::vector<Literal>>& component_literals,
                                   const std::vector<std::string>& parent_tokens);

/// Refinement check: f's token part must carry `parent_family` to
/// `child_families` (after reduction; otherwise UnliftableTokenError), and
/// then up(child types) <= parent type in the target order.
bool check_refinement_relation(const FamilyTuple& child_families, const FormulaTuple& child_types,
                               const TokenFamily& parent_family, const LatticeFormula& parent_type,
                               const TupleInfomorphism& f);

}  // namespace atchan
