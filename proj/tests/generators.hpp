#pragma once

// Hand-rolled random generators shared by the property tests.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "atchan/classification.hpp"
#include "atchan/infomorphism.hpp"
#include "atchan/lattice.hpp"
#include "atchan/tree.hpp"

namespace atchan::testing {

struct TreeShape {
  std::size_t max_depth = 4;
  std::size_t max_arity = 3;
  std::size_t max_leaves = 8;
  /// Leaf actions drawn from this many distinct labels; 0 means unique.
  std::size_t label_pool = 0;
};

class TreeGenerator {
 public:
  TreeGenerator(std::mt19937& rng, TreeShape shape) : rng_(rng), shape_(shape) {}

  AttackTree operator()() {
    next_id_ = 0;
    leaves_ = 0;
    return grow(1);
  }

 private:
  AttackTree grow(std::size_t level) {
    const std::string id = "n" + std::to_string(next_id_++);
    const std::size_t budget = shape_.max_leaves - leaves_;
    std::uniform_int_distribution<int> coin(0, 2);
    if (level >= shape_.max_depth || budget <= 1 || (level > 1 && coin(rng_) == 0)) {
      ++leaves_;
      std::string label = id;
      if (shape_.label_pool) label = "a" + std::to_string(std::uniform_int_distribution<std::size_t>(
                                                 0, shape_.label_pool - 1)(rng_));
      return leaf(id, label);
    }
    std::size_t arity = std::uniform_int_distribution<std::size_t>(1, shape_.max_arity)(rng_);
    arity = std::min(arity, budget);
    const Op op = static_cast<Op>(std::uniform_int_distribution<int>(0, 2)(rng_));
    std::vector<AttackTree> children;
    for (std::size_t i = 0; i < arity; ++i) {
      if (shape_.max_leaves - leaves_ == 0) break;
      // Reserve one leaf for each remaining sibling.
      const std::size_t reserve = arity - i - 1;
      if (shape_.max_leaves - leaves_ <= reserve) {
        ++leaves_;
        const std::string cid = "n" + std::to_string(next_id_++);
        children.push_back(leaf(cid));
        continue;
      }
      children.push_back(grow(level + 1));
    }
    return node(id, op, std::move(children), "act_" + id);
  }

  std::mt19937& rng_;
  TreeShape shape_;
  std::size_t next_id_ = 0;
  std::size_t leaves_ = 0;
};

/// Random formula over the given literals, at most `budget` primitives.
inline LatticeFormula random_formula(std::mt19937& rng, const std::vector<Literal>& pool, std::size_t budget) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int r = pick(rng);
  if (budget <= 1 || r < 4) {
    if (r == 0) return LatticeFormula::top();
    if (r == 1) return LatticeFormula::bottom();
    return LatticeFormula::prim(pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]);
  }
  const std::size_t left = std::uniform_int_distribution<std::size_t>(1, budget - 1)(rng);
  auto a = random_formula(rng, pool, left);
  auto b = random_formula(rng, pool, budget - left);
  return r < 7 ? meet(std::move(a), std::move(b)) : join(std::move(a), std::move(b));
}

/// Every formula with at most `max_leaves` leaves drawn from `pool`, top
/// and bottom, combined with binary meet and join.
inline std::vector<LatticeFormula> enumerate_formulas(const std::vector<Literal>& pool, std::size_t max_leaves) {
  std::vector<std::vector<LatticeFormula>> by_size(max_leaves + 1);
  for (const auto& l : pool) by_size[1].push_back(LatticeFormula::prim(l));
  by_size[1].push_back(LatticeFormula::top());
  by_size[1].push_back(LatticeFormula::bottom());
  for (std::size_t n = 2; n <= max_leaves; ++n)
    for (std::size_t k = 1; k < n; ++k)
      for (const auto& a : by_size[k])
        for (const auto& b : by_size[n - k]) {
          by_size[n].push_back(meet(a, b));
          by_size[n].push_back(join(a, b));
        }
  std::vector<LatticeFormula> out;
  for (auto& v : by_size) out.insert(out.end(), v.begin(), v.end());
  return out;
}

/// Random small classification with tokens t0.., types y0.., a random
/// satisfaction relation and at most one order pair y0 <= y1.
inline Classification random_classification(std::mt19937& rng, const std::string& id, std::size_t n_tokens,
                                            std::size_t n_types, bool with_order = true) {
  std::vector<std::string> toks, typs;
  for (std::size_t i = 0; i < n_tokens; ++i) toks.push_back("t" + std::to_string(i));
  for (std::size_t i = 0; i < n_types; ++i) typs.push_back("y" + std::to_string(i));
  Classification c(id, toks, typs);
  std::bernoulli_distribution half(0.5);
  for (const auto& a : toks)
    for (const auto& g : typs)
      if (half(rng)) c.add_holds(a, g);
  if (with_order && n_types >= 2 && half(rng)) c.add_order("y0", "y1");
  c.close();
  return c;
}

struct RandomMorphism {
  std::unique_ptr<Classification> source;
  BaseInfomorphism f;
};

/// Builds a source classification around a random type map into `target`
/// and an injective token map, so that (IM) holds by construction. Extra
/// source tokens get random satisfaction.
inline RandomMorphism random_infomorphism(std::mt19937& rng, const Classification& target, const std::string& id,
                                          std::size_t n_types, std::size_t extra_tokens) {
  std::vector<std::string> real;
  for (const auto& b : target.tokens())
    if (b != kEpsilon) real.push_back(b);
  std::vector<std::string> toks, typs;
  for (std::size_t i = 0; i < real.size() + extra_tokens; ++i) toks.push_back("s" + std::to_string(i));
  for (std::size_t i = 0; i < n_types; ++i) typs.push_back("z" + std::to_string(i));
  auto src = std::make_unique<Classification>(id, toks, typs);
  RandomMorphism out{nullptr, BaseInfomorphism{}};
  std::uniform_int_distribution<std::size_t> pick_type(0, target.types().size() - 1);
  for (const auto& z : typs) out.f.type_map[z] = target.types()[pick_type(rng)];
  out.f.token_map[std::string(kEpsilon)] = std::string(kEpsilon);
  for (std::size_t j = 0; j < real.size(); ++j) {
    out.f.token_map[real[j]] = toks[j];
    for (const auto& z : typs)
      if (target.holds(real[j], out.f.type_map[z])) src->add_holds(toks[j], z);
  }
  std::bernoulli_distribution half(0.5);
  for (std::size_t j = real.size(); j < toks.size(); ++j)
    for (const auto& z : typs)
      if (half(rng)) src->add_holds(toks[j], z);
  if (n_types >= 2 && target.order().below(out.f.type_map["z0"], out.f.type_map["z1"]) && half(rng))
    src->add_order("z0", "z1");
  src->close();
  out.f.source = src.get();
  out.f.target = &target;
  out.source = std::move(src);
  return out;
}

/// Random family over the given tokens and indices, at most `max_members`.
inline TokenFamily random_family(std::mt19937& rng, const std::vector<std::string>& tokens,
                                 const std::vector<std::string>& indices, std::size_t max_members) {
  TokenFamily f;
  const std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_members)(rng);
  for (std::size_t i = 0; i < n; ++i)
    f.members[indices[std::uniform_int_distribution<std::size_t>(0, indices.size() - 1)(rng)]] =
        tokens[std::uniform_int_distribution<std::size_t>(0, tokens.size() - 1)(rng)];
  return f;
}

/// Empty family and every singleton over indices "1" and "2".
inline std::vector<TokenFamily> singleton_families_for(const Classification& c) {
  return singleton_families(c, {"1", "2"});
}

/// Each generator alpha_lambda plus top.
inline std::vector<LatticeFormula> generator_slots(const Classification& c, const std::vector<std::string>& indices) {
  auto out = generator_types(c, indices);
  out.push_back(LatticeFormula::top());
  return out;
}

/// Every family of at most one member per index.
inline std::vector<TokenFamily> mixed_families(const Classification& c, const std::vector<std::string>& indices) {
  std::vector<TokenFamily> out{TokenFamily{}};
  for (const auto& x : indices) {
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& a : c.tokens()) {
        auto f = out[i];
        f.members[x] = a;
        out.push_back(std::move(f));
      }
  }
  return out;
}

}  // namespace atchan::testing
