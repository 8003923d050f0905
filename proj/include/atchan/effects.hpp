#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atchan/classification.hpp"
#include "atchan/infomorphism.hpp"
#include "atchan/lattice.hpp"
#include "atchan/tree.hpp"

namespace atchan {

/// phi(N): a holding relation `family |= formula` in FD(C_N).
struct Effect {
  std::string node;
  const Classification* cls = nullptr;
  TokenFamily family;
  LatticeFormula formula;
};

std::string to_string(const Effect& e);

/// Throws EffectError when the relation does not hold, SchemaError when it
/// mentions undeclared names.
void check_effect(const Effect& e);

/// Keeps the rightmost effect of every token set, in order.
std::vector<Effect> cut_sequence(const std::vector<Effect>& effects);

/// Integrated effect over FD(C_1 (+) ... (+) C_n).
struct IntegratedEffect {
  Classification sum;
  TokenFamily family;
  LatticeFormula formula;
  /// Index renaming applied to component k (1-based, position k-1).
  std::vector<std::map<std::string, std::string>> renamed;
};

/// Union of the component families with tagged tokens. An index already
/// used by an earlier component is renamed to `index#k`.
std::pair<TokenFamily, std::vector<std::map<std::string, std::string>>> merge_families(
    const std::vector<TokenFamily>& parts);

IntegratedEffect integrate(Op op, const std::vector<Effect>& effects);

// ---------------------------------------------------------------------------

enum class Verdict { Consistent, Inconsistent, Unverified };
std::string to_string(Verdict v);

/// Token and type constraints for the witness search. Lists name the
/// allowed images; unlisted names are unconstrained.
struct SearchConstraints {
  std::map<std::string, std::vector<std::string>> tokens;  // parent token -> child tokens
  std::map<std::string, std::vector<std::string>> types;   // child type -> parent types
};

inline constexpr std::size_t kDefaultSearchCap = 10000;

struct ConsistencyWitness {
  /// OR branches: one single-source witness per child id.
  std::map<std::string, TupleInfomorphism> per_child;
  /// AND and SAND branches: one witness from the (cut-sequence) tuple.
  std::optional<TupleInfomorphism> tuple;
  /// SAND branches: child id -> formula that must follow from the effects
  /// of the preceding children.
  std::map<std::string, LatticeFormula> preconditions;
  /// Search instead of (or in absence of) explicit maps.
  std::optional<SearchConstraints> search;
};

struct BranchReport {
  std::string node;
  Op op = Op::And;
  Verdict verdict = Verdict::Unverified;
  std::vector<std::string> reasons;
  /// Set only for consistent branches.
  std::optional<bool> complete;
  /// Witness actually used (explicit or found by search).
  ConsistencyWitness used;
};

struct ConsistencyReport {
  Verdict verdict = Verdict::Consistent;
  std::vector<BranchReport> branches;
};

/// Effects keyed by node id.
using EffectMap = std::map<std::string, Effect>;

struct CheckOptions {
  std::size_t search_cap = kDefaultSearchCap;
};

BranchReport check_branch_consistency(const AttackTree& branch, const EffectMap& phi,
                                      const ConsistencyWitness* witness, const CheckOptions& opts = {});

/// Verdicts of every branch in pre-order. Consistent iff every branch is.
ConsistencyReport check_tree_consistency(const AttackTree& tree, const EffectMap& phi,
                                         const std::map<std::string, ConsistencyWitness>& witnesses,
                                         const CheckOptions& opts = {});

/// Gamma_p <= image of the children's types under the witness.
bool check_completeness(const AttackTree& branch, const EffectMap& phi, const ConsistencyWitness& witness);

/// Failing SAND preconditions of `branch`, as (child id, reason).
std::vector<std::pair<std::string, std::string>> check_preconditions(const AttackTree& branch, const EffectMap& phi,
                                                                     const ConsistencyWitness& witness);

struct SearchResult {
  enum class Status { Found, None, CapExceeded };
  Status status = Status::None;
  std::optional<TupleInfomorphism> witness;
  std::size_t explored = 0;
};

/// Bounded search for a witness refining `children` (a tuple, or a single
/// effect) into `parent`.
SearchResult search_infomorphism(const std::vector<Effect>& children, const Effect& parent,
                                 const SearchConstraints& constraints, std::size_t cap = kDefaultSearchCap);

// ---------------------------------------------------------------------------
// Integrated-effect infomorphism g from FD(C_1 (+) ... (+) C_n) to FD(C_p).

struct IntegratedInfomorphism {
  /// One tuple witness (AND/SAND) or n single-source witnesses (OR).
  std::vector<const TupleInfomorphism*> parts;
  bool per_component = false;
  const Classification* source = nullptr;  // the sum
  const Classification* target = nullptr;
  /// Index renaming of the integration, per component.
  std::vector<std::map<std::string, std::string>> renamed;

  LatticeFormula up(const LatticeFormula& integrated) const;
  TokenFamily down(const TokenFamily& parent) const;
};

/// Check set: empty family and {a -> a} for the mapped parent tokens;
/// conj images of the witness generators. Returns the violating pairs.
std::vector<std::pair<TokenFamily, LatticeFormula>> check_integrated(const IntegratedInfomorphism& g);

}  // namespace atchan
