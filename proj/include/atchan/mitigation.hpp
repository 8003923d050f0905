#pragma once

#include <map>
#include <string>
#include <vector>

#include "atchan/effects.hpp"
#include "atchan/lattice.hpp"

namespace atchan {

/// A mitigation moves an effect's type up: Gamma <= Gamma'. Top is full
/// prevention.
bool is_reduction(const LatticeFormula& gamma, const LatticeFormula& gamma_prime, const TypeOrder& order);

/// f(Gamma') \/ Delta <= Delta', with f(Gamma') already computed.
bool check_mitigation_bound(const LatticeFormula& child_image, const LatticeFormula& parent_original,
                            const LatticeFormula& parent_residual, const TypeOrder& order);
bool check_mitigation_bound(const TupleInfomorphism& f, const FormulaTuple& child_residuals,
                            const LatticeFormula& parent_original, const LatticeFormula& parent_residual);

/// Residual formulas by node id; nodes without an entry keep their effect.
using Residuals = std::map<std::string, LatticeFormula>;

/// Image of the children's residuals in the parent classification: the join
/// of f_i(Gamma'_i) for OR, f(<Gamma'_i>) for AND, and f of the residual cut
/// sequence for SAND. Throws SchemaError when the witness is incomplete.
LatticeFormula residual_image(const AttackTree& branch, const EffectMap& phi, const ConsistencyWitness& witness,
                              const Residuals& residuals);

struct WeakeningViolation {
  std::string child;
  LatticeFormula image;
};

/// OR branches: children whose f_i(Gamma'_i) is not below Gamma'_p.
std::vector<WeakeningViolation> check_or_branch_weakening(const AttackTree& branch, const EffectMap& phi,
                                                          const ConsistencyWitness& witness,
                                                          const Residuals& residuals);

inline constexpr std::size_t kDefaultResidualCap = 100000;

struct ResidualSpace {
  std::vector<LatticeFormula> formulas;  // normal forms
  bool partial = false;
};

/// Every normal form over `literals` (antichains of irredundant clauses),
/// bottom and top included, stopping at `cap` formulas.
ResidualSpace formula_space(const std::vector<Literal>& literals, const TypeOrder& order,
                            std::size_t cap = kDefaultResidualCap);

/// Literals of the parent effect and of the residual image, closed under
/// the declared order on the same index.
std::vector<Literal> residual_literals(const AttackTree& branch, const EffectMap& phi,
                                       const ConsistencyWitness& witness, const Residuals& residuals);

/// Parent residuals Gamma'_p with f(#Gamma'_i) \/ Gamma_p <= Gamma'_p.
ResidualSpace admissible_parent_residuals(const AttackTree& branch, const EffectMap& phi,
                                          const ConsistencyWitness& witness, const Residuals& child_residuals,
                                          std::size_t cap = kDefaultResidualCap);

/// Reductions of `child`'s effect, with the other residuals fixed, under
/// which `parent_residual` is exactly the image of the residuals joined
/// with Gamma_p: the bound holds and the parent residual is still derived
/// from the children.
std::vector<LatticeFormula> required_child_reductions(const AttackTree& branch, const EffectMap& phi,
                                                      const ConsistencyWitness& witness, const Residuals& fixed,
                                                      const std::string& child,
                                                      const LatticeFormula& parent_residual,
                                                      std::size_t cap = kDefaultResidualCap);

/// SAND preconditions evaluated on the residual effects.
std::vector<std::pair<std::string, std::string>> check_residual_preconditions(const AttackTree& branch,
                                                                              const EffectMap& phi,
                                                                              const ConsistencyWitness& witness,
                                                                              const Residuals& residuals);

}  // namespace atchan
