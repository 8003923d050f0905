#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace atchan {

/// Declared preorder on primitive types: `below(a, b)` means b is derivable
/// from a. Reflexive by construction; transitive after `close()`.
class TypeOrder {
 public:
  void add(std::string lower, std::string upper);
  /// Transitive closure. Returns the pairs that were added.
  std::vector<std::pair<std::string, std::string>> close();

  bool below(std::string_view a, std::string_view b) const;
  /// Lexicographically least type equivalent to `t` (t itself if none).
  std::string canonical(std::string_view t) const;
  /// Non-reflexive pairs of the relation.
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
};

/// An indexed primitive type alpha_lambda.
struct Literal {
  std::string type;
  std::string index;

  auto operator<=>(const Literal&) const = default;
};

/// Same index and type-wise below.
bool literal_below(const Literal& a, const Literal& b, const TypeOrder& order);

/// Distributive-lattice formula over indexed primitive types.
struct LatticeFormula {
  enum class Kind { Prim, Top, Bottom, And, Or };

  Kind kind = Kind::Top;
  Literal literal;                    // Prim only
  std::vector<LatticeFormula> args;   // And / Or only, at least one

  bool operator==(const LatticeFormula&) const = default;

  static LatticeFormula prim(std::string type, std::string index);
  static LatticeFormula prim(Literal l);
  static LatticeFormula top();
  static LatticeFormula bottom();
};

LatticeFormula meet(LatticeFormula a, LatticeFormula b);
LatticeFormula join(LatticeFormula a, LatticeFormula b);
/// Empty input yields top.
LatticeFormula meet_all(std::vector<LatticeFormula> fs);
/// Empty input yields bottom.
LatticeFormula join_all(std::vector<LatticeFormula> fs);

/// Sorted, duplicate-free literals occurring in `f`.
std::vector<Literal> literals(const LatticeFormula& f);

bool evaluate(const LatticeFormula& f, const std::function<bool(const Literal&)>& valuation);

/// Rebuilds `f` replacing each primitive by `fn(literal)`.
LatticeFormula substitute(const LatticeFormula& f, const std::function<LatticeFormula(const Literal&)>& fn);

/// Join of meets. Literals are canonical class representatives, every clause
/// is irredundant, the clause set is an antichain, and both levels are
/// sorted. Top is one empty clause; bottom has no clauses.
struct NormalForm {
  std::vector<std::vector<Literal>> clauses;

  bool operator==(const NormalForm&) const = default;
  bool is_top() const { return clauses.size() == 1 && clauses.front().empty(); }
  bool is_bottom() const { return clauses.empty(); }
};

NormalForm normal_form(const LatticeFormula& f, const TypeOrder& order);
LatticeFormula to_formula(const NormalForm& nf);

/// Meet m is below meet n iff every literal of n is above some literal of m.
bool clause_leq(const std::vector<Literal>& m, const std::vector<Literal>& n, const TypeOrder& order);

/// Decides g <= d through normal forms.
bool leq(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order);
bool equivalent(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order);

/// Largest number of distinct literals accepted by leq_oracle.
inline constexpr std::size_t kOracleLiteralCap = 12;

/// Brute-force g <= d over every order-respecting boolean valuation of the
/// occurring literals. Throws CapExceededError above kOracleLiteralCap.
bool leq_oracle(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order);

/// DSL rendering: `Disc@AuI.I /\ (Mod@x \/ top)`.
std::string to_string(const LatticeFormula& f);
std::string to_string(const Literal& l);

}  // namespace atchan
