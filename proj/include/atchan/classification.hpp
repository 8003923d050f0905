#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atchan/lattice.hpp"

namespace atchan {

/// The distinguished un-connected token present in every classification.
inline constexpr std::string_view kEpsilon = "eps";

/// Finite classification: tokens, primitive types, satisfaction relation
/// and a declared preorder on types. Immutable once `close()` has run.
class Classification {
 public:
  Classification() = default;
  Classification(std::string id, std::vector<std::string> tokens, std::vector<std::string> types);

  void add_holds(std::string token, std::string type);
  void add_order(std::string lower, std::string upper);

  /// Closes the order transitively and the satisfaction relation upward
  /// along it. Returns the satisfaction pairs that had to be added.
  std::vector<std::pair<std::string, std::string>> close();

  const std::string& id() const { return id_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::string>& types() const { return types_; }
  const TypeOrder& order() const { return order_; }
  const std::set<std::pair<std::string, std::string>>& holds_pairs() const { return holds_; }

  bool has_token(std::string_view t) const;
  bool has_type(std::string_view t) const;
  bool holds(std::string_view token, std::string_view type) const;

  /// Component ids when this is a sum; empty otherwise.
  const std::vector<std::string>& components() const { return components_; }

 private:
  friend Classification sum_classification(const std::vector<const Classification*>&, std::string);
  friend Classification product_classification(const std::vector<const Classification*>&, std::string);

  std::string id_;
  std::vector<std::string> tokens_;
  std::vector<std::string> types_;
  std::set<std::pair<std::string, std::string>> holds_;
  TypeOrder order_;
  std::vector<std::string> components_;
};

/// Name of `name` injected into the k-th summand (1-based): `name^(k)`.
std::string tag(std::string_view name, std::size_t k);
/// Inverse of tag; nullopt for untagged names.
std::optional<std::pair<std::size_t, std::string>> untag(std::string_view name);

/// Disjoint union with tags 1..n and a fresh un-connected token.
Classification sum_classification(const std::vector<const Classification*>& parts, std::string id = {});
Classification sum_classification(const Classification& c1, const Classification& c2);

/// Cartesian tokens and types, componentwise satisfaction. Tuples are
/// rendered `<a,b>`.
Classification product_classification(const std::vector<const Classification*>& parts, std::string id = {});
std::string tuple_name(const std::vector<std::string>& parts);

/// Token of FD(C): finite family indexed by strings.
struct TokenFamily {
  std::map<std::string, std::string> members;  // index -> token

  bool operator==(const TokenFamily&) const = default;
  auto operator<=>(const TokenFamily&) const = default;

  bool empty() const { return members.empty(); }
  /// Each token indexed by its own name.
  static TokenFamily self_indexed(const std::vector<std::string>& tokens);
};

using FamilyTuple = std::vector<TokenFamily>;
using FormulaTuple = std::vector<LatticeFormula>;

std::string to_string(const TokenFamily& f);
std::string to_string(const FamilyTuple& t);

/// Set of member tokens; the identity used when forming cut sequences.
std::set<std::string> token_set(const TokenFamily& f);

/// Throws SchemaError when a token of `family` or a type of `formula` is
/// not declared in `c`.
void check_schema(const Classification& c, const TokenFamily& family, const LatticeFormula& formula);

/// Satisfaction in FD(C).
bool fd_holds(const Classification& c, const TokenFamily& family, const LatticeFormula& formula);

/// Componentwise satisfaction in (FD(C_1), ..., FD(C_n)).
bool tuple_holds(const std::vector<const Classification*>& cs, const FamilyTuple& tokens, const FormulaTuple& types);

/// Structural deductions to a fixpoint: eps members removed, duplicate
/// tokens merged onto the least index.
TokenFamily reduce_family(const TokenFamily& family);
/// As above and additionally drops indices that do not occur in `formula`.
/// Duplicates are only merged when the dropped index is unused.
TokenFamily reduce_family(const TokenFamily& family, const LatticeFormula& formula);

}  // namespace atchan
