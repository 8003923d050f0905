#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace atchan {

enum class Op { And, Or, Sand };

std::string_view to_string(Op op);

/// An attack tree node. A node without children is a leaf; an intermediate
/// node always has at least one child. `id` addresses the node (effects,
/// witnesses, valuations); `action` is the human-readable label.
struct AttackTree {
  std::string id;
  std::string action;
  Op op = Op::And;
  std::vector<AttackTree> children;

  bool is_leaf() const { return children.empty(); }

  bool operator==(const AttackTree&) const = default;
};

/// Leaf whose action text defaults to its id.
AttackTree leaf(std::string id, std::string action = {});
/// Throws TreeError when `children` is empty.
AttackTree node(std::string id, Op op, std::vector<AttackTree> children, std::string action = {});

/// Checks the structural invariants: non-empty children and unique ids.
void validate(const AttackTree& t);

/// Pre-order list of every node.
std::vector<const AttackTree*> nodes(const AttackTree& t);
const AttackTree* find_node(const AttackTree& t, std::string_view id);
std::size_t leaf_count(const AttackTree& t);
std::size_t depth(const AttackTree& t);

bool contains_or(const AttackTree& t);

/// An attack tree without OR branches: one refinement scenario.
class RTree {
 public:
  /// Throws TreeError if `t` contains an OR branch.
  explicit RTree(AttackTree t);

  const AttackTree& tree() const { return tree_; }
  bool operator==(const RTree&) const = default;

 private:
  AttackTree tree_;
};

/// Deterministic key over (op tag, child count, child keys, action text).
/// Node ids do not participate.
std::string structural_key(const AttackTree& t);

/// Canonical form under the assumed equalities: AND/OR children sorted by
/// structural key, single-child branches rewritten to AND.
AttackTree normalize(const AttackTree& t);

/// Refinement-scenario semantics as a multiset, returned as a sorted
/// sequence with multiplicity.
std::vector<RTree> semantics(const AttackTree& t);

/// Congruence generated by the assumed equalities only; ids are ignored.
bool equivalent(const AttackTree& a, const AttackTree& b);

/// Compact s-expression rendering, mainly for diagnostics and tests.
std::string to_sexpr(const AttackTree& t);

}  // namespace atchan
