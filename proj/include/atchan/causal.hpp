#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atchan/tree.hpp"

namespace atchan {

/// Binary causal attack tree. Atoms carry leaf actions; binary nodes carry
/// a label too, synthesized for the intermediate nodes of a fold.
struct CausalTree {
  enum class Kind { Atom, Conj, Disj, Seq };

  Kind kind = Kind::Atom;
  std::string label;
  std::vector<CausalTree> kids;  // empty for atoms, two otherwise

  static CausalTree atom(std::string a);
  static CausalTree conj(CausalTree l, CausalTree r, std::string label = {});
  static CausalTree disj(CausalTree l, CausalTree r, std::string label = {});
  static CausalTree seq(CausalTree l, CausalTree r, std::string label = {});

  bool operator==(const CausalTree&) const = default;
};

std::string to_string(const CausalTree& t);

/// Directed graph with labeled vertices 0..n-1. Labels may repeat.
struct LabeledDigraph {
  std::vector<std::string> labels;
  std::set<std::pair<std::size_t, std::size_t>> edges;

  std::size_t size() const { return labels.size(); }
  static LabeledDigraph singleton(std::string label);
  bool operator==(const LabeledDigraph&) const = default;
};

/// Disjoint union; the vertices of `b` are numbered after those of `a`.
LabeledDigraph juxtapose(const LabeledDigraph& a, const LabeledDigraph& b);
/// Disjoint union plus every edge from a vertex of `a` to a vertex of `b`.
LabeledDigraph sequence(const LabeledDigraph& a, const LabeledDigraph& b);
LabeledDigraph transitive_closure(const LabeledDigraph& g);

/// Folds each branch's children left to right into binary terms. The
/// outermost term is labeled with the node id, inner ones `id/k`. A branch
/// with one child becomes that child.
CausalTree beta(const AttackTree& t);

inline constexpr std::size_t kIsomorphismVertexCap = 12;
inline constexpr std::size_t kGraphSetCap = 10000;

/// Label-preserving isomorphism by backtracking. Throws CapExceededError
/// above kIsomorphismVertexCap vertices.
bool graphs_isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2);

/// Removes isomorphic duplicates, keeping first occurrences in order.
std::vector<LabeledDigraph> dedup_isomorphic(std::vector<LabeledDigraph> gs);

/// Set of graphs, deduplicated up to isomorphism. Throws CapExceededError
/// when an intermediate set grows beyond kGraphSetCap.
std::vector<LabeledDigraph> intermediate_semantics(const CausalTree& t);

/// Leaves become singletons, AND juxtaposes, SAND juxtaposes and links
/// every vertex of a child to every vertex of the next child.
LabeledDigraph project_rtree(const RTree& r);

/// Same as project_rtree on a tree that must not contain OR.
LabeledDigraph project(const AttackTree& t);

/// Set equality up to isomorphism, after deduplication on both sides.
bool same_graph_set(const std::vector<LabeledDigraph>& a, const std::vector<LabeledDigraph>& b);

enum class CommutationMode {
  /// Projections are closed transitively before comparing, so both sides
  /// are compared as causal orders.
  Closure,
  /// Projections are compared as they are.
  Literal,
};

struct CommutationReport {
  bool commutes = false;
  std::vector<LabeledDigraph> projected;  // deduplicated
  std::vector<LabeledDigraph> intermediate;
};

/// Compares the projections of the scenarios of `t` with the intermediate
/// semantics of beta(t). Throws CapExceededError when `t` has more than
/// kIsomorphismVertexCap leaves or too many scenarios.
CommutationReport commutation_report(const AttackTree& t, CommutationMode mode = CommutationMode::Closure);
bool check_commutation(const AttackTree& t, CommutationMode mode = CommutationMode::Closure);

}  // namespace atchan
