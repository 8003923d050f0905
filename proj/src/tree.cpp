#include "atchan/tree.hpp"

#include <algorithm>
#include <set>

#include "atchan/errors.hpp"

namespace atchan {

std::string_view to_string(Op op) {
  switch (op) {
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Sand: return "SAND";
  }
  return "?";
}

AttackTree leaf(std::string id, std::string action) {
  AttackTree t;
  if (action.empty()) action = id;
  t.id = std::move(id);
  t.action = std::move(action);
  return t;
}

AttackTree node(std::string id, Op op, std::vector<AttackTree> children, std::string action) {
  if (children.empty()) throw TreeError("node '" + id + "' has no children");
  AttackTree t;
  if (action.empty()) action = id;
  t.id = std::move(id);
  t.action = std::move(action);
  t.op = op;
  t.children = std::move(children);
  return t;
}

namespace {

void collect(const AttackTree& t, std::vector<const AttackTree*>& out) {
  out.push_back(&t);
  for (const auto& c : t.children) collect(c, out);
}

// Length-prefixed so that keys of different shapes never collide.
void append_text(std::string& out, std::string_view s) {
  out += std::to_string(s.size());
  out += ':';
  out += s;
}

void append_key(const AttackTree& t, std::string& out) {
  if (t.is_leaf()) {
    out += "L";
    append_text(out, t.action);
    return;
  }
  out += "N";
  out += static_cast<char>('0' + static_cast<int>(t.op));
  out += std::to_string(t.children.size());
  out += '(';
  for (const auto& c : t.children) append_key(c, out);
  out += ')';
  append_text(out, t.action);
}

void append_sexpr(const AttackTree& t, std::string& out) {
  if (t.is_leaf()) {
    out += t.id;
    return;
  }
  out += '(';
  out += t.id;
  out += ' ';
  out += to_string(t.op);
  for (const auto& c : t.children) {
    out += ' ';
    append_sexpr(c, out);
  }
  out += ')';
}

// Ordering used for the multiset representation; ids break structural ties.
bool scenario_less(const RTree& a, const RTree& b) {
  auto ka = structural_key(a.tree());
  auto kb = structural_key(b.tree());
  if (ka != kb) return ka < kb;
  return to_sexpr(a.tree()) < to_sexpr(b.tree());
}

}  // namespace

void validate(const AttackTree& t) {
  std::set<std::string> seen;
  for (const AttackTree* n : nodes(t)) {
    if (n->id.empty()) throw TreeError("node with empty id");
    if (!seen.insert(n->id).second) throw TreeError("duplicate node id '" + n->id + "'");
  }
}

std::vector<const AttackTree*> nodes(const AttackTree& t) {
  std::vector<const AttackTree*> out;
  collect(t, out);
  return out;
}

const AttackTree* find_node(const AttackTree& t, std::string_view id) {
  if (t.id == id) return &t;
  for (const auto& c : t.children)
    if (const AttackTree* hit = find_node(c, id)) return hit;
  return nullptr;
}

std::size_t leaf_count(const AttackTree& t) {
  if (t.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : t.children) n += leaf_count(c);
  return n;
}

std::size_t depth(const AttackTree& t) {
  std::size_t d = 0;
  for (const auto& c : t.children) d = std::max(d, depth(c));
  return d + 1;
}

bool contains_or(const AttackTree& t) {
  if (t.is_leaf()) return false;
  if (t.op == Op::Or) return true;
  return std::any_of(t.children.begin(), t.children.end(), [](const AttackTree& c) { return contains_or(c); });
}

RTree::RTree(AttackTree t) : tree_(std::move(t)) {
  if (contains_or(tree_)) throw TreeError("R-tree contains an OR branch: " + to_sexpr(tree_));
}

std::string structural_key(const AttackTree& t) {
  std::string out;
  append_key(t, out);
  return out;
}

AttackTree normalize(const AttackTree& t) {
  if (t.is_leaf()) return t;
  AttackTree out = t;
  for (auto& c : out.children) c = normalize(c);
  if (out.children.size() == 1) {
    out.op = Op::And;
  } else if (out.op != Op::Sand) {
    std::vector<std::pair<std::string, AttackTree>> keyed;
    keyed.reserve(out.children.size());
    for (auto& c : out.children) keyed.emplace_back(structural_key(c) + '\x1f' + to_sexpr(c), std::move(c));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.children.clear();
    for (auto& [k, c] : keyed) out.children.push_back(std::move(c));
  }
  return out;
}

std::vector<RTree> semantics(const AttackTree& t) {
  std::vector<RTree> out;
  if (t.is_leaf()) {
    out.emplace_back(t);
    return out;
  }
  if (t.op == Op::Or) {
    for (const auto& c : t.children)
      for (auto& tau : semantics(c)) out.emplace_back(node(t.id, Op::And, {tau.tree()}, t.action));
  } else {
    // Cartesian recombination of the children's scenarios.
    std::vector<std::vector<AttackTree>> partial{{}};
    for (const auto& c : t.children) {
      auto child_scenarios = semantics(c);
      std::vector<std::vector<AttackTree>> next;
      next.reserve(partial.size() * child_scenarios.size());
      for (const auto& prefix : partial) {
        for (const auto& tau : child_scenarios) {
          auto row = prefix;
          row.push_back(tau.tree());
          next.push_back(std::move(row));
        }
      }
      partial = std::move(next);
    }
    for (auto& row : partial) out.emplace_back(node(t.id, t.op, std::move(row), t.action));
  }
  std::sort(out.begin(), out.end(), scenario_less);
  return out;
}

bool equivalent(const AttackTree& a, const AttackTree& b) {
  return structural_key(normalize(a)) == structural_key(normalize(b));
}

std::string to_sexpr(const AttackTree& t) {
  std::string out;
  append_sexpr(t, out);
  return out;
}

}  // namespace atchan
