#include "atchan/causal.hpp"

#include <algorithm>
#include <functional>
#include <tuple>

#include "atchan/errors.hpp"

namespace atchan {

namespace {

CausalTree binary(CausalTree::Kind k, CausalTree l, CausalTree r, std::string label) {
  CausalTree t;
  t.kind = k;
  t.label = std::move(label);
  t.kids.push_back(std::move(l));
  t.kids.push_back(std::move(r));
  return t;
}

CausalTree::Kind kind_of(Op op) {
  switch (op) {
    case Op::And: return CausalTree::Kind::Conj;
    case Op::Or: return CausalTree::Kind::Disj;
    case Op::Sand: return CausalTree::Kind::Seq;
  }
  return CausalTree::Kind::Conj;
}

using Signature = std::tuple<std::string, std::size_t, std::size_t>;

std::vector<Signature> signatures(const LabeledDigraph& g) {
  std::vector<Signature> out;
  for (const auto& l : g.labels) out.emplace_back(l, 0, 0);
  for (auto [u, v] : g.edges) {
    ++std::get<2>(out[u]);
    ++std::get<1>(out[v]);
  }
  return out;
}

std::vector<LabeledDigraph> pairwise(const std::vector<LabeledDigraph>& as, const std::vector<LabeledDigraph>& bs,
                                     LabeledDigraph (*op)(const LabeledDigraph&, const LabeledDigraph&)) {
  if (as.size() * bs.size() > kGraphSetCap) throw CapExceededError("graph set exceeds the cap");
  std::vector<LabeledDigraph> out;
  for (const auto& a : as)
    for (const auto& b : bs) out.push_back(op(a, b));
  return dedup_isomorphic(std::move(out));
}

}  // namespace

CausalTree CausalTree::atom(std::string a) {
  CausalTree t;
  t.label = std::move(a);
  return t;
}
CausalTree CausalTree::conj(CausalTree l, CausalTree r, std::string label) {
  return binary(Kind::Conj, std::move(l), std::move(r), std::move(label));
}
CausalTree CausalTree::disj(CausalTree l, CausalTree r, std::string label) {
  return binary(Kind::Disj, std::move(l), std::move(r), std::move(label));
}
CausalTree CausalTree::seq(CausalTree l, CausalTree r, std::string label) {
  return binary(Kind::Seq, std::move(l), std::move(r), std::move(label));
}

std::string to_string(const CausalTree& t) {
  switch (t.kind) {
    case CausalTree::Kind::Atom: return t.label;
    case CausalTree::Kind::Conj: return "(" + to_string(t.kids[0]) + " & " + to_string(t.kids[1]) + ")";
    case CausalTree::Kind::Disj: return "(" + to_string(t.kids[0]) + " | " + to_string(t.kids[1]) + ")";
    case CausalTree::Kind::Seq: return "(" + to_string(t.kids[0]) + " . " + to_string(t.kids[1]) + ")";
  }
  return {};
}

LabeledDigraph LabeledDigraph::singleton(std::string label) {
  LabeledDigraph g;
  g.labels.push_back(std::move(label));
  return g;
}

LabeledDigraph juxtapose(const LabeledDigraph& a, const LabeledDigraph& b) {
  LabeledDigraph g = a;
  const std::size_t off = a.size();
  g.labels.insert(g.labels.end(), b.labels.begin(), b.labels.end());
  for (auto [u, v] : b.edges) g.edges.emplace(u + off, v + off);
  return g;
}

LabeledDigraph sequence(const LabeledDigraph& a, const LabeledDigraph& b) {
  LabeledDigraph g = juxtapose(a, b);
  for (std::size_t u = 0; u < a.size(); ++u)
    for (std::size_t v = 0; v < b.size(); ++v) g.edges.emplace(u, a.size() + v);
  return g;
}

LabeledDigraph transitive_closure(const LabeledDigraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (auto [u, v] : g.edges) r[u][v] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  LabeledDigraph out;
  out.labels = g.labels;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j]) out.edges.emplace(i, j);
  return out;
}

CausalTree beta(const AttackTree& t) {
  if (t.is_leaf()) return CausalTree::atom(t.action);
  CausalTree acc = beta(t.children.front());
  const auto k = kind_of(t.op);
  for (std::size_t i = 1; i < t.children.size(); ++i) {
    const bool last = i + 1 == t.children.size();
    acc = binary(k, std::move(acc), beta(t.children[i]), last ? t.id : t.id + "/" + std::to_string(i));
  }
  return acc;
}

bool graphs_isomorphic(const LabeledDigraph& g1, const LabeledDigraph& g2) {
  if (g1.size() > kIsomorphismVertexCap || g2.size() > kIsomorphismVertexCap)
    throw CapExceededError("graph isomorphism limited to " + std::to_string(kIsomorphismVertexCap) + " vertices");
  if (g1.size() != g2.size() || g1.edges.size() != g2.edges.size()) return false;
  const auto s1 = signatures(g1), s2 = signatures(g2);
  {
    auto a = s1, b = s2;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) return false;
  }
  const std::size_t n = g1.size();
  std::vector<std::size_t> image(n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> extend = [&](std::size_t u) {
    if (u == n) return true;
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v] || s1[u] != s2[v]) continue;
      bool ok = g1.edges.count({u, u}) == g2.edges.count({v, v});
      for (std::size_t w = 0; ok && w < u; ++w)
        ok = g1.edges.count({u, w}) == g2.edges.count({v, image[w]}) &&
             g1.edges.count({w, u}) == g2.edges.count({image[w], v});
      if (!ok) continue;
      used[v] = true;
      image[u] = v;
      if (extend(u + 1)) return true;
      used[v] = false;
    }
    return false;
  };
  return extend(0);
}

std::vector<LabeledDigraph> dedup_isomorphic(std::vector<LabeledDigraph> gs) {
  std::vector<LabeledDigraph> out;
  for (auto& g : gs)
    if (std::none_of(out.begin(), out.end(), [&](const LabeledDigraph& h) { return graphs_isomorphic(g, h); }))
      out.push_back(std::move(g));
  return out;
}

std::vector<LabeledDigraph> intermediate_semantics(const CausalTree& t) {
  switch (t.kind) {
    case CausalTree::Kind::Atom: return {LabeledDigraph::singleton(t.label)};
    case CausalTree::Kind::Disj: {
      auto out = intermediate_semantics(t.kids[0]);
      auto rhs = intermediate_semantics(t.kids[1]);
      out.insert(out.end(), rhs.begin(), rhs.end());
      if (out.size() > kGraphSetCap) throw CapExceededError("graph set exceeds the cap");
      return dedup_isomorphic(std::move(out));
    }
    case CausalTree::Kind::Conj:
      return pairwise(intermediate_semantics(t.kids[0]), intermediate_semantics(t.kids[1]), juxtapose);
    case CausalTree::Kind::Seq:
      return pairwise(intermediate_semantics(t.kids[0]), intermediate_semantics(t.kids[1]), sequence);
  }
  return {};
}

LabeledDigraph project(const AttackTree& t) {
  if (t.is_leaf()) return LabeledDigraph::singleton(t.action);
  if (t.op == Op::Or) throw TreeError("cannot project an OR branch: " + t.id);
  LabeledDigraph g;
  std::size_t prev_begin = 0, prev_end = 0;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    const std::size_t begin = g.size();
    g = juxtapose(g, project(t.children[i]));
    if (t.op == Op::Sand && i > 0)
      for (std::size_t u = prev_begin; u < prev_end; ++u)
        for (std::size_t v = begin; v < g.size(); ++v) g.edges.emplace(u, v);
    prev_begin = begin;
    prev_end = g.size();
  }
  return g;
}

LabeledDigraph project_rtree(const RTree& r) { return project(r.tree()); }

bool same_graph_set(const std::vector<LabeledDigraph>& a, const std::vector<LabeledDigraph>& b) {
  const auto da = dedup_isomorphic(a), db = dedup_isomorphic(b);
  if (da.size() != db.size()) return false;
  return std::all_of(da.begin(), da.end(), [&](const LabeledDigraph& g) {
    return std::any_of(db.begin(), db.end(), [&](const LabeledDigraph& h) { return graphs_isomorphic(g, h); });
  });
}

CommutationReport commutation_report(const AttackTree& t, CommutationMode mode) {
  if (leaf_count(t) > kIsomorphismVertexCap)
    throw CapExceededError("commutation check limited to " + std::to_string(kIsomorphismVertexCap) + " leaves");
  const auto scenarios = semantics(t);
  if (scenarios.size() > kGraphSetCap) throw CapExceededError("too many scenarios");
  std::vector<LabeledDigraph> projected;
  for (const auto& r : scenarios) {
    auto g = project_rtree(r);
    projected.push_back(mode == CommutationMode::Closure ? transitive_closure(g) : std::move(g));
  }
  CommutationReport rep;
  rep.projected = dedup_isomorphic(std::move(projected));
  rep.intermediate = intermediate_semantics(beta(t));
  rep.commutes = same_graph_set(rep.projected, rep.intermediate);
  return rep;
}

bool check_commutation(const AttackTree& t, CommutationMode mode) { return commutation_report(t, mode).commutes; }

}  // namespace atchan
