#include "atchan/lattice.hpp"

#include <algorithm>

#include "atchan/errors.hpp"

namespace atchan {

void TypeOrder::add(std::string lower, std::string upper) {
  if (lower == upper) return;
  pairs_.emplace(std::move(lower), std::move(upper));
}

std::vector<std::pair<std::string, std::string>> TypeOrder::close() {
  std::vector<std::pair<std::string, std::string>> added;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> fresh;
    for (const auto& [a, b] : pairs_)
      for (auto it = pairs_.lower_bound({b, std::string{}}); it != pairs_.end() && it->first == b; ++it)
        if (a != it->second && !pairs_.count({a, it->second})) fresh.emplace_back(a, it->second);
    for (auto& p : fresh) {
      if (pairs_.insert(p).second) {
        added.push_back(p);
        changed = true;
      }
    }
  }
  return added;
}

bool TypeOrder::below(std::string_view a, std::string_view b) const {
  if (a == b) return true;
  return pairs_.count({std::string(a), std::string(b)}) > 0;
}

std::string TypeOrder::canonical(std::string_view t) const {
  std::string best(t);
  for (const auto& [a, b] : pairs_)
    if (a == t && below(b, t) && b < best) best = b;
  return best;
}

bool literal_below(const Literal& a, const Literal& b, const TypeOrder& order) {
  return a.index == b.index && order.below(a.type, b.type);
}

LatticeFormula LatticeFormula::prim(std::string type, std::string index) {
  return prim(Literal{std::move(type), std::move(index)});
}

LatticeFormula LatticeFormula::prim(Literal l) {
  LatticeFormula f;
  f.kind = Kind::Prim;
  f.literal = std::move(l);
  return f;
}

LatticeFormula LatticeFormula::top() { return LatticeFormula{}; }

LatticeFormula LatticeFormula::bottom() {
  LatticeFormula f;
  f.kind = Kind::Bottom;
  return f;
}

namespace {

LatticeFormula combine(LatticeFormula::Kind kind, std::vector<LatticeFormula> fs) {
  if (fs.size() == 1) return std::move(fs.front());
  LatticeFormula f;
  f.kind = kind;
  f.args = std::move(fs);
  return f;
}

}  // namespace

LatticeFormula meet(LatticeFormula a, LatticeFormula b) {
  return combine(LatticeFormula::Kind::And, {std::move(a), std::move(b)});
}

LatticeFormula join(LatticeFormula a, LatticeFormula b) {
  return combine(LatticeFormula::Kind::Or, {std::move(a), std::move(b)});
}

LatticeFormula meet_all(std::vector<LatticeFormula> fs) {
  if (fs.empty()) return LatticeFormula::top();
  return combine(LatticeFormula::Kind::And, std::move(fs));
}

LatticeFormula join_all(std::vector<LatticeFormula> fs) {
  if (fs.empty()) return LatticeFormula::bottom();
  return combine(LatticeFormula::Kind::Or, std::move(fs));
}

namespace {

void collect_literals(const LatticeFormula& f, std::vector<Literal>& out) {
  if (f.kind == LatticeFormula::Kind::Prim) out.push_back(f.literal);
  for (const auto& a : f.args) collect_literals(a, out);
}

}  // namespace

std::vector<Literal> literals(const LatticeFormula& f) {
  std::vector<Literal> out;
  collect_literals(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool evaluate(const LatticeFormula& f, const std::function<bool(const Literal&)>& valuation) {
  using K = LatticeFormula::Kind;
  switch (f.kind) {
    case K::Prim: return valuation(f.literal);
    case K::Top: return true;
    case K::Bottom: return false;
    case K::And:
      return std::all_of(f.args.begin(), f.args.end(), [&](const auto& a) { return evaluate(a, valuation); });
    case K::Or:
      return std::any_of(f.args.begin(), f.args.end(), [&](const auto& a) { return evaluate(a, valuation); });
  }
  return false;
}

LatticeFormula substitute(const LatticeFormula& f, const std::function<LatticeFormula(const Literal&)>& fn) {
  if (f.kind == LatticeFormula::Kind::Prim) return fn(f.literal);
  LatticeFormula out = f;
  for (auto& a : out.args) a = substitute(a, fn);
  return out;
}

bool clause_leq(const std::vector<Literal>& m, const std::vector<Literal>& n, const TypeOrder& order) {
  return std::all_of(n.begin(), n.end(), [&](const Literal& upper) {
    return std::any_of(m.begin(), m.end(), [&](const Literal& lower) { return literal_below(lower, upper, order); });
  });
}

namespace {

using Clause = std::vector<Literal>;

// Drops literals implied by a strictly smaller literal of the same clause.
Clause reduce_clause(Clause c, const TypeOrder& order) {
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  Clause out;
  for (const auto& l : c) {
    bool redundant = std::any_of(c.begin(), c.end(), [&](const Literal& other) {
      return !(other == l) && literal_below(other, l, order);
    });
    if (!redundant) out.push_back(l);
  }
  return out;
}

// Absorption: removes every clause below another clause of the join.
std::vector<Clause> reduce_join(std::vector<Clause> cs, const TypeOrder& order) {
  for (auto& c : cs) c = reduce_clause(std::move(c), order);
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::vector<Clause> out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    bool absorbed = false;
    for (std::size_t j = 0; j < cs.size() && !absorbed; ++j)
      absorbed = i != j && clause_leq(cs[i], cs[j], order);
    if (!absorbed) out.push_back(cs[i]);
  }
  return out;
}

std::vector<Clause> dnf(const LatticeFormula& f, const TypeOrder& order) {
  using K = LatticeFormula::Kind;
  switch (f.kind) {
    case K::Prim: return {{Literal{order.canonical(f.literal.type), f.literal.index}}};
    case K::Top: return {{}};
    case K::Bottom: return {};
    case K::Or: {
      std::vector<Clause> out;
      for (const auto& a : f.args) {
        auto part = dnf(a, order);
        out.insert(out.end(), part.begin(), part.end());
      }
      return reduce_join(std::move(out), order);
    }
    case K::And: {
      std::vector<Clause> acc{{}};
      for (const auto& a : f.args) {
        auto part = dnf(a, order);
        std::vector<Clause> next;
        next.reserve(acc.size() * part.size());
        for (const auto& x : acc) {
          for (const auto& y : part) {
            Clause c = x;
            c.insert(c.end(), y.begin(), y.end());
            next.push_back(std::move(c));
          }
        }
        acc = reduce_join(std::move(next), order);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

NormalForm normal_form(const LatticeFormula& f, const TypeOrder& order) {
  return NormalForm{dnf(f, order)};
}

LatticeFormula to_formula(const NormalForm& nf) {
  std::vector<LatticeFormula> joins;
  for (const auto& c : nf.clauses) {
    std::vector<LatticeFormula> meets;
    for (const auto& l : c) meets.push_back(LatticeFormula::prim(l));
    joins.push_back(meet_all(std::move(meets)));
  }
  return join_all(std::move(joins));
}

bool leq(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order) {
  const NormalForm lower = normal_form(g, order);
  const NormalForm upper = normal_form(d, order);
  return std::all_of(lower.clauses.begin(), lower.clauses.end(), [&](const Clause& m) {
    return std::any_of(upper.clauses.begin(), upper.clauses.end(),
                       [&](const Clause& n) { return clause_leq(m, n, order); });
  });
}

bool equivalent(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order) {
  return leq(g, d, order) && leq(d, g, order);
}

bool leq_oracle(const LatticeFormula& g, const LatticeFormula& d, const TypeOrder& order) {
  std::vector<Literal> lits = literals(g);
  for (auto& l : literals(d)) lits.push_back(std::move(l));
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  if (lits.size() > kOracleLiteralCap)
    throw CapExceededError("leq_oracle: " + std::to_string(lits.size()) + " literals exceed the cap of " +
                           std::to_string(kOracleLiteralCap));

  std::vector<std::pair<std::size_t, std::size_t>> constraints;
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = 0; j < lits.size(); ++j)
      if (i != j && literal_below(lits[i], lits[j], order)) constraints.emplace_back(i, j);

  const std::size_t count = std::size_t{1} << lits.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    auto on = [&](std::size_t i) { return (mask >> i & 1U) != 0; };
    bool monotone = std::all_of(constraints.begin(), constraints.end(),
                                [&](const auto& c) { return !on(c.first) || on(c.second); });
    if (!monotone) continue;
    auto valuation = [&](const Literal& l) {
      auto it = std::lower_bound(lits.begin(), lits.end(), l);
      return on(static_cast<std::size_t>(it - lits.begin()));
    };
    if (evaluate(g, valuation) && !evaluate(d, valuation)) return false;
  }
  return true;
}

std::string to_string(const Literal& l) { return l.type + "@" + l.index; }

namespace {

void render(const LatticeFormula& f, std::string& out, bool inside_and) {
  using K = LatticeFormula::Kind;
  switch (f.kind) {
    case K::Prim: out += to_string(f.literal); return;
    case K::Top: out += "top"; return;
    case K::Bottom: out += "bot"; return;
    case K::And:
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += " /\\ ";
        render(f.args[i], out, true);
      }
      return;
    case K::Or:
      if (inside_and) out += '(';
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) out += " \\/ ";
        render(f.args[i], out, false);
      }
      if (inside_and) out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const LatticeFormula& f) {
  std::string out;
  render(f, out, false);
  return out;
}

}  // namespace atchan
