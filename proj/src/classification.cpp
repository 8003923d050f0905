#include "atchan/classification.hpp"

#include <algorithm>

#include "atchan/errors.hpp"

namespace atchan {

Classification::Classification(std::string id, std::vector<std::string> tokens, std::vector<std::string> types)
    : id_(std::move(id)), tokens_(std::move(tokens)), types_(std::move(types)) {
  if (std::find(tokens_.begin(), tokens_.end(), kEpsilon) == tokens_.end()) tokens_.emplace_back(kEpsilon);
}

void Classification::add_holds(std::string token, std::string type) {
  if (!has_token(token)) throw SchemaError("classification " + id_ + ": unknown token '" + token + "'");
  if (!has_type(type)) throw SchemaError("classification " + id_ + ": unknown type '" + type + "'");
  if (token == kEpsilon) throw SchemaError("classification " + id_ + ": the un-connected token satisfies no type");
  holds_.emplace(std::move(token), std::move(type));
}

void Classification::add_order(std::string lower, std::string upper) {
  if (!has_type(lower)) throw SchemaError("classification " + id_ + ": unknown type '" + lower + "'");
  if (!has_type(upper)) throw SchemaError("classification " + id_ + ": unknown type '" + upper + "'");
  order_.add(std::move(lower), std::move(upper));
}

std::vector<std::pair<std::string, std::string>> Classification::close() {
  order_.close();
  std::vector<std::pair<std::string, std::string>> added;
  std::vector<std::pair<std::string, std::string>> fresh;
  for (const auto& [tok, typ] : holds_)
    for (const auto& [lo, hi] : order_.pairs())
      if (lo == typ && !holds_.count({tok, hi})) fresh.emplace_back(tok, hi);
  for (auto& p : fresh)
    if (holds_.insert(p).second) added.push_back(p);
  return added;
}

bool Classification::has_token(std::string_view t) const {
  return std::find(tokens_.begin(), tokens_.end(), t) != tokens_.end();
}

bool Classification::has_type(std::string_view t) const {
  return std::find(types_.begin(), types_.end(), t) != types_.end();
}

bool Classification::holds(std::string_view token, std::string_view type) const {
  return holds_.count({std::string(token), std::string(type)}) > 0;
}

std::string tag(std::string_view name, std::size_t k) {
  return std::string(name) + "^(" + std::to_string(k) + ")";
}

std::optional<std::pair<std::size_t, std::string>> untag(std::string_view name) {
  if (name.size() < 5 || name.back() != ')') return std::nullopt;
  auto open = name.rfind("^(");
  if (open == std::string_view::npos || open == 0) return std::nullopt;
  auto digits = name.substr(open + 2, name.size() - open - 3);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::nullopt;
  return std::pair{static_cast<std::size_t>(std::stoul(std::string(digits))), std::string(name.substr(0, open))};
}

Classification sum_classification(const std::vector<const Classification*>& parts, std::string id) {
  if (id.empty()) {
    for (std::size_t k = 0; k < parts.size(); ++k) id += (k ? "+" : "") + parts[k]->id();
  }
  Classification out;
  out.id_ = std::move(id);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Classification& c = *parts[k];
    const std::size_t t = k + 1;
    for (const auto& tok : c.tokens()) out.tokens_.push_back(tag(tok, t));
    for (const auto& typ : c.types()) out.types_.push_back(tag(typ, t));
    for (const auto& [tok, typ] : c.holds_pairs()) out.holds_.emplace(tag(tok, t), tag(typ, t));
    for (const auto& [lo, hi] : c.order().pairs()) out.order_.add(tag(lo, t), tag(hi, t));
    out.components_.push_back(c.id());
  }
  out.tokens_.emplace_back(kEpsilon);
  return out;
}

Classification sum_classification(const Classification& c1, const Classification& c2) {
  return sum_classification(std::vector<const Classification*>{&c1, &c2});
}

std::string tuple_name(const std::vector<std::string>& parts) {
  std::string out = "<";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + ">";
}

namespace {

void cartesian(const std::vector<const std::vector<std::string>*>& axes,
               std::vector<std::vector<std::string>>& out) {
  out = {{}};
  for (const auto* axis : axes) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : out) {
      for (const auto& x : *axis) {
        auto row = prefix;
        row.push_back(x);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
}

}  // namespace

Classification product_classification(const std::vector<const Classification*>& parts, std::string id) {
  if (id.empty()) {
    id = "(";
    for (std::size_t k = 0; k < parts.size(); ++k) id += (k ? "," : "") + parts[k]->id();
    id += ")";
  }
  std::vector<const std::vector<std::string>*> tok_axes, typ_axes;
  for (const auto* c : parts) {
    tok_axes.push_back(&c->tokens());
    typ_axes.push_back(&c->types());
  }
  std::vector<std::vector<std::string>> toks, typs;
  cartesian(tok_axes, toks);
  cartesian(typ_axes, typs);

  Classification out;
  out.id_ = std::move(id);
  for (const auto& t : toks) out.tokens_.push_back(tuple_name(t));
  for (const auto& t : typs) out.types_.push_back(tuple_name(t));
  for (const auto& a : toks) {
    for (const auto& g : typs) {
      bool all = true;
      for (std::size_t k = 0; k < parts.size() && all; ++k) all = parts[k]->holds(a[k], g[k]);
      if (all) out.holds_.emplace(tuple_name(a), tuple_name(g));
    }
  }
  // Componentwise order: g <= h iff every component is below.
  for (const auto& g : typs) {
    for (const auto& h : typs) {
      bool all = g != h;
      for (std::size_t k = 0; k < parts.size() && all; ++k) all = parts[k]->order().below(g[k], h[k]);
      if (all) out.order_.add(tuple_name(g), tuple_name(h));
    }
  }
  return out;
}

TokenFamily TokenFamily::self_indexed(const std::vector<std::string>& tokens) {
  TokenFamily f;
  for (const auto& t : tokens) f.members.emplace(t, t);
  return f;
}

std::string to_string(const TokenFamily& f) {
  std::string out = "{";
  bool first = true;
  for (const auto& [idx, tok] : f.members) {
    if (!first) out += ", ";
    first = false;
    out += idx + " -> " + tok;
  }
  return out + "}";
}

std::string to_string(const FamilyTuple& t) {
  std::string out = "<";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + to_string(t[i]);
  return out + ">";
}

std::set<std::string> token_set(const TokenFamily& f) {
  std::set<std::string> out;
  for (const auto& [idx, tok] : f.members) out.insert(tok);
  return out;
}

void check_schema(const Classification& c, const TokenFamily& family, const LatticeFormula& formula) {
  for (const auto& [idx, tok] : family.members)
    if (!c.has_token(tok)) throw SchemaError("token '" + tok + "' is not declared in " + c.id());
  for (const auto& l : literals(formula))
    if (!c.has_type(l.type)) throw SchemaError("type '" + l.type + "' is not declared in " + c.id());
}

bool fd_holds(const Classification& c, const TokenFamily& family, const LatticeFormula& formula) {
  check_schema(c, family, formula);
  return evaluate(formula, [&](const Literal& l) {
    auto it = family.members.find(l.index);
    return it != family.members.end() && c.holds(it->second, l.type);
  });
}

bool tuple_holds(const std::vector<const Classification*>& cs, const FamilyTuple& tokens, const FormulaTuple& types) {
  if (cs.size() != tokens.size() || cs.size() != types.size())
    throw SchemaError("tuple arity mismatch");
  for (std::size_t k = 0; k < cs.size(); ++k)
    if (!fd_holds(*cs[k], tokens[k], types[k])) return false;
  return true;
}

TokenFamily reduce_family(const TokenFamily& family) {
  TokenFamily out;
  std::set<std::string> seen;
  for (const auto& [idx, tok] : family.members) {  // ascending index order
    if (tok == kEpsilon) continue;
    if (!seen.insert(tok).second) continue;
    out.members.emplace(idx, tok);
  }
  return out;
}

TokenFamily reduce_family(const TokenFamily& family, const LatticeFormula& formula) {
  std::set<std::string> used;
  for (const auto& l : literals(formula)) used.insert(l.index);
  TokenFamily out;
  for (const auto& [idx, tok] : family.members)
    if (tok != kEpsilon && used.count(idx)) out.members.emplace(idx, tok);
  return out;
}

}  // namespace atchan
