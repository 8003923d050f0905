#include <sstream>

#include "atchan/dsl.hpp"

namespace atchan::dsl {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join_names(const std::vector<Name>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i].text;
  return out;
}

std::string print_family(const FamilyAst& f) {
  std::string out = "{";
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += i ? ", " : "";
    out += f[i].index.text;
    if (f[i].token.text != f[i].index.text) out += " -> " + f[i].token.text;
  }
  return out + "}";
}

std::string print_slot(const SlotAst& s) { return s.top ? "top" : s.type.text + "@" + s.index.text; }

void print_node(const NodeDecl& n, int depth, std::ostringstream& os) {
  const std::string pad(2 * depth, ' ');
  if (n.leaf) {
    os << pad << "leaf " << n.id.text << " " << quoted(n.action) << ";\n";
    return;
  }
  os << pad << "node " << n.id.text << " " << quoted(n.action) << " " << to_string(n.op) << " {\n";
  for (const auto& c : n.children) print_node(c, depth + 1, os);
  os << pad << "}\n";
}

std::string prefix(const std::optional<Name>& child) { return child ? child->text + ": " : ""; }

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string print_formula(const FormulaAst& f) {
  using K = LatticeFormula::Kind;
  switch (f.kind) {
    case K::Top: return "top";
    case K::Bottom: return "bot";
    case K::Prim: return f.type.text + "@" + f.index.text;
    case K::And:
    case K::Or: {
      // Parenthesize nested compounds that would otherwise merge on reparse.
      std::string out;
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        const auto& a = f.args[i];
        const bool paren = a.kind == K::Or || (f.kind == K::And && a.kind == K::And);
        out += i ? (f.kind == K::And ? " /\\ " : " \\/ ") : "";
        out += paren ? "(" + print_formula(a) + ")" : print_formula(a);
      }
      return out;
    }
  }
  return {};
}

std::string print_model(const ModelFile& m) {
  std::ostringstream os;
  const char* sep = "";
  for (const auto& c : m.classifications) {
    os << sep << "classification " << c.id.text << " {\n";
    os << "  tokens: " << join_names(c.tokens) << ";\n";
    os << "  types: " << join_names(c.types) << ";\n";
    if (!c.holds.empty()) {
      os << "  holds:";
      for (const auto& [tok, typ] : c.holds) os << " " << tok.text << " |= " << typ.text << ";";
      os << "\n";
    }
    for (const auto& [lo, hi] : c.order) os << "  order: " << lo.text << " => " << hi.text << ";\n";
    os << "}\n";
    sep = "\n";
  }
  for (const auto& t : m.trees) {
    os << sep << "tree " << t.id.text << " {\n";
    print_node(t.root, 1, os);
    os << "}\n";
    sep = "\n";
  }
  if (!m.effects.empty()) os << sep;
  for (const auto& e : m.effects)
    os << "effect " << e.node.text << ": " << print_family(e.family) << " |= " << print_formula(e.formula) << " in "
       << e.classification.text << ";\n";
  if (!m.effects.empty()) sep = "\n";
  for (const auto& w : m.witnesses) {
    os << sep << "witness " << w.node.text << " {\n";
    if (w.identity) os << "  identity;\n";
    if (!w.typemap.empty()) {
      os << "  typemap:\n";
      for (const auto& t : w.typemap) {
        os << "    " << prefix(t.child);
        if (t.is_default) {
          os << "else";
        } else if (t.bracketed) {
          os << "<";
          for (std::size_t i = 0; i < t.generator.size(); ++i) os << (i ? ", " : "") << print_slot(t.generator[i]);
          os << ">";
        } else {
          os << print_slot(t.generator.front());
        }
        os << " -> " << print_formula(t.image) << ";\n";
      }
    }
    if (!w.tokmap.empty()) {
      os << "  tokmap:\n";
      for (const auto& t : w.tokmap) {
        os << "    " << prefix(t.child) << t.token.text << " -> ";
        if (t.bracketed) {
          os << "<";
          for (std::size_t i = 0; i < t.image.size(); ++i) os << (i ? ", " : "") << print_family(t.image[i]);
          os << ">";
        } else {
          os << print_family(t.image.front());
        }
        os << ";\n";
      }
    }
    for (const auto& p : w.pre) os << "  pre " << p.child.text << ": " << print_formula(p.formula) << ";\n";
    if (w.search) {
      os << "  search {\n";
      for (const auto& r : *w.search)
        os << "    " << (r.types ? "types " : "tokens ") << r.from.text << " -> " << join_names(r.to) << ";\n";
      os << "  }\n";
    }
    os << "}\n";
    sep = "\n";
  }
  if (!m.residuals.empty()) os << sep;
  for (const auto& r : m.residuals) os << "residual " << r.node.text << ": " << print_formula(r.formula) << ";\n";
  if (!m.residuals.empty()) sep = "\n";
  for (const auto& a : m.attributes) {
    os << sep << "attribute " << a.name.text << " {\n";
    for (const auto& [leaf_id, value] : a.values) os << "  " << leaf_id.text << ": " << value.text << ";\n";
    os << "}\n";
    sep = "\n";
  }
  return os.str();
}

std::string export_dot(const LabeledDigraph& g) {
  std::ostringstream os;
  os << "digraph G { ";
  for (std::size_t v = 0; v < g.size(); ++v) os << "v" << v << " [label=\"" << dot_escape(g.labels[v]) << "\"]; ";
  for (auto [u, v] : g.edges) os << "v" << u << " -> v" << v << "; ";
  os << "}";
  return os.str();
}

std::string export_dot(const AttackTree& t, const EffectMap& effects) {
  const auto all = nodes(t);
  std::map<const AttackTree*, std::size_t> number;
  for (std::size_t i = 0; i < all.size(); ++i) number[all[i]] = i;
  std::ostringstream os;
  os << "digraph G {\n";
  for (std::size_t i = 0; i < all.size(); ++i) {
    const AttackTree& n = *all[i];
    std::string label = n.id;
    if (!n.is_leaf()) label += " [" + std::string(to_string(n.op)) + "]";
    if (n.action != n.id) label += "\\n" + dot_escape(n.action);
    os << "  v" << i << " [label=\"" << label << "\" shape=box];\n";
  }
  for (const auto* n : all)
    for (const auto& c : n->children) os << "  v" << number[n] << " -> v" << number[&c] << ";\n";
  std::size_t k = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto it = effects.find(all[i]->id);
    if (it == effects.end()) continue;
    const Effect& e = it->second;
    os << "  e" << k << " [label=\"" << dot_escape(to_string(e.family) + " |= " + to_string(e.formula))
       << "\" shape=ellipse color=blue];\n";
    os << "  v" << i << " -> e" << k << " [color=blue arrowhead=none];\n";
    ++k;
  }
  os << "}\n";
  return os.str();
}

}  // namespace atchan::dsl
