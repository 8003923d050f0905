#include <algorithm>
#include <functional>
#include <set>

#include "atchan/dsl.hpp"
#include "atchan/errors.hpp"

namespace atchan::dsl {

const Classification* Model::classification(std::string_view id) const {
  for (const auto& c : classes)
    if (c.id() == id) return &c;
  return nullptr;
}

namespace {

bool is_unsigned(const std::string& s) {
  return !s.empty() && s.size() <= 18 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

class Resolver {
 public:
  Resolver(const ModelFile& f, std::vector<Diagnostic>& diags) : f_(f), diags_(diags), m_(std::make_unique<Model>()) {}

  std::unique_ptr<Model> run() {
    classifications();
    if (!tree()) return nullptr;
    effects();
    witnesses();
    residuals();
    attributes();
    if (errors_) return nullptr;
    return std::move(m_);
  }

 private:
  void error(const Span& s, const char* code, std::string msg) {
    diags_.push_back({Severity::Error, s, code, std::move(msg)});
    errors_ = true;
  }
  void warning(const Span& s, const char* code, std::string msg) {
    diags_.push_back({Severity::Warning, s, code, std::move(msg)});
  }

  // Classifications ---------------------------------------------------------

  void classifications() {
    for (const auto& d : f_.classifications) {
      if (m_->classification(d.id.text)) {
        error(d.id.span, "E013", "duplicate classification '" + d.id.text + "'");
        continue;
      }
      bool ok = true;
      auto unique = [&](const std::vector<Name>& names, const char* what) {
        std::set<std::string> seen;
        std::vector<std::string> out;
        for (const auto& n : names) {
          if (n.text == kEpsilon) {
            error(n.span, "E013", "'eps' is reserved");
            ok = false;
          } else if (!seen.insert(n.text).second) {
            error(n.span, "E013", std::string("duplicate ") + what + " '" + n.text + "'");
            ok = false;
          } else {
            out.push_back(n.text);
          }
        }
        return out;
      };
      Classification c(d.id.text, unique(d.tokens, "token"), unique(d.types, "type"));
      for (const auto& [tok, typ] : d.holds) {
        bool known = true;
        if (!c.has_token(tok.text) || tok.text == kEpsilon) {
          error(tok.span, "E020", "unknown token '" + tok.text + "' in " + d.id.text);
          known = false;
        }
        if (!c.has_type(typ.text)) {
          error(typ.span, "E020", "unknown type '" + typ.text + "' in " + d.id.text);
          known = false;
        }
        if (known) c.add_holds(tok.text, typ.text);
      }
      for (const auto& [lo, hi] : d.order) {
        bool known = true;
        for (const Name* n : {&lo, &hi})
          if (!c.has_type(n->text)) {
            error(n->span, "E020", "unknown type '" + n->text + "' in " + d.id.text);
            known = false;
          }
        if (known) c.add_order(lo.text, hi.text);
      }
      if (!ok) continue;
      for (const auto& [tok, typ] : c.close())
        warning(d.id.span, "W002", "closure under the type order adds " + tok + " |= " + typ + " in " + d.id.text);
      m_->classes.push_back(std::move(c));
    }
  }

  // Tree ---------------------------------------------------------------------

  AttackTree build(const NodeDecl& n) {
    if (!ids_.insert(n.id.text).second) error(n.id.span, "E012", "duplicate node id '" + n.id.text + "'");
    node_spans_[n.id.text] = n.id.span;
    if (n.leaf) return leaf(n.id.text, n.action);
    std::vector<AttackTree> kids;
    for (const auto& c : n.children) kids.push_back(build(c));
    return node(n.id.text, n.op, std::move(kids), n.action);
  }

  bool tree() {
    if (f_.trees.empty()) {
      error(Span{0, 1, 1, 0}, "E010", "no tree block");
      return false;
    }
    for (std::size_t i = 1; i < f_.trees.size(); ++i)
      error(f_.trees[i].id.span, "E011", "more than one tree block");
    m_->tree_name = f_.trees.front().id.text;
    m_->tree = build(f_.trees.front().root);
    return true;
  }

  const AttackTree* find(const Name& n) {
    const AttackTree* t = find_node(m_->tree, n.text);
    if (!t) error(n.span, "E020", "unknown node '" + n.text + "'");
    return t;
  }

  // Formulas -------------------------------------------------------------------

  // Checks types against `c` and, when given, indices against `indices`.
  std::optional<LatticeFormula> formula(const FormulaAst& f, const Classification& c,
                                        const std::set<std::string>* indices) {
    bool ok = true;
    std::function<LatticeFormula(const FormulaAst&)> go = [&](const FormulaAst& g) -> LatticeFormula {
      switch (g.kind) {
        case LatticeFormula::Kind::Top: return LatticeFormula::top();
        case LatticeFormula::Kind::Bottom: return LatticeFormula::bottom();
        case LatticeFormula::Kind::Prim:
          if (!c.has_type(g.type.text)) {
            error(g.type.span, "E020", "unknown type '" + g.type.text + "' in " + c.id());
            ok = false;
          }
          if (indices && !indices->count(g.index.text)) {
            error(g.index.span, "E020", "unknown index '" + g.index.text + "'");
            ok = false;
          }
          return LatticeFormula::prim(g.type.text, g.index.text);
        case LatticeFormula::Kind::And:
        case LatticeFormula::Kind::Or: {
          LatticeFormula out;
          out.kind = g.kind;
          for (const auto& a : g.args) out.args.push_back(go(a));
          return out;
        }
      }
      return LatticeFormula::top();
    };
    LatticeFormula out = go(f);
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<TokenFamily> family(const FamilyAst& fam, const Classification& c) {
    TokenFamily out;
    bool ok = true;
    for (const auto& e : fam) {
      if (!c.has_token(e.token.text)) {
        error(e.token.span, "E020", "unknown token '" + e.token.text + "' in " + c.id());
        ok = false;
      }
      if (!out.members.emplace(e.index.text, e.token.text).second) {
        error(e.index.span, "E013", "duplicate index '" + e.index.text + "'");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  const Classification* classification(const Name& n) {
    const Classification* c = m_->classification(n.text);
    if (!c) error(n.span, "E020", "unknown classification '" + n.text + "'");
    return c;
  }

  // Effects --------------------------------------------------------------------

  void effects() {
    for (const auto& d : f_.effects) {
      if (!find(d.node)) continue;
      if (m_->effects.count(d.node.text)) {
        error(d.node.span, "E014", "duplicate effect for '" + d.node.text + "'");
        continue;
      }
      const Classification* c = classification(d.classification);
      if (!c) continue;
      auto fam = family(d.family, *c);
      std::set<std::string> indices;
      for (const auto& e : d.family) indices.insert(e.index.text);
      auto g = formula(d.formula, *c, &indices);
      if (!fam || !g) continue;
      if (!fd_holds(*c, *fam, *g)) {
        error(d.node.span, "E030",
              "effect does not hold: " + to_string(*fam) + " |= " + to_string(*g) + " in " + c->id());
        continue;
      }
      m_->effects.emplace(d.node.text, Effect{d.node.text, c, std::move(*fam), std::move(*g)});
    }
    for (const auto* n : nodes(m_->tree))
      if (!m_->effects.count(n->id)) warning(node_spans_[n->id], "W001", "node '" + n->id + "' has no effect");
  }

  // Witnesses ------------------------------------------------------------------

  const Effect* effect_of(const std::string& id) {
    auto it = m_->effects.find(id);
    return it == m_->effects.end() ? nullptr : &it->second;
  }

  std::vector<std::string> parent_tokens(const Classification& c) {
    std::vector<std::string> out;
    for (const auto& t : c.tokens())
      if (t != kEpsilon) out.push_back(t);
    return out;
  }

  std::vector<Literal> all_literals(const Effect& e) {
    std::vector<Literal> out;
    for (const auto& [idx, tok] : e.family.members)
      for (const auto& t : e.cls->types()) out.push_back({t, idx});
    return out;
  }

  std::optional<Generator> generator(const TypeMapping& m, const std::vector<const Classification*>& sources) {
    if (m.generator.size() != sources.size()) {
      const Span s = m.generator.empty() ? Span{} : m.generator.front().type.span;
      error(s, "E040",
            "generator has " + std::to_string(m.generator.size()) + " slots, expected " +
                std::to_string(sources.size()));
      return std::nullopt;
    }
    Generator g;
    bool ok = true;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const SlotAst& s = m.generator[k];
      if (s.top) {
        g.push_back(std::nullopt);
        continue;
      }
      if (!sources[k]->has_type(s.type.text)) {
        error(s.type.span, "E020", "unknown type '" + s.type.text + "' in " + sources[k]->id());
        ok = false;
      }
      g.push_back(Literal{s.type.text, s.index.text});
    }
    if (!ok) return std::nullopt;
    return g;
  }

  void add_type_mapping(TupleInfomorphism& f, const TypeMapping& m) {
    auto image = formula(m.image, *f.target, nullptr);
    if (!image) return;
    if (m.is_default) {
      f.default_type = std::move(*image);
      return;
    }
    if (auto g = generator(m, f.sources)) f.type_map[*g] = std::move(*image);
  }

  void add_token_mapping(TupleInfomorphism& f, const TokenMapping& m) {
    if (!f.target->has_token(m.token.text)) {
      error(m.token.span, "E020", "unknown token '" + m.token.text + "' in " + f.target->id());
      return;
    }
    if (m.image.size() != f.sources.size()) {
      error(m.token.span, "E040",
            "token image has " + std::to_string(m.image.size()) + " families, expected " +
                std::to_string(f.sources.size()));
      return;
    }
    FamilyTuple tuple;
    for (std::size_t k = 0; k < f.sources.size(); ++k) {
      auto fam = family(m.image[k], *f.sources[k]);
      if (!fam) return;
      tuple.push_back(std::move(*fam));
    }
    f.token_map[m.token.text] = std::move(tuple);
  }

  bool is_child(const AttackTree& n, const std::string& id) {
    return std::any_of(n.children.begin(), n.children.end(), [&](const AttackTree& c) { return c.id == id; });
  }

  void witnesses() {
    for (const auto& d : f_.witnesses) {
      const AttackTree* n = find(d.node);
      if (!n) continue;
      if (n->is_leaf()) {
        error(d.node.span, "E040", "witness on leaf '" + d.node.text + "'");
        continue;
      }
      if (m_->witnesses.count(n->id)) {
        error(d.node.span, "E014", "duplicate witness for '" + d.node.text + "'");
        continue;
      }
      ConsistencyWitness w;
      const bool explicit_maps = !d.typemap.empty() || !d.tokmap.empty();
      if (d.identity && explicit_maps) {
        error(d.node.span, "E040", "identity cannot be combined with typemap or tokmap");
        continue;
      }
      if (d.identity || explicit_maps) {
        const Effect* parent = effect_of(n->id);
        std::vector<const Effect*> kids;
        for (const auto& c : n->children) kids.push_back(effect_of(c.id));
        if (!parent || std::find(kids.begin(), kids.end(), nullptr) != kids.end()) {
          error(d.node.span, "E041", "witness for '" + n->id + "' needs effects on the node and its children");
          continue;
        }
        if (n->op == Op::Or)
          or_witness(d, *n, *parent, kids, w);
        else
          tuple_witness(d, *n, *parent, kids, w);
      }
      for (const auto& p : d.pre) {
        if (n->op != Op::Sand || !is_child(*n, p.child.text)) {
          error(p.child.span, "E040", "preconditions name a child of a SAND branch");
          continue;
        }
        const Effect* e = effect_of(p.child.text);
        if (!e) {
          error(p.child.span, "E041", "precondition on '" + p.child.text + "' needs its effect");
          continue;
        }
        if (auto g = formula(p.formula, *e->cls, nullptr)) w.preconditions[p.child.text] = std::move(*g);
      }
      if (d.search) {
        SearchConstraints sc;
        for (const auto& r : *d.search) {
          auto& slot = r.types ? sc.types[r.from.text] : sc.tokens[r.from.text];
          for (const auto& t : r.to) slot.push_back(t.text);
        }
        w.search = std::move(sc);
      }
      m_->witnesses.emplace(n->id, std::move(w));
    }
  }

  void or_witness(const WitnessDecl& d, const AttackTree& n, const Effect& parent,
                  const std::vector<const Effect*>& kids, ConsistencyWitness& w) {
    for (const auto& m : d.typemap)
      if (m.child && !is_child(n, m.child->text)) error(m.child->span, "E040", "'" + m.child->text + "' is not a child of " + n.id);
    for (const auto& m : d.tokmap)
      if (m.child && !is_child(n, m.child->text)) error(m.child->span, "E040", "'" + m.child->text + "' is not a child of " + n.id);
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      const std::string& cid = n.children[i].id;
      if (d.identity) {
        try {
          w.per_child.emplace(cid, identity_witness({kids[i]->cls}, parent.cls, {all_literals(*kids[i])},
                                                    parent_tokens(*parent.cls)));
        } catch (const Error& e) {
          error(d.node.span, "E040", e.what());
        }
        continue;
      }
      TupleInfomorphism f;
      f.sources = {kids[i]->cls};
      f.target = parent.cls;
      bool any = false;
      for (const auto& m : d.typemap)
        if (!m.child || m.child->text == cid) {
          add_type_mapping(f, m);
          any = true;
        }
      for (const auto& m : d.tokmap)
        if (!m.child || m.child->text == cid) {
          add_token_mapping(f, m);
          any = true;
        }
      if (any) w.per_child.emplace(cid, std::move(f));
    }
  }

  void tuple_witness(const WitnessDecl& d, const AttackTree& n, const Effect& parent,
                     const std::vector<const Effect*>& kids, ConsistencyWitness& w) {
    std::vector<Effect> seq;
    for (const auto* k : kids) seq.push_back(*k);
    if (n.op == Op::Sand) seq = cut_sequence(seq);
    std::vector<const Classification*> sources;
    for (const auto& e : seq) sources.push_back(e.cls);
    if (d.identity) {
      std::vector<std::vector<Literal>> lits;
      for (const auto& e : seq) lits.push_back(all_literals(e));
      try {
        w.tuple = identity_witness(sources, parent.cls, lits, parent_tokens(*parent.cls));
      } catch (const Error& e) {
        error(d.node.span, "E040", e.what());
      }
      return;
    }
    TupleInfomorphism f;
    f.sources = sources;
    f.target = parent.cls;
    for (const auto& m : d.typemap) {
      if (m.child) {
        error(m.child->span, "E040", "child prefixes are only used in OR witnesses");
        continue;
      }
      add_type_mapping(f, m);
    }
    for (const auto& m : d.tokmap) {
      if (m.child) {
        error(m.child->span, "E040", "child prefixes are only used in OR witnesses");
        continue;
      }
      add_token_mapping(f, m);
    }
    w.tuple = std::move(f);
  }

  // Residuals and attributes -------------------------------------------------------

  void residuals() {
    for (const auto& d : f_.residuals) {
      if (!find(d.node)) continue;
      const Effect* e = effect_of(d.node.text);
      if (!e) {
        error(d.node.span, "E041", "residual for '" + d.node.text + "' needs its effect");
        continue;
      }
      if (m_->residuals.count(d.node.text)) {
        error(d.node.span, "E014", "duplicate residual for '" + d.node.text + "'");
        continue;
      }
      std::set<std::string> indices;
      for (const auto& [idx, tok] : e->family.members) indices.insert(idx);
      if (auto g = formula(d.formula, *e->cls, &indices)) m_->residuals.emplace(d.node.text, std::move(*g));
    }
  }

  void attributes() {
    for (const auto& d : f_.attributes) {
      const bool experts = d.name.text == "min_experts";
      if (!experts && d.name.text != "possibility") {
        error(d.name.span, "E020", "unknown attribute '" + d.name.text + "'");
        continue;
      }
      if (m_->attributes.count(d.name.text)) {
        error(d.name.span, "E014", "duplicate attribute block '" + d.name.text + "'");
        continue;
      }
      auto& values = m_->attributes[d.name.text];
      for (const auto& [leaf_id, value] : d.values) {
        const AttackTree* n = find(leaf_id);
        if (!n) continue;
        if (!n->is_leaf()) {
          error(leaf_id.span, "E020", "'" + leaf_id.text + "' is not a leaf");
          continue;
        }
        const bool valid = experts ? is_unsigned(value.text) : value.text == "true" || value.text == "false";
        if (!valid) {
          error(value.span, "E021",
                std::string("invalid value '") + value.text + "', expected " +
                    (experts ? "a natural number" : "true or false"));
          continue;
        }
        if (!values.emplace(leaf_id.text, value.text).second)
          error(leaf_id.span, "E014", "duplicate value for '" + leaf_id.text + "'");
      }
    }
  }

  const ModelFile& f_;
  std::vector<Diagnostic>& diags_;
  std::unique_ptr<Model> m_;
  bool errors_ = false;
  std::set<std::string> ids_;
  std::map<std::string, Span> node_spans_;
};

}  // namespace

std::unique_ptr<Model> resolve(const ModelFile& file, std::vector<Diagnostic>& diags) {
  return Resolver(file, diags).run();
}

}  // namespace atchan::dsl
