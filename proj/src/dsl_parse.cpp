#include <cctype>

#include "atchan/dsl.hpp"

namespace atchan::dsl {

namespace {

enum class TokKind { Ident, String, Punct, End };

struct Tok {
  TokKind kind;
  std::string text;  // string contents without quotes for String
  Span span;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Tok> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Tok> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* const kPuncts[] = {"->", "=>", "|=", "\\/", "/\\", "{", "}", ";", ":", ",", "(", ")", "<", ">", "@"};
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const Span start{i, line, col, 0};
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      Tok t{TokKind::Ident, std::string(src.substr(i, j - i)), start};
      t.span.length = j - i;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::string text;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < src.size() && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size() && (src[j + 1] == '"' || src[j + 1] == '\\')) {
          text += src[j + 1];
          j += 2;
          continue;
        }
        if (src[j] == '"') {
          closed = true;
          ++j;
          break;
        }
        text += src[j++];
      }
      Tok t{TokKind::String, std::move(text), start};
      t.span.length = j - i;
      if (!closed) diags.push_back({Severity::Error, t.span, "E002", "unterminated string"});
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      const std::string_view pv(p);
      if (src.substr(i, pv.size()) == pv) {
        Tok t{TokKind::Punct, std::string(pv), start};
        t.span.length = pv.size();
        advance(pv.size());
        out.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched) {
      Span s = start;
      s.length = 1;
      diags.push_back({Severity::Error, s, "E002", std::string("unexpected character '") + c + "'"});
      advance(1);
    }
  }
  out.push_back({TokKind::End, "", Span{src.size(), line, col, 0}});
  return out;
}

bool is_block_keyword(const std::string& s) {
  return s == "classification" || s == "tree" || s == "effect" || s == "witness" || s == "residual" ||
         s == "attribute";
}

struct SyntaxError {};

class Parser {
 public:
  Parser(std::vector<Tok> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  ModelFile parse() {
    ModelFile m;
    while (peek().kind != TokKind::End) {
      try {
        block(m);
      } catch (const SyntaxError&) {
        recover();
      }
    }
    return m;
  }

 private:
  const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_punct(std::string_view p, std::size_t k = 0) const {
    return peek(k).kind == TokKind::Punct && peek(k).text == p;
  }
  bool at_word(std::string_view w, std::size_t k = 0) const {
    return peek(k).kind == TokKind::Ident && peek(k).text == w;
  }
  const Tok& take() {
    const Tok& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& expected) {
    const Tok& t = peek();
    const std::string found = t.kind == TokKind::End      ? "end of input"
                              : t.kind == TokKind::String ? "string"
                                                          : "'" + t.text + "'";
    diags_.push_back({Severity::Error, t.span, "E001", "expected " + expected + ", found " + found});
    throw SyntaxError{};
  }

  void expect(std::string_view p) {
    if (!at_punct(p)) fail("'" + std::string(p) + "'");
    take();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail("'" + std::string(w) + "'");
    take();
  }
  Name ident(const std::string& what) {
    if (peek().kind != TokKind::Ident) fail(what);
    const Tok& t = take();
    return {t.text, t.span};
  }

  // Skips to the next block keyword that starts a statement.
  void recover() {
    take();
    while (peek().kind != TokKind::End) {
      const Tok& prev = toks_[pos_ - 1];
      const bool boundary = prev.kind == TokKind::Punct && (prev.text == "}" || prev.text == ";");
      if (boundary && peek().kind == TokKind::Ident && is_block_keyword(peek().text)) return;
      take();
    }
  }

  void block(ModelFile& m) {
    if (at_word("classification")) return m.classifications.push_back(classification());
    if (at_word("tree")) return m.trees.push_back(tree());
    if (at_word("effect")) return m.effects.push_back(effect());
    if (at_word("witness")) return m.witnesses.push_back(witness());
    if (at_word("residual")) return m.residuals.push_back(residual());
    if (at_word("attribute")) return m.attributes.push_back(attribute());
    fail("a block (classification, tree, effect, witness, residual or attribute)");
  }

  std::vector<Name> idlist(const std::string& what) {
    std::vector<Name> out{ident(what)};
    while (at_punct(",")) {
      take();
      out.push_back(ident(what));
    }
    return out;
  }

  ClassificationDecl classification() {
    take();
    ClassificationDecl c;
    c.id = ident("classification name");
    expect("{");
    expect_word("tokens");
    expect(":");
    c.tokens = idlist("token");
    expect(";");
    expect_word("types");
    expect(":");
    c.types = idlist("type");
    expect(";");
    if (at_word("holds")) {
      take();
      expect(":");
      do {
        Name tok = ident("token");
        expect("|=");
        Name typ = ident("type");
        expect(";");
        c.holds.emplace_back(std::move(tok), std::move(typ));
      } while (peek().kind == TokKind::Ident && at_punct("|=", 1));
    }
    while (at_word("order")) {
      take();
      expect(":");
      Name lo = ident("type");
      expect("=>");
      Name hi = ident("type");
      expect(";");
      c.order.emplace_back(std::move(lo), std::move(hi));
    }
    expect("}");
    return c;
  }

  TreeDecl tree() {
    take();
    TreeDecl t;
    t.id = ident("tree name");
    expect("{");
    t.root = node_decl();
    expect("}");
    return t;
  }

  NodeDecl node_decl() {
    NodeDecl n;
    if (at_word("leaf")) {
      take();
      n.id = ident("node id");
      n.action = peek().kind == TokKind::String ? take().text : n.id.text;
      expect(";");
      return n;
    }
    if (!at_word("node")) fail("'leaf' or 'node'");
    take();
    n.leaf = false;
    n.id = ident("node id");
    n.action = peek().kind == TokKind::String ? take().text : n.id.text;
    if (at_word("AND")) {
      n.op = Op::And;
    } else if (at_word("OR")) {
      n.op = Op::Or;
    } else if (at_word("SAND")) {
      n.op = Op::Sand;
    } else {
      fail("AND, OR or SAND");
    }
    take();
    expect("{");
    do n.children.push_back(node_decl());
    while (!at_punct("}"));
    take();
    return n;
  }

  FamilyAst family() {
    expect("{");
    FamilyAst f;
    if (at_punct("}")) {
      take();
      return f;
    }
    for (;;) {
      FamilyEntry e;
      e.index = ident("index");
      if (at_punct("->")) {
        take();
        e.token = ident("token");
      } else {
        e.token = e.index;
      }
      f.push_back(std::move(e));
      if (!at_punct(",")) break;
      take();
    }
    expect("}");
    return f;
  }

  FormulaAst formula() {
    std::vector<FormulaAst> terms{term()};
    while (at_punct("\\/")) {
      take();
      terms.push_back(term());
    }
    if (terms.size() == 1) return std::move(terms.front());
    FormulaAst f;
    f.kind = LatticeFormula::Kind::Or;
    f.args = std::move(terms);
    return f;
  }

  FormulaAst term() {
    std::vector<FormulaAst> factors{factor()};
    while (at_punct("/\\")) {
      take();
      factors.push_back(factor());
    }
    if (factors.size() == 1) return std::move(factors.front());
    FormulaAst f;
    f.kind = LatticeFormula::Kind::And;
    f.args = std::move(factors);
    return f;
  }

  FormulaAst factor() {
    FormulaAst f;
    if (at_punct("(")) {
      take();
      f = formula();
      expect(")");
      return f;
    }
    if (at_word("top") && !at_punct("@", 1)) {
      take();
      f.kind = LatticeFormula::Kind::Top;
      return f;
    }
    if (at_word("bot") && !at_punct("@", 1)) {
      take();
      f.kind = LatticeFormula::Kind::Bottom;
      return f;
    }
    f.kind = LatticeFormula::Kind::Prim;
    f.type = ident("type, 'top', 'bot' or '('");
    expect("@");
    f.index = ident("index");
    return f;
  }

  EffectDecl effect() {
    take();
    EffectDecl e;
    e.node = ident("node id");
    expect(":");
    e.family = family();
    expect("|=");
    e.formula = formula();
    expect_word("in");
    e.classification = ident("classification name");
    expect(";");
    return e;
  }

  SlotAst slot() {
    SlotAst s;
    if (at_word("top") && !at_punct("@", 1)) {
      take();
      s.top = true;
      return s;
    }
    s.type = ident("type or 'top'");
    expect("@");
    s.index = ident("index");
    return s;
  }

  bool at_section() const {
    return at_punct("}") || at_word("pre") || at_word("search") || (at_word("identity") && at_punct(";", 1)) ||
           ((at_word("typemap") || at_word("tokmap")) && at_punct(":", 1));
  }

  std::optional<Name> child_prefix() {
    if (peek().kind == TokKind::Ident && at_punct(":", 1)) {
      Name n = ident("child id");
      take();
      return n;
    }
    return std::nullopt;
  }

  TypeMapping type_mapping() {
    TypeMapping m;
    m.child = child_prefix();
    if (at_word("else")) {
      take();
      m.is_default = true;
    } else if (at_punct("<")) {
      take();
      m.bracketed = true;
      m.generator.push_back(slot());
      while (at_punct(",")) {
        take();
        m.generator.push_back(slot());
      }
      expect(">");
    } else {
      m.generator.push_back(slot());
    }
    expect("->");
    m.image = formula();
    expect(";");
    return m;
  }

  TokenMapping token_mapping() {
    TokenMapping m;
    m.child = child_prefix();
    m.token = ident("token");
    expect("->");
    if (at_punct("<")) {
      take();
      m.bracketed = true;
      m.image.push_back(family());
      while (at_punct(",")) {
        take();
        m.image.push_back(family());
      }
      expect(">");
    } else {
      m.image.push_back(family());
    }
    expect(";");
    return m;
  }

  WitnessDecl witness() {
    take();
    WitnessDecl w;
    w.node = ident("node id");
    expect("{");
    while (!at_punct("}")) {
      if (at_word("identity")) {
        take();
        expect(";");
        w.identity = true;
      } else if (at_word("typemap")) {
        take();
        expect(":");
        do w.typemap.push_back(type_mapping());
        while (!at_section());
      } else if (at_word("tokmap")) {
        take();
        expect(":");
        do w.tokmap.push_back(token_mapping());
        while (!at_section());
      } else if (at_word("pre")) {
        take();
        PreDecl p;
        p.child = ident("child id");
        expect(":");
        p.formula = formula();
        expect(";");
        w.pre.push_back(std::move(p));
      } else if (at_word("search")) {
        take();
        expect("{");
        if (!w.search) w.search.emplace();
        while (!at_punct("}")) {
          SearchRule r;
          if (at_word("types")) {
            r.types = true;
          } else if (!at_word("tokens")) {
            fail("'tokens' or 'types'");
          }
          take();
          r.from = ident(r.types ? "type" : "token");
          expect("->");
          r.to = idlist(r.types ? "type" : "token");
          expect(";");
          w.search->push_back(std::move(r));
        }
        take();
      } else {
        fail("'identity', 'typemap:', 'tokmap:', 'pre', 'search' or '}'");
      }
    }
    take();
    return w;
  }

  ResidualDecl residual() {
    take();
    ResidualDecl r;
    r.node = ident("node id");
    expect(":");
    r.formula = formula();
    expect(";");
    return r;
  }

  AttributeDecl attribute() {
    take();
    AttributeDecl a;
    a.name = ident("attribute name");
    expect("{");
    while (!at_punct("}")) {
      Name leaf = ident("leaf id");
      expect(":");
      Name value = ident("value");
      expect(";");
      a.values.emplace_back(std::move(leaf), std::move(value));
    }
    take();
    return a;
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

std::string to_string(const Diagnostic& d) {
  return std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         (d.severity == Severity::Error ? "error" : "warning") + " " + d.code + ": " + d.message;
}

std::optional<ModelFile> parse_syntax(std::string_view text, std::vector<Diagnostic>& diags) {
  const std::size_t before = diags.size();
  auto toks = lex(text, diags);
  ModelFile m = Parser(std::move(toks), diags).parse();
  for (std::size_t i = before; i < diags.size(); ++i)
    if (diags[i].severity == Severity::Error) return std::nullopt;
  return m;
}

bool ParseResult::has_errors() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return true;
  return false;
}

ParseResult parse_model(std::string_view text) {
  ParseResult r;
  r.file = parse_syntax(text, r.diagnostics);
  if (r.file) r.model = resolve(*r.file, r.diagnostics);
  return r;
}

}  // namespace atchan::dsl
