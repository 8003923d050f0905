#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atchan/causal.hpp"
#include "atchan/classification.hpp"
#include "atchan/effects.hpp"
#include "atchan/mitigation.hpp"
#include "atchan/tree.hpp"

namespace atchan::dsl {

/// Location in the source text. Lines and columns start at 1.
struct Span {
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;

  bool operator==(const Span&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string code;
  std::string message;
};

std::string to_string(const Diagnostic& d);

/// Identifier as written. Equality looks at the text only, so that models
/// compare equal wherever they were parsed from.
struct Name {
  std::string text;
  Span span;

  bool operator==(const Name& o) const { return text == o.text; }
};

struct FormulaAst {
  LatticeFormula::Kind kind = LatticeFormula::Kind::Top;
  Name type, index;  // Prim only
  std::vector<FormulaAst> args;

  bool operator==(const FormulaAst&) const = default;
};

struct ClassificationDecl {
  Name id;
  std::vector<Name> tokens, types;
  std::vector<std::pair<Name, Name>> holds;  // token |= type
  std::vector<std::pair<Name, Name>> order;  // lower => upper

  bool operator==(const ClassificationDecl&) const = default;
};

struct NodeDecl {
  Name id;
  std::string action;
  bool leaf = true;
  Op op = Op::And;
  std::vector<NodeDecl> children;

  bool operator==(const NodeDecl&) const = default;
};

struct TreeDecl {
  Name id;
  NodeDecl root;

  bool operator==(const TreeDecl&) const = default;
};

struct FamilyEntry {
  Name index, token;
  bool operator==(const FamilyEntry&) const = default;
};
using FamilyAst = std::vector<FamilyEntry>;

struct EffectDecl {
  Name node;
  FamilyAst family;
  FormulaAst formula;
  Name classification;

  bool operator==(const EffectDecl&) const = default;
};

struct SlotAst {
  bool top = false;
  Name type, index;
  bool operator==(const SlotAst&) const = default;
};

/// `[child:] generator -> formula;` or `[child:] else -> formula;`.
struct TypeMapping {
  std::optional<Name> child;
  bool is_default = false;
  bool bracketed = false;  // written as <...>
  std::vector<SlotAst> generator;
  FormulaAst image;

  bool operator==(const TypeMapping&) const = default;
};

/// `[child:] token -> family;` or `[child:] token -> <family, ...>;`.
struct TokenMapping {
  std::optional<Name> child;
  Name token;
  bool bracketed = false;
  std::vector<FamilyAst> image;

  bool operator==(const TokenMapping&) const = default;
};

struct PreDecl {
  Name child;
  FormulaAst formula;
  bool operator==(const PreDecl&) const = default;
};

/// `tokens parent -> child, ...;` or `types child -> parent, ...;`.
struct SearchRule {
  bool types = false;
  Name from;
  std::vector<Name> to;
  bool operator==(const SearchRule&) const = default;
};

struct WitnessDecl {
  Name node;
  bool identity = false;
  std::vector<TypeMapping> typemap;
  std::vector<TokenMapping> tokmap;
  std::vector<PreDecl> pre;
  std::optional<std::vector<SearchRule>> search;

  bool operator==(const WitnessDecl&) const = default;
};

struct ResidualDecl {
  Name node;
  FormulaAst formula;
  bool operator==(const ResidualDecl&) const = default;
};

/// `attribute NAME { leaf: value; ... }`, leaf valuations for `attr`.
struct AttributeDecl {
  Name name;
  std::vector<std::pair<Name, Name>> values;
  bool operator==(const AttributeDecl&) const = default;
};

struct ModelFile {
  std::vector<ClassificationDecl> classifications;
  std::vector<TreeDecl> trees;
  std::vector<EffectDecl> effects;
  std::vector<WitnessDecl> witnesses;
  std::vector<ResidualDecl> residuals;
  std::vector<AttributeDecl> attributes;

  bool operator==(const ModelFile&) const = default;
};

/// Everything the analyses need, with references resolved. Effects and
/// witnesses point into `classes`, so a model is not copyable.
struct Model {
  std::deque<Classification> classes;
  std::string tree_name;
  AttackTree tree;
  EffectMap effects;
  std::map<std::string, ConsistencyWitness> witnesses;
  Residuals residuals;
  std::map<std::string, std::map<std::string, std::string>> attributes;  // name -> leaf -> value

  Model() = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const Classification* classification(std::string_view id) const;
};

/// Syntax only. Returns nothing when there are syntax errors.
std::optional<ModelFile> parse_syntax(std::string_view text, std::vector<Diagnostic>& diags);

/// Resolves names, closes classifications and checks every effect.
/// Returns nothing when an error diagnostic was produced.
std::unique_ptr<Model> resolve(const ModelFile& file, std::vector<Diagnostic>& diags);

struct ParseResult {
  std::optional<ModelFile> file;
  std::unique_ptr<Model> model;
  std::vector<Diagnostic> diagnostics;

  bool has_errors() const;
};

ParseResult parse_model(std::string_view text);

std::string print_model(const ModelFile& file);
std::string print_formula(const FormulaAst& f);

/// `digraph G { v0 [label="a"]; v0 -> v1; }`, vertices in index order and
/// edges sorted.
std::string export_dot(const LabeledDigraph& g);

/// Attack nodes v0.. in pre-order, then one effect vertex e<k> per node
/// with an effect, linked to its node by a blue edge.
std::string export_dot(const AttackTree& t, const EffectMap& effects);

}  // namespace atchan::dsl
