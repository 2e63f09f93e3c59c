#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace eqmon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error with source position (1-based).
class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg);
  int line;
  int col;
};

/// A resource limit was exceeded; the message names the offending bound.
class BudgetError : public Error {
 public:
  using Error::Error;
};

struct OpDecl {
  std::string name;
  int arity;
  bool operator==(const OpDecl&) const = default;
};

/// An algebraic signature: a list of operation symbols with arities.
/// Names are unique; nullary operations (constants) are allowed.
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<OpDecl> ops);

  const std::vector<OpDecl>& operations() const { return ops_; }
  std::optional<int> index_of(const std::string& name) const;
  int arity(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name).has_value(); }
  bool empty() const { return ops_.empty(); }

  bool operator==(const Signature&) const = default;

 private:
  std::vector<OpDecl> ops_;
};

/// A finite rooted tree over a signature. Leaves are letters from an
/// alphabet or variables (symbols with a leading '?'); internal nodes apply
/// operations. Immutable and cheap to copy.
///
/// size() counts leaf, constant and unary-operation occurrences; operations
/// of arity >= 2 do not contribute. For word-like theories this is word
/// length, and it keeps unary towers finite per bound.
class Term {
 public:
  static Term leaf(std::string symbol);
  static Term node(std::string op, std::vector<Term> children);

  bool is_leaf() const { return rep_->children_count < 0; }
  bool is_node() const { return !is_leaf(); }
  /// Leaf symbol or operation name.
  const std::string& head() const { return rep_->head; }
  const std::vector<Term>& children() const;
  int arity() const { return is_leaf() ? -1 : rep_->children_count; }

  bool is_variable() const { return is_leaf() && !rep_->head.empty() && rep_->head[0] == '?'; }
  bool is_letter() const { return is_leaf() && !is_variable(); }

  int size() const { return rep_->size; }
  int depth() const { return rep_->depth; }

  /// S-expression rendering: bare symbol for leaves, "(op c1 ... ck)" else.
  const std::string& print() const { return rep_->print; }

  std::set<std::string> variables() const;
  std::set<std::string> letters() const;
  bool is_linear() const;

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }
  /// Canonical order: by size, then by printed form.
  bool operator<(const Term& other) const;

 private:
  struct Rep {
    std::string head;
    std::vector<Term> children;
    int children_count;  // -1 for leaves
    int size;
    int depth;
    std::string print;
  };
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

struct Equation {
  Term lhs;
  Term rhs;
  bool operator==(const Equation& o) const { return lhs == o.lhs && rhs == o.rhs; }
};

/// A signature together with a finite set of equations over ?-variables.
/// Presents a finitary monad on sets; equations are stored unoriented.
class Presentation {
 public:
  Presentation() = default;
  Presentation(std::string name, Signature sig, std::vector<Equation> eqs);

  const std::string& name() const { return name_; }
  const Signature& signature() const { return signature_; }
  const std::vector<Equation>& equations() const { return equations_; }

  bool operator==(const Presentation&) const = default;

 private:
  void validate() const;

  std::string name_;
  Signature signature_;
  std::vector<Equation> equations_;
};

/// A total function between two alphabets; `surjective` is computed.
struct LetterMap {
  std::vector<std::string> source;
  std::vector<std::string> target;
  std::map<std::string, std::string> map;
  bool surjective = false;

  static LetterMap make(std::vector<std::string> source, std::vector<std::string> target,
                        std::map<std::string, std::string> map);
  static LetterMap identity(std::vector<std::string> alphabet);
  const std::string& operator()(const std::string& letter) const;
  std::vector<std::string> preimage(const std::string& letter) const;
};

struct EquationClass {
  bool regular;
  bool linear;
};

struct ClassificationReport {
  std::vector<EquationClass> per_equation;
  bool all_regular_linear;
};

/// Parses the line-oriented theory format:
///   name: <identifier>            (optional)
///   ops: <name>/<arity>[, ...]
///   eq: <s-expr> = <s-expr>
/// '#' starts a comment. Round-trips with print_presentation.
Presentation parse_presentation(const std::string& text);
std::string print_presentation(const Presentation& p);

Term parse_term(const std::string& text);

/// Validates a ground or pattern term against a signature: arities match and
/// every node's operation is declared.
void validate_term(const Term& t, const Signature& sig);

/// Homomorphic replacement of variables; letters are untouched.
/// Throws on a variable missing from the binding.
Term apply_substitution(const Term& t, const std::map<std::string, Term>& binding);

/// Relabels letter leaves through f; variables are untouched.
Term rename_letters(const Term& t, const LetterMap& f);

ClassificationReport classify_equations(const Presentation& p);

}  // namespace eqmon
