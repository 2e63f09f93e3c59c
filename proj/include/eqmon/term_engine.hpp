#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eqmon/finite_algebra.hpp"
#include "eqmon/presentation.hpp"

namespace eqmon {

using NodeId = int32_t;
using ClassId = int32_t;

/// Result of a bounded equality query. `equal` is always sound; when not
/// equal, `definitive` says whether the structure can rule out equality
/// outright (saturated or oracle-backed), otherwise the verdict is relative
/// to `bound`.
struct EqVerdict {
  bool equal;
  bool definitive;
  int bound;
};

/// Maps a ground term to a canonical normal-form key; terms are equal in the
/// free algebra iff their keys coincide. Used to back a BoundedFreeAlgebra
/// with an exact decision procedure for theories that have one.
using ExactNormalForm = std::function<std::string(const Term&)>;

/// The free algebra T(alphabet) of a presentation, approximated by
/// congruence closure over every ground term of size <= size_bound.
///
/// Merges are always sound (merged terms are provably equal); distinctness
/// is bound-relative unless the structure is saturated or oracle-backed, in
/// which case the partition is the free algebra itself.
class BoundedFreeAlgebra {
 public:
  struct Options {
    long node_budget = 4'000'000;
  };

  static BoundedFreeAlgebra build(const Presentation& p, std::vector<std::string> alphabet,
                                  int size_bound, const Options& opts = {});
  static BoundedFreeAlgebra build_with_oracle(const Presentation& p, std::vector<std::string> alphabet,
                                              int size_bound, ExactNormalForm oracle,
                                              const Options& opts = {});

  const Presentation& presentation() const { return *presentation_; }
  std::shared_ptr<const Presentation> presentation_ptr() const { return presentation_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  int size_bound() const { return size_bound_; }
  bool saturated() const { return saturated_; }
  bool oracle_backed() const { return static_cast<bool>(oracle_); }

  int class_count() const { return static_cast<int>(classes_.size()); }
  long node_count() const { return static_cast<long>(nodes_.size()); }

  /// Class of a term in the universe; throws BudgetError beyond the bound
  /// (unless saturated or oracle-backed, where any ground term is decidable).
  ClassId class_of(const Term& t) const;
  std::optional<ClassId> try_class_of(const Term& t) const;

  /// Canonical member: minimum by (size, printed form).
  const Term& representative(ClassId c) const;
  std::vector<Term> class_members(ClassId c) const;
  /// All members of [t] within the universe, canonically sorted.
  std::vector<Term> enumerate_class(const Term& t) const;

  /// True when every single syntactic rewrite step from every member lands
  /// back inside the universe; the class is then fully enumerated and
  /// NotProvenEqual against it is definitive.
  bool class_closed(ClassId c) const;

  EqVerdict decide_equal(const Term& t, const Term& s) const;

  /// Present iff saturated: the finite free algebra on class ids, with
  /// letter_class giving the embedding of the alphabet.
  const FiniteAlgebra* class_algebra() const { return class_algebra_ ? &*class_algebra_ : nullptr; }
  ClassId letter_class(const std::string& letter) const;

  /// Replays the recorded proof chain of every merge (equation instances and
  /// congruence steps) and checks it reproduces the partition exactly.
  bool replay_proofs(std::string* error = nullptr) const;

 private:
  BoundedFreeAlgebra() = default;

  struct Node {
    int head;  // >= 0: operation index; < 0: letter index -(i+1)
    std::vector<NodeId> ch;
    int size;
  };

  struct MergeEdge {
    NodeId a, b;
    bool congruence;                       // else equation instance
    int eq_index;                          // for equation edges
    std::vector<std::pair<std::string, NodeId>> subst;  // variable -> bound node
  };

  void enumerate_universe(const Options& opts);
  NodeId leaf_node(int letter_index);
  std::optional<NodeId> find_node(int head, const std::vector<NodeId>& ch) const;
  std::optional<NodeId> node_of_term(const Term& t) const;
  Term term_of_node(NodeId n) const;
  int find(NodeId n) const;
  bool unite(NodeId a, NodeId b, MergeEdge edge);
  void congruence_rebuild();
  bool match_round();
  void match_pattern(const Term& pattern, int cls, std::map<std::string, int>& binding,
                     const std::function<void(const std::map<std::string, int>&)>& emit) const;
  NodeId instantiate(const Term& pattern, const std::map<std::string, int>& binding,
                     std::vector<std::pair<std::string, NodeId>>* subst_out) const;
  void finalize_classes();
  void detect_saturation();
  bool node_less(NodeId a, NodeId b) const;
  int letter_index(const std::string& letter) const;

  std::shared_ptr<const Presentation> presentation_;
  std::vector<std::string> alphabet_;
  int size_bound_ = 0;
  bool saturated_ = false;
  ExactNormalForm oracle_;

  std::vector<Node> nodes_;
  std::map<std::pair<int, std::vector<NodeId>>, NodeId> node_index_;
  mutable std::vector<int> uf_;  // union-find over nodes (path compression)
  std::vector<MergeEdge> proof_;

  // finalized view
  std::vector<ClassId> class_of_node_;
  std::vector<std::vector<NodeId>> classes_;   // members, sorted canonically
  std::vector<NodeId> class_rep_;
  mutable std::vector<int8_t> class_closed_;   // -1 unknown, 0 no, 1 yes (lazy)
  std::optional<FiniteAlgebra> class_algebra_;
  std::map<std::string, ClassId> letter_class_;
};

/// eta: the singleton structure on a letter.
Term unit(const std::string& letter);

/// mu on syntax: replaces every letter leaf (a handle) by its bound term.
/// Total on the handles of t; throws on an unbound handle.
Term flatten(const Term& t, const std::map<std::string, Term>& binding);

/// One syntactic rewrite step: an equation side matched at a position,
/// replaced by the instantiated other side.
struct RewriteStep {
  int eq_index;
  bool right_to_left;
  std::vector<int> path;  // child indices from the root
};

/// BFS closure of a term under single syntactic rewrite steps in both
/// directions.  `complete` is true when the closure is exhaustive: no member
/// admits a step that escapes max_size, no step was cut by max_terms, and no
/// applicable equation introduces fresh variables.  The members then form
/// the entire congruence class of the start term.
struct RewriteClosure {
  std::vector<Term> members;  // sorted canonically
  bool complete;
  std::map<std::string, std::pair<std::string, RewriteStep>> parent;  // print -> (origin print, step)
};

RewriteClosure rewrite_closure(const Presentation& p, const Term& start, int max_size,
                               long max_terms = 200000);

/// Rewrite trace from `start` to `goal` inside a computed closure.
std::vector<std::pair<Term, RewriteStep>> closure_trace(const RewriteClosure& c, const Term& start,
                                                        const Term& goal);

}  // namespace eqmon
