#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eqmon/presentation.hpp"

namespace eqmon {

/// A finite model of a presentation's signature: carrier {0..n-1} plus one
/// total operation table per operation, row-major. Whether it satisfies the
/// equations is a checkable property, not an invariant.
class FiniteAlgebra {
 public:
  FiniteAlgebra(std::shared_ptr<const Presentation> p, int carrier_size,
                std::vector<std::vector<int>> tables, std::vector<std::string> element_names = {});

  static FiniteAlgebra from_tables(Presentation p, int carrier_size,
                                   std::map<std::string, std::vector<int>> tables,
                                   std::vector<std::string> element_names = {});

  const Presentation& presentation() const { return *presentation_; }
  std::shared_ptr<const Presentation> presentation_ptr() const { return presentation_; }
  int carrier_size() const { return n_; }

  int apply(int op_index, std::span<const int> args) const;
  int apply(const std::string& op, std::span<const int> args) const;
  int apply(const std::string& op, std::initializer_list<int> args) const;

  const std::vector<int>& table(int op_index) const { return tables_[op_index]; }
  const std::vector<int>& table(const std::string& op) const;

  bool has_names() const { return !names_.empty(); }
  const std::vector<std::string>& element_names() const { return names_; }
  std::string name_of(int e) const;
  std::optional<int> element_by_name(const std::string& name) const;

 private:
  std::shared_ptr<const Presentation> presentation_;
  int n_;
  std::vector<std::vector<int>> tables_;  // indexed like signature().operations()
  std::vector<std::string> names_;
};

struct CounterAssignment {
  int equation_index;
  std::map<std::string, int> assignment;
  int lhs_value;
  int rhs_value;
};

struct SatisfactionResult {
  bool ok;
  std::optional<CounterAssignment> counter;  // first failing assignment, deterministic
};

/// Full enumeration of all variable assignments for every equation.
SatisfactionResult check_satisfies(const FiniteAlgebra& a);

/// Bottom-up table evaluation of a ground term under a letter assignment.
int eval_term(const FiniteAlgebra& a, const std::map<std::string, int>& h0, const Term& t);

/// The unique homomorphic extension of a letter assignment into an algebra
/// that satisfies its presentation (checked once at construction).
class Homomorphism {
 public:
  static Homomorphism extend(std::shared_ptr<const FiniteAlgebra> a, std::map<std::string, int> h0);

  int operator()(const Term& t) const { return eval_term(*algebra_, h0_, t); }
  const FiniteAlgebra& target() const { return *algebra_; }
  std::shared_ptr<const FiniteAlgebra> target_ptr() const { return algebra_; }
  const std::map<std::string, int>& letter_assignment() const { return h0_; }

 private:
  Homomorphism(std::shared_ptr<const FiniteAlgebra> a, std::map<std::string, int> h0)
      : algebra_(std::move(a)), h0_(std::move(h0)) {}
  std::shared_ptr<const FiniteAlgebra> algebra_;
  std::map<std::string, int> h0_;
};

/// Partition of an algebra's carrier; compatibility with the tables is what
/// makes it a congruence, checkable by full enumeration.
struct Congruence {
  std::vector<int> class_of;  // carrier index -> class id, classes numbered by least member
  int num_classes;
};

Congruence discrete_congruence(int carrier_size);

/// Least congruence containing the given pairs: closure under symmetry,
/// transitivity and operation compatibility, by worklist to fixpoint.
Congruence generate_congruence(const FiniteAlgebra& a, const std::vector<std::pair<int, int>>& pairs);

bool congruence_compatible(const FiniteAlgebra& a, const Congruence& theta);

/// Quotient algebra plus the projection map carrier -> quotient carrier.
std::pair<FiniteAlgebra, std::vector<int>> quotient(const FiniteAlgebra& a, const Congruence& theta);

/// Componentwise product; presentations must agree.
FiniteAlgebra product(const FiniteAlgebra& a, const FiniteAlgebra& b);

/// Subalgebra generated by a set of elements: closure under all operations
/// (constants included). Returns the algebra on the closed subset plus the
/// embedding old-index -> new-index (-1 outside).
std::pair<FiniteAlgebra, std::vector<int>> subalgebra_generated(const FiniteAlgebra& a,
                                                                const std::vector<int>& generators);

struct ModelSearchOptions {
  long long branch_budget = -1;       // max search-tree nodes, -1 = unlimited
  bool normalize_first_element = false;  // optional symmetry pruning
};

/// Exhaustive Mace-style backtracking over all table assignments of the given
/// carrier size, calling `out` for each assignment that satisfies every
/// equation. Deterministic order (cells row-major, values ascending).
void for_each_model(const Presentation& p, int size, const std::function<void(const FiniteAlgebra&)>& out,
                    const ModelSearchOptions& opts = {});

/// Materialized variant; throws BudgetError when the search space or result
/// count exceeds the budget.
std::vector<FiniteAlgebra> search_models(const Presentation& p, int size,
                                         const ModelSearchOptions& opts = {});

}  // namespace eqmon
