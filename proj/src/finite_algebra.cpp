#include "eqmon/finite_algebra.hpp"

#include <algorithm>
#include <numeric>

namespace eqmon {

namespace {

long long checked_pow(long long base, int exp, long long cap) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > cap) return cap + 1;
  }
  return v;
}

}  // namespace

FiniteAlgebra::FiniteAlgebra(std::shared_ptr<const Presentation> p, int carrier_size,
                             std::vector<std::vector<int>> tables, std::vector<std::string> names)
    : presentation_(std::move(p)), n_(carrier_size), tables_(std::move(tables)), names_(std::move(names)) {
  if (n_ <= 0) throw Error("carrier size must be positive");
  const auto& ops = presentation_->signature().operations();
  if (tables_.size() != ops.size()) throw Error("one table per operation required");
  for (size_t i = 0; i < ops.size(); ++i) {
    long long want = checked_pow(n_, ops[i].arity, 1LL << 40);
    if (static_cast<long long>(tables_[i].size()) != want)
      throw Error("table for '" + ops[i].name + "' has wrong shape");
    for (int v : tables_[i])
      if (v < 0 || v >= n_) throw Error("table entry out of range for '" + ops[i].name + "'");
  }
  if (!names_.empty() && static_cast<int>(names_.size()) != n_)
    throw Error("element name list has wrong length");
}

FiniteAlgebra FiniteAlgebra::from_tables(Presentation p, int carrier_size,
                                         std::map<std::string, std::vector<int>> tables,
                                         std::vector<std::string> names) {
  auto pres = std::make_shared<const Presentation>(std::move(p));
  std::vector<std::vector<int>> ordered;
  for (const auto& op : pres->signature().operations()) {
    auto it = tables.find(op.name);
    if (it == tables.end()) throw Error("missing table for operation '" + op.name + "'");
    ordered.push_back(std::move(it->second));
    tables.erase(it);
  }
  if (!tables.empty()) throw Error("table given for undeclared operation '" + tables.begin()->first + "'");
  return FiniteAlgebra(std::move(pres), carrier_size, std::move(ordered), std::move(names));
}

int FiniteAlgebra::apply(int op_index, std::span<const int> args) const {
  const auto& t = tables_[op_index];
  size_t idx = 0;
  for (int a : args) idx = idx * n_ + a;
  return t[idx];
}

int FiniteAlgebra::apply(const std::string& op, std::span<const int> args) const {
  auto i = presentation_->signature().index_of(op);
  if (!i) throw Error("undeclared operation '" + op + "'");
  return apply(*i, args);
}

int FiniteAlgebra::apply(const std::string& op, std::initializer_list<int> args) const {
  std::vector<int> v(args);
  return apply(op, std::span<const int>(v));
}

const std::vector<int>& FiniteAlgebra::table(const std::string& op) const {
  auto i = presentation_->signature().index_of(op);
  if (!i) throw Error("undeclared operation '" + op + "'");
  return tables_[*i];
}

std::string FiniteAlgebra::name_of(int e) const {
  if (e < 0 || e >= n_) throw Error("element out of range");
  if (names_.empty()) return std::to_string(e);
  return names_[e];
}

std::optional<int> FiniteAlgebra::element_by_name(const std::string& name) const {
  for (int i = 0; i < n_; ++i) {
    if (!names_.empty() && names_[i] == name) return i;
  }
  // fall back to numeric names
  try {
    size_t used = 0;
    int v = std::stoi(name, &used);
    if (used == name.size() && v >= 0 && v < n_) return v;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

namespace {

int eval_with_env(const FiniteAlgebra& a, const Term& t, const std::map<std::string, int>& env) {
  if (t.is_leaf()) {
    auto it = env.find(t.head());
    if (it == env.end())
      throw Error(std::string(t.is_variable() ? "unassigned variable '" : "unassigned letter '") +
                  t.head() + "'");
    return it->second;
  }
  std::vector<int> args;
  args.reserve(t.children().size());
  for (const auto& c : t.children()) args.push_back(eval_with_env(a, c, env));
  return a.apply(t.head(), std::span<const int>(args));
}

}  // namespace

SatisfactionResult check_satisfies(const FiniteAlgebra& a) {
  const int n = a.carrier_size();
  const auto& eqs = a.presentation().equations();
  for (size_t ei = 0; ei < eqs.size(); ++ei) {
    std::vector<std::string> vars;
    for (const auto& v : eqs[ei].lhs.variables()) vars.push_back(v);
    for (const auto& v : eqs[ei].rhs.variables())
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    std::sort(vars.begin(), vars.end());

    std::vector<int> assign(vars.size(), 0);
    while (true) {
      std::map<std::string, int> env;
      for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = assign[i];
      int lv = eval_with_env(a, eqs[ei].lhs, env);
      int rv = eval_with_env(a, eqs[ei].rhs, env);
      if (lv != rv)
        return {false, CounterAssignment{static_cast<int>(ei), env, lv, rv}};
      // next assignment
      size_t k = 0;
      while (k < assign.size() && ++assign[k] == n) assign[k++] = 0;
      if (k == assign.size() && !assign.empty()) break;
      if (assign.empty()) break;
    }
  }
  return {true, std::nullopt};
}

int eval_term(const FiniteAlgebra& a, const std::map<std::string, int>& h0, const Term& t) {
  if (!t.variables().empty()) throw Error("eval_term requires a ground term");
  return eval_with_env(a, t, h0);
}

Homomorphism Homomorphism::extend(std::shared_ptr<const FiniteAlgebra> a, std::map<std::string, int> h0) {
  auto sat = check_satisfies(*a);
  if (!sat.ok)
    throw Error("target algebra fails equation " + std::to_string(sat.counter->equation_index) +
                "; homomorphic extension is not well-defined");
  for (const auto& [letter, v] : h0)
    if (v < 0 || v >= a->carrier_size()) throw Error("assignment of '" + letter + "' out of range");
  return Homomorphism(std::move(a), std::move(h0));
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);  // keep least member as root for determinism
    parent[b] = a;
    return true;
  }
};

Congruence partition_from_uf(UnionFind& uf, int n) {
  Congruence c;
  c.class_of.assign(n, -1);
  int next = 0;
  std::vector<int> root_class(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = uf.find(i);
    if (root_class[r] < 0) root_class[r] = next++;
    c.class_of[i] = root_class[r];
  }
  c.num_classes = next;
  return c;
}

}  // namespace

Congruence discrete_congruence(int carrier_size) {
  Congruence c;
  c.class_of.resize(carrier_size);
  std::iota(c.class_of.begin(), c.class_of.end(), 0);
  c.num_classes = carrier_size;
  return c;
}

Congruence generate_congruence(const FiniteAlgebra& a, const std::vector<std::pair<int, int>>& pairs) {
  const int n = a.carrier_size();
  UnionFind uf(n);
  for (auto [x, y] : pairs) {
    if (x < 0 || x >= n || y < 0 || y >= n) throw Error("congruence pair element out of range");
    uf.unite(x, y);
  }
  // close under operation compatibility to a fixpoint
  const auto& ops = a.presentation().signature().operations();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t oi = 0; oi < ops.size(); ++oi) {
      int k = ops[oi].arity;
      if (k == 0) continue;
      std::vector<int> args(k, 0), alt(k, 0);
      while (true) {
        for (int pos = 0; pos < k; ++pos) {
          // replace position pos by any element equivalent to args[pos]
          for (int b = 0; b < n; ++b) {
            if (uf.find(b) != uf.find(args[pos]) || b == args[pos]) continue;
            alt = args;
            alt[pos] = b;
            int va = a.apply(static_cast<int>(oi), std::span<const int>(args));
            int vb = a.apply(static_cast<int>(oi), std::span<const int>(alt));
            if (uf.unite(va, vb)) changed = true;
          }
        }
        int c = 0;
        while (c < k && ++args[c] == n) args[c++] = 0;
        if (c == k) break;
      }
    }
  }
  return partition_from_uf(uf, n);
}

bool congruence_compatible(const FiniteAlgebra& a, const Congruence& theta) {
  const int n = a.carrier_size();
  const auto& ops = a.presentation().signature().operations();
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    int k = ops[oi].arity;
    if (k == 0) continue;
    std::vector<int> args(k, 0);
    while (true) {
      for (int pos = 0; pos < k; ++pos) {
        for (int b = 0; b < n; ++b) {
          if (theta.class_of[b] != theta.class_of[args[pos]]) continue;
          std::vector<int> alt = args;
          alt[pos] = b;
          if (theta.class_of[a.apply(static_cast<int>(oi), std::span<const int>(args))] !=
              theta.class_of[a.apply(static_cast<int>(oi), std::span<const int>(alt))])
            return false;
        }
      }
      int c = 0;
      while (c < k && ++args[c] == n) args[c++] = 0;
      if (c == k) break;
    }
  }
  return true;
}

std::pair<FiniteAlgebra, std::vector<int>> quotient(const FiniteAlgebra& a, const Congruence& theta) {
  if (static_cast<int>(theta.class_of.size()) != a.carrier_size())
    throw Error("congruence does not match carrier");
  if (!congruence_compatible(a, theta)) throw Error("partition is not compatible with the tables");

  const int m = theta.num_classes;
  // pick least representative per class
  std::vector<int> rep(m, -1);
  for (int i = a.carrier_size() - 1; i >= 0; --i) rep[theta.class_of[i]] = i;

  const auto& ops = a.presentation().signature().operations();
  std::vector<std::vector<int>> tables;
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    int k = ops[oi].arity;
    long long cells = checked_pow(m, k, 1LL << 30);
    std::vector<int> table(cells);
    std::vector<int> args(k, 0);
    long long idx = 0;
    while (true) {
      std::vector<int> reps(k);
      for (int i = 0; i < k; ++i) reps[i] = rep[args[i]];
      table[idx] = theta.class_of[a.apply(static_cast<int>(oi), std::span<const int>(reps))];
      ++idx;
      int c = k - 1;
      while (c >= 0 && ++args[c] == m) args[c--] = 0;
      if (c < 0) break;
    }
    if (k == 0) table[0] = theta.class_of[a.apply(static_cast<int>(oi), std::span<const int>())];
    tables.push_back(std::move(table));
  }

  std::vector<std::string> names;
  if (a.has_names()) {
    names.resize(m);
    for (int c = 0; c < m; ++c) names[c] = "[" + a.name_of(rep[c]) + "]";
  }
  FiniteAlgebra q(a.presentation_ptr(), m, std::move(tables), std::move(names));
  return {std::move(q), theta.class_of};
}

FiniteAlgebra product(const FiniteAlgebra& a, const FiniteAlgebra& b) {
  if (!(a.presentation() == b.presentation())) throw Error("presentation mismatch in product");
  const int n = a.carrier_size(), m = b.carrier_size();
  const int nm = n * m;  // element (x, y) encoded as x*m + y
  const auto& ops = a.presentation().signature().operations();
  std::vector<std::vector<int>> tables;
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    int k = ops[oi].arity;
    long long cells = checked_pow(nm, k, 1LL << 30);
    if (cells > (1LL << 30)) throw BudgetError("product table too large");
    std::vector<int> table(cells);
    std::vector<int> args(k, 0);
    long long idx = 0;
    while (true) {
      std::vector<int> xa(k), ya(k);
      for (int i = 0; i < k; ++i) {
        xa[i] = args[i] / m;
        ya[i] = args[i] % m;
      }
      int x = a.apply(static_cast<int>(oi), std::span<const int>(xa));
      int y = b.apply(static_cast<int>(oi), std::span<const int>(ya));
      table[idx] = x * m + y;
      ++idx;
      int c = k - 1;
      while (c >= 0 && ++args[c] == nm) args[c--] = 0;
      if (c < 0) break;
      if (idx >= cells) break;
    }
    tables.push_back(std::move(table));
  }
  std::vector<std::string> names;
  if (a.has_names() || b.has_names()) {
    names.reserve(nm);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < m; ++y) names.push_back("(" + a.name_of(x) + "," + b.name_of(y) + ")");
  }
  return FiniteAlgebra(a.presentation_ptr(), nm, std::move(tables), std::move(names));
}

std::pair<FiniteAlgebra, std::vector<int>> subalgebra_generated(const FiniteAlgebra& a,
                                                                const std::vector<int>& generators) {
  const int n = a.carrier_size();
  std::vector<bool> in(n, false);
  for (int g : generators) {
    if (g < 0 || g >= n) throw Error("generator out of range");
    in[g] = true;
  }
  const auto& ops = a.presentation().signature().operations();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t oi = 0; oi < ops.size(); ++oi) {
      int k = ops[oi].arity;
      std::vector<int> args(k, 0);
      while (true) {
        bool all_in = true;
        for (int i = 0; i < k; ++i) all_in = all_in && in[args[i]];
        if (all_in) {
          int v = a.apply(static_cast<int>(oi), std::span<const int>(args));
          if (!in[v]) {
            in[v] = true;
            changed = true;
          }
        }
        int c = k - 1;
        while (c >= 0 && ++args[c] == n) args[c--] = 0;
        if (c < 0) break;
        if (k == 0) break;
      }
      if (k == 0) {
        int v = a.apply(static_cast<int>(oi), std::span<const int>());
        if (!in[v]) {
          in[v] = true;
          changed = true;
        }
      }
    }
  }

  std::vector<int> embed(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (in[i]) embed[i] = m++;
  if (m == 0) throw Error("empty subalgebra (no generators and no constants)");
  std::vector<int> back(m);
  for (int i = 0; i < n; ++i)
    if (embed[i] >= 0) back[embed[i]] = i;

  std::vector<std::vector<int>> tables;
  for (size_t oi = 0; oi < ops.size(); ++oi) {
    int k = ops[oi].arity;
    long long cells = checked_pow(m, k, 1LL << 30);
    std::vector<int> table(cells);
    std::vector<int> args(k, 0);
    long long idx = 0;
    while (true) {
      std::vector<int> orig(k);
      for (int i = 0; i < k; ++i) orig[i] = back[args[i]];
      table[idx] = embed[a.apply(static_cast<int>(oi), std::span<const int>(orig))];
      ++idx;
      int c = k - 1;
      while (c >= 0 && ++args[c] == m) args[c--] = 0;
      if (c < 0) break;
    }
    tables.push_back(std::move(table));
  }
  std::vector<std::string> names;
  if (a.has_names()) {
    for (int i = 0; i < m; ++i) names.push_back(a.name_of(back[i]));
  }
  return {FiniteAlgebra(a.presentation_ptr(), m, std::move(tables), std::move(names)), embed};
}

// ---------------------------------------------------------------------------
// Exhaustive model search

namespace {

struct Instance {
  // flattened evaluation program for one side of one equation under one
  // variable assignment
  const Term* lhs;
  const Term* rhs;
  std::map<std::string, int> env;
};

class ModelSearch {
 public:
  ModelSearch(const Presentation& p, int size, const std::function<void(const FiniteAlgebra&)>& out,
              const ModelSearchOptions& opts)
      : pres_(p), n_(size), out_(out), opts_(opts) {
    const auto& ops = p.signature().operations();
    for (const auto& op : ops) {
      long long cells = checked_pow(n_, op.arity, 1LL << 26);
      if (cells > (1LL << 26)) throw BudgetError("model search table too large at size " + std::to_string(size));
      tables_.emplace_back(cells, -1);
    }
    for (const auto& eq : p.equations()) {
      std::vector<std::string> vars;
      for (const auto& v : eq.lhs.variables()) vars.push_back(v);
      for (const auto& v : eq.rhs.variables())
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
      std::sort(vars.begin(), vars.end());
      std::vector<int> assign(vars.size(), 0);
      while (true) {
        Instance inst;
        inst.lhs = &eq.lhs;
        inst.rhs = &eq.rhs;
        for (size_t i = 0; i < vars.size(); ++i) inst.env[vars[i]] = assign[i];
        instances_.push_back(std::move(inst));
        size_t k = 0;
        while (k < assign.size() && ++assign[k] == n_) assign[k++] = 0;
        if (assign.empty() || k == assign.size()) break;
      }
    }
    undecided_.resize(instances_.size());
    std::iota(undecided_.begin(), undecided_.end(), 0);
    pres_ptr_ = std::make_shared<const Presentation>(p);
  }

  void run() {
    // cells in a fixed order: per op, row-major
    cells_.clear();
    for (size_t oi = 0; oi < tables_.size(); ++oi)
      for (size_t idx = 0; idx < tables_[oi].size(); ++idx) cells_.push_back({oi, idx});
    dfs(0);
  }

 private:
  // -2 = unknown (some needed cell unassigned), else value
  int eval_partial(const Term& t, const std::map<std::string, int>& env) const {
    if (t.is_leaf()) return env.at(t.head());
    std::vector<int> args;
    args.reserve(t.children().size());
    for (const auto& c : t.children()) {
      int v = eval_partial(c, env);
      if (v == -2) return -2;
      args.push_back(v);
    }
    auto oi = pres_.signature().index_of(t.head());
    size_t idx = 0;
    for (int a : args) idx = idx * n_ + a;
    int v = tables_[*oi][idx];
    return v < 0 ? -2 : v;
  }

  bool consistent(std::vector<size_t>& decided_now) {
    for (size_t pos = 0; pos < undecided_.size();) {
      size_t ii = undecided_[pos];
      const Instance& inst = instances_[ii];
      int lv = eval_partial(*inst.lhs, inst.env);
      int rv = eval_partial(*inst.rhs, inst.env);
      if (lv != -2 && rv != -2) {
        if (lv != rv) return false;
        decided_now.push_back(ii);
        undecided_[pos] = undecided_.back();
        undecided_.pop_back();
        continue;
      }
      ++pos;
    }
    return true;
  }

  void dfs(size_t cell) {
    if (opts_.branch_budget >= 0 && ++visited_ > opts_.branch_budget)
      throw BudgetError("model search budget exceeded at size " + std::to_string(n_));
    if (cell == cells_.size()) {
      FiniteAlgebra a(pres_ptr_, n_, tables_);
      out_(a);
      return;
    }
    auto [oi, idx] = cells_[cell];
    for (int v = 0; v < n_; ++v) {
      if (opts_.normalize_first_element && cell == 0 && !cells_.empty()) {
        // optional pruning: pin the very first cell to its least usable value
        if (v > 0) break;
      }
      tables_[oi][idx] = v;
      std::vector<size_t> decided_now;
      if (consistent(decided_now)) dfs(cell + 1);
      for (size_t ii : decided_now) undecided_.push_back(ii);
      tables_[oi][idx] = -1;
    }
  }

  const Presentation& pres_;
  std::shared_ptr<const Presentation> pres_ptr_;
  int n_;
  const std::function<void(const FiniteAlgebra&)>& out_;
  ModelSearchOptions opts_;
  std::vector<std::vector<int>> tables_;
  std::vector<Instance> instances_;
  std::vector<size_t> undecided_;
  std::vector<std::pair<size_t, size_t>> cells_;
  long long visited_ = 0;
};

}  // namespace

void for_each_model(const Presentation& p, int size, const std::function<void(const FiniteAlgebra&)>& out,
                    const ModelSearchOptions& opts) {
  if (size < 1) throw Error("model size must be >= 1");
  ModelSearch search(p, size, out, opts);
  search.run();
}

std::vector<FiniteAlgebra> search_models(const Presentation& p, int size, const ModelSearchOptions& opts) {
  std::vector<FiniteAlgebra> models;
  for_each_model(
      p, size,
      [&](const FiniteAlgebra& a) {
        if (models.size() >= (1u << 20)) throw BudgetError("too many models to materialize");
        models.push_back(a);
      },
      opts);
  return models;
}

}  // namespace eqmon
