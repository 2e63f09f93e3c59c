#include "eqmon/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace eqmon {

ParseError::ParseError(int line_, int col_, const std::string& msg)
    : Error("parse error at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
      line(line_),
      col(col_) {}

Signature::Signature(std::vector<OpDecl> ops) : ops_(std::move(ops)) {
  std::set<std::string> seen;
  for (const auto& op : ops_) {
    if (op.arity < 0) throw Error("negative arity for operation '" + op.name + "'");
    if (!seen.insert(op.name).second)
      throw Error("duplicate operation name '" + op.name + "'");
  }
}

std::optional<int> Signature::index_of(const std::string& name) const {
  for (size_t i = 0; i < ops_.size(); ++i)
    if (ops_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

int Signature::arity(const std::string& name) const {
  auto i = index_of(name);
  if (!i) throw Error("undeclared operation '" + name + "'");
  return ops_[*i].arity;
}

Term Term::leaf(std::string symbol) {
  auto rep = std::make_shared<Rep>();
  rep->head = std::move(symbol);
  rep->children_count = -1;
  rep->size = 1;
  rep->depth = 0;
  rep->print = rep->head;
  return Term(std::move(rep));
}

Term Term::node(std::string op, std::vector<Term> children) {
  auto rep = std::make_shared<Rep>();
  rep->children_count = static_cast<int>(children.size());
  rep->size = children.size() <= 1 ? 1 : 0;
  rep->depth = 0;
  std::string print = "(" + op;
  for (const auto& c : children) {
    rep->size += c.size();
    rep->depth = std::max(rep->depth, c.depth() + 1);
    print += ' ';
    print += c.print();
  }
  if (children.empty()) rep->depth = 0;
  print += ')';
  rep->head = std::move(op);
  rep->children = std::move(children);
  rep->print = std::move(print);
  return Term(std::move(rep));
}

const std::vector<Term>& Term::children() const {
  static const std::vector<Term> kEmpty;
  return is_leaf() ? kEmpty : rep_->children;
}

namespace {
void collect_leaves(const Term& t, bool vars, std::set<std::string>& out) {
  if (t.is_leaf()) {
    if (t.is_variable() == vars) out.insert(t.head());
    return;
  }
  for (const auto& c : t.children()) collect_leaves(c, vars, out);
}

void count_vars(const Term& t, std::map<std::string, int>& counts) {
  if (t.is_leaf()) {
    if (t.is_variable()) counts[t.head()]++;
    return;
  }
  for (const auto& c : t.children()) count_vars(c, counts);
}
}  // namespace

std::set<std::string> Term::variables() const {
  std::set<std::string> out;
  collect_leaves(*this, true, out);
  return out;
}

std::set<std::string> Term::letters() const {
  std::set<std::string> out;
  collect_leaves(*this, false, out);
  return out;
}

bool Term::is_linear() const {
  std::map<std::string, int> counts;
  count_vars(*this, counts);
  return std::all_of(counts.begin(), counts.end(), [](const auto& kv) { return kv.second == 1; });
}

bool Term::operator==(const Term& other) const {
  if (rep_ == other.rep_) return true;
  return rep_->size == other.rep_->size && rep_->print == other.rep_->print;
}

bool Term::operator<(const Term& other) const {
  if (rep_->size != other.rep_->size) return rep_->size < other.rep_->size;
  return rep_->print < other.rep_->print;
}

Presentation::Presentation(std::string name, Signature sig, std::vector<Equation> eqs)
    : name_(std::move(name)), signature_(std::move(sig)), equations_(std::move(eqs)) {
  validate();
}

void Presentation::validate() const {
  for (const auto& eq : equations_) {
    validate_term(eq.lhs, signature_);
    validate_term(eq.rhs, signature_);
  }
}

void validate_term(const Term& t, const Signature& sig) {
  if (t.is_leaf()) {
    if (t.is_letter() && sig.contains(t.head()))
      throw Error("symbol '" + t.head() + "' is a declared operation, not a letter");
    return;
  }
  auto idx = sig.index_of(t.head());
  if (!idx) throw Error("undeclared operation '" + t.head() + "'");
  int want = sig.operations()[*idx].arity;
  if (want != static_cast<int>(t.children().size()))
    throw Error("arity mismatch: '" + t.head() + "' expects " + std::to_string(want) +
                " arguments, got " + std::to_string(t.children().size()));
  for (const auto& c : t.children()) validate_term(c, sig);
}

LetterMap LetterMap::make(std::vector<std::string> source, std::vector<std::string> target,
                          std::map<std::string, std::string> map) {
  LetterMap f;
  f.source = std::move(source);
  f.target = std::move(target);
  f.map = std::move(map);
  std::sort(f.source.begin(), f.source.end());
  std::sort(f.target.begin(), f.target.end());
  std::set<std::string> image;
  for (const auto& x : f.source) {
    auto it = f.map.find(x);
    if (it == f.map.end()) throw Error("letter map not total: '" + x + "' unmapped");
    if (!std::binary_search(f.target.begin(), f.target.end(), it->second))
      throw Error("letter map image '" + it->second + "' outside target alphabet");
    image.insert(it->second);
  }
  f.surjective = image.size() == f.target.size();
  return f;
}

LetterMap LetterMap::identity(std::vector<std::string> alphabet) {
  std::map<std::string, std::string> m;
  for (const auto& x : alphabet) m[x] = x;
  return make(alphabet, alphabet, std::move(m));
}

const std::string& LetterMap::operator()(const std::string& letter) const {
  auto it = map.find(letter);
  if (it == map.end()) throw Error("letter '" + letter + "' not in map domain");
  return it->second;
}

std::vector<std::string> LetterMap::preimage(const std::string& letter) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : map)
    if (v == letter) out.push_back(k);
  return out;
}

Term apply_substitution(const Term& t, const std::map<std::string, Term>& binding) {
  if (t.is_leaf()) {
    if (!t.is_variable()) return t;
    auto it = binding.find(t.head());
    if (it == binding.end()) throw Error("unbound variable '" + t.head() + "'");
    return it->second;
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& c : t.children()) kids.push_back(apply_substitution(c, binding));
  return Term::node(t.head(), std::move(kids));
}

Term rename_letters(const Term& t, const LetterMap& f) {
  if (t.is_leaf()) {
    if (t.is_variable()) return t;
    return Term::leaf(f(t.head()));
  }
  std::vector<Term> kids;
  kids.reserve(t.children().size());
  for (const auto& c : t.children()) kids.push_back(rename_letters(c, f));
  return Term::node(t.head(), std::move(kids));
}

ClassificationReport classify_equations(const Presentation& p) {
  ClassificationReport report;
  report.all_regular_linear = true;
  for (const auto& eq : p.equations()) {
    EquationClass c;
    c.regular = eq.lhs.variables() == eq.rhs.variables();
    c.linear = eq.lhs.is_linear() && eq.rhs.is_linear();
    report.all_regular_linear = report.all_regular_linear && c.regular && c.linear;
    report.per_equation.push_back(c);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Theory file parsing

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    pos++;
  }
};

bool is_symbol_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != '=' &&
         c != '#' && c != ',';
}

void skip_space_in_line(Cursor& c) {
  while (!c.done() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\r')) c.advance();
}

Term parse_sexpr(Cursor& c) {
  skip_space_in_line(c);
  if (c.done()) throw ParseError(c.line, c.col, "expected term");
  if (c.peek() == '(') {
    int line = c.line, col = c.col;
    c.advance();
    skip_space_in_line(c);
    std::string op;
    while (!c.done() && is_symbol_char(c.peek())) {
      op += c.peek();
      c.advance();
    }
    if (op.empty()) throw ParseError(line, col, "expected operation name after '('");
    std::vector<Term> kids;
    while (true) {
      skip_space_in_line(c);
      if (c.done() || c.peek() == '\n') throw ParseError(line, col, "unclosed '('");
      if (c.peek() == ')') {
        c.advance();
        break;
      }
      kids.push_back(parse_sexpr(c));
    }
    return Term::node(op, std::move(kids));
  }
  std::string sym;
  int line = c.line, col = c.col;
  while (!c.done() && is_symbol_char(c.peek())) {
    sym += c.peek();
    c.advance();
  }
  if (sym.empty()) throw ParseError(line, col, "expected symbol");
  return Term::leaf(sym);
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Term parse_term(const std::string& text) {
  Cursor c{text};
  Term t = parse_sexpr(c);
  skip_space_in_line(c);
  if (!c.done() && c.peek() != '\n')
    throw ParseError(c.line, c.col, "trailing input after term");
  return t;
}

Presentation parse_presentation(const std::string& text) {
  std::string name;
  std::vector<OpDecl> ops;
  std::vector<Equation> eqs;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    lineno++;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = strip(raw);
    if (line.empty()) continue;

    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError(lineno, 1, "expected 'name:', 'ops:' or 'eq:' directive");
    std::string key = strip(line.substr(0, colon));
    std::string rest = strip(line.substr(colon + 1));

    if (key == "name") {
      name = rest;
    } else if (key == "ops") {
      // comma-separated name/arity pairs; an empty list is allowed
      std::istringstream items(rest);
      std::string item;
      while (std::getline(items, item, ',')) {
        item = strip(item);
        if (item.empty()) continue;
        auto slash = item.find('/');
        if (slash == std::string::npos)
          throw ParseError(lineno, 1, "operation '" + item + "' missing '/arity'");
        std::string op = strip(item.substr(0, slash));
        std::string arity_s = strip(item.substr(slash + 1));
        try {
          size_t used = 0;
          int arity = std::stoi(arity_s, &used);
          if (used != arity_s.size() || arity < 0) throw std::invalid_argument("");
          ops.push_back({op, arity});
        } catch (const std::exception&) {
          throw ParseError(lineno, 1, "bad arity '" + arity_s + "' for operation '" + op + "'");
        }
      }
    } else if (key == "eq") {
      Cursor c{rest};
      c.line = lineno;
      Term lhs = parse_sexpr(c);
      skip_space_in_line(c);
      if (c.done() || c.peek() != '=') throw ParseError(lineno, c.col, "expected '=' in equation");
      c.advance();
      Term rhs = parse_sexpr(c);
      skip_space_in_line(c);
      if (!c.done()) throw ParseError(lineno, c.col, "trailing input after equation");
      eqs.push_back({lhs, rhs});
    } else {
      throw ParseError(lineno, 1, "unknown directive '" + key + "'");
    }
  }

  return Presentation(name, Signature(std::move(ops)), std::move(eqs));
}

std::string print_presentation(const Presentation& p) {
  std::string out;
  if (!p.name().empty()) out += "name: " + p.name() + "\n";
  out += "ops:";
  bool first = true;
  for (const auto& op : p.signature().operations()) {
    out += first ? " " : ", ";
    out += op.name + "/" + std::to_string(op.arity);
    first = false;
  }
  out += "\n";
  for (const auto& eq : p.equations())
    out += "eq: " + eq.lhs.print() + " = " + eq.rhs.print() + "\n";
  return out;
}

}  // namespace eqmon
