#include "levyfit/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "levyfit/error.hpp"

namespace levyfit {

namespace {

const char* const kReserved[] = {"exp", "log", "sqrt", "abs"};

bool is_reserved(const std::string& name) {
  for (const char* r : kReserved)
    if (name == r) return true;
  return false;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_symbol(std::size_t slot) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Symbol;
  n->slot = slot;
  return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

bool is_const(const NodePtr& n) { return n->kind == NodeKind::Constant; }
bool is_const(const NodePtr& n, double v) { return is_const(n) && n->value == v; }

// ---------- evaluation ----------

// Applies one operator; returns false on a domain violation.
bool apply_binary(NodeKind op, double a, double b, double& out) {
  switch (op) {
    case NodeKind::Add: out = a + b; return true;
    case NodeKind::Sub: out = a - b; return true;
    case NodeKind::Mul: out = a * b; return true;
    case NodeKind::Div:
      if (b == 0.0) return false;
      out = a / b;
      return true;
    case NodeKind::Pow:
      if (a == 0.0 && b < 0.0) return false;
      out = std::pow(a, b);
      return !std::isnan(out) || std::isnan(a) || std::isnan(b);
    default: return false;
  }
}

bool apply_unary(NodeKind op, double a, double& out) {
  switch (op) {
    case NodeKind::Neg: out = -a; return true;
    case NodeKind::Exp: out = std::exp(a); return true;
    case NodeKind::Log:
      if (!(a > 0.0)) return false;
      out = std::log(a);
      return true;
    case NodeKind::Sqrt:
      if (a < 0.0) return false;
      out = std::sqrt(a);
      return true;
    case NodeKind::Abs: out = std::abs(a); return true;
    default: return false;
  }
}

void print(const ExprNode& n, const SymbolTable* table, std::string& out);

std::string node_text(const ExprNode& n, const SymbolTable& table) {
  std::string out;
  print(n, &table, out);
  return out;
}

double walk(const ExprNode& n, const double* slots, const SymbolTable& table) {
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Symbol: return slots[n.slot];
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      double a = walk(*n.lhs, slots, table);
      double b = walk(*n.rhs, slots, table);
      double out = 0.0;
      if (!apply_binary(n.kind, a, b, out))
        fail(ErrorCategory::Domain, "domain error in '" + node_text(n, table) + "' at operands (" +
                                        std::to_string(a) + ", " + std::to_string(b) + ")");
      return out;
    }
    default: {
      double a = walk(*n.lhs, slots, table);
      double out = 0.0;
      if (!apply_unary(n.kind, a, out))
        fail(ErrorCategory::Domain,
             "domain error in '" + node_text(n, table) + "' at operand " + std::to_string(a));
      return out;
    }
  }
}

// ---------- printing ----------

int precedence(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_wrapped(const ExprNode& n, const SymbolTable* table, bool paren, std::string& out) {
  if (paren) out += '(';
  print(n, table, out);
  if (paren) out += ')';
}

void print(const ExprNode& n, const SymbolTable* table, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      if (n.value < 0.0 || (n.value == 0.0 && std::signbit(n.value)))
        out += "(-" + format_number(-n.value) + ")";
      else
        out += format_number(n.value);
      return;
    case NodeKind::Symbol:
      out += table ? table->slot_name(n.slot) : ("$" + std::to_string(n.slot));
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      int p = precedence(n);
      print_wrapped(*n.lhs, table, precedence(*n.lhs) < p, out);
      out += n.kind == NodeKind::Add ? "+" : n.kind == NodeKind::Sub ? "-" : n.kind == NodeKind::Mul ? "*" : "/";
      print_wrapped(*n.rhs, table, precedence(*n.rhs) <= p, out);
      return;
    }
    case NodeKind::Pow:
      print_wrapped(*n.lhs, table, precedence(*n.lhs) < 5, out);
      out += '^';
      print_wrapped(*n.rhs, table, precedence(*n.rhs) < 3, out);
      return;
    case NodeKind::Neg:
      out += '-';
      print_wrapped(*n.lhs, table, precedence(*n.lhs) < 3, out);
      return;
    case NodeKind::Exp:
    case NodeKind::Log:
    case NodeKind::Sqrt:
    case NodeKind::Abs:
      out += n.kind == NodeKind::Exp ? "exp(" : n.kind == NodeKind::Log ? "log(" : n.kind == NodeKind::Sqrt ? "sqrt(" : "abs(";
      print(*n.lhs, table, out);
      out += ')';
      return;
  }
}

// ---------- simplifying constructors (used by differentiate) ----------

NodePtr fold(NodeKind kind, const NodePtr& a, const NodePtr& b) {
  double out = 0.0;
  if (b) {
    if (is_const(a) && is_const(b) && apply_binary(kind, a->value, b->value, out) && std::isfinite(out))
      return make_const(out);
  } else if (is_const(a) && apply_unary(kind, a->value, out) && std::isfinite(out)) {
    return make_const(out);
  }
  return nullptr;
}

NodePtr s_add(const NodePtr& a, const NodePtr& b) {
  if (auto f = fold(NodeKind::Add, a, b)) return f;
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_node(NodeKind::Add, a, b);
}

NodePtr s_neg(const NodePtr& a) {
  if (auto f = fold(NodeKind::Neg, a, nullptr)) return f;
  if (a->kind == NodeKind::Neg) return a->lhs;
  return make_node(NodeKind::Neg, a);
}

NodePtr s_sub(const NodePtr& a, const NodePtr& b) {
  if (auto f = fold(NodeKind::Sub, a, b)) return f;
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return s_neg(b);
  return make_node(NodeKind::Sub, a, b);
}

NodePtr s_mul(const NodePtr& a, const NodePtr& b) {
  if (auto f = fold(NodeKind::Mul, a, b)) return f;
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return s_neg(b);
  if (is_const(b, -1.0)) return s_neg(a);
  return make_node(NodeKind::Mul, a, b);
}

NodePtr s_div(const NodePtr& a, const NodePtr& b) {
  if (auto f = fold(NodeKind::Div, a, b)) return f;
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return make_node(NodeKind::Div, a, b);
}

NodePtr s_pow(const NodePtr& a, const NodePtr& b) {
  if (auto f = fold(NodeKind::Pow, a, b)) return f;
  if (is_const(b, 0.0)) return make_const(1.0);
  if (is_const(b, 1.0)) return a;
  return make_node(NodeKind::Pow, a, b);
}

NodePtr s_unary(NodeKind kind, const NodePtr& a) {
  if (auto f = fold(kind, a, nullptr)) return f;
  return make_node(kind, a);
}

NodePtr derive(const NodePtr& n, std::size_t slot) {
  switch (n->kind) {
    case NodeKind::Constant: return make_const(0.0);
    case NodeKind::Symbol: return make_const(n->slot == slot ? 1.0 : 0.0);
    case NodeKind::Add: return s_add(derive(n->lhs, slot), derive(n->rhs, slot));
    case NodeKind::Sub: return s_sub(derive(n->lhs, slot), derive(n->rhs, slot));
    case NodeKind::Mul: {
      auto du = derive(n->lhs, slot);
      auto dv = derive(n->rhs, slot);
      return s_add(s_mul(du, n->rhs), s_mul(n->lhs, dv));
    }
    case NodeKind::Div: {
      auto du = derive(n->lhs, slot);
      auto dv = derive(n->rhs, slot);
      if (is_const(dv, 0.0)) return s_div(du, n->rhs);
      return s_div(s_sub(s_mul(du, n->rhs), s_mul(n->lhs, dv)), s_pow(n->rhs, make_const(2.0)));
    }
    case NodeKind::Pow: {
      auto du = derive(n->lhs, slot);
      auto dv = derive(n->rhs, slot);
      const auto& u = n->lhs;
      const auto& v = n->rhs;
      if (is_const(dv, 0.0)) {
        // v * u^(v-1) * u'
        return s_mul(s_mul(v, s_pow(u, s_sub(v, make_const(1.0)))), du);
      }
      if (is_const(du, 0.0)) {
        // u^v * log(u) * v'
        return s_mul(s_mul(n, s_unary(NodeKind::Log, u)), dv);
      }
      return s_mul(n, s_add(s_mul(dv, s_unary(NodeKind::Log, u)), s_div(s_mul(v, du), u)));
    }
    case NodeKind::Neg: return s_neg(derive(n->lhs, slot));
    case NodeKind::Exp: return s_mul(n, derive(n->lhs, slot));
    case NodeKind::Log: return s_div(derive(n->lhs, slot), n->lhs);
    case NodeKind::Sqrt:
      return s_div(derive(n->lhs, slot), s_mul(make_const(2.0), n));
    case NodeKind::Abs: {
      auto du = derive(n->lhs, slot);
      if (is_const(du, 0.0)) return du;
      return s_mul(s_div(n->lhs, n), du);
    }
  }
  return make_const(0.0);
}

void collect_slots(const ExprNode& n, std::set<std::size_t>& out) {
  if (n.kind == NodeKind::Symbol) out.insert(n.slot);
  if (n.lhs) collect_slots(*n.lhs, out);
  if (n.rhs) collect_slots(*n.rhs, out);
}

// ---------- parser ----------

class Parser {
 public:
  Parser(const std::string& text, const SymbolTable& table) : s_(text), table_(table) {}

  NodePtr run() {
    skip();
    if (pos_ >= s_.size()) error("empty expression");
    NodePtr e = expr();
    skip();
    if (pos_ < s_.size()) error(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCategory::Parse, "syntax error at position " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make_node(NodeKind::Add, lhs, term());
      else if (accept('-'))
        lhs = make_node(NodeKind::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make_node(NodeKind::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make_node(NodeKind::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make_node(NodeKind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make_node(NodeKind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (is_reserved(name)) {
        if (!accept('(')) error("expected '(' after " + name);
        NodePtr arg = expr();
        if (!accept(')')) error("expected ')'");
        NodeKind k = name == "exp" ? NodeKind::Exp : name == "log" ? NodeKind::Log : name == "sqrt" ? NodeKind::Sqrt : NodeKind::Abs;
        return make_node(k, arg);
      }
      auto slot = table_.slot_of(name);
      if (!slot) fail(ErrorCategory::Parse, "undeclared identifier '" + name + "'");
      return make_symbol(*slot);
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    error(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string tok = s_.substr(start, pos_ - start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || tok == ".") {
      pos_ = start;
      error("malformed number '" + tok + "'");
    }
    if (!std::isfinite(v)) {
      pos_ = start;
      error("number out of range '" + tok + "'");
    }
    return make_const(v);
  }

  const std::string& s_;
  const SymbolTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

bool is_valid_identifier(const std::string& name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

SymbolTable::SymbolTable(std::vector<std::string> state_vars, std::vector<std::string> params,
                         std::string time_var)
    : state_vars_(std::move(state_vars)), params_(std::move(params)), time_var_(std::move(time_var)) {
  require(!state_vars_.empty(), ErrorCategory::InvalidArgument, "at least one state variable is required");
  auto add = [&](const std::string& name) {
    require(is_valid_identifier(name), ErrorCategory::InvalidArgument, "invalid identifier '" + name + "'");
    require(!is_reserved(name), ErrorCategory::InvalidArgument, "reserved identifier '" + name + "'");
    bool inserted = index_.emplace(name, index_.size()).second;
    require(inserted, ErrorCategory::InvalidArgument, "duplicate identifier '" + name + "'");
  };
  add(time_var_);
  for (const auto& s : state_vars_) add(s);
  for (const auto& p : params_) add(p);
}

std::optional<std::size_t> SymbolTable::slot_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& SymbolTable::slot_name(std::size_t slot) const {
  if (slot == 0) return time_var_;
  if (slot <= state_vars_.size()) return state_vars_[slot - 1];
  return params_.at(slot - 1 - state_vars_.size());
}

CoefficientExpr::CoefficientExpr(NodePtr root, std::shared_ptr<const SymbolTable> table)
    : root_(std::move(root)), table_(std::move(table)) {
  compile();
}

CoefficientExpr CoefficientExpr::constant(double value, std::shared_ptr<const SymbolTable> table) {
  return CoefficientExpr(make_const(value), std::move(table));
}

void CoefficientExpr::compile() {
  program_.clear();
  std::size_t depth = 0;
  stack_depth_ = 0;
  std::function<void(const ExprNode&)> emit = [&](const ExprNode& n) {
    if (n.lhs) emit(*n.lhs);
    if (n.rhs) emit(*n.rhs);
    program_.push_back({n.kind, n.value, n.slot});
    if (n.kind == NodeKind::Constant || n.kind == NodeKind::Symbol)
      ++depth;
    else if (n.rhs)
      --depth;
    stack_depth_ = std::max(stack_depth_, depth);
  };
  emit(*root_);
}

double CoefficientExpr::evaluate_slots(const double* slots) const {
  constexpr std::size_t kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (stack_depth_ > kInline) {
    heap.resize(stack_depth_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  bool ok = true;
  for (const Instr& in : program_) {
    switch (in.op) {
      case NodeKind::Constant: stack[sp++] = in.value; break;
      case NodeKind::Symbol: stack[sp++] = slots[in.slot]; break;
      case NodeKind::Add: --sp; stack[sp - 1] += stack[sp]; break;
      case NodeKind::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case NodeKind::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case NodeKind::Div:
      case NodeKind::Pow: {
        --sp;
        double out = 0.0;
        ok = apply_binary(in.op, stack[sp - 1], stack[sp], out) && ok;
        stack[sp - 1] = out;
        break;
      }
      case NodeKind::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      default: {
        double out = 0.0;
        ok = apply_unary(in.op, stack[sp - 1], out) && ok;
        stack[sp - 1] = out;
        break;
      }
    }
  }
  if (!ok) {
    walk(*root_, slots, *table_);  // throws with the offending node
    fail(ErrorCategory::Internal, "inconsistent domain check in compiled expression");
  }
  return stack[0];
}

double CoefficientExpr::evaluate(const std::map<std::string, double>& bindings) const {
  std::vector<double> slots(table_->slot_count(), 0.0);
  for (std::size_t s : free_slots()) {
    const std::string& name = table_->slot_name(s);
    auto it = bindings.find(name);
    if (it == bindings.end())
      fail(ErrorCategory::InvalidArgument, "missing binding for '" + name + "'");
    slots[s] = it->second;
  }
  return evaluate_slots(slots.data());
}

CoefficientExpr CoefficientExpr::differentiate(const std::string& wrt) const {
  auto slot = table_->slot_of(wrt);
  if (!slot) fail(ErrorCategory::InvalidArgument, "cannot differentiate with respect to undeclared '" + wrt + "'");
  return differentiate_slot(*slot);
}

CoefficientExpr CoefficientExpr::differentiate_slot(std::size_t slot) const {
  return CoefficientExpr(derive(root_, slot), table_);
}

std::string CoefficientExpr::to_string() const {
  std::string out;
  print(*root_, table_.get(), out);
  return out;
}

std::set<std::size_t> CoefficientExpr::free_slots() const {
  std::set<std::size_t> out;
  collect_slots(*root_, out);
  return out;
}

std::set<std::string> CoefficientExpr::free_symbols() const {
  std::set<std::string> out;
  for (std::size_t s : free_slots()) out.insert(table_->slot_name(s));
  return out;
}

bool CoefficientExpr::is_constant() const noexcept { return free_slots().empty(); }

bool CoefficientExpr::is_zero() const noexcept { return is_const(root_, 0.0); }

CoefficientExpr parse_expr(const std::string& text, std::shared_ptr<const SymbolTable> table) {
  require(table != nullptr, ErrorCategory::InvalidArgument, "symbol table is required");
  Parser p(text, *table);
  return CoefficientExpr(p.run(), std::move(table));
}

bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Constant) return a->value == b->value;
  if (a->kind == NodeKind::Symbol) return a->slot == b->slot;
  return same_tree(a->lhs, b->lhs) && same_tree(a->rhs, b->rhs);
}

}  // namespace levyfit
