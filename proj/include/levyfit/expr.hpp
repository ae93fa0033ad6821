#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace levyfit {

/// Names visible to coefficient expressions.
///
/// Evaluation slots are laid out as [time, state_vars..., params...].
class SymbolTable {
 public:
  SymbolTable(std::vector<std::string> state_vars, std::vector<std::string> params,
              std::string time_var = "t");

  const std::vector<std::string>& state_vars() const noexcept { return state_vars_; }
  const std::vector<std::string>& params() const noexcept { return params_; }
  const std::string& time_var() const noexcept { return time_var_; }

  std::size_t slot_count() const noexcept { return 1 + state_vars_.size() + params_.size(); }
  std::size_t state_slot(std::size_t k) const noexcept { return 1 + k; }
  std::size_t param_slot(std::size_t k) const noexcept { return 1 + state_vars_.size() + k; }
  /// Slot index of a name, or nullopt when undeclared.
  std::optional<std::size_t> slot_of(const std::string& name) const;
  const std::string& slot_name(std::size_t slot) const;

 private:
  std::vector<std::string> state_vars_;
  std::vector<std::string> params_;
  std::string time_var_;
  std::map<std::string, std::size_t> index_;
};

bool is_valid_identifier(const std::string& name);

enum class NodeKind { Constant, Symbol, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt, Abs };

struct ExprNode {
  NodeKind kind;
  double value = 0.0;      // Constant
  std::size_t slot = 0;    // Symbol
  std::shared_ptr<const ExprNode> lhs;  // operand of unary nodes
  std::shared_ptr<const ExprNode> rhs;
};

using NodePtr = std::shared_ptr<const ExprNode>;

/// Immutable coefficient expression over a SymbolTable.
class CoefficientExpr {
 public:
  CoefficientExpr(NodePtr root, std::shared_ptr<const SymbolTable> table);

  static CoefficientExpr constant(double value, std::shared_ptr<const SymbolTable> table);

  const NodePtr& root() const noexcept { return root_; }
  const std::shared_ptr<const SymbolTable>& table() const noexcept { return table_; }

  /// Evaluate with named bindings; every free symbol must be bound.
  double evaluate(const std::map<std::string, double>& bindings) const;
  /// Evaluate against a full slot vector (see SymbolTable). Throws Domain on
  /// log of nonpositive, sqrt of negative, division by zero, 0^negative or NaN power.
  double evaluate_slots(const double* slots) const;

  CoefficientExpr differentiate(const std::string& wrt) const;
  CoefficientExpr differentiate_slot(std::size_t slot) const;

  std::string to_string() const;
  std::set<std::size_t> free_slots() const;
  std::set<std::string> free_symbols() const;
  bool is_constant() const noexcept;
  /// True when the tree is the literal constant 0.
  bool is_zero() const noexcept;

 private:
  struct Instr {
    NodeKind op;
    double value;
    std::size_t slot;
  };
  void compile();

  NodePtr root_;
  std::shared_ptr<const SymbolTable> table_;
  std::vector<Instr> program_;
  std::size_t stack_depth_ = 0;
};

CoefficientExpr parse_expr(const std::string& text, std::shared_ptr<const SymbolTable> table);

/// Structural equality of two trees.
bool same_tree(const NodePtr& a, const NodePtr& b);

}  // namespace levyfit
