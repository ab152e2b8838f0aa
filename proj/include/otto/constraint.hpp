#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "otto/jet.hpp"

namespace otto {

// Constraint language for G(Ec, Eh) = g0, where Ec = |E_c| and Eh = |E_h|.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// Identifiers are the variables Ec and Eh, declared parameters, the reserved
// parameter eta_c, and the functions sqrt, log, exp, inv.

using ParamMap = std::map<std::string, double, std::less<>>;

/// Name of the reserved Carnot-efficiency parameter.
inline constexpr std::string_view kEtaC = "eta_c";

enum class TokenKind { Number, Identifier, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
  std::size_t position = 0;  // 1-based column of the first character
};

/// Throws ParseError on an illegal character or malformed number.
std::vector<Token> tokenize(std::string_view text);

enum class Variable { Ec, Eh };
enum class Function { Sqrt, Log, Exp, Inv };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Variable, Parameter, Negate, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  Variable variable = Variable::Ec;
  Function function = Function::Sqrt;
  std::string name;  // parameter name
  NodePtr lhs;       // operand of Negate and Call
  NodePtr rhs;
};

bool structurally_equal(const Node& a, const Node& b);

/// Source text that parses back to a structurally equal tree.
std::string print(const Node& node);

/// G and its partials up to second order. The first index counts derivatives
/// with respect to Ec, the second with respect to Eh.
struct PartialDerivs {
  double g00 = 0.0;
  double g10 = 0.0;
  double g01 = 0.0;
  double g20 = 0.0;
  double g11 = 0.0;
  double g02 = 0.0;
};

class ConstraintExpr {
 public:
  /// Parses `text`. Identifiers must be Ec, Eh, eta_c, a function name, or a
  /// key of `params`.
  static ConstraintExpr parse(std::string_view text, ParamMap params = {});

  const Node& ast() const noexcept { return *root_; }
  const std::string& source() const noexcept { return source_; }
  const ParamMap& params() const noexcept { return params_; }

  /// Copy with `name` bound to `value`; the tree is shared.
  ConstraintExpr with_param(std::string_view name, double value) const;

  /// Whether parameter `name` occurs in the tree.
  bool references(std::string_view name) const;

  /// G(ec, eh). Throws DomainError or UnboundParameter.
  double eval(double ec, double eh) const;

  /// Exact-to-rounding partials by second-order forward differentiation.
  PartialDerivs partials(double ec, double eh) const;

  template <class T>
  T evaluate(const T& ec, const T& eh) const;

 private:
  ConstraintExpr(NodePtr root, std::string source, ParamMap params)
      : root_(std::move(root)), source_(std::move(source)), params_(std::move(params)) {}

  friend ConstraintExpr parse(const std::vector<Token>&, std::string_view, ParamMap);

  NodePtr root_;
  std::string source_;
  ParamMap params_;
};

/// Parses an already tokenized source. `source` is kept for reporting.
ConstraintExpr parse(const std::vector<Token>& tokens, std::string_view source,
                     ParamMap params = {});

/// Numeric symmetry test |G(x, y) - G(y, x)| <= 1e-10 (1 + |G(x, y)|) on a
/// Halton sample of [0.1, 10]^2. Samples outside the domain are skipped;
/// Indeterminate is thrown when every sample is skipped.
bool is_symmetric(const ConstraintExpr& c, int sample_count = 64);

/// Named constraints: hot_norm, cold_norm, product, alpha_linear (alpha),
/// d_linear (d), s_linear (s), inverse_sum.
ConstraintExpr preset(std::string_view name, const ParamMap& params = {});

const std::vector<std::string>& preset_names();

}  // namespace otto
