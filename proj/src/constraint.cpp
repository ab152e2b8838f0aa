#include "otto/constraint.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

#include "otto/errors.hpp"

namespace otto {

// ---------------------------------------------------------------------------
// Lexer

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

  while (i < text.size()) {
    const char c = text[i];
    const std::size_t pos = i + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      std::size_t j = i;
      while (j < text.size() && is_digit(text[j])) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && is_digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k >= text.size() || !is_digit(text[k])) {
          throw ParseError("malformed exponent in number", j + 1);
        }
        while (k < text.size() && is_digit(text[k])) ++k;
        j = k;
      }
      Token t{TokenKind::Number, std::string(text.substr(i, j - i)), 0.0, pos};
      const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, t.number);
      if (ec != std::errc() || ptr != text.data() + j || !std::isfinite(t.number)) {
        throw ParseError("number out of range", pos);
      }
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      out.push_back({TokenKind::Identifier, std::string(text.substr(i, j - i)), 0.0, pos});
      i = j;
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      case '^': kind = TokenKind::Caret; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      default:
        throw ParseError(std::string("illegal character '") + c + "'", pos);
    }
    out.push_back({kind, std::string(1, c), 0.0, pos});
    ++i;
  }
  out.push_back({TokenKind::End, "", 0.0, text.size() + 1});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_unary(Node::Kind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

bool function_from_name(std::string_view name, Function& f) {
  if (name == "sqrt") f = Function::Sqrt;
  else if (name == "log") f = Function::Log;
  else if (name == "exp") f = Function::Exp;
  else if (name == "inv") f = Function::Inv;
  else return false;
  return true;
}

std::string_view function_name(Function f) {
  switch (f) {
    case Function::Sqrt: return "sqrt";
    case Function::Log: return "log";
    case Function::Exp: return "exp";
    case Function::Inv: return "inv";
  }
  return "?";
}

std::string describe(const Token& t) {
  return t.kind == TokenKind::End ? std::string("end of input") : "'" + t.text + "'";
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const ParamMap& params)
      : tokens_(tokens), params_(params) {}

  NodePtr parse_all() {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::End) {
      throw ParseError("token stream is not terminated", 1);
    }
    NodePtr root = expr();
    if (peek().kind != TokenKind::End) {
      throw ParseError("unexpected " + describe(peek()), peek().position);
    }
    return root;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        throw ParseError("expression nested too deeply", parser.peek().position);
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  NodePtr expr() {
    DepthGuard guard(*this);
    NodePtr lhs = term();
    while (peek().kind == TokenKind::Plus || peek().kind == TokenKind::Minus) {
      const auto kind = advance().kind == TokenKind::Plus ? Node::Kind::Add : Node::Kind::Sub;
      lhs = make_binary(kind, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == TokenKind::Star || peek().kind == TokenKind::Slash) {
      const auto kind = advance().kind == TokenKind::Star ? Node::Kind::Mul : Node::Kind::Div;
      lhs = make_binary(kind, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == TokenKind::Minus) {
      DepthGuard guard(*this);
      advance();
      return make_unary(Node::Kind::Negate, unary());
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == TokenKind::Caret) {
      DepthGuard guard(*this);
      advance();
      return make_binary(Node::Kind::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = advance();
    switch (t.kind) {
      case TokenKind::Number:
        return make_number(t.number);
      case TokenKind::LParen: {
        NodePtr inner = expr();
        expect_rparen(t);
        return inner;
      }
      case TokenKind::Identifier:
        return identifier(t);
      default:
        throw ParseError("unexpected " + describe(t), t.position);
    }
  }

  NodePtr identifier(const Token& t) {
    auto n = std::make_shared<Node>();
    Function f;
    if (function_from_name(t.text, f)) {
      if (peek().kind != TokenKind::LParen) {
        throw ParseError("function '" + t.text + "' needs an argument in parentheses",
                         peek().position);
      }
      const Token& open = advance();
      n->kind = Node::Kind::Call;
      n->function = f;
      n->lhs = expr();
      expect_rparen(open);
      return n;
    }
    if (t.text == "Ec" || t.text == "Eh") {
      n->kind = Node::Kind::Variable;
      n->variable = t.text == "Ec" ? Variable::Ec : Variable::Eh;
      return n;
    }
    if (t.text == kEtaC || params_.contains(t.text)) {
      n->kind = Node::Kind::Parameter;
      n->name = t.text;
      return n;
    }
    throw ParseError("unknown identifier '" + t.text + "'", t.position);
  }

  void expect_rparen(const Token& open) {
    if (peek().kind != TokenKind::RParen) {
      throw ParseError("expected ')' to close '(' at position " + std::to_string(open.position) +
                           ", found " + describe(peek()),
                       peek().position);
    }
    advance();
  }

  const std::vector<Token>& tokens_;
  static constexpr int kMaxDepth = 200;

  const ParamMap& params_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ConstraintExpr parse(const std::vector<Token>& tokens, std::string_view source, ParamMap params) {
  NodePtr root = Parser(tokens, params).parse_all();
  return ConstraintExpr(std::move(root), std::string(source), std::move(params));
}

ConstraintExpr ConstraintExpr::parse(std::string_view text, ParamMap params) {
  return otto::parse(tokenize(text), text, std::move(params));
}

// ---------------------------------------------------------------------------
// Structure and printing

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      return a.number == b.number;
    case Node::Kind::Variable:
      return a.variable == b.variable;
    case Node::Kind::Parameter:
      return a.name == b.name;
    case Node::Kind::Negate:
      return structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::Call:
      return a.function == b.function && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

namespace {

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Add:
    case Node::Kind::Sub: return 1;
    case Node::Kind::Mul:
    case Node::Kind::Div: return 2;
    case Node::Kind::Negate: return 3;
    case Node::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string wrap(const Node& n, bool parens) {
  return parens ? "(" + print(n) + ")" : print(n);
}

}  // namespace

std::string print(const Node& n) {
  const int p = precedence(n);
  switch (n.kind) {
    case Node::Kind::Number: {
      // Negative literals only arise from substituted values.
      std::string s = format_number(n.number);
      return n.number < 0.0 ? "(" + s + ")" : s;
    }
    case Node::Kind::Variable:
      return n.variable == Variable::Ec ? "Ec" : "Eh";
    case Node::Kind::Parameter:
      return n.name;
    case Node::Kind::Call:
      return std::string(function_name(n.function)) + "(" + print(*n.lhs) + ")";
    case Node::Kind::Negate:
      return "-" + wrap(*n.lhs, precedence(*n.lhs) < p);
    case Node::Kind::Pow:
      return wrap(*n.lhs, precedence(*n.lhs) <= p) + "^" + wrap(*n.rhs, precedence(*n.rhs) < 3);
    default: {
      const char* op = n.kind == Node::Kind::Add   ? " + "
                       : n.kind == Node::Kind::Sub ? " - "
                       : n.kind == Node::Kind::Mul ? "*"
                                                   : "/";
      return wrap(*n.lhs, precedence(*n.lhs) < p) + op + wrap(*n.rhs, precedence(*n.rhs) <= p);
    }
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double value_of(double x) { return x; }
double value_of(const Jet2& x) { return x.v; }

template <class T>
T checked(T x, const char* what) {
  if (!std::isfinite(value_of(x))) throw DomainError(std::string("non-finite value in ") + what);
  return x;
}

double raise(double a, double b) { return std::pow(a, b); }
Jet2 raise(const Jet2& a, const Jet2& b) { return pow(a, b); }

bool is_constant(double) { return true; }
bool is_constant(const Jet2& x) { return x.is_constant(); }

template <class T>
T eval_node(const Node& n, const T& ec, const T& eh, const ParamMap& params) {
  using std::exp;
  using std::log;
  using std::sqrt;
  switch (n.kind) {
    case Node::Kind::Number:
      return T(n.number);
    case Node::Kind::Variable:
      return n.variable == Variable::Ec ? ec : eh;
    case Node::Kind::Parameter: {
      const auto it = params.find(n.name);
      if (it == params.end()) throw UnboundParameter(n.name);
      return T(it->second);
    }
    case Node::Kind::Negate:
      return -eval_node(*n.lhs, ec, eh, params);
    case Node::Kind::Add:
      return checked(eval_node(*n.lhs, ec, eh, params) + eval_node(*n.rhs, ec, eh, params), "sum");
    case Node::Kind::Sub:
      return checked(eval_node(*n.lhs, ec, eh, params) - eval_node(*n.rhs, ec, eh, params),
                     "difference");
    case Node::Kind::Mul:
      return checked(eval_node(*n.lhs, ec, eh, params) * eval_node(*n.rhs, ec, eh, params),
                     "product");
    case Node::Kind::Div: {
      const T num = eval_node(*n.lhs, ec, eh, params);
      const T den = eval_node(*n.rhs, ec, eh, params);
      if (value_of(den) == 0.0) throw DomainError("division by zero");
      return checked(num / den, "quotient");
    }
    case Node::Kind::Pow: {
      const T base = eval_node(*n.lhs, ec, eh, params);
      const T expo = eval_node(*n.rhs, ec, eh, params);
      const double b = value_of(base);
      const double p = value_of(expo);
      if (b < 0.0 && (!is_constant(expo) || p != std::floor(p))) {
        throw DomainError("negative base raised to a non-integer power");
      }
      if (b == 0.0 && (p < 0.0 || !is_constant(expo))) {
        throw DomainError("zero raised to a negative or variable power");
      }
      return checked(raise(base, expo), "power");
    }
    case Node::Kind::Call: {
      const T arg = eval_node(*n.lhs, ec, eh, params);
      const double a = value_of(arg);
      switch (n.function) {
        case Function::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of a negative number");
          return checked(sqrt(arg), "sqrt");
        case Function::Log:
          if (a <= 0.0) throw DomainError("log of a non-positive number");
          return checked(log(arg), "log");
        case Function::Exp:
          return checked(exp(arg), "exp");
        case Function::Inv:
          if (a == 0.0) throw DomainError("inv of zero");
          return checked(T(1.0) / arg, "inv");
      }
    }
  }
  throw DomainError("corrupt expression tree");
}

bool references_param(const Node& n, std::string_view name) {
  if (n.kind == Node::Kind::Parameter) return n.name == name;
  return (n.lhs && references_param(*n.lhs, name)) || (n.rhs && references_param(*n.rhs, name));
}

}  // namespace

template <class T>
T ConstraintExpr::evaluate(const T& ec, const T& eh) const {
  return eval_node(*root_, ec, eh, params_);
}

template double ConstraintExpr::evaluate<double>(const double&, const double&) const;
template Jet2 ConstraintExpr::evaluate<Jet2>(const Jet2&, const Jet2&) const;

double ConstraintExpr::eval(double ec, double eh) const {
  const double g = evaluate(ec, eh);
  if (!std::isfinite(g)) throw DomainError("constraint value is not finite");
  return g;
}

PartialDerivs ConstraintExpr::partials(double ec, double eh) const {
  const Jet2 g = evaluate(Jet2::variable_x(ec), Jet2::variable_y(eh));
  if (!g.is_finite()) {
    throw DomainError("constraint is not twice differentiable at (" + std::to_string(ec) + ", " +
                      std::to_string(eh) + ")");
  }
  return {g.v, g.dx, g.dy, g.dxx, g.dxy, g.dyy};
}

ConstraintExpr ConstraintExpr::with_param(std::string_view name, double value) const {
  ParamMap params = params_;
  params.insert_or_assign(std::string(name), value);
  return ConstraintExpr(root_, source_, std::move(params));
}

bool ConstraintExpr::references(std::string_view name) const {
  return references_param(*root_, name);
}

// ---------------------------------------------------------------------------
// Symmetry

namespace {

double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

bool is_symmetric(const ConstraintExpr& c, int sample_count) {
  int used = 0;
  for (int i = 1; i <= sample_count; ++i) {
    const double x = 0.1 + 9.9 * radical_inverse(static_cast<unsigned>(i), 2);
    const double y = 0.1 + 9.9 * radical_inverse(static_cast<unsigned>(i), 3);
    double gxy = 0.0;
    double gyx = 0.0;
    try {
      gxy = c.eval(x, y);
      gyx = c.eval(y, x);
    } catch (const DomainError&) {
      continue;
    }
    ++used;
    if (std::abs(gxy - gyx) > 1e-10 * (1.0 + std::abs(gxy))) return false;
  }
  if (used == 0) throw Indeterminate("symmetry test: every sample left the constraint domain");
  return true;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

double require_param(const ParamMap& params, std::string_view preset, std::string_view name) {
  const auto it = params.find(name);
  if (it == params.end()) {
    throw InvalidArgument("preset '" + std::string(preset) + "' needs parameter '" +
                          std::string(name) + "'");
  }
  return it->second;
}

// "a*Ec + b*Eh" with the signs folded into the operator.
std::string linear_text(double a, double b) {
  std::string s = format_number(a) + "*Ec";
  s += b < 0.0 ? " - " + format_number(-b) : " + " + format_number(b);
  return s + "*Eh";
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"hot_norm", "cold_norm",   "product",
                                                 "alpha_linear", "d_linear", "s_linear",
                                                 "inverse_sum"};
  return names;
}

ConstraintExpr preset(std::string_view name, const ParamMap& params) {
  if (name == "hot_norm") return ConstraintExpr::parse("Eh");
  if (name == "cold_norm") return ConstraintExpr::parse("Ec");
  if (name == "product") return ConstraintExpr::parse("Ec*Eh");
  if (name == "inverse_sum") return ConstraintExpr::parse("1/Ec + 1/Eh");
  if (name == "alpha_linear") {
    const double alpha = require_param(params, name, "alpha");
    return ConstraintExpr::parse(linear_text(alpha, 1.0 - alpha));
  }
  if (name == "d_linear") {
    const double d = require_param(params, name, "d");
    const double k = 1.0 - d;
    return ConstraintExpr::parse(k < 0.0 ? "Ec + " + format_number(-k) + "*Eh"
                                         : "Ec - " + format_number(k) + "*Eh");
  }
  if (name == "s_linear") {
    const double s = require_param(params, name, "s");
    return ConstraintExpr::parse("(s/eta_c)*Ec + (1-s/eta_c)*Eh", {{"s", s}});
  }
  throw InvalidArgument("unknown constraint preset '" + std::string(name) + "'");
}

}  // namespace otto
