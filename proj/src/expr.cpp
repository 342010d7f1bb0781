#include "rheoflame/expr.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "rheoflame/format.hpp"

namespace rheoflame {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

EvalError::EvalError(const std::string& subexpression, const std::string& message)
    : std::runtime_error("domain error in '" + subexpression + "': " + message),
      subexpression_(subexpression) {}

namespace {

struct FunctionInfo {
  std::string_view name;
  Function function;
  int arity;
};

constexpr std::array<FunctionInfo, 10> kFunctions{{
    {"sin", Function::sin, 1},
    {"cos", Function::cos, 1},
    {"tan", Function::tan, 1},
    {"sqrt", Function::sqrt, 1},
    {"exp", Function::exp, 1},
    {"log", Function::log, 1},
    {"abs", Function::abs, 1},
    {"atan2", Function::atan2, 2},
    {"min", Function::min, 2},
    {"max", Function::max, 2},
}};

std::optional<FunctionInfo> lookup_function(std::string_view name) {
  for (const auto& info : kFunctions) {
    if (info.name == name) return info;
  }
  return std::nullopt;
}

enum class TokenKind { number, identifier, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  TokenKind kind;
  std::size_t offset;
  std::string_view text;
  double value = 0.0;
};

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::number: return "number";
    case TokenKind::identifier: return "identifier";
    case TokenKind::plus: return "'+'";
    case TokenKind::minus: return "'-'";
    case TokenKind::star: return "'*'";
    case TokenKind::slash: return "'/'";
    case TokenKind::caret: return "'^'";
    case TokenKind::lparen: return "'('";
    case TokenKind::rparen: return "')'";
    case TokenKind::comma: return "','";
    case TokenKind::end: return "end of input";
  }
  return "token";
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
        if (j >= text.size() || !is_digit(text[j])) {
          throw ParseError(j, "expected exponent digits");
        }
        while (j < text.size() && is_digit(text[j])) ++j;
        i = j;
      }
      Token tok{TokenKind::number, start, text.substr(start, i - start)};
      // from_chars rejects a leading '.', which the grammar allows.
      std::string buffer(tok.text);
      if (buffer.front() == '.') buffer.insert(buffer.begin(), '0');
      const auto [ptr, ec] = std::from_chars(buffer.data(), buffer.data() + buffer.size(), tok.value);
      if (ec != std::errc() || ptr != buffer.data() + buffer.size()) {
        throw ParseError(start, "malformed number '" + std::string(tok.text) + "'");
      }
      tokens.push_back(tok);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < text.size() && is_ident_char(text[i])) ++i;
      tokens.push_back({TokenKind::identifier, start, text.substr(start, i - start)});
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '+': kind = TokenKind::plus; break;
      case '-': kind = TokenKind::minus; break;
      case '*': kind = TokenKind::star; break;
      case '/': kind = TokenKind::slash; break;
      case '^': kind = TokenKind::caret; break;
      case '(': kind = TokenKind::lparen; break;
      case ')': kind = TokenKind::rparen; break;
      case ',': kind = TokenKind::comma; break;
      default:
        throw ParseError(start, std::string("unexpected character '") + c + "'");
    }
    tokens.push_back({kind, start, text.substr(start, 1)});
    ++i;
  }
  tokens.push_back({TokenKind::end, text.size(), {}});
  return tokens;
}

// Grammar, loosest to tightest:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right-associative
//   primary := number | identifier | identifier '(' args ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  std::pair<std::vector<ExprNode>, int> run() {
    const int root = sum();
    if (peek().kind != TokenKind::end) {
      fail("expected operator or end of input");
    }
    return {std::move(nodes_), root};
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& tok = peek();
    std::string found = tok.kind == TokenKind::end ? "end of input" : "'" + std::string(tok.text) + "'";
    throw ParseError(tok.offset, expected + ", found " + found);
  }

  void expect(TokenKind kind) {
    if (peek().kind != kind) fail("expected " + std::string(describe(kind)));
    advance();
  }

  int add(ExprNode node) {
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(NodeKind kind, int lhs, int rhs) {
    ExprNode node;
    node.kind = kind;
    node.lhs = lhs;
    node.rhs = rhs;
    return add(node);
  }

  int sum() {
    int lhs = product();
    while (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus) {
      const NodeKind kind = advance().kind == TokenKind::plus ? NodeKind::add : NodeKind::subtract;
      lhs = binary(kind, lhs, product());
    }
    return lhs;
  }

  int product() {
    int lhs = unary();
    while (peek().kind == TokenKind::star || peek().kind == TokenKind::slash) {
      const NodeKind kind = advance().kind == TokenKind::star ? NodeKind::multiply : NodeKind::divide;
      lhs = binary(kind, lhs, unary());
    }
    return lhs;
  }

  int unary() {
    if (peek().kind == TokenKind::minus) {
      advance();
      ExprNode node;
      node.kind = NodeKind::negate;
      node.lhs = unary();
      return add(node);
    }
    return power();
  }

  int power() {
    const int base = primary();
    if (peek().kind == TokenKind::caret) {
      advance();
      return binary(NodeKind::power, base, unary());
    }
    return base;
  }

  int primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case TokenKind::number: {
        advance();
        ExprNode node;
        node.kind = NodeKind::number;
        node.value = tok.value;
        return add(node);
      }
      case TokenKind::lparen: {
        advance();
        const int inner = sum();
        expect(TokenKind::rparen);
        return inner;
      }
      case TokenKind::identifier:
        return identifier();
      default:
        fail("expected expression");
    }
  }

  int identifier() {
    const Token tok = advance();
    ExprNode node;
    if (tok.text == "t" || tok.text == "u" || tok.text == "v") {
      node.kind = NodeKind::variable;
      node.variable = tok.text == "t" ? Variable::t : (tok.text == "u" ? Variable::u : Variable::v);
      return add(node);
    }
    if (tok.text == "pi") {
      node.kind = NodeKind::pi;
      return add(node);
    }
    const auto info = lookup_function(tok.text);
    if (!info) {
      throw ParseError(tok.offset, "unknown identifier '" + std::string(tok.text) + "'");
    }
    if (peek().kind != TokenKind::lparen) {
      fail("expected '(' after function name '" + std::string(tok.text) + "'");
    }
    advance();
    std::vector<int> args;
    args.push_back(sum());
    while (peek().kind == TokenKind::comma) {
      advance();
      args.push_back(sum());
    }
    if (static_cast<int>(args.size()) != info->arity) {
      throw ParseError(tok.offset, "function '" + std::string(tok.text) + "' takes " +
                                       std::to_string(info->arity) + " argument(s), got " +
                                       std::to_string(args.size()));
    }
    expect(TokenKind::rparen);
    node.kind = NodeKind::call;
    node.function = info->function;
    node.lhs = args[0];
    if (args.size() > 1) node.rhs = args[1];
    return add(node);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<ExprNode> nodes_;
};

void render(const std::vector<ExprNode>& nodes, int index, std::string& out) {
  const ExprNode& n = nodes[index];
  auto infix = [&](const char* op) {
    out += '(';
    render(nodes, n.lhs, out);
    out += op;
    render(nodes, n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::number: out += format_number(n.value); break;
    case NodeKind::pi: out += "pi"; break;
    case NodeKind::variable:
      out += n.variable == Variable::t ? 't' : (n.variable == Variable::u ? 'u' : 'v');
      break;
    case NodeKind::negate:
      out += "(-";
      render(nodes, n.lhs, out);
      out += ')';
      break;
    case NodeKind::add: infix(" + "); break;
    case NodeKind::subtract: infix(" - "); break;
    case NodeKind::multiply: infix(" * "); break;
    case NodeKind::divide: infix(" / "); break;
    case NodeKind::power: infix(" ^ "); break;
    case NodeKind::call:
      out += function_name(n.function);
      out += '(';
      render(nodes, n.lhs, out);
      if (n.rhs >= 0) {
        out += ", ";
        render(nodes, n.rhs, out);
      }
      out += ')';
      break;
  }
}

std::string render(const std::vector<ExprNode>& nodes, int index) {
  std::string out;
  render(nodes, index, out);
  return out;
}

double evaluate(const std::vector<ExprNode>& nodes, int index, double t, double u, double v) {
  const ExprNode& n = nodes[index];
  auto domain_error = [&](const std::string& message) -> EvalError {
    return EvalError(render(nodes, index), message);
  };
  switch (n.kind) {
    case NodeKind::number: return n.value;
    case NodeKind::pi: return std::numbers::pi;
    case NodeKind::variable:
      return n.variable == Variable::t ? t : (n.variable == Variable::u ? u : v);
    case NodeKind::negate: return -evaluate(nodes, n.lhs, t, u, v);
    case NodeKind::add: return evaluate(nodes, n.lhs, t, u, v) + evaluate(nodes, n.rhs, t, u, v);
    case NodeKind::subtract: return evaluate(nodes, n.lhs, t, u, v) - evaluate(nodes, n.rhs, t, u, v);
    case NodeKind::multiply: return evaluate(nodes, n.lhs, t, u, v) * evaluate(nodes, n.rhs, t, u, v);
    case NodeKind::divide: {
      const double num = evaluate(nodes, n.lhs, t, u, v);
      const double den = evaluate(nodes, n.rhs, t, u, v);
      if (den == 0.0) throw domain_error("division by zero");
      return num / den;
    }
    case NodeKind::power: {
      const double base = evaluate(nodes, n.lhs, t, u, v);
      const double exponent = evaluate(nodes, n.rhs, t, u, v);
      if (base < 0.0 && std::trunc(exponent) != exponent) {
        throw domain_error("negative base with non-integer exponent");
      }
      if (base == 0.0 && exponent < 0.0) throw domain_error("zero raised to a negative power");
      return std::pow(base, exponent);
    }
    case NodeKind::call: {
      const double x = evaluate(nodes, n.lhs, t, u, v);
      switch (n.function) {
        case Function::sin: return std::sin(x);
        case Function::cos: return std::cos(x);
        case Function::tan: return std::tan(x);
        case Function::sqrt:
          if (x < 0.0) throw domain_error("square root of a negative number");
          return std::sqrt(x);
        case Function::exp: {
          const double r = std::exp(x);
          if (!std::isfinite(r)) throw domain_error("exponential overflow");
          return r;
        }
        case Function::log:
          if (x <= 0.0) throw domain_error("logarithm of a non-positive number");
          return std::log(x);
        case Function::abs: return std::abs(x);
        case Function::atan2: return std::atan2(x, evaluate(nodes, n.rhs, t, u, v));
        case Function::min: return std::min(x, evaluate(nodes, n.rhs, t, u, v));
        case Function::max: return std::max(x, evaluate(nodes, n.rhs, t, u, v));
      }
    }
  }
  return 0.0;
}

bool same_tree(const std::vector<ExprNode>& a, int ia, const std::vector<ExprNode>& b, int ib) {
  if ((ia < 0) != (ib < 0)) return false;
  if (ia < 0) return true;
  const ExprNode& x = a[ia];
  const ExprNode& y = b[ib];
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::number:
      if (x.value != y.value) return false;
      break;
    case NodeKind::variable:
      if (x.variable != y.variable) return false;
      break;
    case NodeKind::call:
      if (x.function != y.function) return false;
      break;
    default: break;
  }
  return same_tree(a, x.lhs, b, y.lhs) && same_tree(a, x.rhs, b, y.rhs);
}

}  // namespace

int function_arity(Function f) {
  for (const auto& info : kFunctions) {
    if (info.function == f) return info.arity;
  }
  return 0;
}

std::string_view function_name(Function f) {
  for (const auto& info : kFunctions) {
    if (info.function == f) return info.name;
  }
  return "?";
}

Expr::Expr() : Expr(parse("0")) {}

Expr::Expr(std::shared_ptr<const std::vector<ExprNode>> nodes, int root)
    : nodes_(std::move(nodes)), root_(root) {}

double Expr::eval(double t, double u, double v) const { return evaluate(*nodes_, root_, t, u, v); }

std::string Expr::to_string() const { return render(*nodes_, root_); }

bool Expr::operator==(const Expr& other) const {
  return same_tree(*nodes_, root_, *other.nodes_, other.root_);
}

Expr parse(std::string_view text) {
  auto [nodes, root] = Parser(text).run();
  return Expr(std::make_shared<const std::vector<ExprNode>>(std::move(nodes)), root);
}

}  // namespace rheoflame
