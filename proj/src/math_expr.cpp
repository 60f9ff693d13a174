#include "rlvr/math_expr.hpp"

#include <cctype>
#include <vector>

#include "rlvr/error.hpp"

namespace rlvr {
namespace {

// Exponents beyond this magnitude are treated as undefined rather than expanded.
constexpr long kMaxExponent = 4096;

struct Token {
  enum class Type { Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
  Type type;
  Rational value{};
  std::size_t offset = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = i;
      while (i < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
        ++i;
      }
      auto value = parse_decimal(text.substr(start, i - start));
      if (!value) throw ParseError("malformed number at offset " + std::to_string(start));
      tokens.push_back({Token::Type::Number, *value, start});
      continue;
    }
    Token::Type type;
    switch (c) {
      case '+': type = Token::Type::Plus; break;
      case '-': type = Token::Type::Minus; break;
      case '*': type = Token::Type::Star; break;
      case '/': type = Token::Type::Slash; break;
      case '^': type = Token::Type::Caret; break;
      case '(': type = Token::Type::LParen; break;
      case ')': type = Token::Type::RParen; break;
      default:
        throw ParseError(std::string("unknown token '") + c + "' at offset " + std::to_string(i));
    }
    tokens.push_back({type, {}, i});
    ++i;
  }
  tokens.push_back({Token::Type::End, {}, text.size()});
  return tokens;
}

using Node = MathExprTree::Node;
using NodePtr = MathExprTree::NodePtr;
using Op = MathExprTree::Op;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  NodePtr parse() {
    NodePtr root = expression();
    if (peek().type == Token::Type::RParen) throw ParseError("unbalanced ')'");
    if (peek().type != Token::Type::End) throw ParseError("trailing input");
    return root;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  static NodePtr binary(Op op, NodePtr lhs, NodePtr rhs) {
    return std::make_shared<const Node>(Node{MathExprTree::Binary{op, std::move(lhs), std::move(rhs)}});
  }

  NodePtr expression() {
    NodePtr lhs = term();
    while (peek().type == Token::Type::Plus || peek().type == Token::Type::Minus) {
      Op op = advance().type == Token::Type::Plus ? Op::Add : Op::Sub;
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().type == Token::Type::Star || peek().type == Token::Type::Slash) {
      Op op = advance().type == Token::Type::Star ? Op::Mul : Op::Div;
      lhs = binary(op, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().type == Token::Type::Minus) {
      advance();
      return std::make_shared<const Node>(Node{MathExprTree::Negate{unary()}});
    }
    if (peek().type == Token::Type::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().type == Token::Type::Caret) {
      advance();
      return binary(Op::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token& tok = advance();
    switch (tok.type) {
      case Token::Type::Number:
        return std::make_shared<const Node>(Node{MathExprTree::Number{tok.value}});
      case Token::Type::LParen: {
        NodePtr inner = expression();
        if (peek().type != Token::Type::RParen) throw ParseError("unbalanced '('");
        advance();
        return inner;
      }
      case Token::Type::End:
        throw ParseError("empty operand at end of input");
      default:
        throw ParseError("empty operand at offset " + std::to_string(tok.offset));
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::optional<Rational> integer_power(const Rational& base, const Rational& exponent) {
  if (boost::multiprecision::denominator(exponent) != 1) return std::nullopt;
  BigInt e = boost::multiprecision::numerator(exponent);
  if (e > kMaxExponent || e < -kMaxExponent) return std::nullopt;
  long n = e.convert_to<long>();
  if (n < 0 && base == 0) return std::nullopt;
  Rational magnitude(boost::multiprecision::pow(boost::multiprecision::numerator(base),
                                                static_cast<unsigned>(n < 0 ? -n : n)),
                     boost::multiprecision::pow(boost::multiprecision::denominator(base),
                                                static_cast<unsigned>(n < 0 ? -n : n)));
  if (n < 0) return Rational(1) / magnitude;
  return magnitude;
}

std::optional<Rational> eval(const Node& node) {
  if (const auto* number = std::get_if<MathExprTree::Number>(&node.kind)) return number->value;
  if (const auto* neg = std::get_if<MathExprTree::Negate>(&node.kind)) {
    auto v = eval(*neg->operand);
    if (!v) return std::nullopt;
    return Rational(-*v);
  }
  const auto& bin = std::get<MathExprTree::Binary>(node.kind);
  auto lhs = eval(*bin.lhs);
  if (!lhs) return std::nullopt;
  auto rhs = eval(*bin.rhs);
  if (!rhs) return std::nullopt;
  switch (bin.op) {
    case Op::Add: return Rational(*lhs + *rhs);
    case Op::Sub: return Rational(*lhs - *rhs);
    case Op::Mul: return Rational(*lhs * *rhs);
    case Op::Div:
      if (*rhs == 0) return std::nullopt;
      return Rational(*lhs / *rhs);
    case Op::Pow: return integer_power(*lhs, *rhs);
  }
  return std::nullopt;
}

std::string render(const Node& node) {
  if (const auto* number = std::get_if<MathExprTree::Number>(&node.kind)) {
    return to_decimal_string(number->value);
  }
  if (const auto* neg = std::get_if<MathExprTree::Negate>(&node.kind)) {
    return "Neg(" + render(*neg->operand) + ")";
  }
  const auto& bin = std::get<MathExprTree::Binary>(node.kind);
  static constexpr const char* names[] = {"Add", "Sub", "Mul", "Div", "Pow"};
  return std::string(names[static_cast<int>(bin.op)]) + "(" + render(*bin.lhs) + "," +
         render(*bin.rhs) + ")";
}

}  // namespace

std::optional<Rational> MathExprTree::evaluate() const { return eval(*root_); }

std::string MathExprTree::to_string() const { return render(*root_); }

MathExprTree parse_math_expr(std::string_view text) {
  Parser parser(tokenize(text));
  return MathExprTree(parser.parse());
}

bool expr_equivalent(const MathExprTree& a, const MathExprTree& b) {
  auto va = a.evaluate();
  if (!va) return false;
  auto vb = b.evaluate();
  if (!vb) return false;
  return *va == *vb;
}

}  // namespace rlvr
