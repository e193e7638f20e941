#include "germlab/expr.hpp"

#include "germlab/errors.hpp"
#include "germlab/multiindex.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <type_traits>
#include <vector>

namespace germlab::expr {
namespace {

enum class Tok { integer, symbol, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::size_t pos;   // byte offset of the first character
  Int number;        // integer tokens
  char letter = 0;   // symbol tokens
  int index = 0;
};

[[noreturn]] void bad(const std::string& what, std::size_t pos) {
  fail(errc::syntax_error, what + " at byte " + std::to_string(pos));
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = i;
      Int v = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        v *= 10;
        v += text[i] - '0';
        ++i;
      }
      out.push_back({Tok::integer, start, v, 0, 0});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = i;
      std::string word;
      while (i < text.size() &&
             std::isalnum(static_cast<unsigned char>(text[i]))) {
        word += text[i];
        ++i;
      }
      if (word.size() != 2 || (word[0] != 'k' && word[0] != 'l') || word[1] < '1' ||
          word[1] > '9')
        fail(errc::unknown_symbol,
             "'" + word + "' at byte " + std::to_string(start) +
                 " (variables are k1..k9, parameters l1..l9)");
      Token t{Tok::symbol, start, 0, word[0], word[1] - '0'};
      out.push_back(t);
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      case '^': k = Tok::caret; break;
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      default: bad(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, i, 0, 0, 0});
    ++i;
  }
  out.push_back({Tok::end, text.size(), 0, 0, 0});
  return out;
}

class Parser {
public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Ast run() {
    Ast a;
    a.root = expr(a);
    if (peek().kind != Tok::end)
      bad(peek().kind == Tok::integer || peek().kind == Tok::symbol ||
                  peek().kind == Tok::lparen
              ? "missing operator"
              : "unexpected token",
          peek().pos);
    return a;
  }

private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& peek() const { return toks_[at_]; }
  const Token& take() { return toks_[at_++]; }

  static int push(Ast& a, Node n) {
    a.nodes.push_back(std::move(n));
    return static_cast<int>(a.nodes.size()) - 1;
  }

  int expr(Ast& a) {
    bool negate = false;
    if (peek().kind == Tok::plus || peek().kind == Tok::minus)
      negate = take().kind == Tok::minus;
    int lhs = term(a);
    if (negate) {
      Node zero{NodeKind::literal, Rat(0), 0, -1, -1};
      Node n{NodeKind::sub, Rat(0), 0, push(a, zero), lhs};
      lhs = push(a, n);
    }
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const bool minus = take().kind == Tok::minus;
      const int rhs = term(a);
      Node n{minus ? NodeKind::sub : NodeKind::add, Rat(0), 0, lhs, rhs};
      lhs = push(a, n);
    }
    return lhs;
  }

  int term(Ast& a) {
    int lhs = factor(a);
    while (peek().kind == Tok::star) {
      take();
      const int rhs = factor(a);
      Node n{NodeKind::mul, Rat(0), 0, lhs, rhs};
      lhs = push(a, n);
    }
    return lhs;
  }

  int factor(Ast& a) {
    const int b = base(a);
    if (peek().kind != Tok::caret) return b;
    take();
    if (peek().kind != Tok::integer)
      bad("exponent must be a non-negative integer literal", peek().pos);
    const Token e = take();
    if (e.number > 4096) bad("exponent too large", e.pos);
    Node n{NodeKind::pow, Rat(0), static_cast<int>(e.number), b, -1};
    return push(a, n);
  }

  int base(Ast& a) {
    const Token t = take();
    switch (t.kind) {
      case Tok::integer: {
        Rat v(t.number);
        if (peek().kind == Tok::slash) {
          take();
          if (peek().kind != Tok::integer) bad("expected an integer after '/'", peek().pos);
          const Token d = take();
          if (d.number == 0) bad("division by zero", d.pos);
          v /= Rat(d.number);
        }
        return push(a, Node{NodeKind::literal, v, 0, -1, -1});
      }
      case Tok::symbol: {
        const bool var = t.letter == 'k';
        if (var)
          a.max_var = std::max(a.max_var, t.index);
        else
          a.max_param = std::max(a.max_param, t.index);
        return push(a, Node{var ? NodeKind::variable : NodeKind::parameter, Rat(0),
                            t.index, -1, -1});
      }
      case Tok::lparen: {
        const int inner = expr(a);
        if (peek().kind != Tok::rparen) bad("expected ')'", peek().pos);
        take();
        return inner;
      }
      case Tok::end: bad("unexpected end of input", t.pos);
      default: bad("expected a number, symbol, or '('", t.pos);
    }
  }
};

void print_node(const Ast& a, int id, std::string& out, bool parenthesize_sum) {
  const Node& n = a.nodes[static_cast<std::size_t>(id)];
  switch (n.kind) {
    case NodeKind::literal: {
      const Int num = numerator(n.value);
      const Int den = denominator(n.value);
      out += num.str();
      if (den != 1) {
        out += '/';
        out += den.str();
      }
      return;
    }
    case NodeKind::variable:
      out += 'k';
      out += std::to_string(n.index);
      return;
    case NodeKind::parameter:
      out += 'l';
      out += std::to_string(n.index);
      return;
    case NodeKind::add:
    case NodeKind::sub: {
      // a unary head prints without the literal zero
      const Node& l = a.nodes[static_cast<std::size_t>(n.lhs)];
      const bool unary =
          n.kind == NodeKind::sub && l.kind == NodeKind::literal && l.value == 0;
      if (parenthesize_sum) out += '(';
      if (unary) {
        out += '-';
        print_node(a, n.rhs, out, true);
      } else {
        print_node(a, n.lhs, out, false);
        out += n.kind == NodeKind::add ? '+' : '-';
        print_node(a, n.rhs, out, true);
      }
      if (parenthesize_sum) out += ')';
      return;
    }
    case NodeKind::mul:
      print_node(a, n.lhs, out, true);
      out += '*';
      print_node(a, n.rhs, out, true);
      return;
    case NodeKind::pow: {
      const Node& b = a.nodes[static_cast<std::size_t>(n.lhs)];
      const bool wrap = b.kind != NodeKind::literal && b.kind != NodeKind::variable &&
                        b.kind != NodeKind::parameter;
      if (wrap) out += '(';
      print_node(a, n.lhs, out, true);
      if (wrap) out += ')';
      out += '^';
      out += std::to_string(n.index);
      return;
    }
  }
}

int degree_of(const Ast& a, int id) {
  const Node& n = a.nodes[static_cast<std::size_t>(id)];
  switch (n.kind) {
    case NodeKind::literal:
    case NodeKind::parameter: return 0;
    case NodeKind::variable: return 1;
    case NodeKind::add:
    case NodeKind::sub: return std::max(degree_of(a, n.lhs), degree_of(a, n.rhs));
    case NodeKind::mul: return degree_of(a, n.lhs) + degree_of(a, n.rhs);
    case NodeKind::pow: return degree_of(a, n.lhs) * n.index;
  }
  return 0;
}

template <class R>
Jet<R> constant(int nu, int max_degree, const R& v) {
  Jet<R> out(nu, max_degree);
  if (!(v == R(0))) out.set_coeff(MultiIndex(std::vector<int>(nu, 0)), v);
  return out;
}

template <class R>
R conv_value(const Rat& v) {
  if constexpr (std::is_same_v<R, Rat>)
    return v;
  else
    return v.template convert_to<R>();
}

template <class R>
Jet<R> eval_node(const Ast& a, int id, int nu, int N, const std::vector<R>& params) {
  const Node& n = a.nodes[static_cast<std::size_t>(id)];
  switch (n.kind) {
    case NodeKind::literal: return constant(nu, N, conv_value<R>(n.value));
    case NodeKind::parameter: return constant(nu, N, params[static_cast<std::size_t>(n.index - 1)]);
    case NodeKind::variable: {
      Jet<R> out(nu, N);
      if (N >= 1) {
        std::vector<int> e(nu, 0);
        e[static_cast<std::size_t>(n.index - 1)] = 1;
        out.set_coeff(MultiIndex(e), R(1));
      }
      return out;
    }
    case NodeKind::add: return eval_node(a, n.lhs, nu, N, params) + eval_node(a, n.rhs, nu, N, params);
    case NodeKind::sub: return eval_node(a, n.lhs, nu, N, params) - eval_node(a, n.rhs, nu, N, params);
    case NodeKind::mul:
      return truncated_product(eval_node(a, n.lhs, nu, N, params),
                               eval_node(a, n.rhs, nu, N, params), N);
    case NodeKind::pow: {
      Jet<R> b = eval_node(a, n.lhs, nu, N, params);
      Jet<R> out = constant(nu, N, R(1));
      for (int j = 0; j < n.index; ++j) {
        out = truncated_product(out, b, N);
        if (out.is_zero()) break;
      }
      return out;
    }
  }
  fail(errc::syntax_error, "corrupt expression tree");
}

}  // namespace

Ast parse_expression(const std::string& text) { return Parser(text).run(); }

std::string print_expression(const Ast& a) {
  if (a.root < 0) fail(errc::syntax_error, "empty expression tree");
  std::string out;
  print_node(a, a.root, out, false);
  return out;
}

int k_degree(const Ast& a) {
  if (a.root < 0) fail(errc::syntax_error, "empty expression tree");
  return degree_of(a, a.root);
}

template <class R>
Jet<R> jet_from_expression(const Ast& a, int nu, int max_degree, Parity parity,
                           const std::vector<R>& params) {
  if (a.root < 0) fail(errc::syntax_error, "empty expression tree");
  if (nu < a.max_var)
    fail(errc::precondition_violated,
         "expression uses k" + std::to_string(a.max_var) + " but nu = " + std::to_string(nu));
  if (static_cast<int>(params.size()) < a.max_param)
    fail(errc::precondition_violated,
         "expression uses l" + std::to_string(a.max_param) + " but only " +
             std::to_string(params.size()) + " parameter values given");
  Jet<R> flat = eval_node(a, a.root, nu, max_degree, params);
  if (parity == Parity::general) return flat;
  Jet<R> out(nu, max_degree, Parity::even);
  for (const auto& [alpha, v] : flat.coeffs()) {
    if (alpha.degree() % 2)
      fail(errc::parity_violation, "expression is not even: monomial of degree " +
                                       std::to_string(alpha.degree()) + " present");
    out.set_coeff(alpha, v);
  }
  return out;
}

template Jet<Rat> jet_from_expression<Rat>(const Ast&, int, int, Parity,
                                           const std::vector<Rat>&);
template Jet<double> jet_from_expression<double>(const Ast&, int, int, Parity,
                                                 const std::vector<double>&);

}  // namespace germlab::expr
