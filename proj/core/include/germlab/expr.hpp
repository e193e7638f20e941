#pragma once

#include "germlab/jet.hpp"
#include "germlab/rational.hpp"

#include <string>
#include <vector>

namespace germlab::expr {

enum class NodeKind { literal, variable, parameter, add, sub, mul, pow };

// One node of a parsed polynomial expression. Children are indices into
// Ast::nodes; pow keeps its base in lhs and the exponent in index.
struct Node {
  NodeKind kind{};
  Rat value;      // literal nodes only
  int index = 0;  // 1-based variable/parameter index, or the pow exponent
  int lhs = -1;
  int rhs = -1;
};

// Expression over variables k1..k9 and parameters l1..l9 with +, -, *,
// integer ^, parentheses, and integer or integer/integer literals.
struct Ast {
  std::vector<Node> nodes;
  int root = -1;
  int max_var = 0;
  int max_param = 0;
};

// Recursive descent over: expr := ('+'|'-')? term (('+'|'-') term)*;
// term := factor ('*' factor)*; factor := base ('^' uint)?;
// base := rational | symbol | '(' expr ')'. Implicit multiplication and
// division outside integer literals are rejected with the byte offset.
Ast parse_expression(const std::string& text);

// Text that reparses to the identical tree.
std::string print_expression(const Ast& a);

// Upper bound on the total degree in the k variables; parameters and
// literals count as constants.
int k_degree(const Ast& a);

// Exact truncated expansion in k1..k_nu at fixed parameter values. nu must
// cover every variable used and params every parameter. Even parity is a
// postcondition: a nonzero odd-degree coefficient is refused, not dropped.
template <class R>
Jet<R> jet_from_expression(const Ast& a, int nu, int max_degree, Parity parity,
                           const std::vector<R>& params = {});

}  // namespace germlab::expr
