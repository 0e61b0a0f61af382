#include "rdsio/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace rdsio {

double Table::operator()(double x) const {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + s * (ys[i] - ys[i - 1]);
}

void Table::validate() const {
  if (xs.empty() || xs.size() != ys.size()) throw Error("table: xs and ys must be nonempty and of equal length");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw Error("table: xs must be strictly increasing");
  }
}

ExprError::ExprError(const std::string& msg, std::size_t column)
    : Error(msg + " (column " + std::to_string(column) + ")"), column_(column) {}

struct Expr::Node {
  enum class Op { number, state, input, noise, neg, add, sub, mul, div, abs, min, max, clamp, table };
  Op op = Op::number;
  double value = 0.0;
  std::size_t index = 0;
  std::vector<std::shared_ptr<const Node>> kids;
  Table table;

  double eval(const Vec& x, const Vec& u, const Vec& n) const {
    switch (op) {
      case Op::number: return value;
      case Op::state: return x.at(index);
      case Op::input: return u.at(index);
      case Op::noise: return n.at(index);
      case Op::neg: return -kids[0]->eval(x, u, n);
      case Op::add: return kids[0]->eval(x, u, n) + kids[1]->eval(x, u, n);
      case Op::sub: return kids[0]->eval(x, u, n) - kids[1]->eval(x, u, n);
      case Op::mul: return kids[0]->eval(x, u, n) * kids[1]->eval(x, u, n);
      case Op::div: return kids[0]->eval(x, u, n) / kids[1]->eval(x, u, n);
      case Op::abs: return std::fabs(kids[0]->eval(x, u, n));
      case Op::min: return std::min(kids[0]->eval(x, u, n), kids[1]->eval(x, u, n));
      case Op::max: return std::max(kids[0]->eval(x, u, n), kids[1]->eval(x, u, n));
      case Op::clamp: {
        const double v = kids[0]->eval(x, u, n);
        return std::min(std::max(v, kids[1]->eval(x, u, n)), kids[2]->eval(x, u, n));
      }
      case Op::table: return table(kids[0]->eval(x, u, n));
    }
    return NAN;
  }
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
 public:
  Parser(const std::string& s, const ExprSymbols& sym) : s_(s), sym_(sym) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprError(msg, pos_ + 1); }

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

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static NodePtr make(Node::Op op, std::vector<NodePtr> kids) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Op::add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Node::Op::sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Op::mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Node::Op::div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::neg, {unary()});
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  std::vector<NodePtr> arguments(std::size_t count, const std::string& fn) {
    std::vector<NodePtr> args;
    for (std::size_t i = 0; i < count; ++i) {
      if (i > 0 && !accept(',')) fail(fn + " takes " + std::to_string(count) + " arguments");
      args.push_back(expr());
    }
    expect(')');
    return args;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    const std::string id = identifier();
    if (accept('(')) {
      if (id == "abs") return make(Node::Op::abs, arguments(1, id));
      if (id == "min") return make(Node::Op::min, arguments(2, id));
      if (id == "max") return make(Node::Op::max, arguments(2, id));
      if (id == "clamp") return make(Node::Op::clamp, arguments(3, id));
      if (id == "tab") {
        const std::size_t at = pos_;
        const std::string table = identifier();
        const auto it = sym_.tables.find(table);
        if (it == sym_.tables.end()) {
          pos_ = at;
          skip();
          fail("unknown table '" + table + "'");
        }
        if (!accept(',')) fail("tab takes 2 arguments");
        auto n = std::make_shared<Node>();
        n->op = Node::Op::table;
        n->table = it->second;
        n->kids = arguments(1, id);
        return n;
      }
      pos_ = start;
      fail("unknown function '" + id + "'");
    }
    auto n = std::make_shared<Node>();
    for (std::size_t i = 0; i < sym_.noises.size(); ++i) {
      if (sym_.noises[i] == id) {
        n->op = Node::Op::noise;
        n->index = i;
        return n;
      }
    }
    if (resolve(id, 'x', sym_.state_dim, *n, Node::Op::state)) return n;
    if (resolve(id, 'u', sym_.input_dim, *n, Node::Op::input)) return n;
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  static bool resolve(const std::string& id, char prefix, std::size_t dim, Node& n, Node::Op op) {
    if (id.empty() || id[0] != prefix) return false;
    if (id.size() == 1) {
      if (dim != 1) return false;
      n.op = op;
      n.index = 0;
      return true;
    }
    if (!std::all_of(id.begin() + 1, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return false;
    }
    const std::size_t i = std::stoul(id.substr(1));
    if (i >= dim) return false;
    n.op = op;
    n.index = i;
    return true;
  }

  const std::string& s_;
  const ExprSymbols& sym_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text, const ExprSymbols& symbols) {
  for (const auto& [name, table] : symbols.tables) table.validate();
  Expr e;
  e.root_ = Parser(text, symbols).parse();
  e.text_ = text;
  return e;
}

double Expr::eval(const Vec& x, const Vec& u, const Vec& noise) const { return root_->eval(x, u, noise); }

}  // namespace rdsio
