#include "beltrami/expression.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace beltrami {

namespace {

using Node = ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
using K = ExprNode::Kind;

const std::map<std::string, ExprNode::Fn>& functions() {
  static const std::map<std::string, ExprNode::Fn> f = {
      {"sin", ExprNode::Fn::Sin}, {"cos", ExprNode::Fn::Cos},   {"tan", ExprNode::Fn::Tan},
      {"exp", ExprNode::Fn::Exp}, {"log", ExprNode::Fn::Log},   {"sqrt", ExprNode::Fn::Sqrt},
      {"abs", ExprNode::Fn::Abs}};
  return f;
}

NodePtr make(K kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(const std::string& src, const ParamMap& params) : s_(src), params_(params) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  int coords = 0;
  bool uses_t = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
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
    NodePtr l = term();
    for (;;) {
      if (accept('+')) {
        l = make(K::Add, l, term());
      } else if (accept('-')) {
        l = make(K::Sub, l, term());
      } else {
        return l;
      }
    }
  }

  NodePtr term() {
    NodePtr l = signed_factor();
    for (;;) {
      if (accept('*')) {
        l = make(K::Mul, l, signed_factor());
      } else if (accept('/')) {
        l = make(K::Div, l, signed_factor());
      } else {
        return l;
      }
    }
  }

  NodePtr signed_factor() {
    if (accept('-')) return make(K::Neg, signed_factor());
    if (accept('+')) return signed_factor();
    return factor();
  }

  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) return make(K::Pow, b, signed_factor());
    return b;
  }

  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_) fail("malformed number", start);
    auto n = std::make_shared<Node>();
    n->kind = K::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id = s_.substr(start, pos_ - start);
    const auto fn = functions().find(id);
    if (fn != functions().end()) {
      if (!accept('(')) fail("expected '(' after " + id);
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      if (!accept(')')) fail("expected ')'");
      if (args.size() != 1) {
        fail(id + " takes 1 argument, got " + std::to_string(args.size()), start);
      }
      auto n = std::make_shared<Node>();
      n->kind = K::Func;
      n->fn = fn->second;
      n->name = id;
      n->a = args[0];
      return n;
    }
    auto n = std::make_shared<Node>();
    if (id == "u" || id == "v") {
      n->kind = K::Coord;
      n->index = id == "u" ? 0 : 1;
      n->name = id;
    } else if (id == "t") {
      n->kind = K::Time;
      uses_t = true;
    } else if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '9') {
      n->kind = K::Coord;
      n->index = id[1] - '1';
      n->name = id;
    } else if (const auto p = params_.find(id); p != params_.end()) {
      n->kind = K::Param;
      n->name = id;
      n->value = p->second;
    } else {
      fail("unknown identifier '" + id + "'", start);
    }
    if (n->kind == K::Coord) coords = std::max(coords, n->index + 1);
    return n;
  }

  const std::string& s_;
  const ParamMap& params_;
  std::size_t pos_ = 0;
};

std::string number_string(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write(const Node& n, std::string& out) {
  const auto binary = [&](const char* op) {
    out += '(';
    write(*n.a, out);
    out += op;
    write(*n.b, out);
    out += ')';
  };
  switch (n.kind) {
    case K::Number: out += number_string(n.value); break;
    case K::Coord:
    case K::Param: out += n.name; break;
    case K::Time: out += 't'; break;
    case K::Neg:
      out += "(-";
      write(*n.a, out);
      out += ')';
      break;
    case K::Add: binary(" + "); break;
    case K::Sub: binary(" - "); break;
    case K::Mul: binary(" * "); break;
    case K::Div: binary(" / "); break;
    case K::Pow: binary("^"); break;
    case K::Func:
      out += n.name;
      out += '(';
      write(*n.a, out);
      out += ')';
      break;
  }
}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case K::Number: return a.value == b.value;
    case K::Coord: return a.index == b.index;
    case K::Time: return true;
    case K::Param: return a.name == b.name && a.value == b.value;
    case K::Neg: return equal(*a.a, *b.a);
    case K::Func: return a.fn == b.fn && equal(*a.a, *b.a);
    default: return equal(*a.a, *b.a) && equal(*a.b, *b.b);
  }
}

}  // namespace

bool Expression::is_constant(const ExprNode& n) {
  switch (n.kind) {
    case K::Number:
    case K::Param:
    case K::Time:
      return true;
    case K::Coord:
      return false;
    case K::Neg:
    case K::Func:
      return is_constant(*n.a);
    default:
      return is_constant(*n.a) && is_constant(*n.b);
  }
}

double Expression::eval_constant(const ExprNode& n, double t) {
  return eval<double>(n, Vec(), t);
}

std::string Expression::to_string() const {
  std::string out;
  if (root_) write(*root_, out);
  return out;
}

bool operator==(const Expression& a, const Expression& b) {
  if (!a.root_ || !b.root_) return a.root_ == b.root_;
  return equal(*a.root_, *b.root_);
}

Expression parse_expression(const std::string& src, const ParamMap& params) {
  Parser p(src, params);
  Expression e;
  e.root_ = p.parse();
  e.coords_ = p.coords;
  e.uses_t_ = p.uses_t;
  return e;
}

}  // namespace beltrami
