#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "gshs/error.hpp"
#include "gshs/potentials.hpp"

namespace gshs {

namespace {

// Value, gradient and Hessian diagonal carried together.
struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim> h{};
};

// Chain rule for a scalar function phi with derivatives (f0, f1, f2) at u.v.
Jet compose(const Jet& u, std::size_t d, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  for (std::size_t i = 0; i < d; ++i) {
    r.g[i] = f1 * u.g[i];
    r.h[i] = f1 * u.h[i] + f2 * u.g[i] * u.g[i];
  }
  return r;
}

struct Node {
  virtual ~Node() = default;
  virtual Jet eval(std::span<const double> p, std::size_t d) const = 0;
};
using NodePtr = std::unique_ptr<Node>;

struct Const : Node {
  double c;
  explicit Const(double c) : c(c) {}
  Jet eval(std::span<const double>, std::size_t) const override {
    Jet j;
    j.v = c;
    return j;
  }
};

struct Var : Node {
  std::size_t i;
  explicit Var(std::size_t i) : i(i) {}
  Jet eval(std::span<const double> p, std::size_t) const override {
    Jet j;
    j.v = p[i];
    j.g[i] = 1.0;
    return j;
  }
};

struct Radius : Node {
  Jet eval(std::span<const double> p, std::size_t d) const override {
    Jet j;
    double r2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) r2 += p[i] * p[i];
    j.v = std::sqrt(r2);
    if (j.v == 0.0) return j;
    for (std::size_t i = 0; i < d; ++i) {
      double u = p[i] / j.v;
      j.g[i] = u;
      j.h[i] = (1.0 - u * u) / j.v;
    }
    return j;
  }
};

struct Unary : Node {
  char op;  // '-' or function code
  NodePtr a;
  Unary(char op, NodePtr a) : op(op), a(std::move(a)) {}
  Jet eval(std::span<const double> p, std::size_t d) const override {
    Jet u = a->eval(p, d);
    switch (op) {
      case '-': return compose(u, d, -u.v, -1.0, 0.0);
      case 'e': {
        double e = std::exp(u.v);
        return compose(u, d, e, e, e);
      }
      case 'l': return compose(u, d, u.v > 0 ? std::log(u.v) : NAN, 1.0 / u.v, -1.0 / (u.v * u.v));
      case 's': {
        double s = u.v >= 0 ? std::sqrt(u.v) : NAN;
        return compose(u, d, s, 0.5 / s, -0.25 / (s * u.v));
      }
      case 'a': {
        double sg = u.v > 0 ? 1.0 : (u.v < 0 ? -1.0 : 0.0);
        return compose(u, d, std::abs(u.v), sg, 0.0);
      }
    }
    return u;
  }
};

struct Binary : Node {
  char op;
  NodePtr a, b;
  Binary(char op, NodePtr a, NodePtr b) : op(op), a(std::move(a)), b(std::move(b)) {}
  Jet eval(std::span<const double> p, std::size_t d) const override {
    Jet x = a->eval(p, d);
    if (op == '^') {
      if (auto* c = dynamic_cast<const Const*>(b.get())) {
        double k = c->c;
        return compose(x, d, std::pow(x.v, k), k * std::pow(x.v, k - 1.0),
                       k * (k - 1.0) * std::pow(x.v, k - 2.0));
      }
    }
    Jet y = b->eval(p, d);
    Jet r;
    switch (op) {
      case '+':
        r.v = x.v + y.v;
        for (std::size_t i = 0; i < d; ++i) {
          r.g[i] = x.g[i] + y.g[i];
          r.h[i] = x.h[i] + y.h[i];
        }
        return r;
      case '-':
        r.v = x.v - y.v;
        for (std::size_t i = 0; i < d; ++i) {
          r.g[i] = x.g[i] - y.g[i];
          r.h[i] = x.h[i] - y.h[i];
        }
        return r;
      case '*':
        r.v = x.v * y.v;
        for (std::size_t i = 0; i < d; ++i) {
          r.g[i] = x.g[i] * y.v + x.v * y.g[i];
          r.h[i] = x.h[i] * y.v + 2.0 * x.g[i] * y.g[i] + x.v * y.h[i];
        }
        return r;
      case '/': {
        Jet inv = compose(y, d, 1.0 / y.v, -1.0 / (y.v * y.v), 2.0 / (y.v * y.v * y.v));
        r.v = x.v * inv.v;
        for (std::size_t i = 0; i < d; ++i) {
          r.g[i] = x.g[i] * inv.v + x.v * inv.g[i];
          r.h[i] = x.h[i] * inv.v + 2.0 * x.g[i] * inv.g[i] + x.v * inv.h[i];
        }
        return r;
      }
      case '^': {
        // x^y = exp(y log x), x > 0
        Jet lx = compose(x, d, x.v > 0 ? std::log(x.v) : NAN, 1.0 / x.v, -1.0 / (x.v * x.v));
        Jet prod;
        prod.v = y.v * lx.v;
        for (std::size_t i = 0; i < d; ++i) {
          prod.g[i] = y.g[i] * lx.v + y.v * lx.g[i];
          prod.h[i] = y.h[i] * lx.v + 2.0 * y.g[i] * lx.g[i] + y.v * lx.h[i];
        }
        double e = std::exp(prod.v);
        return compose(prod, d, e, e, e);
      }
    }
    return r;
  }
};

class Parser {
 public:
  Parser(const std::string& s, std::size_t d) : s_(s), d_(d) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::InvalidParameter,
         "expression parse error at column " + std::to_string(pos_ + 1) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (eat('+')) n = std::make_unique<Binary>('+', std::move(n), term());
      else if (eat('-')) n = std::make_unique<Binary>('-', std::move(n), term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*')) n = std::make_unique<Binary>('*', std::move(n), unary());
      else if (eat('/')) n = std::make_unique<Binary>('/', std::move(n), unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (eat('-')) {
      NodePtr n = unary();
      if (auto* c = dynamic_cast<Const*>(n.get())) {
        c->c = -c->c;
        return n;
      }
      return std::make_unique<Unary>('-', std::move(n));
    }
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return std::make_unique<Binary>('^', std::move(base), unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!eat(')')) error("expected ')'");
      return n;
    }
    if (c == '|') {
      ++pos_;
      skip();
      if (pos_ < s_.size() && s_[pos_] == 'x') {
        ++pos_;
        if (eat('|')) return std::make_unique<Radius>();
      }
      error("only |x| is supported between bars");
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (...) {
        error("bad number");
      }
      pos_ += used;
      return std::make_unique<Const>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x") {
        if (d_ != 1) error("'x' is only valid for d = 1; use x1..x" + std::to_string(d_));
        return std::make_unique<Var>(0);
      }
      if (id == "r") return std::make_unique<Radius>();
      if (id.size() > 1 && id[0] == 'x' &&
          id.find_first_not_of("0123456789", 1) == std::string::npos) {
        std::size_t i = std::stoul(id.substr(1));
        if (i < 1 || i > d_) error("coordinate " + id + " out of range");
        return std::make_unique<Var>(i - 1);
      }
      char f = 0;
      if (id == "exp") f = 'e';
      else if (id == "log") f = 'l';
      else if (id == "sqrt") f = 's';
      else if (id == "abs") f = 'a';
      else error("unknown identifier '" + id + "'");
      if (!eat('(')) error("expected '(' after " + id);
      NodePtr arg = expr();
      if (!eat(')')) error("expected ')'");
      return std::make_unique<Unary>(f, std::move(arg));
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t d_;
  std::size_t pos_ = 0;
};

class ExpressionPotential final : public Potential {
 public:
  ExpressionPotential(std::size_t d, std::string src, ExpressionOptions o)
      : d_(d), src_(std::move(src)), opts_(o), root_(Parser(src_, d).parse()) {}
  std::size_t dim() const override { return d_; }
  std::string name() const override { return "expression(" + src_ + ")"; }
  double value(std::span<const double> p) const override {
    double v = root_->eval(p, d_).v;
    return std::isnan(v) ? kInf : v;
  }
  void gradient(std::span<const double> p, std::span<double> g) const override {
    Jet j = root_->eval(p, d_);
    for (std::size_t i = 0; i < d_; ++i) g[i] = j.g[i];
  }
  void hessian_diag(std::span<const double> p, std::span<double> h) const override {
    Jet j = root_->eval(p, d_);
    for (std::size_t i = 0; i < d_; ++i) h[i] = j.h[i];
  }
  bool finite_domain(std::span<const double> p) const override {
    if (opts_.singular_at_origin && distance_to_singularity(p) == 0.0) return false;
    return std::isfinite(value(p));
  }
  double distance_to_singularity(std::span<const double> p) const override {
    if (!opts_.singular_at_origin) return kInf;
    double r2 = 0.0;
    for (std::size_t i = 0; i < d_; ++i) r2 += p[i] * p[i];
    return std::sqrt(r2);
  }
  bool singular() const override { return opts_.singular_at_origin; }
  double lower_bound() const override { return opts_.lower_bound; }
  bool symmetric() const override { return opts_.symmetric; }

 private:
  std::size_t d_;
  std::string src_;
  ExpressionOptions opts_;
  NodePtr root_;
};

}  // namespace

PotentialSpec make_expression(std::size_t dim, const std::string& expr, const ExpressionOptions& opts) {
  require(dim >= 1 && dim <= kMaxDim, ErrorKind::InvalidParameter, "expression dimension out of range");
  require(!expr.empty(), ErrorKind::InvalidParameter, "empty potential expression");
  return PotentialSpec(std::make_shared<ExpressionPotential>(dim, expr, opts));
}

}  // namespace gshs
