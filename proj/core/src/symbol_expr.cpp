#include "hinf/symbol_expr.hpp"

#include "hinf/jet.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace hinf
{
  namespace expr
  {
    namespace
    {
      NodePtr make(Kind kind, Complex value = {}, int index = 0, NodePtr lhs = {}, NodePtr rhs = {})
      {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->value = value;
        n->index = index;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
      }

      bool is_nonneg_integer(Complex c, int& out)
      {
        if (c.imag() != 0.0) return false;
        const double r = c.real();
        if (r < 0.0 || r > 64.0 || std::floor(r) != r) return false;
        out = static_cast<int>(r);
        return true;
      }

      Complex eval_unary(Kind kind, Complex u)
      {
        switch (kind)
        {
          case Kind::neg:
            return -u;
          case Kind::sin:
            return std::sin(u);
          case Kind::cos:
            return std::cos(u);
          case Kind::exp:
            return std::exp(u);
          case Kind::log:
            return std::log(u);
          case Kind::sqrt:
            return std::sqrt(u);
          case Kind::bracket:
            return std::sqrt(1.0 + u * u);
          default:
            throw Error("eval_unary: not a unary node");
        }
      }

      Complex eval_pow(Complex base, Complex e)
      {
        int ie = 0;
        if (is_nonneg_integer(e, ie))
        {
          Complex r = 1.0;
          Complex b = base;
          while (ie > 0)
          {
            if (ie & 1) r *= b;
            b *= b;
            ie >>= 1;
          }
          return r;
        }
        if (e.imag() == 0.0 && base.imag() == 0.0 && base.real() > 0.0) return std::pow(base.real(), e.real());
        return std::pow(base, e);
      }

      int precedence(const Node& n)
      {
        switch (n.kind)
        {
          case Kind::add:
          case Kind::sub:
            return 1;
          case Kind::mul:
          case Kind::div:
            return 2;
          case Kind::neg:
            return 3;
          case Kind::pow:
            return 4;
          default:
            return 5;
        }
      }

      std::string format_double(double v)
      {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string s(buf);
        // keep the literal a valid number token for the lexer (no "inf"/"nan" in valid trees)
        return s;
      }
    }  // namespace

    NodePtr constant(Complex c) { return make(Kind::constant, c); }
    NodePtr var_x(int index) { return make(Kind::var_x, {}, index); }
    NodePtr var_xi(int index) { return make(Kind::var_xi, {}, index); }
    NodePtr bracket_xi() { return make(Kind::bracket_xi); }

    bool is_constant(const NodePtr& node) { return node->kind == Kind::constant; }
    bool is_constant(const NodePtr& node, Complex value)
    {
      return node->kind == Kind::constant && node->value == value;
    }

    NodePtr unary(Kind kind, NodePtr arg)
    {
      if (is_constant(arg)) return constant(eval_unary(kind, arg->value));
      if (kind == Kind::neg && arg->kind == Kind::neg) return arg->lhs;
      return make(kind, {}, 0, std::move(arg));
    }

    NodePtr binary(Kind kind, NodePtr lhs, NodePtr rhs)
    {
      const bool lc = is_constant(lhs);
      const bool rc = is_constant(rhs);
      switch (kind)
      {
        case Kind::add:
          if (lc && rc) return constant(lhs->value + rhs->value);
          if (is_constant(lhs, 0.0)) return rhs;
          if (is_constant(rhs, 0.0)) return lhs;
          break;
        case Kind::sub:
          if (lc && rc) return constant(lhs->value - rhs->value);
          if (is_constant(rhs, 0.0)) return lhs;
          if (is_constant(lhs, 0.0)) return unary(Kind::neg, rhs);
          break;
        case Kind::mul:
          if (lc && rc) return constant(lhs->value * rhs->value);
          if (is_constant(lhs, 0.0) || is_constant(rhs, 0.0)) return constant(0.0);
          if (is_constant(lhs, 1.0)) return rhs;
          if (is_constant(rhs, 1.0)) return lhs;
          if (is_constant(lhs, -1.0)) return unary(Kind::neg, rhs);
          if (is_constant(rhs, -1.0)) return unary(Kind::neg, lhs);
          break;
        case Kind::div:
          if (lc && rc && rhs->value != 0.0) return constant(lhs->value / rhs->value);
          if (is_constant(lhs, 0.0)) return constant(0.0);
          if (is_constant(rhs, 1.0)) return lhs;
          break;
        case Kind::pow:
          if (lc && rc) return constant(eval_pow(lhs->value, rhs->value));
          if (is_constant(rhs, 0.0)) return constant(1.0);
          if (is_constant(rhs, 1.0)) return lhs;
          break;
        default:
          throw Error("binary: not a binary node");
      }
      return make(kind, {}, 0, std::move(lhs), std::move(rhs));
    }

    Complex evaluate(const Node& node, std::span<const double> x, std::span<const double> xi)
    {
      switch (node.kind)
      {
        case Kind::constant:
          return node.value;
        case Kind::var_x:
          return x[node.index];
        case Kind::var_xi:
          return xi[node.index];
        case Kind::bracket_xi:
        {
          double s = 1.0;
          for (double v : xi) s += v * v;
          return std::sqrt(s);
        }
        case Kind::add:
          return evaluate(*node.lhs, x, xi) + evaluate(*node.rhs, x, xi);
        case Kind::sub:
          return evaluate(*node.lhs, x, xi) - evaluate(*node.rhs, x, xi);
        case Kind::mul:
          return evaluate(*node.lhs, x, xi) * evaluate(*node.rhs, x, xi);
        case Kind::div:
          return evaluate(*node.lhs, x, xi) / evaluate(*node.rhs, x, xi);
        case Kind::pow:
          return eval_pow(evaluate(*node.lhs, x, xi), evaluate(*node.rhs, x, xi));
        default:
          return eval_unary(node.kind, evaluate(*node.lhs, x, xi));
      }
    }

    NodePtr derivative(const NodePtr& np, bool wrt_xi, int index)
    {
      const Node& n = *np;
      auto d = [&](const NodePtr& c) { return derivative(c, wrt_xi, index); };
      auto mul = [](NodePtr a, NodePtr b) { return binary(Kind::mul, std::move(a), std::move(b)); };
      auto add = [](NodePtr a, NodePtr b) { return binary(Kind::add, std::move(a), std::move(b)); };
      auto sub = [](NodePtr a, NodePtr b) { return binary(Kind::sub, std::move(a), std::move(b)); };
      auto div = [](NodePtr a, NodePtr b) { return binary(Kind::div, std::move(a), std::move(b)); };

      switch (n.kind)
      {
        case Kind::constant:
          return constant(0.0);
        case Kind::var_x:
          return constant((!wrt_xi && n.index == index) ? 1.0 : 0.0);
        case Kind::var_xi:
          return constant((wrt_xi && n.index == index) ? 1.0 : 0.0);
        case Kind::bracket_xi:
          if (!wrt_xi) return constant(0.0);
          return div(var_xi(index), np);
        case Kind::neg:
          return unary(Kind::neg, d(n.lhs));
        case Kind::add:
          return add(d(n.lhs), d(n.rhs));
        case Kind::sub:
          return sub(d(n.lhs), d(n.rhs));
        case Kind::mul:
          return add(mul(d(n.lhs), n.rhs), mul(n.lhs, d(n.rhs)));
        case Kind::div:
        {
          NodePtr du = d(n.lhs);
          NodePtr dv = d(n.rhs);
          if (is_constant(dv, 0.0)) return div(du, n.rhs);
          return div(sub(mul(du, n.rhs), mul(n.lhs, dv)), binary(Kind::pow, n.rhs, constant(2.0)));
        }
        case Kind::pow:
        {
          NodePtr du = d(n.lhs);
          if (is_constant(n.rhs))
          {
            if (is_constant(du, 0.0)) return constant(0.0);
            const Complex c = n.rhs->value;
            return mul(mul(constant(c), binary(Kind::pow, n.lhs, constant(c - 1.0))), du);
          }
          // u^v (v' log u + v u'/u)
          NodePtr dv = d(n.rhs);
          NodePtr t = add(mul(dv, unary(Kind::log, n.lhs)), div(mul(n.rhs, du), n.lhs));
          return mul(np, t);
        }
        case Kind::sin:
          return mul(unary(Kind::cos, n.lhs), d(n.lhs));
        case Kind::cos:
          return unary(Kind::neg, mul(unary(Kind::sin, n.lhs), d(n.lhs)));
        case Kind::exp:
          return mul(np, d(n.lhs));
        case Kind::log:
          return div(d(n.lhs), n.lhs);
        case Kind::sqrt:
          return div(d(n.lhs), mul(constant(2.0), np));
        case Kind::bracket:
          return div(mul(n.lhs, d(n.lhs)), np);
      }
      throw Error("derivative: unknown node");
    }

    std::string print(const Node& n)
    {
      auto wrap = [&](const Node& child, int min_prec)
      {
        std::string s = print(child);
        return precedence(child) < min_prec ? "(" + s + ")" : s;
      };
      switch (n.kind)
      {
        case Kind::constant:
        {
          const double re = n.value.real();
          const double im = n.value.imag();
          if (im == 0.0) return re < 0.0 ? "(" + format_double(re) + ")" : format_double(re);
          if (re == 0.0) return "(" + format_double(im) + "*i)";
          return "(" + format_double(re) + "+" + format_double(im) + "*i)";
        }
        case Kind::var_x:
          return "x" + std::to_string(n.index + 1);
        case Kind::var_xi:
          return "xi" + std::to_string(n.index + 1);
        case Kind::bracket_xi:
          return "bracket(xi)";
        case Kind::neg:
          return "-" + wrap(*n.lhs, 4);
        case Kind::add:
          return wrap(*n.lhs, 1) + "+" + wrap(*n.rhs, 2);
        case Kind::sub:
          return wrap(*n.lhs, 1) + "-" + wrap(*n.rhs, 2);
        case Kind::mul:
          return wrap(*n.lhs, 2) + "*" + wrap(*n.rhs, 3);
        case Kind::div:
          return wrap(*n.lhs, 2) + "/" + wrap(*n.rhs, 3);
        case Kind::pow:
          return wrap(*n.lhs, 5) + "^" + wrap(*n.rhs, 5);
        case Kind::sin:
          return "sin(" + print(*n.lhs) + ")";
        case Kind::cos:
          return "cos(" + print(*n.lhs) + ")";
        case Kind::exp:
          return "exp(" + print(*n.lhs) + ")";
        case Kind::log:
          return "log(" + print(*n.lhs) + ")";
        case Kind::sqrt:
          return "sqrt(" + print(*n.lhs) + ")";
        case Kind::bracket:
          return "bracket(" + print(*n.lhs) + ")";
      }
      throw Error("print: unknown node");
    }
  }  // namespace expr

  // ---------------------------------------------------------------------------
  // Forward-mode Taylor evaluation

  namespace
  {
    using expr::Kind;
    using expr::Node;

    std::vector<Complex> series_coefficients(Kind kind, Complex u0, Complex exponent, int order)
    {
      // c_j = f^{(j)}(u0) / j!
      std::vector<Complex> c(order + 1);
      switch (kind)
      {
        case Kind::exp:
        {
          const Complex e = std::exp(u0);
          double f = 1.0;
          for (int j = 0; j <= order; ++j)
          {
            if (j > 0) f *= j;
            c[j] = e / f;
          }
          break;
        }
        case Kind::sin:
        case Kind::cos:
        {
          const Complex s = std::sin(u0);
          const Complex co = std::cos(u0);
          // derivatives of sin cycle: sin, cos, -sin, -cos
          const Complex cyc_sin[4] = {s, co, -s, -co};
          const Complex cyc_cos[4] = {co, -s, -co, s};
          double f = 1.0;
          for (int j = 0; j <= order; ++j)
          {
            if (j > 0) f *= j;
            c[j] = (kind == Kind::sin ? cyc_sin[j % 4] : cyc_cos[j % 4]) / f;
          }
          break;
        }
        case Kind::log:
        {
          if (u0 == 0.0) throw DomainError("log: argument vanishes");
          c[0] = std::log(u0);
          Complex p = 1.0;
          for (int j = 1; j <= order; ++j)
          {
            p /= u0;
            c[j] = ((j % 2) ? 1.0 : -1.0) * p / static_cast<double>(j);
          }
          break;
        }
        case Kind::pow:
        {
          // binom(e, j) u0^{e-j}
          if (u0 == 0.0) throw DomainError("power: non-integer exponent at zero base");
          Complex binom = 1.0;
          for (int j = 0; j <= order; ++j)
          {
            if (j > 0) binom *= (exponent - static_cast<double>(j - 1)) / static_cast<double>(j);
            c[j] = binom * std::pow(u0, exponent - static_cast<double>(j));
          }
          break;
        }
        default:
          throw Error("series_coefficients: unsupported kind");
      }
      return c;
    }

    MatJet jet_pow_const(const MatJet& u, Complex e)
    {
      const JetLayout* layout = u.layout();
      if (e.imag() == 0.0 && e.real() >= 0.0 && e.real() <= 64.0 && std::floor(e.real()) == e.real())
      {
        int ie = static_cast<int>(e.real());
        MatJet r = MatJet::scalar_constant(layout, 1.0);
        MatJet b = u;
        while (ie > 0)
        {
          if (ie & 1) r = r * b;
          ie >>= 1;
          if (ie > 0) b = b * b;
        }
        return r;
      }
      return u.compose(series_coefficients(Kind::pow, u[0], e, u.valid_order()));
    }

    MatJet jet_eval(const Node& n, std::span<const double> x, std::span<const double> xi, const JetLayout& layout)
    {
      const JetLayout* L = &layout;
      const int dim = static_cast<int>(x.size());
      switch (n.kind)
      {
        case Kind::constant:
          return MatJet::scalar_constant(L, n.value);
        case Kind::var_x:
          return MatJet::variable(L, n.index, x[n.index]);
        case Kind::var_xi:
          return MatJet::variable(L, dim + n.index, xi[n.index]);
        case Kind::bracket_xi:
        {
          MatJet s = MatJet::scalar_constant(L, 1.0);
          for (int d = 0; d < dim; ++d)
          {
            MatJet v = MatJet::variable(L, dim + d, xi[d]);
            s += v * v;
          }
          return jet_pow_const(s, 0.5);
        }
        case Kind::neg:
          return jet_eval(*n.lhs, x, xi, layout) * Complex(-1.0);
        case Kind::add:
          return jet_eval(*n.lhs, x, xi, layout) + jet_eval(*n.rhs, x, xi, layout);
        case Kind::sub:
          return jet_eval(*n.lhs, x, xi, layout) - jet_eval(*n.rhs, x, xi, layout);
        case Kind::mul:
          return jet_eval(*n.lhs, x, xi, layout) * jet_eval(*n.rhs, x, xi, layout);
        case Kind::div:
        {
          MatJet v = jet_eval(*n.rhs, x, xi, layout);
          if (v[0] == 0.0) throw DomainError("division by zero in symbol");
          return jet_eval(*n.lhs, x, xi, layout) * v.inverse();
        }
        case Kind::pow:
        {
          MatJet u = jet_eval(*n.lhs, x, xi, layout);
          if (expr::is_constant(n.rhs)) return jet_pow_const(u, n.rhs->value);
          MatJet v = jet_eval(*n.rhs, x, xi, layout);
          MatJet lu = u.compose(series_coefficients(Kind::log, u[0], 0.0, u.valid_order()));
          MatJet w = v * lu;
          return w.compose(series_coefficients(Kind::exp, w[0], 0.0, w.valid_order()));
        }
        case Kind::sqrt:
          return jet_pow_const(jet_eval(*n.lhs, x, xi, layout), 0.5);
        case Kind::bracket:
        {
          MatJet u = jet_eval(*n.lhs, x, xi, layout);
          MatJet s = u * u;
          s.add_identity(1.0);
          return jet_pow_const(s, 0.5);
        }
        case Kind::sin:
        case Kind::cos:
        case Kind::exp:
        case Kind::log:
        {
          MatJet u = jet_eval(*n.lhs, x, xi, layout);
          return u.compose(series_coefficients(n.kind, u[0], 0.0, u.valid_order()));
        }
      }
      throw Error("jet_eval: unknown node");
    }

    bool any_x_dependence(const Node& n)
    {
      if (n.kind == Kind::var_x) return true;
      if (n.lhs && any_x_dependence(*n.lhs)) return true;
      if (n.rhs && any_x_dependence(*n.rhs)) return true;
      return false;
    }
  }  // namespace

  // ---------------------------------------------------------------------------
  // SymbolExpr

  SymbolExpr::SymbolExpr(int n, int k, std::vector<expr::NodePtr> entries, int max_derivative_order)
      : n_(n), k_(k), max_order_(max_derivative_order), entries_(std::move(entries))
  {
    if (n < 1 || k < 1) throw DomainError("SymbolExpr: dimension and matrix size must be positive");
    if (entries_.size() != static_cast<std::size_t>(k) * k)
      throw DomainError("SymbolExpr: expected k*k entries");
  }

  SymbolExpr SymbolExpr::constant(int n, int k, Complex value)
  {
    std::vector<expr::NodePtr> e(static_cast<std::size_t>(k) * k);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) e[p * k + q] = expr::constant(p == q ? value : 0.0);
    return SymbolExpr(n, k, std::move(e));
  }

  Complex SymbolExpr::evaluate(std::span<const double> x, std::span<const double> xi) const
  {
    if (k_ != 1) throw DomainError("SymbolExpr::evaluate: matrix symbol, use evaluate_matrix");
    return expr::evaluate(*entries_[0], x, xi);
  }

  Matrix SymbolExpr::evaluate_matrix(std::span<const double> x, std::span<const double> xi) const
  {
    Matrix m(k_, k_);
    for (int p = 0; p < k_; ++p)
      for (int q = 0; q < k_; ++q) m(p, q) = expr::evaluate(*entry(p, q), x, xi);
    return m;
  }

  SymbolExpr SymbolExpr::differentiate(const MultiIndex& alpha, const MultiIndex& beta) const
  {
    if (static_cast<int>(alpha.size()) != n_ || static_cast<int>(beta.size()) != n_)
      throw DomainError("differentiate: multi-index dimension mismatch");
    const int total = order(alpha) + order(beta) + derivative_order_;
    if (total > max_order_)
      throw DomainError("differentiate: order " + std::to_string(total) + " exceeds maximum " +
                        std::to_string(max_order_));
    std::vector<expr::NodePtr> out = entries_;
    for (auto& e : out)
    {
      for (int d = 0; d < n_; ++d)
      {
        for (int j = 0; j < alpha[d]; ++j) e = expr::derivative(e, true, d);
        for (int j = 0; j < beta[d]; ++j) e = expr::derivative(e, false, d);
      }
    }
    SymbolExpr r(n_, k_, std::move(out), max_order_);
    r.derivative_order_ = total;
    return r;
  }

  MatJet SymbolExpr::evaluate_jet(
      std::span<const double> x, std::span<const double> xi, const JetLayout& layout) const
  {
    if (layout.vars() != 2 * n_) throw DomainError("evaluate_jet: layout must have 2n variables");
    if (layout.order() + derivative_order_ > max_order_)
      throw DomainError("evaluate_jet: jet order exceeds maximum derivative order");
    if (k_ == 1) return jet_eval(*entries_[0], x, xi, layout);
    std::vector<MatJet> parts;
    parts.reserve(entries_.size());
    for (const auto& e : entries_) parts.push_back(jet_eval(*e, x, xi, layout));
    return MatJet::from_entries(k_, parts);
  }

  std::string SymbolExpr::to_string() const
  {
    if (k_ == 1) return expr::print(*entries_[0]);
    std::string s = "[";
    for (int p = 0; p < k_; ++p)
    {
      if (p > 0) s += "; ";
      for (int q = 0; q < k_; ++q)
      {
        if (q > 0) s += ", ";
        s += expr::print(*entry(p, q));
      }
    }
    return s + "]";
  }

  SymbolExpr SymbolExpr::shifted(Complex c) const
  {
    SymbolExpr r = *this;
    for (int p = 0; p < k_; ++p)
      r.entries_[p * k_ + p] = expr::binary(Kind::add, entries_[p * k_ + p], expr::constant(c));
    return r;
  }

  SymbolExpr SymbolExpr::scaled(Complex c) const
  {
    SymbolExpr r = *this;
    for (auto& e : r.entries_) e = expr::binary(Kind::mul, expr::constant(c), e);
    return r;
  }

  bool SymbolExpr::depends_on_x() const
  {
    for (const auto& e : entries_)
      if (any_x_dependence(*e)) return true;
    return false;
  }

  SymbolExpr shift(const SymbolExpr& a, double c)
  {
    if (!(c > 0.0)) throw DomainError("shift: c must be positive");
    return a.shifted(c);
  }

  // ---------------------------------------------------------------------------
  // Parser

  namespace
  {
    struct Token
    {
      enum Type
      {
        end,
        number,
        ident,
        plus,
        minus,
        star,
        slash,
        caret,
        lpar,
        rpar,
        comma,
        semicolon,
        lbracket,
        rbracket
      } type;
      std::size_t pos;
      double num = 0.0;
      std::string text{};

      Token(Type t, std::size_t p) : type(t), pos(p) {}
    };

    class Parser
    {
     public:
      Parser(std::string_view text, int n) : text_(text), n_(n) { advance(); }

      std::vector<expr::NodePtr> parse_matrix(int k)
      {
        std::vector<expr::NodePtr> entries;
        if (tok_.type != Token::lbracket)
        {
          if (k != 1) throw ParseError("matrix symbol must start with '['", tok_.pos);
          entries.push_back(parse_expr());
          expect_end();
          return entries;
        }
        advance();
        int rows = 0;
        while (true)
        {
          int cols = 0;
          while (true)
          {
            entries.push_back(parse_expr());
            ++cols;
            if (tok_.type == Token::comma)
            {
              advance();
              continue;
            }
            break;
          }
          if (cols != k) throw ParseError("row has " + std::to_string(cols) + " entries, expected " + std::to_string(k), tok_.pos);
          ++rows;
          if (tok_.type == Token::semicolon)
          {
            advance();
            continue;
          }
          break;
        }
        if (tok_.type != Token::rbracket) throw ParseError("expected ']'", tok_.pos);
        if (rows != k) throw ParseError("matrix has " + std::to_string(rows) + " rows, expected " + std::to_string(k), tok_.pos);
        advance();
        expect_end();
        return entries;
      }

     private:
      void expect_end()
      {
        if (tok_.type != Token::end) throw ParseError("unexpected trailing input", tok_.pos);
      }

      void advance()
      {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        tok_ = Token{Token::end, pos_};
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
        {
          char* end = nullptr;
          const std::string buf(text_.substr(pos_));
          tok_.num = std::strtod(buf.c_str(), &end);
          const std::size_t len = static_cast<std::size_t>(end - buf.c_str());
          if (len == 0) throw ParseError("malformed number", pos_);
          tok_.type = Token::number;
          pos_ += len;
          return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
        {
          const std::size_t start = pos_;
          while (pos_ < text_.size() &&
                 (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
          tok_.type = Token::ident;
          tok_.text = std::string(text_.substr(start, pos_ - start));
          return;
        }
        static const std::string_view ops = "+-*/^(),;[]";
        const auto where = ops.find(c);
        if (where == std::string_view::npos) throw ParseError(std::string("unexpected character '") + c + "'", pos_);
        static const Token::Type types[] = {Token::plus, Token::minus, Token::star, Token::slash, Token::caret,
            Token::lpar, Token::rpar, Token::comma, Token::semicolon, Token::lbracket, Token::rbracket};
        tok_.type = types[where];
        ++pos_;
      }

      expr::NodePtr parse_expr()
      {
        expr::NodePtr lhs = parse_term();
        while (tok_.type == Token::plus || tok_.type == Token::minus)
        {
          const Kind kind = tok_.type == Token::plus ? Kind::add : Kind::sub;
          advance();
          lhs = expr::binary(kind, lhs, parse_term());
        }
        return lhs;
      }

      expr::NodePtr parse_term()
      {
        expr::NodePtr lhs = parse_unary();
        while (tok_.type == Token::star || tok_.type == Token::slash)
        {
          const Kind kind = tok_.type == Token::star ? Kind::mul : Kind::div;
          advance();
          lhs = expr::binary(kind, lhs, parse_unary());
        }
        return lhs;
      }

      expr::NodePtr parse_unary()
      {
        if (tok_.type == Token::minus)
        {
          advance();
          return expr::unary(Kind::neg, parse_unary());
        }
        if (tok_.type == Token::plus)
        {
          advance();
          return parse_unary();
        }
        return parse_power();
      }

      expr::NodePtr parse_power()
      {
        expr::NodePtr base = parse_primary();
        if (tok_.type == Token::caret)
        {
          advance();
          return expr::binary(Kind::pow, base, parse_unary());
        }
        return base;
      }

      int variable_index(const std::string& name, std::size_t prefix, std::size_t pos) const
      {
        if (name.size() == prefix)
        {
          if (n_ == 1) return 0;
          throw ParseError("bare '" + name + "' needs an index when n > 1", pos);
        }
        const std::string digits = name.substr(prefix);
        for (char ch : digits)
          if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("unknown identifier '" + name + "'", pos);
        const int idx = std::stoi(digits);
        if (idx < 1 || idx > n_)
          throw ParseError("variable '" + name + "' out of range for n=" + std::to_string(n_), pos);
        return idx - 1;
      }

      expr::NodePtr parse_primary()
      {
        const Token t = tok_;
        switch (t.type)
        {
          case Token::number:
            advance();
            return expr::constant(t.num);
          case Token::lpar:
          {
            advance();
            expr::NodePtr e = parse_expr();
            if (tok_.type != Token::rpar) throw ParseError("expected ')'", tok_.pos);
            advance();
            return e;
          }
          case Token::ident:
            break;
          default:
            throw ParseError("expected operand", t.pos);
        }
        advance();
        const std::string& name = t.text;
        if (tok_.type == Token::lpar) return parse_call(name, t.pos);
        if (name == "i") return expr::constant(Complex(0.0, 1.0));
        if (name == "pi") return expr::constant(pi);
        if (name.rfind("xi", 0) == 0) return expr::var_xi(variable_index(name, 2, t.pos));
        if (name.rfind("x", 0) == 0) return expr::var_x(variable_index(name, 1, t.pos));
        throw ParseError("unknown identifier '" + name + "'", t.pos);
      }

      expr::NodePtr parse_call(const std::string& name, std::size_t pos)
      {
        advance();  // '('
        expr::NodePtr result;
        if (name == "bracket" && tok_.type == Token::ident && tok_.text == "xi")
        {
          // bracket(xi) is the Japanese bracket of the whole frequency vector
          const std::size_t save = pos_;
          const Token save_tok = tok_;
          advance();
          if (tok_.type == Token::rpar)
          {
            advance();
            return expr::bracket_xi();
          }
          pos_ = save;
          tok_ = save_tok;
        }
        std::vector<expr::NodePtr> args;
        if (tok_.type != Token::rpar)
        {
          args.push_back(parse_expr());
          while (tok_.type == Token::comma)
          {
            advance();
            args.push_back(parse_expr());
          }
        }
        if (tok_.type != Token::rpar) throw ParseError("expected ')'", tok_.pos);
        advance();

        static const std::pair<const char*, Kind> unaries[] = {{"sin", Kind::sin}, {"cos", Kind::cos},
            {"exp", Kind::exp}, {"log", Kind::log}, {"sqrt", Kind::sqrt}, {"bracket", Kind::bracket}};
        for (const auto& [fname, kind] : unaries)
        {
          if (name == fname)
          {
            if (args.size() != 1) throw ParseError(name + " takes one argument", pos);
            return expr::unary(kind, args[0]);
          }
        }
        if (name == "pow")
        {
          if (args.size() != 2) throw ParseError("pow takes two arguments", pos);
          return expr::binary(Kind::pow, args[0], args[1]);
        }
        throw ParseError("unknown function '" + name + "'", pos);
      }

      std::string_view text_;
      int n_;
      std::size_t pos_ = 0;
      Token tok_{Token::end, 0};
    };

    // Evaluation that also inspects branch-cut arguments.
    Complex checked_eval(const Node& n, std::span<const double> x, std::span<const double> xi)
    {
      auto check_cut = [](Complex z, const char* what)
      {
        if (std::abs(z) == 0.0) throw DomainError(std::string(what) + " of zero is reachable on the real domain");
        if (z.real() < 0.0 && std::abs(z.imag()) <= 1e-12 * std::abs(z))
          throw DomainError(std::string(what) + " branch cut is reachable on the real domain");
      };
      switch (n.kind)
      {
        case Kind::constant:
        case Kind::var_x:
        case Kind::var_xi:
        case Kind::bracket_xi:
          return expr::evaluate(n, x, xi);
        case Kind::add:
          return checked_eval(*n.lhs, x, xi) + checked_eval(*n.rhs, x, xi);
        case Kind::sub:
          return checked_eval(*n.lhs, x, xi) - checked_eval(*n.rhs, x, xi);
        case Kind::mul:
          return checked_eval(*n.lhs, x, xi) * checked_eval(*n.rhs, x, xi);
        case Kind::div:
        {
          const Complex d = checked_eval(*n.rhs, x, xi);
          if (d == 0.0) throw DomainError("division by zero is reachable on the real domain");
          return checked_eval(*n.lhs, x, xi) / d;
        }
        case Kind::pow:
        {
          const Complex b = checked_eval(*n.lhs, x, xi);
          const Complex e = checked_eval(*n.rhs, x, xi);
          const bool integral = e.imag() == 0.0 && std::floor(e.real()) == e.real();
          if (!integral) check_cut(b, "power");
          if (integral && e.real() < 0.0 && b == 0.0) throw DomainError("negative power of zero is reachable");
          return expr::evaluate(n, x, xi);
        }
        case Kind::log:
        case Kind::sqrt:
        {
          const Complex u = checked_eval(*n.lhs, x, xi);
          check_cut(u, n.kind == Kind::log ? "log" : "sqrt");
          return expr::evaluate(n, x, xi);
        }
        case Kind::bracket:
        {
          const Complex u = checked_eval(*n.lhs, x, xi);
          check_cut(1.0 + u * u, "bracket");
          return expr::evaluate(n, x, xi);
        }
        default:
          checked_eval(*n.lhs, x, xi);
          return expr::evaluate(n, x, xi);
      }
    }
  }  // namespace

  void validate_symbol(const SymbolExpr& symbol)
  {
    const int n = symbol.dim();
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> ux(0.0, 2.0 * pi);
    std::uniform_real_distribution<double> uxi(-50.0, 50.0);
    std::vector<double> x(n), xi(n), xs(n);
    const double fixed_xi[] = {0.0, 1.0, -1.0, 10.0, -10.0};
    for (int sample = 0; sample < 100; ++sample)
    {
      for (int d = 0; d < n; ++d)
      {
        x[d] = ux(rng);
        xi[d] = sample < 5 ? fixed_xi[sample] : uxi(rng);
      }
      for (int p = 0; p < symbol.size(); ++p)
        for (int q = 0; q < symbol.size(); ++q)
        {
          const auto& e = *symbol.entry(p, q);
          const Complex v = checked_eval(e, x, xi);
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("symbol is not finite at a sample point");
          for (int d = 0; d < n; ++d)
          {
            xs = x;
            xs[d] += 2.0 * pi;
            const Complex w = expr::evaluate(e, xs, xi);
            if (std::abs(w - v) > 1e-12 * std::max(1.0, std::abs(v)))
              throw DomainError("symbol is not 2*pi-periodic in x" + std::to_string(d + 1));
          }
        }
    }
  }

  SymbolExpr parse_symbol(std::string_view text, int n, int k, const ParseOptions& options)
  {
    if (n < 1 || n > 2) throw DomainError("parse_symbol: dimension must be 1 or 2");
    if (k < 1 || k > 4) throw DomainError("parse_symbol: matrix size must be between 1 and 4");
    Parser parser(text, n);
    SymbolExpr s(n, k, parser.parse_matrix(k), options.max_derivative_order);
    if (options.validate) validate_symbol(s);
    return s;
  }

  PresetSymbol preset_symbol(std::string_view spec, int n)
  {
    std::string s(spec);
    bool negate = false;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    if (!s.empty() && s.front() == '-')
    {
      negate = true;
      s.erase(s.begin());
    }
    std::istringstream in(s);
    std::string name;
    in >> name;
    auto param = [&](double fallback)
    {
      double v = fallback;
      if (!(in >> v)) return fallback;
      return v;
    };
    auto xi_square = [n]()
    {
      std::string t;
      for (int d = 1; d <= n; ++d) t += "+xi" + std::to_string(d) + "^2";
      return t;
    };

    PresetSymbol out;
    if (name == "bracket_power")
    {
      const double m = param(2.0);
      char buf[64];
      std::snprintf(buf, sizeof buf, "bracket(xi)^%.17g", m);
      out = {parse_symbol(buf, n), {m, 1.0, 0.0}};
    }
    else if (name == "variable_laplace")
    {
      const std::string coeff = n == 1 ? "(2+sin(x1))" : "(2+sin(x1)*cos(x2))";
      out = {parse_symbol(coeff + "*(1" + xi_square() + ")", n), {2.0, 1.0, 0.0}};
    }
    else if (name == "rotated_phase")
    {
      const double omega = param(0.0);
      char buf[96];
      std::snprintf(buf, sizeof buf, "exp(%.17g*i)*bracket(xi)^2", omega);
      out = {parse_symbol(buf, n), {2.0, 1.0, 0.0}};
    }
    else if (name == "jordan2")
    {
      out = {parse_symbol("[bracket(xi)^2, bracket(xi); 0, bracket(xi)^2]", n, 2), {2.0, 1.0, 0.0}};
    }
    else
    {
      throw DomainError("unknown preset '" + name + "'");
    }
    if (negate) out.symbol = out.symbol.scaled(-1.0);
    return out;
  }

}  // namespace hinf
