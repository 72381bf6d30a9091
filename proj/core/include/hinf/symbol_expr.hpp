#pragma once

#include "hinf/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace hinf
{
  class JetLayout;
  class MatJet;

  namespace expr
  {
    enum class Kind : unsigned char
    {
      constant,
      var_x,       // x_{index+1}
      var_xi,      // xi_{index+1}
      bracket_xi,  // (1 + |xi|^2)^{1/2}
      neg,
      add,
      sub,
      mul,
      div,
      pow,
      sin,
      cos,
      exp,
      log,
      sqrt,
      bracket,  // (1 + u^2)^{1/2} of a scalar argument
    };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    //! Immutable expression tree node. Children are shared, never mutated.
    struct Node
    {
      Kind kind = Kind::constant;
      Complex value{};
      int index = 0;
      NodePtr lhs;
      NodePtr rhs;
    };

    NodePtr constant(Complex c);
    NodePtr var_x(int index);
    NodePtr var_xi(int index);
    NodePtr bracket_xi();
    NodePtr unary(Kind kind, NodePtr arg);
    NodePtr binary(Kind kind, NodePtr lhs, NodePtr rhs);

    bool is_constant(const NodePtr& node, Complex value);
    bool is_constant(const NodePtr& node);

    Complex evaluate(const Node& node, std::span<const double> x, std::span<const double> xi);
    /// Partial derivative with respect to x_{index+1} (wrt_xi=false) or xi_{index+1}.
    NodePtr derivative(const NodePtr& node, bool wrt_xi, int index);
    std::string print(const Node& node);
  }  // namespace expr

  /*!
   * \brief A scalar or k x k matrix symbol a(x, xi) on T^n x R^n.
   *
   * Entries are immutable expression trees over x1..xn, xi1..xin. Derivatives are
   * exact: `differentiate` builds the derivative tree and `evaluate_jet` carries a
   * truncated Taylor expansion through the tree (forward mode).
   */
  class SymbolExpr
  {
   public:
    SymbolExpr() = default;
    SymbolExpr(int n, int k, std::vector<expr::NodePtr> entries, int max_derivative_order = 8);

    static SymbolExpr constant(int n, int k, Complex value);
    static SymbolExpr identity(int n, int k) { return constant(n, k, 1.0); }

    int dim() const { return n_; }
    int size() const { return k_; }
    int max_derivative_order() const { return max_order_; }
    int derivative_order() const { return derivative_order_; }

    const expr::NodePtr& entry(int p, int q) const { return entries_[p * k_ + q]; }

    /// Scalar value (k == 1 only).
    Complex evaluate(std::span<const double> x, std::span<const double> xi) const;
    Matrix evaluate_matrix(std::span<const double> x, std::span<const double> xi) const;

    /// Exact mixed derivative d^alpha_xi d^beta_x (no factors of -i).
    SymbolExpr differentiate(const MultiIndex& alpha, const MultiIndex& beta) const;

    /// Taylor jet in (x_1..x_n, xi_1..xi_n) at the given point.
    MatJet evaluate_jet(
        std::span<const double> x, std::span<const double> xi, const JetLayout& layout) const;

    /// Reparseable text; `parse_symbol(to_string())` evaluates identically.
    std::string to_string() const;

    /// a + c * identity.
    SymbolExpr shifted(Complex c) const;
    SymbolExpr scaled(Complex c) const;

    bool depends_on_x() const;

   private:
    int n_ = 1;
    int k_ = 1;
    int max_order_ = 8;
    int derivative_order_ = 0;
    std::vector<expr::NodePtr> entries_;
  };

  struct ParseOptions
  {
    int max_derivative_order = 8;
    /// Sample the parsed symbol for periodicity in x and reachable branch cuts.
    bool validate = true;
  };

  /*!
   * Parse the symbol grammar documented in docs/grammar.md. Matrix symbols (k > 1)
   * are written as `[a11, a12; a21, a22]`.
   */
  SymbolExpr parse_symbol(std::string_view text, int n, int k = 1, const ParseOptions& options = {});

  /// Periodicity / branch-cut sampling applied by parse_symbol; throws DomainError.
  void validate_symbol(const SymbolExpr& symbol);

  struct PresetSymbol
  {
    SymbolExpr symbol;
    SymbolClassParams cls;
  };

  /*!
   * Named symbols: "bracket_power <m>", "variable_laplace", "rotated_phase <omega>",
   * "jordan2". A leading '-' negates the symbol.
   */
  PresetSymbol preset_symbol(std::string_view spec, int n = 1);

  /// Shift a -> a + c for real c > 0; the class is unchanged.
  SymbolExpr shift(const SymbolExpr& a, double c);

}  // namespace hinf
