#pragma once

#include "hinf/types.hpp"

#include <memory>
#include <span>
#include <vector>

namespace hinf
{
  /*!
   * \brief Monomial bookkeeping for truncated multivariate Taylor expansions.
   *
   * Monomials x^e with |e| <= order are stored in graded order (constant term
   * first). A coefficient c_e represents d^e u / e!.
   */
  class JetLayout
  {
   public:
    JetLayout(int vars, int order);

    /// Shared, cached layout.
    static std::shared_ptr<const JetLayout> get(int vars, int order);

    int vars() const { return vars_; }
    int order() const { return order_; }
    int size() const { return size_; }

    std::span<const int> exponent(int idx) const
    {
      return {exponents_.data() + static_cast<std::size_t>(idx) * vars_, static_cast<std::size_t>(vars_)};
    }
    int degree(int idx) const { return degrees_[idx]; }
    /// Index of the monomial with exponent e, or -1 if |e| > order.
    int index_of(std::span<const int> e) const;
    /// Index of e + unit(var), or -1.
    int raise(int idx, int var) const { return raise_[static_cast<std::size_t>(idx) * vars_ + var]; }

    struct Product
    {
      int lhs;
      int rhs;
      int target;
    };
    /// All (i, j, i+j) with |e_i| + |e_j| <= order, sorted by target degree.
    const std::vector<Product>& products() const { return products_; }
    /// Number of leading entries of products() whose target degree is <= d.
    int products_up_to(int d) const { return product_count_[d]; }

   private:
    int vars_;
    int order_;
    int size_;
    std::vector<int> exponents_;
    std::vector<int> degrees_;
    std::vector<int> raise_;
    std::vector<Product> products_;
    std::vector<int> product_count_;
  };

  /*!
   * \brief Truncated Taylor expansion with k x k complex matrix coefficients.
   *
   * `valid_order` tracks how many orders are exact; differentiation lowers it by one
   * and products take the minimum. Coefficients beyond the valid order are zero.
   */
  class MatJet
  {
   public:
    MatJet() = default;
    MatJet(const JetLayout* layout, int k);

    static MatJet constant(const JetLayout* layout, const Matrix& value);
    static MatJet scalar_constant(const JetLayout* layout, Complex value);
    static MatJet variable(const JetLayout* layout, int var, double value);

    const JetLayout* layout() const { return layout_; }
    int k() const { return k_; }
    int valid_order() const { return valid_; }

    Complex& at(int idx, int p, int q) { return c_[(static_cast<std::size_t>(idx) * k_ + p) * k_ + q]; }
    Complex at(int idx, int p, int q) const { return c_[(static_cast<std::size_t>(idx) * k_ + p) * k_ + q]; }
    /// Scalar access (k == 1).
    Complex& operator[](int idx) { return c_[idx]; }
    Complex operator[](int idx) const { return c_[idx]; }

    Matrix coefficient(int idx) const;
    Matrix value() const { return coefficient(0); }
    /// d^e of the expanded quantity at the expansion point.
    Matrix derivative_value(std::span<const int> e) const;

    MatJet& operator+=(const MatJet& other);
    MatJet& operator-=(const MatJet& other);
    MatJet& operator*=(Complex s);
    friend MatJet operator+(MatJet a, const MatJet& b) { return a += b; }
    friend MatJet operator-(MatJet a, const MatJet& b) { return a -= b; }
    friend MatJet operator*(MatJet a, Complex s) { return a *= s; }
    friend MatJet operator*(Complex s, MatJet a) { return a *= s; }
    /// Truncated (noncommutative) product.
    friend MatJet operator*(const MatJet& a, const MatJet& b);

    /// Adds s * identity to the constant term.
    MatJet& add_identity(Complex s);

    /// Multiplicative inverse; the constant term must be invertible.
    MatJet inverse() const;
    /// d/d(var) of the jet; valid order drops by one.
    MatJet derivative(int var) const;
    /// sum_k coeffs[k] (u - u_0)^k for scalar jets (Horner in the nilpotent part).
    MatJet compose(std::span<const Complex> coeffs) const;

    /// Entry (p, q) as a scalar jet.
    MatJet entry(int p, int q) const;
    /// Assemble a k x k jet from k*k scalar jets (row major).
    static MatJet from_entries(int k, std::span<const MatJet> entries);

   private:
    const JetLayout* layout_ = nullptr;
    int k_ = 1;
    int valid_ = 0;
    std::vector<Complex> c_;
  };

  /*!
   * \brief A MatJet per batch member, stored coefficient-major so that every jet operation is
   * a handful of array operations over the whole batch.
   */
  class BatchJet
  {
   public:
    BatchJet() = default;
    BatchJet(const JetLayout* layout, int k, int batch);

    /// All jets must share layout and size.
    static BatchJet gather(std::span<const MatJet* const> jets);

    int k() const { return k_; }
    int batch() const { return batch_; }
    int valid_order() const { return valid_; }

    Eigen::ArrayXcd& at(int idx, int p, int q) { return c_[(static_cast<std::size_t>(idx) * k_ + p) * k_ + q]; }
    const Eigen::ArrayXcd& at(int idx, int p, int q) const
    {
      return c_[(static_cast<std::size_t>(idx) * k_ + p) * k_ + q];
    }

    BatchJet& operator+=(const BatchJet& other);
    BatchJet& operator*=(Complex s);
    friend BatchJet operator*(BatchJet a, Complex s) { return a *= s; }
    friend BatchJet operator*(const BatchJet& a, const BatchJet& b);
    BatchJet& add_identity(Complex s);
    /// Throws NumericalError if some member has a singular constant term.
    BatchJet inverse() const;
    BatchJet derivative(int var) const;

   private:
    const JetLayout* layout_ = nullptr;
    int k_ = 1;
    int batch_ = 0;
    int valid_ = 0;
    std::vector<Eigen::ArrayXcd> c_;
  };

}  // namespace hinf
