#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hinf
{
  using Complex = std::complex<double>;
  using Matrix = Eigen::MatrixXcd;
  using Vector = Eigen::VectorXcd;

  /// Multi-index over the space dimension (length n).
  using MultiIndex = std::vector<int>;

  inline int order(const MultiIndex& alpha)
  {
    int s = 0;
    for (int a : alpha) s += a;
    return s;
  }

  inline double factorial(const MultiIndex& alpha)
  {
    double f = 1.0;
    for (int a : alpha)
      for (int i = 2; i <= a; ++i) f *= i;
    return f;
  }

  /// All multi-indices of dimension n with total order exactly `total`.
  std::vector<MultiIndex> multi_indices(int n, int total);

  constexpr double pi = 3.14159265358979323846;

  //! Base class of all errors raised by the library.
  class Error : public std::runtime_error
  {
   public:
    using std::runtime_error::runtime_error;
  };

  //! Malformed symbol text; `offset` is the byte position of the offending token.
  class ParseError : public Error
  {
   public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset)
    {
    }
    std::size_t offset() const { return offset_; }

   private:
    std::size_t offset_;
  };

  //! A precondition on the mathematical input was violated.
  class DomainError : public Error
  {
   public:
    using Error::Error;
  };

  //! A numerical procedure failed (singular matrix, no convergence, ...).
  class NumericalError : public Error
  {
   public:
    using Error::Error;
  };

  /// Hörmander class parameters (m, rho, delta) of S^m_{rho,delta}.
  struct SymbolClassParams
  {
    double m = 0.0;
    double rho = 1.0;
    double delta = 0.0;

    /// Range accepted for seminorm evaluation: 0 <= delta <= rho <= 1, delta < 1.
    void validate_for_seminorms() const;
    /// Range required by the hypoellipticity pipeline: 0 <= delta < rho <= 1, m >= 0.
    void validate_for_hypoellipticity() const;
  };

}  // namespace hinf
