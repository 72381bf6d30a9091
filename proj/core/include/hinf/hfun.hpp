#pragma once

#include "hinf/hypo.hpp"
#include "hinf/types.hpp"

#include <functional>
#include <string>

namespace hinf
{
  using ScalarFunction = std::function<Complex(Complex)>;

  /*!
   * \brief Holomorphic function on C \ Lambda with |f(z)| <= c_f (|z|^d + |z|^{-d})^{-1}.
   */
  struct HFun
  {
    std::string name;
    ScalarFunction eval;
    double d = 1.0;
    double c_f = 1.0;

    Complex operator()(Complex z) const { return eval(z); }
  };

  //! Bounded holomorphic function with a regularizing sequence f_n in H.
  struct HinfFun
  {
    std::string name;
    ScalarFunction eval;
    std::function<HFun(double)> regularize;
  };

  struct SupNormOptions
  {
    double lo = 1e-12;
    double hi = 1e12;
    int per_decade = 32;
  };

  /// max |f| over the rays arg z = +-theta and arg z = 0, |z| in [lo, hi].
  double sup_norm(const ScalarFunction& f, const Sector& sector, const SupNormOptions& options = {});
  inline double sup_norm(const HFun& f, const Sector& sector, const SupNormOptions& options = {})
  {
    return sup_norm(f.eval, sector, options);
  }

  /// Smallest c with |f(z)| (|z|^d + |z|^{-d}) <= c on a sample of the closed sector
  /// |arg z| <= theta, |z| in [1e-8, 1e8], padded by 5%.
  double decay_constant(const ScalarFunction& f, double d, const Sector& sector);

  /// Checks the decay bound on |z| in [1e-4, 1e4], arg z in {0, +-(theta - 1e-3)}.
  void validate_hfun(const HFun& f, const Sector& sector);

  HFun make_hfun(std::string name, ScalarFunction f, double d, const Sector& sector);

  /// z^s / (1 + z)^{2s}, principal branches; d = s.
  HFun s_power(double s, const Sector& sector);
  /// psi_n(z) = (n z / (1 + n z)) / (1 + z / n).
  Complex regularizer(Complex z, double n);
  /// z^{it} psi_n(z); d = 1.
  HFun regularized_imaginary_power(double t, double n, const Sector& sector);
  /// z / ((mu - z)(1 + z)); mu must lie in Lambda.
  HFun resolvent_probe(Complex mu, const Sector& sector);
  /// z^{it} with regularizer n -> z^{it} psi_n.
  HinfFun imaginary_power_function(double t, const Sector& sector);

  HFun scaled(const HFun& f, Complex c);
  HFun product(const HFun& f, const HFun& g);

}  // namespace hinf
