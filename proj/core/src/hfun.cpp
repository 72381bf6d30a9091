#include "hinf/hfun.hpp"

#include <cmath>
#include <cstdio>

namespace hinf
{
  namespace
  {
    std::string fmt(double v)
    {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", v);
      return buf;
    }
  }  // namespace

  double sup_norm(const ScalarFunction& f, const Sector& sector, const SupNormOptions& options)
  {
    if (!(options.lo > 0.0 && options.hi > options.lo && options.per_decade > 0))
      throw DomainError("sup_norm: invalid sampling range");
    const double a = std::log10(options.lo);
    const double b = std::log10(options.hi);
    const int count = static_cast<int>(std::ceil((b - a) * options.per_decade));
    const double angles[] = {0.0, sector.theta(), -sector.theta()};
    double best = 0.0;
    for (int j = 0; j <= count; ++j)
    {
      const double r = std::pow(10.0, a + (b - a) * j / count);
      for (double phi : angles)
      {
        const double v = std::abs(f(std::polar(r, phi)));
        if (!std::isfinite(v)) throw DomainError("sup_norm: function is not finite on the sampled boundary");
        best = std::max(best, v);
      }
    }
    return best;
  }

  double decay_constant(const ScalarFunction& f, double d, const Sector& sector)
  {
    if (!(d > 0.0)) throw DomainError("decay_constant: d must be positive");
    const int angles = 16;
    double best = 0.0;
    for (int j = -8 * 16; j <= 8 * 16; ++j)
    {
      const double r = std::pow(10.0, j / 16.0);
      const double w = std::pow(r, d) + std::pow(r, -d);
      for (int q = 0; q <= angles; ++q)
      {
        const double phi = -sector.theta() + 2.0 * sector.theta() * q / angles;
        const double v = std::abs(f(std::polar(r, phi))) * w;
        if (!std::isfinite(v)) throw DomainError("decay_constant: function is not finite on the sector");
        best = std::max(best, v);
      }
    }
    return 1.05 * best;
  }

  void validate_hfun(const HFun& f, const Sector& sector)
  {
    if (!(f.d > 0.0) || !(f.c_f > 0.0)) throw DomainError("validate_hfun: require d > 0 and c_f > 0");
    const double eps = 1e-3;
    const double angles[] = {0.0, sector.theta() - eps, -(sector.theta() - eps)};
    for (int j = -4 * 8; j <= 4 * 8; ++j)
    {
      const double r = std::pow(10.0, j / 8.0);
      const double bound = f.c_f / (std::pow(r, f.d) + std::pow(r, -f.d));
      for (double phi : angles)
      {
        const double v = std::abs(f(std::polar(r, phi)));
        if (!std::isfinite(v) || v > bound * (1.0 + 1e-12))
          throw DomainError("validate_hfun: decay bound fails for " + f.name + " at |z| = " + fmt(r));
      }
    }
    sup_norm(f, sector);
  }

  HFun make_hfun(std::string name, ScalarFunction f, double d, const Sector& sector)
  {
    HFun h{std::move(name), std::move(f), d, 1.0};
    h.c_f = decay_constant(h.eval, d, sector);
    return h;
  }

  HFun s_power(double s, const Sector& sector)
  {
    if (!(s > 0.0)) throw DomainError("s_power: s must be positive");
    auto f = [s](Complex z) { return std::exp(s * std::log(z) - 2.0 * s * std::log(1.0 + z)); };
    return make_hfun("s_power(" + fmt(s) + ")", f, s, sector);
  }

  Complex regularizer(Complex z, double n)
  {
    return (n * z / (1.0 + n * z)) / (1.0 + z / n);
  }

  HFun regularized_imaginary_power(double t, double n, const Sector& sector)
  {
    if (!(n >= 1.0)) throw DomainError("regularized_imaginary_power: n must be at least 1");
    auto f = [t, n](Complex z) { return std::exp(Complex(0.0, t) * std::log(z)) * regularizer(z, n); };
    HFun h{"imag_power(" + fmt(t) + ";n=" + fmt(n) + ")", f, 1.0, 1.0};
    // roughly 2n e^{theta |t|}
    h.c_f = decay_constant(h.eval, 1.0, sector);
    return h;
  }

  HFun resolvent_probe(Complex mu, const Sector& sector)
  {
    if (!sector.contains(mu) || mu == 0.0 || mu == -1.0)
      throw DomainError("resolvent_probe: mu must lie in Lambda \\ {0, -1}");
    auto f = [mu](Complex z) { return z / ((mu - z) * (1.0 + z)); };
    return make_hfun("resolvent_probe", f, 1.0, sector);
  }

  HinfFun imaginary_power_function(double t, const Sector& sector)
  {
    HinfFun h;
    h.name = "imag_power(" + fmt(t) + ")";
    h.eval = [t](Complex z) { return std::exp(Complex(0.0, t) * std::log(z)); };
    h.regularize = [t, sector](double n) { return regularized_imaginary_power(t, n, sector); };
    return h;
  }

  HFun scaled(const HFun& f, Complex c)
  {
    auto g = f.eval;
    return {fmt(std::abs(c)) + "*" + f.name, [g, c](Complex z) { return c * g(z); }, f.d, std::abs(c) * f.c_f};
  }

  HFun product(const HFun& f, const HFun& g)
  {
    // (|z|^a + |z|^-a)(|z|^b + |z|^-b) >= |z|^{a+b} + |z|^{-(a+b)}
    auto fe = f.eval;
    auto ge = g.eval;
    return {f.name + "*" + g.name, [fe, ge](Complex z) { return fe(z) * ge(z); }, f.d + g.d, f.c_f * g.c_f};
  }

}  // namespace hinf
