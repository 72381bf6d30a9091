#include "hinf/fit.hpp"

#include "hinf/types.hpp"

#include <cmath>
#include <vector>

namespace hinf
{
  LineFit linear_fit(std::span<const double> x, std::span<const double> y)
  {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      mx += x[i];
      my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linear_fit: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
  }

  double loglog_slope(std::span<const double> x, std::span<const double> y)
  {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
      lx[i] = std::log(x[i]);
      ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly).slope;
  }

}  // namespace hinf
