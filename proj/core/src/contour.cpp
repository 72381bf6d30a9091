#include "hinf/contour.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace hinf
{
  namespace
  {
    // P_n(x) and P_n'(x) by the three-term recurrence
    std::pair<double, double> legendre(int n, double x)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) return {x, 1.0};
      return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
    }
  }  // namespace

  const GaussLegendre& gauss_legendre(int n)
  {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      for (int iter = 0; iter < 100; ++iter)
      {
        const auto [p, dp] = legendre(n, x);
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double dp = legendre(n, x).second;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      g.x[i] = -x;
      g.x[n - 1 - i] = x;
      g.w[i] = w;
      g.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.x[n / 2] = 0.0;
    return cache.emplace(n, std::move(g)).first->second;
  }

  Complex Contour::integrate(const ScalarFunction& g) const
  {
    Complex sum = 0.0;
    for (const auto& node : nodes) sum += node.weight * g(node.lambda);
    return sum;
  }

  namespace
  {
    void panel_nodes(double theta, double r_lo, double r_hi, bool upper, int n, std::vector<ContourNode>& out)
    {
      const GaussLegendre& gl = gauss_legendre(n);
      const double a = std::log(r_lo);
      const double b = std::log(r_hi);
      const Complex dir = std::polar(1.0, upper ? theta : -theta);
      // inbound along the upper ray, outbound along the lower one
      const Complex orient = (upper ? -1.0 : 1.0) * dir * Complex(0.0, 1.0 / (2.0 * pi));
      for (int q = 0; q < n; ++q)
      {
        const double r = std::exp(0.5 * (a + b) + 0.5 * (b - a) * gl.x[q]);
        out.push_back({r * dir, orient * (0.5 * (b - a) * gl.w[q] * r)});
      }
    }
  }  // namespace

  Contour build_contour(const Sector& sector, std::span<const HFun> family, const ContourOptions& options)
  {
    if (family.empty()) throw DomainError("build_contour: empty function family");
    if (!(options.tol > 0.0)) throw DomainError("build_contour: tol must be positive");
    if (!(options.c0 > 0.0)) throw DomainError("build_contour: c0 must be positive");
    if (options.base_nodes < 1 || options.density < 1) throw DomainError("build_contour: invalid node counts");
    double d = family[0].d;
    double cf = family[0].c_f;
    for (const auto& f : family)
    {
      if (!(f.d > 0.0)) throw DomainError("build_contour: d must be positive");
      d = std::min(d, f.d);
      cf = std::max(cf, f.c_f);
    }

    Contour c;
    c.theta = sector.theta();
    c.tol = options.tol;
    const double scale = cf * options.c0;
    // tails: c_f c0 r^{-d} / (d pi) and c_f c0 r^{d+1} / ((d+1) pi), each below tol / 4
    c.r_max = options.r_max ? *options.r_max : std::pow(4.0 * scale / (options.tol * d * pi), 1.0 / d);
    c.r_min = options.r_min ? *options.r_min
                            : std::pow(options.tol * (d + 1.0) * pi / (4.0 * scale), 1.0 / (d + 1.0));
    if (!(c.r_min > 0.0) || !(c.r_max > 0.0)) throw DomainError("build_contour: radii must be positive");
    if (c.r_min > c.r_max) throw DomainError("build_contour: r_min exceeds r_max");
    c.tail_bound = scale * std::pow(c.r_max, -d) / (d * pi);
    c.near_zero_bound = scale * std::pow(c.r_min, d + 1.0) / ((d + 1.0) * pi);

    std::vector<Complex> probes = options.probes;
    if (probes.empty()) probes.push_back(1.0);
    for (const Complex z : probes)
      if (sector.contains(z)) throw DomainError("build_contour: probe points must lie outside Lambda");

    std::vector<ContourNode> trial;
    auto panel_values = [&](double lo, double hi, bool upper, int n)
    {
      trial.clear();
      panel_nodes(c.theta, lo, hi, upper, n, trial);
      std::vector<Complex> v(family.size() * probes.size(), 0.0);
      for (const auto& node : trial)
        for (std::size_t m = 0; m < family.size(); ++m)
        {
          const Complex fl = node.weight * family[m](node.lambda);
          for (std::size_t p = 0; p < probes.size(); ++p) v[m * probes.size() + p] += fl / (probes[p] - node.lambda);
        }
      return v;
    };

    // initial panels end at powers 10^{4j}; each is bisected in log r until the n-point rule
    // agrees with the 2n-point rule to its share of tol / 4 (shares proportional to log-length),
    // and the n-point rule is kept
    const double u_lo = std::log10(c.r_min);
    const double u_hi = std::log10(c.r_max);
    std::vector<double> cuts{u_lo};
    for (double u = 4.0 * std::floor(u_lo / 4.0) + 4.0; u < u_hi - 1e-9; u += 4.0)
      if (u > u_lo + 1e-9) cuts.push_back(u);
    cuts.push_back(u_hi);
    const double share = options.tol / (4.0 * 2.0 * std::max(u_hi - u_lo, 1e-12));
    const double min_width = 1.0 / 64.0;

    for (bool upper : {true, false})
    {
      std::vector<ContourNode> ray;
      std::vector<ContourPanel> ray_panels;
      std::vector<std::pair<double, double>> stack;
      for (std::size_t s = cuts.size() - 1; s > 0; --s) stack.emplace_back(cuts[s - 1], cuts[s]);
      while (!stack.empty())
      {
        const auto [a, b] = stack.back();
        stack.pop_back();
        const double lo = std::pow(10.0, a);
        const double hi = std::pow(10.0, b);
        const int n = options.base_nodes;
        const auto coarse = panel_values(lo, hi, upper, n);
        const auto fine = panel_values(lo, hi, upper, 2 * n);
        double diff = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) diff = std::max(diff, std::abs(fine[i] - coarse[i]));
        if (diff > share * (b - a))
        {
          if (b - a <= min_width)
            throw NumericalError("build_contour: tolerance unreachable within the node budget");
          const double mid = 0.5 * (a + b);
          stack.emplace_back(mid, b);
          stack.emplace_back(a, mid);
          continue;
        }
        const int used = n * options.density;
        panel_nodes(c.theta, lo, hi, upper, used, ray);
        ray_panels.push_back({lo, hi, upper, used});
        if (static_cast<int>(ray.size()) > options.max_nodes)
          throw NumericalError("build_contour: tolerance unreachable within the node budget");
      }
      // the upper ray runs inward
      if (upper)
      {
        std::reverse(ray.begin(), ray.end());
        std::reverse(ray_panels.begin(), ray_panels.end());
      }
      c.nodes.insert(c.nodes.end(), ray.begin(), ray.end());
      c.panels.insert(c.panels.end(), ray_panels.begin(), ray_panels.end());
    }
    return c;
  }

  Contour build_contour(const Sector& sector, const HFun& f, const ContourOptions& options)
  {
    return build_contour(sector, std::span<const HFun>(&f, 1), options);
  }

  Complex cauchy_value(const Contour& contour, const HFun& f, Complex z0)
  {
    return contour.integrate([&](Complex l) { return f(l) / (z0 - l); });
  }

  ContourOptions oracle_options(ContourOptions options)
  {
    options.tol /= 10.0;
    options.density *= 4;
    return options;
  }

  std::vector<Complex> spectral_probes(double lo, double hi, int per_decade)
  {
    if (!(lo > 0.0 && hi >= lo && per_decade > 0)) throw DomainError("spectral_probes: invalid range");
    const int count = std::max(1, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)));
    std::vector<Complex> out;
    for (int j = 0; j <= count; ++j) out.push_back(lo * std::pow(hi / lo, static_cast<double>(j) / count));
    return out;
  }

}  // namespace hinf
