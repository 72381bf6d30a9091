#include "config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace hinfcalc
{
  namespace
  {
    using nlohmann::json;

    void require_object(const json& j, const std::string& where)
    {
      if (!j.is_object()) throw ConfigError(where + ": expected an object");
    }

    // unknown keys are errors so that typos do not silently fall back to defaults
    void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where)
    {
      require_object(j, where);
      for (const auto& item : j.items())
      {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
      }
    }

    template <class T>
    void read(const json& j, const char* key, T& out, const std::string& where)
    {
      if (!j.contains(key)) return;
      try
      {
        out = j.at(key).get<T>();
      }
      catch (const json::exception&)
      {
        throw ConfigError(where + "." + key + ": wrong type");
      }
    }

    bool power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

    FunctionSpec parse_function(const json& j, const std::string& where)
    {
      FunctionSpec f;
      read(j, "type", f.type, where);
      if (f.type == "s_power")
      {
        only_keys(j, {"type", "s", "factor"}, where);
        read(j, "s", f.s, where);
        if (!(f.s > 0.0)) throw ConfigError(where + ".s: must be positive");
      }
      else if (f.type == "imaginary_power")
      {
        only_keys(j, {"type", "t", "n", "factor"}, where);
        read(j, "t", f.t, where);
        read(j, "n", f.n, where);
        if (!(f.n >= 1.0)) throw ConfigError(where + ".n: must be at least 1");
      }
      else if (f.type == "resolvent_probe")
      {
        only_keys(j, {"type", "mu", "factor"}, where);
        std::vector<double> mu{-10.0, 0.0};
        read(j, "mu", mu, where);
        if (mu.size() != 2) throw ConfigError(where + ".mu: expected [re, im]");
        f.mu = {mu[0], mu[1]};
      }
      else
        throw ConfigError(where + ".type: expected s_power, imaginary_power or resolvent_probe");
      read(j, "factor", f.factor, where);
      if (!std::isfinite(f.factor) || f.factor == 0.0) throw ConfigError(where + ".factor: must be finite and nonzero");
      return f;
    }

    void validate(RunConfig& c)
    {
      if (c.preset.empty() == c.expression.empty())
        throw ConfigError("symbol: give exactly one of 'preset' or 'expression'");
      if (c.n != 1 && c.n != 2) throw ConfigError("symbol.n: must be 1 or 2");
      if (c.k < 1 || c.k > 4) throw ConfigError("symbol.k: must be in 1..4");
      if (!(c.cls.delta >= 0.0 && c.cls.delta < c.cls.rho && c.cls.rho <= 1.0))
        throw ConfigError("symbol.class: require 0 <= delta < rho <= 1");
      if (!(c.cls.m >= 0.0)) throw ConfigError("symbol.class.m: must be >= 0");
      if (!(c.shift >= 0.0)) throw ConfigError("shift: must be >= 0");
      if (!(c.theta > 0.0 && c.theta < hinf::pi)) throw ConfigError("sector.theta: must lie in (0, pi)");
      if (!power_of_two(c.P) || c.P < 4) throw ConfigError("grid.P: must be a power of two >= 4");
      const long long dim = static_cast<long long>(c.k) * static_cast<long long>(std::pow(c.P, c.n));
      if (dim > 512) throw ConfigError("grid: k * P^n = " + std::to_string(dim) + " exceeds 512");
      if (c.N < 1) throw ConfigError("parametrix.N: must be >= 1");
      if (!(c.C >= 0.0)) throw ConfigError("parametrix.C: must be >= 0");
      if (!(c.hypo.c > 0.0) || !(c.hypo.C >= 0.0)) throw ConfigError("hypo: require c > 0 and C >= 0");
      if (c.hypo.max_order < 0 || c.hypo.per_decade < 1) throw ConfigError("hypo: invalid max_order or per_decade");
      if (!(c.contour.tol > 0.0) || !(c.contour.c0 > 0.0) || c.contour.nodes_per_panel < 1)
        throw ConfigError("contour: require tol > 0, c0 > 0, nodes_per_panel >= 1");
      const int auto_margin = std::min(16, c.P / 8);
      if (c.sweep.margin == -1) c.sweep.margin = auto_margin;
      if (c.seminorm_margin == -1) c.seminorm_margin = auto_margin;
      if (!(c.sweep.lo > 0.0 && c.sweep.hi > c.sweep.lo) || c.sweep.count < 2 || c.sweep.margin < 0 ||
          c.seminorm_margin < 0)
        throw ConfigError("sweep: require 0 < lo < hi, count >= 2, margins >= 0");
      if (c.sweep.margin >= c.P / 2 - 1 || c.seminorm_margin >= c.P / 2 - 1)
        throw ConfigError("margin leaves no interior window on this grid");
      if (!(c.bip.n_reg >= 1.0)) throw ConfigError("bip.n_reg: must be at least 1");
    }
  }  // namespace

  hinf::PresetSymbol RunConfig::symbol() const
  {
    hinf::PresetSymbol p;
    if (!preset.empty())
    {
      p = hinf::preset_symbol(preset, n);
      if (p.symbol.size() != k) throw ConfigError("symbol.k does not match preset '" + preset + "'");
    }
    else
    {
      p.symbol = hinf::parse_symbol(expression, n, k);
      p.cls = cls;
    }
    if (shift > 0.0) p.symbol = hinf::shift(p.symbol, shift);
    return p;
  }

  std::vector<hinf::HFun> RunConfig::functions() const
  {
    const hinf::Sector s = sector();
    std::vector<hinf::HFun> out;
    for (const auto& f : family)
    {
      hinf::HFun h;
      if (f.type == "s_power")
        h = hinf::s_power(f.s, s);
      else if (f.type == "imaginary_power")
        h = hinf::regularized_imaginary_power(f.t, f.n, s);
      else
        h = hinf::resolvent_probe(f.mu, s);
      out.push_back(f.factor == 1.0 ? h : hinf::scaled(h, f.factor));
    }
    return out;
  }

  RunConfig parse_config(const std::string& text)
  {
    json j;
    try
    {
      j = json::parse(text, nullptr, true, true);
    }
    catch (const json::parse_error& e)
    {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(j,
        {"symbol", "shift", "sector", "grid", "parametrix", "hypo", "contour", "family", "seminorm_margin", "sweep",
            "bip", "output"},
        "config");

    RunConfig c;
    if (!j.contains("symbol")) throw ConfigError("config: missing 'symbol'");
    const json& sym = j["symbol"];
    only_keys(sym, {"preset", "expression", "n", "k", "class"}, "symbol");
    read(sym, "preset", c.preset, "symbol");
    read(sym, "expression", c.expression, "symbol");
    read(sym, "n", c.n, "symbol");
    read(sym, "k", c.k, "symbol");
    if (sym.contains("class"))
    {
      only_keys(sym["class"], {"m", "rho", "delta"}, "symbol.class");
      read(sym["class"], "m", c.cls.m, "symbol.class");
      read(sym["class"], "rho", c.cls.rho, "symbol.class");
      read(sym["class"], "delta", c.cls.delta, "symbol.class");
    }
    read(j, "shift", c.shift, "config");

    if (j.contains("sector"))
    {
      only_keys(j["sector"], {"theta", "theta_over_pi"}, "sector");
      if (j["sector"].contains("theta_over_pi"))
      {
        double t = 0.5;
        read(j["sector"], "theta_over_pi", t, "sector");
        c.theta = t * hinf::pi;
      }
      read(j["sector"], "theta", c.theta, "sector");
    }
    if (j.contains("grid"))
    {
      only_keys(j["grid"], {"P", "Xi"}, "grid");
      read(j["grid"], "P", c.P, "grid");
      if (j["grid"].contains("Xi"))
      {
        int xi = 0;
        read(j["grid"], "Xi", xi, "grid");
        if (xi != c.P / 2 - 1) throw ConfigError("grid.Xi: must equal P/2 - 1");
      }
    }
    if (j.contains("parametrix"))
    {
      only_keys(j["parametrix"], {"N", "C"}, "parametrix");
      read(j["parametrix"], "N", c.N, "parametrix");
      read(j["parametrix"], "C", c.C, "parametrix");
    }
    if (j.contains("hypo"))
    {
      only_keys(j["hypo"], {"c", "C", "max_order", "per_decade"}, "hypo");
      read(j["hypo"], "c", c.hypo.c, "hypo");
      read(j["hypo"], "C", c.hypo.C, "hypo");
      read(j["hypo"], "max_order", c.hypo.max_order, "hypo");
      read(j["hypo"], "per_decade", c.hypo.per_decade, "hypo");
    }
    if (j.contains("contour"))
    {
      only_keys(j["contour"], {"tol", "c0", "nodes_per_panel"}, "contour");
      read(j["contour"], "tol", c.contour.tol, "contour");
      read(j["contour"], "c0", c.contour.c0, "contour");
      read(j["contour"], "nodes_per_panel", c.contour.nodes_per_panel, "contour");
    }
    if (j.contains("family"))
    {
      if (!j["family"].is_array()) throw ConfigError("family: expected an array");
      for (std::size_t i = 0; i < j["family"].size(); ++i)
        c.family.push_back(parse_function(j["family"][i], "family[" + std::to_string(i) + "]"));
    }
    else
      for (double s : {0.25, 0.5, 1.0, 2.0}) c.family.push_back({"s_power", s});
    read(j, "seminorm_margin", c.seminorm_margin, "config");
    if (j.contains("sweep"))
    {
      only_keys(j["sweep"], {"lo", "hi", "count", "margin", "left"}, "sweep");
      read(j["sweep"], "lo", c.sweep.lo, "sweep");
      read(j["sweep"], "hi", c.sweep.hi, "sweep");
      read(j["sweep"], "count", c.sweep.count, "sweep");
      read(j["sweep"], "margin", c.sweep.margin, "sweep");
      read(j["sweep"], "left", c.sweep.left, "sweep");
    }
    if (j.contains("bip"))
    {
      only_keys(j["bip"], {"t", "n_reg"}, "bip");
      read(j["bip"], "t", c.bip.t, "bip");
      read(j["bip"], "n_reg", c.bip.n_reg, "bip");
    }
    read(j, "output", c.output, "config");
    validate(c);
    return c;
  }

  RunConfig load_config(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
  }

}  // namespace hinfcalc
