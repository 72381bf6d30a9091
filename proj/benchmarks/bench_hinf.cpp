#include "hinf/funcalc.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

namespace
{
  using namespace hinf;

  const Sector sector(pi / 2);

  const Parametrix& scene(int P)
  {
    static std::map<int, Parametrix> cache;
    auto it = cache.find(P);
    if (it == cache.end())
      it = cache
               .emplace(P, Parametrix(parse_symbol("(2+sin(x))*(1+xi^2)+5", 1), TorusGrid(1, P),
                               {3, 0.0, -1, sector.theta()}))
               .first;
    return it->second;
  }

  void BM_ParseSymbol(benchmark::State& state)
  {
    for (auto _ : state)
      benchmark::DoNotOptimize(parse_symbol("(2+sin(x))*(1+xi^2)+5*exp(i*cos(2*x))*bracket(xi)^-1.5", 1));
  }
  BENCHMARK(BM_ParseSymbol);

  void BM_Quantize(benchmark::State& state)
  {
    const TorusGrid g(1, static_cast<int>(state.range(0)));
    const GridSymbol a = sample(parse_symbol("(2+sin(x))*(1+xi^2)+5", 1), g);
    for (auto _ : state) benchmark::DoNotOptimize(quantize(a));
  }
  BENCHMARK(BM_Quantize)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

  void BM_ComposeExact(benchmark::State& state)
  {
    const TorusGrid g(1, static_cast<int>(state.range(0)));
    const GridSymbol a = sample(parse_symbol("(2+sin(x))*(1+xi^2)+5", 1), g);
    const GridSymbol b = sample(parse_symbol("exp(i*cos(x))*bracket(xi)^-2", 1), g);
    for (auto _ : state) benchmark::DoNotOptimize(compose_exact(a, b));
  }
  BENCHMARK(BM_ComposeExact)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

  void BM_ParametrixSetup(benchmark::State& state)
  {
    const SymbolExpr a = parse_symbol("(2+sin(x))*(1+xi^2)+5", 1);
    const TorusGrid g(1, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(Parametrix(a, g, {3, 0.0, -1, sector.theta()}));
  }
  BENCHMARK(BM_ParametrixSetup)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

  void BM_bN(benchmark::State& state)
  {
    const Parametrix& engine = scene(static_cast<int>(state.range(0)));
    const Complex lambda = 100.0 * std::polar(1.0, sector.theta());
    for (auto _ : state) benchmark::DoNotOptimize(engine.bN(lambda));
  }
  BENCHMARK(BM_bN)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

  void BM_LeibnizResolvent(benchmark::State& state)
  {
    const Parametrix& engine = scene(128);
    const Complex lambda = static_cast<double>(state.range(0)) * std::polar(1.0, sector.theta());
    ResolventOptions o;
    o.symbols = false;
    for (auto _ : state) benchmark::DoNotOptimize(engine.resolvent(lambda, o));
  }
  BENCHMARK(BM_LeibnizResolvent)->Arg(1)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

  void BM_OracleNodeHessenberg(benchmark::State& state)
  {
    const HessenbergResolvent hr(scene(static_cast<int>(state.range(0))).quantized().matrix);
    const Complex lambda = 100.0 * std::polar(1.0, sector.theta());
    for (auto _ : state) benchmark::DoNotOptimize(hr.reduced(lambda));
  }
  BENCHMARK(BM_OracleNodeHessenberg)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

  void BM_OracleNodeDenseLU(benchmark::State& state)
  {
    const Matrix& A = scene(static_cast<int>(state.range(0))).quantized().matrix;
    const Complex lambda = 100.0 * std::polar(1.0, sector.theta());
    const Matrix I = Matrix::Identity(A.rows(), A.cols());
    for (auto _ : state) benchmark::DoNotOptimize(Matrix((A - lambda * I).partialPivLu().inverse()));
  }
  BENCHMARK(BM_OracleNodeDenseLU)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

  void BM_OperatorNorm(benchmark::State& state)
  {
    const Matrix& A = scene(static_cast<int>(state.range(0))).quantized().matrix;
    for (auto _ : state) benchmark::DoNotOptimize(operator_norm(A));
  }
  BENCHMARK(BM_OperatorNorm)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

  void BM_BuildContour(benchmark::State& state)
  {
    std::vector<HFun> fam;
    for (double s : {0.25, 0.5, 1.0, 2.0}) fam.push_back(s_power(s, sector));
    ContourOptions o;
    o.tol = std::pow(10.0, -static_cast<double>(state.range(0)));
    o.c0 = 1.5;
    o.probes = spectral_probes(6.0, 13000.0, 3);
    std::size_t nodes = 0;
    for (auto _ : state)
    {
      const Contour c = build_contour(sector, fam, o);
      nodes = c.nodes.size();
      benchmark::DoNotOptimize(nodes);
    }
    state.counters["nodes"] = static_cast<double>(nodes);
  }
  BENCHMARK(BM_BuildContour)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

  void BM_CheckSpectrum(benchmark::State& state)
  {
    const SymbolExpr a = parse_symbol("(2+sin(x))*(1+xi^2)+5", 1);
    const TorusGrid g(1, 128);
    for (auto _ : state) benchmark::DoNotOptimize(check_spectrum(a, sector, 0.5, 0.0, g));
  }
  BENCHMARK(BM_CheckSpectrum)->Unit(benchmark::kMillisecond);
}  // namespace

BENCHMARK_MAIN();
