#include "lluv/asymptotics.hpp"
#include <benchmark/benchmark.h>
#include <cmath>

namespace {

using namespace lluv;

RadialProfile gaussian() {
  return normalized(RadialProfile::sample([](double r) { return std::exp(-r * r); },
                                          uniform_grid(6.0, 400), 6.0));
}

void BM_AssembleTheta(benchmark::State& st) {
  const ShellQuadrature shell = build_shell(0.0, 4.0, static_cast<int>(st.range(0)));
  const ShellGeometry geom(shell);
  const RadialProfile phi = gaussian();
  AssemblyOptions opt;
  opt.verify_psd = false;
  for (auto _ : st)
    benchmark::DoNotOptimize(assemble_theta(phi, 2.0, geom, opt));
}
BENCHMARK(BM_AssembleTheta)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_XValues(benchmark::State& st) {
  const ShellQuadrature shell = build_shell(0.0, 4.0, static_cast<int>(st.range(0)));
  AssemblyOptions opt;
  opt.verify_psd = false;
  const ShellOperator A = assemble_theta(gaussian(), 2.0, shell, opt);
  for (auto _ : st)
    benchmark::DoNotOptimize(x_of(A, XOptions{false}));
  st.counters["dofs"] = static_cast<double>(A.dofs());
}
BENCHMARK(BM_XValues)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_XGradient(benchmark::State& st) {
  const ShellQuadrature shell = build_shell(0.0, 4.0, static_cast<int>(st.range(0)));
  AssemblyOptions opt;
  opt.verify_psd = false;
  const ShellOperator A = assemble_theta(gaussian(), 2.0, shell, opt);
  for (auto _ : st)
    benchmark::DoNotOptimize(x_with_gradient(A));
}
BENCHMARK(BM_XGradient)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_DenseX(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Eigen::MatrixXd A = random_psd(n, 7);
  const Eigen::VectorXd k = Eigen::VectorXd::LinSpaced(n, 0.5, 2.0);
  for (auto _ : st)
    benchmark::DoNotOptimize(x_of(A, k, XOptions{false}));
}
BENCHMARK(BM_DenseX)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_MinimizeF(benchmark::State& st) {
  FMinConfig cfg;
  cfg.grid_cells = static_cast<int>(st.range(0));
  for (auto _ : st)
    benchmark::DoNotOptimize(minimize_F(1.0, cfg));
}
BENCHMARK(BM_MinimizeF)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
