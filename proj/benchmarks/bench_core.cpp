// Micro benchmarks for the hot kernels.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "mars/markov/eigenpairs.hpp"
#include "mars/markov/stationary.hpp"
#include "mars/markov/transition.hpp"
#include "mars/mrp/count_law.hpp"
#include "mars/mrp/kernels.hpp"
#include "mars/random.hpp"
#include "mars/synth/sampling.hpp"

namespace {

using namespace mars;

SystemConfig regime(std::uint32_t n_b) {
  SystemConfig cfg;
  cfg.dead_time = 75e-9;
  cfg.signal = 8.2;
  cfg.background = 1.2;
  cfg.num_bins = n_b;
  return cfg;
}

void BM_PhiloxUniform(benchmark::State& state) {
  RandomStream rng(1, StreamPurpose::test, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxUniform);

void BM_Binomial(benchmark::State& state) {
  RandomStream rng(2, StreamPurpose::test, 0);
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synth::draw_binomial(n, 0.3, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Binomial)->Arg(8)->Arg(20)->Arg(60)->Arg(1000)->Arg(100000);

void BM_MultinomialDraw(benchmark::State& state) {
  const auto pdf = markov::stationary_pdf(markov::build_transition(regime(static_cast<std::uint32_t>(state.range(0)))));
  const synth::MultinomialSampler sampler(pdf.pi);
  std::vector<std::uint32_t> out(pdf.pi.size());
  RandomStream rng(3, StreamPurpose::test, 0);
  for (auto _ : state) {
    sampler.draw(1300, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MultinomialDraw)->Arg(1024)->Arg(4096);

void BM_LeftApply(benchmark::State& state) {
  const auto op = markov::build_transition(regime(static_cast<std::uint32_t>(state.range(0))));
  std::vector<double> v(op.size(), 1.0 / static_cast<double>(op.size()));
  std::vector<double> out(op.size());
  for (auto _ : state) {
    op.left_apply(v, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LeftApply)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

struct LagFixture {
  markov::TransitionOperator op;
  markov::TemporalPdf pdf;
  markov::EigenData eig;
  mrp::CenteredProjections proj;

  explicit LagFixture(std::uint32_t n_b) : op(markov::build_transition(regime(n_b))) {
    pdf = markov::stationary_pdf(op);
    const mrp::MomentKernels kernels(op);
    proj = mrp::centered_projections(pdf, kernels, mrp::effective_mean(pdf, kernels));
    eig = markov::leading_eigenpairs(op, pdf, 5);
  }
};

void BM_LagSumTruncated(benchmark::State& state) {
  const LagFixture f(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    const auto g = mrp::lag_covariances(f.op, f.proj, 6);
    benchmark::DoNotOptimize(std::accumulate(g.begin(), g.end(), 0.0) + mrp::spectral_tail(f.eig, f.proj, 6));
  }
}
BENCHMARK(BM_LagSumTruncated)->Arg(1024)->Arg(4096);

void BM_LagSumFull(benchmark::State& state) {
  const LagFixture f(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    const auto g = mrp::lag_covariances(f.op, f.proj, 200);
    benchmark::DoNotOptimize(std::accumulate(g.begin(), g.end(), 0.0));
  }
}
BENCHMARK(BM_LagSumFull)->Arg(1024)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
