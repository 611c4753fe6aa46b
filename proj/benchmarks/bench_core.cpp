#include <benchmark/benchmark.h>

#include "geomgan/data.hpp"
#include "geomgan/metrics.hpp"
#include "geomgan/trainer.hpp"

using namespace geomgan;

namespace {

AdversarialModel toy_model(std::size_t batch) {
  VariantSpec v;
  v.kind = VariantKind::geometric;
  MlpSpec disc = MlpSpec::dense({2, 128, 128, 128, 1}, Activation::relu, false);
  MlpSpec gen = MlpSpec::dense({4, 128, 128, 128, 2}, Activation::relu, true);
  return build_adversarial_model(v, disc, gen, batch, 0);
}

void bind_toy_batch(AdversarialModel& m, std::size_t batch) {
  GridMixtureSpec spec;
  RngStream data_rng(0, rng_streams::kDataBatch);
  RngStream latent_rng(0, rng_streams::kLatentTrain);
  m.graph.bind("x", sample_grid_mixture(spec, batch, data_rng));
  m.graph.bind("z", sample_latent(batch, 4, latent_rng));
}

}  // namespace

static void BM_DiscriminatorForward(benchmark::State& state) {
  auto batch = static_cast<std::size_t>(state.range(0));
  AdversarialModel m = toy_model(batch);
  bind_toy_batch(m, batch);
  for (auto _ : state) {
    const Array& loss = m.graph.forward(m.losses.d_loss);
    benchmark::DoNotOptimize(loss.data[0]);
  }
}
BENCHMARK(BM_DiscriminatorForward)->Arg(100)->Arg(500);

static void BM_DiscriminatorStepGradients(benchmark::State& state) {
  auto batch = static_cast<std::size_t>(state.range(0));
  AdversarialModel m = toy_model(batch);
  bind_toy_batch(m, batch);
  for (auto _ : state) {
    m.graph.forward(m.losses.d_loss);
    m.graph.backward(m.losses.d_loss);
    benchmark::DoNotOptimize(m.graph.param_grad("d.L0.w").data[0]);
  }
}
BENCHMARK(BM_DiscriminatorStepGradients)->Arg(100)->Arg(500);

static void BM_GeneratorStepGradients(benchmark::State& state) {
  auto batch = static_cast<std::size_t>(state.range(0));
  AdversarialModel m = toy_model(batch);
  bind_toy_batch(m, batch);
  for (auto _ : state) {
    m.graph.forward(m.losses.g_loss);
    m.graph.backward(m.losses.g_loss);
    benchmark::DoNotOptimize(m.graph.param_grad("g.L0.w").data[0]);
  }
}
BENCHMARK(BM_GeneratorStepGradients)->Arg(100)->Arg(500);

static void BM_RmspropStep(benchmark::State& state) {
  AdversarialModel m = toy_model(500);
  bind_toy_batch(m, 500);
  m.graph.forward(m.losses.d_loss);
  m.graph.backward(m.losses.d_loss);
  std::vector<ParamEntry> scope;
  for (const auto& e : m.graph.params().entries())
    if (e.partition != Partition::theta) scope.push_back(e);
  RmspropState st;
  for (auto _ : state) {
    rmsprop_step(m.graph, scope, st, 0.001, 0.9, 1e-8);
    benchmark::DoNotOptimize(m.graph.param_value("d.L0.w").data[0]);
  }
}
BENCHMARK(BM_RmspropStep);

static void BM_GridMixtureSampler(benchmark::State& state) {
  GridMixtureSpec spec;
  RngStream rng(0, rng_streams::kDataPool);
  for (auto _ : state) {
    Array batch = sample_grid_mixture(spec, 500, rng);
    benchmark::DoNotOptimize(batch.data[0]);
  }
}
BENCHMARK(BM_GridMixtureSampler);

static void BM_ModeCoverage(benchmark::State& state) {
  GridMixtureSpec spec;
  RngStream rng(0, rng_streams::kDataPool);
  Array samples = sample_grid_mixture(spec, 2500, rng);
  for (auto _ : state) {
    ModeReport rep = mode_coverage(samples, spec, 3.0, 5);
    benchmark::DoNotOptimize(rep.covered_modes);
  }
}
BENCHMARK(BM_ModeCoverage);

BENCHMARK_MAIN();
